#pragma once

#include <algorithm>
#include <cmath>
#include <iterator>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "metric_eval.hpp"

namespace mroot {

/// One base point with its fan of admissible directions.
struct BaseProbes {
  Vec x;
  std::vector<Vec> fan;
};

using ProbeSet = std::vector<BaseProbes>;

struct FanConfig {
  std::uint64_t seed = 1;
  std::size_t fan_size = 0;      // 0 selects 4 n^2
  std::size_t base_points = 8;
  double margin = 0.05;          // fraction of each box side kept clear
  double min_rcond = 1e-6;       // admissibility filter for fan directions
};

namespace detail {

inline double radical_inverse(std::uint64_t i, unsigned base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

inline unsigned nth_prime(std::size_t k) {
  static constexpr unsigned primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  return primes[k % std::size(primes)];
}

// Uniform double in [0, 1) from raw engine bits, identical on every
// standard library.
inline double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Halton sequence with a seeded Cranley-Patterson rotation.
class ShiftedHalton {
public:
  ShiftedHalton(std::size_t dim, std::mt19937_64& rng) : shift_(dim) {
    for (auto& s : shift_) s = unit(rng);
  }

  std::vector<double> operator()(std::uint64_t i) const {
    std::vector<double> u(shift_.size());
    for (std::size_t d = 0; d < u.size(); ++d) {
      const double v = radical_inverse(i, nth_prime(d)) + shift_[d];
      u[d] = v - std::floor(v);
    }
    return u;
  }

private:
  std::vector<double> shift_;
};

}  // namespace detail

inline std::size_t default_fan_size(std::size_t n) { return 4 * n * n; }

/// Seeded low-discrepancy base points in the interior of the box.
inline std::vector<Vec> base_points(const Box& box, std::size_t count, std::uint64_t seed,
                                    double margin = 0.05) {
  std::mt19937_64 rng(seed);
  const detail::ShiftedHalton seq(box.dim(), rng);
  std::vector<Vec> pts;
  for (std::size_t i = 0; i < count; ++i) {
    const auto u = seq(i + 1);
    Vec x(static_cast<Eigen::Index>(box.dim()));
    for (std::size_t d = 0; d < box.dim(); ++d) {
      const double w = box[d].hi - box[d].lo;
      x(static_cast<Eigen::Index>(d)) = box[d].lo + w * (margin + (1.0 - 2.0 * margin) * u[d]);
    }
    pts.push_back(std::move(x));
  }
  return pts;
}

inline bool admissible(const SymTensorField& field, const Vec& x, const Vec& y, double min_rcond) {
  try {
    evaluate(field, {x, y}, {min_rcond});
    return true;
  } catch (const DegenerateMetric&) {
    return false;
  }
}

/// Up to `size` unit directions at x inside the admissible cone, drawn from
/// a seeded low-discrepancy sequence on the sphere. Gives up after a bounded
/// number of candidates, so the fan can come back short for thin cones.
inline std::vector<Vec> direction_fan(const SymTensorField& field, const Vec& x,
                                      std::size_t size, std::uint64_t seed,
                                      double min_rcond = 1e-6) {
  const std::size_t n = field.dim();
  std::mt19937_64 rng(seed);
  const detail::ShiftedHalton seq(n, rng);
  std::vector<Vec> fan;
  const std::uint64_t budget = 400 * static_cast<std::uint64_t>(size) + 1000;
  for (std::uint64_t i = 1; i <= budget && fan.size() < size; ++i) {
    const auto u = seq(i);
    Vec v(static_cast<Eigen::Index>(n));
    for (std::size_t d = 0; d < n; ++d) v(static_cast<Eigen::Index>(d)) = 2.0 * u[d] - 1.0;
    const double r = v.norm();
    if (r < 0.1 || r > 1.0) continue;
    v /= r;
    if (admissible(field, x, v, min_rcond)) fan.push_back(std::move(v));
  }
  return fan;
}

/// Base points with per-point direction fans, all derived from cfg.seed.
inline ProbeSet make_probes(const SymTensorField& field, const FanConfig& cfg) {
  const std::size_t fan_size = cfg.fan_size ? cfg.fan_size : default_fan_size(field.dim());
  ProbeSet set;
  std::mt19937_64 seeder(cfg.seed);
  const auto xs = base_points(field.box(), cfg.base_points, seeder(), cfg.margin);
  for (const auto& x : xs) set.push_back({x, direction_fan(field, x, fan_size, seeder(), cfg.min_rcond)});
  return set;
}

/// Groups explicit probes by base point, keeping first-seen order.
inline ProbeSet group_probes(const std::vector<ProbePoint>& probes) {
  ProbeSet set;
  for (const auto& p : probes) {
    auto it = std::find_if(set.begin(), set.end(), [&](const BaseProbes& b) { return b.x == p.x; });
    if (it == set.end()) {
      set.push_back({p.x, {}});
      it = std::prev(set.end());
    }
    it->fan.push_back(p.y);
  }
  return set;
}

inline std::size_t probe_count(const ProbeSet& set) {
  std::size_t c = 0;
  for (const auto& b : set) c += b.fan.size();
  return c;
}

}  // namespace mroot
