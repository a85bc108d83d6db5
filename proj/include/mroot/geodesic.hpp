#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "metric_eval.hpp"
#include "spray.hpp"

namespace mroot {

struct GeodesicSample {
  double t;
  Vec x;
  Vec y;
  double F;
};

struct GeodesicPath {
  std::vector<GeodesicSample> samples;
  double step = 0.0;
  bool exited = false;       // left the domain box or the admissible cone
  std::string exit_reason;
  double min_rcond = 1.0;    // smallest reciprocal condition of A_ij over the samples

  /// max |F - F(0)| / F(0) along the path.
  double speed_drift() const {
    if (samples.empty()) return 0.0;
    const double f0 = samples.front().F;
    double d = 0.0;
    for (const auto& s : samples) d = std::max(d, std::abs(s.F - f0) / f0);
    return d;
  }
};

/// Classical fourth-order Runge-Kutta for x' = y, y' = -2 G(x, y) with a
/// fixed step. Leaving the box or the A > 0 cone truncates the path at the
/// last complete step and sets `exited`; any other degeneracy is rethrown.
inline GeodesicPath integrate(const SymTensorField& field, const Vec& x0, const Vec& y0,
                              double t_end, std::size_t steps) {
  if (steps < 1) throw UsageError("geodesic integration needs steps >= 1");
  GeodesicPath path;
  path.step = t_end / static_cast<double>(steps);
  const double h = path.step;

  auto accel = [&](const Vec& x, const Vec& y) -> Vec { return -2.0 * spray(field, {x, y}); };

  auto sample = [&](double t, const Vec& x, const Vec& y) {
    const MetricEval ev = evaluate(field, {x, y});
    path.min_rcond = std::min(path.min_rcond, spd_rcond(ev.A_ij));
    path.samples.push_back({t, x, y, ev.F()});
  };

  Vec x = x0;
  Vec y = y0;
  sample(0.0, x, y);
  for (std::size_t s = 1; s <= steps; ++s) {
    try {
      const Vec k1x = y;
      const Vec k1y = accel(x, y);
      const Vec k2x = y + 0.5 * h * k1y;
      const Vec k2y = accel(x + 0.5 * h * k1x, k2x);
      const Vec k3x = y + 0.5 * h * k2y;
      const Vec k3y = accel(x + 0.5 * h * k2x, k3x);
      const Vec k4x = y + h * k3y;
      const Vec k4y = accel(x + h * k3x, k4x);
      const Vec xn = x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
      const Vec yn = y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
      sample(static_cast<double>(s) * h, xn, yn);
      x = xn;
      y = yn;
    } catch (const DomainError& e) {
      path.exited = true;
      path.exit_reason = e.what();
      break;
    } catch (const DegenerateMetric& e) {
      if (e.kind() != DegenerateMetric::Kind::nonpositive_A) throw;
      path.exited = true;
      path.exit_reason = e.what();
      break;
    }
  }
  return path;
}

}  // namespace mroot
