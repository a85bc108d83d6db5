#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "mroot/mroot.hpp"

#ifndef MROOT_METRICS_DIR
#error "MROOT_METRICS_DIR must point at the metrics/ directory"
#endif

namespace mroot::corpus {

inline std::string metrics_path(const std::string& name) {
  return std::string(MROOT_METRICS_DIR) + "/" + name + ".metric";
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline MetricFile load(const std::string& name) {
  return parse_metric_file(read_text(metrics_path(name)));
}

inline constexpr std::uint64_t cubic_seed = 7;

/// Sparse cubic metric on R^3: a dominant diagonal y1^3 + y2^3 + y3^3 with
/// x-dependent weights, plus three seeded off-diagonal entries.
inline std::string random_cubic_text(std::uint64_t seed = cubic_seed) {
  std::mt19937_64 rng(seed);
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  auto coef = [&](double scale) { return std::round((2.0 * unit() - 1.0) * scale * 1000.0) / 1000.0; };

  std::string s = fmt::format("# Seeded sparse cubic metric (seed {}).\n", seed);
  s += "n = 3\nm = 3\nbox.1 = -0.5, 0.5\nbox.2 = -0.5, 0.5\nbox.3 = -0.5, 0.5\n";
  for (int i = 1; i <= 3; ++i)
    s += fmt::format("{0} {0} {0} : sum(1, mul({1}, x{2}))\n", i, coef(0.3), 1 + (i % 3));
  const char* off[] = {"1 1 2", "1 1 3", "1 2 2", "1 2 3", "1 3 3", "2 2 3", "2 3 3"};
  std::vector<int> pool = {0, 1, 2, 3, 4, 5, 6};
  for (int k = 0; k < 3; ++k) {
    const auto pick = static_cast<std::size_t>(rng() % pool.size());
    const int slot = pool[pick];
    pool.erase(pool.begin() + static_cast<long>(pick));
    s += fmt::format("{} : sum({}, mul({}, x{}))\n", off[slot], coef(0.08), coef(0.1),
                     1 + static_cast<int>(rng() % 3));
  }
  return s;
}

inline const std::vector<std::string>& corpus_names() {
  static const std::vector<std::string> names = {"euclid2", "euclid2_stretched", "quartic2",
                                                 "quartic2_scaled", "funk1", "hessian2", "cubic3"};
  return names;
}

/// Seeded probe set over the corpus metric `f`.
inline ProbeSet seeded_probes(const SymTensorField& f, std::size_t bases, std::size_t fan,
                              std::uint64_t seed = 11) {
  FanConfig cfg;
  cfg.seed = seed;
  cfg.base_points = bases;
  cfg.fan_size = fan;
  return make_probes(f, cfg);
}

}  // namespace mroot::corpus
