#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "classify.hpp"
#include "geodesic.hpp"
#include "metric_file.hpp"
#include "report.hpp"

namespace mroot {

inline constexpr std::string_view tool_version = "1.0.0";

inline constexpr std::string_view command_names[] = {
    "identities",         "spray",          "curvature", "classify-dually-flat",
    "classify-antonelli", "classify-isotropic", "geodesic",  "report-all"};

enum ExitCode : int { exit_pass = 0, exit_verdict_failure = 1, exit_input_error = 2, exit_degenerate = 3 };

struct CommandOptions {
  std::optional<double> tol;
  std::optional<std::size_t> fan;
  std::optional<std::size_t> bases;
  std::optional<std::uint64_t> seed;
  // geodesic only
  std::optional<Vec> x0;
  std::optional<Vec> y0;
  double t_end = 1.0;
  std::size_t steps = 1000;
};

struct Report {
  Json doc;
  std::vector<Verdict> verdicts;
  std::string csv;  // geodesic samples
  int exit_code = exit_pass;
};

namespace detail {

struct Context {
  const MetricFile& file;
  const CommandOptions& opt;
  std::uint64_t seed;
  double tol;
  Tolerances tols;
  ProbeSet probes;
  bool explicit_probes;
};

inline Context make_context(const MetricFile& file, const CommandOptions& opt) {
  Context c{file, opt, opt.seed.value_or(file.config.seed), 0.0, {}, {}, false};
  c.tol = opt.tol ? *opt.tol : file.config.tol.value_or(Tolerances{}.identity);
  c.tols.identity = c.tol;
  if (!file.config.probes.empty()) {
    c.probes = group_probes(file.config.probes);
    c.explicit_probes = true;
  } else {
    FanConfig fc;
    fc.seed = c.seed;
    fc.fan_size = opt.fan ? *opt.fan : file.config.fan.value_or(0);
    fc.base_points = opt.bases ? *opt.bases : file.config.bases.value_or(8);
    c.probes = make_probes(file.field, fc);
  }
  return c;
}

inline void run_identities(Context& c, Report& r, Json& payload) {
  std::vector<Residual> worst;
  for_each_probe(c.file.field, c.probes, [&](const BaseProbes&, const MetricEval& ev) {
    const auto res = euler_report(ev);
    if (worst.empty()) worst = res;
    for (std::size_t i = 0; i < res.size(); ++i)
      worst[i].value = std::max(worst[i].value, res[i].value);
  });
  Json maxes = Json::object();
  for (const auto& w : worst) {
    r.verdicts.push_back(make_verdict("identity." + w.name, w.value, c.tol));
    maxes[w.name] = w.value;
  }
  payload["probes"] = probe_count(c.probes);
  payload["max_residuals"] = maxes;
}

inline void run_spray(Context& c, Report& r, Json& payload) {
  double dual = 0.0;
  double homog = 0.0;
  Json samples = Json::array();
  for (const auto& b : c.probes) {
    for (std::size_t k = 0; k < b.fan.size(); ++k) {
      const MetricEval ev = evaluate(c.file.field, {b.x, b.fan[k]});
      const Vec g1 = spray_mroot(ev);
      const Vec g2 = spray_general(ev);
      const double scale = 1.0 + g1.cwiseAbs().maxCoeff();
      dual = std::max(dual, (g1 - g2).cwiseAbs().maxCoeff() / scale);
      const Vec g4 = spray(c.file.field, {b.x, 2.0 * b.fan[k]});
      homog = std::max(homog, (g4 - 4.0 * g1).cwiseAbs().maxCoeff() / (4.0 * scale));
      if (k == 0) {
        Json s;
        s["x"] = to_json(b.x);
        s["y"] = to_json(b.fan[k]);
        s["G_mroot"] = to_json(g1);
        s["G_general"] = to_json(g2);
        samples.push_back(s);
      }
    }
  }
  r.verdicts.push_back(make_verdict("spray_dual_route", dual, c.tol));
  r.verdicts.push_back(make_verdict("spray_homogeneity", homog, c.tol));
  payload["samples"] = samples;
}

inline constexpr double berwald_fd_tol = 1e-4;

inline void run_curvature(Context& c, Report& r, Json& payload) {
  const std::size_t n = c.file.field.dim();
  double sym = 0.0;
  double euler = 0.0;
  double fd = 0.0;
  std::size_t fd_probes = 0;
  Json samples = Json::array();
  for (const auto& b : c.probes) {
    bool sampled = false;
    for (std::size_t q = 0; q < b.fan.size(); ++q) {
      const ProbePoint p{b.x, b.fan[q]};
      const SprayEval s = spray_jet(c.file.field, p);
      const double scale = 1.0 + s.B.max_abs();
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t k = 0; k < n; ++k) {
            double contracted = 0.0;
            for (std::size_t l = 0; l < n; ++l) {
              contracted += s.B(i, j, k, l) * p.y(static_cast<Eigen::Index>(l));
              sym = std::max(sym, std::abs(s.B(i, j, k, l) - s.B(i, k, l, j)) / scale);
              sym = std::max(sym, std::abs(s.B(i, j, k, l) - s.B(i, k, j, l)) / scale);
            }
            euler = std::max(euler, std::abs(contracted) / scale);
          }
      double estimate = 0.0;
      Tensor<4> oracle;
      if (!sampled && well_conditioned(c.file.field, p))
        oracle = berwald_fd(c.file.field, p, 0.0, {}, &estimate);
      if (!sampled && oracle.size() > 0 && estimate <= berwald_fd_tol) {
        sampled = true;
        ++fd_probes;
        for (std::size_t t = 0; t < oracle.size(); ++t)
          fd = std::max(fd, std::abs(oracle.data()[t] - s.B.data()[t]));
        Json js;
        js["x"] = to_json(b.x);
        js["y"] = to_json(p.y);
        js["E"] = to_json(s.E);
        js["B_max_abs"] = s.B.max_abs();
        samples.push_back(js);
      }
    }
  }
  r.verdicts.push_back(make_verdict("berwald_symmetry", sym, c.tol));
  r.verdicts.push_back(make_verdict("berwald_euler", euler, c.tol));
  r.verdicts.push_back(make_verdict("berwald_fd_agreement", fd, berwald_fd_tol));
  payload["fd_probes"] = fd_probes;
  payload["samples"] = samples;
}

inline void run_dually_flat(Context& c, Report& r, Json& payload) {
  const auto& f = c.file.field;
  r.verdicts.push_back(dually_flat_residual(f, c.probes, c.tol));
  r.verdicts.push_back(dually_flat_raw(f, c.probes, c.tol));
  Verdict th = recover_theta(f, c.probes, c.tols.fit);
  Json thetas = Json::array();
  const auto& form = std::get<OneForm>(th.payload);
  for (std::size_t i = 0; i < form.x.size(); ++i) {
    Json t;
    t["x"] = to_json(form.x[i]);
    t["theta"] = to_json(form.theta[i]);
    thetas.push_back(t);
  }
  payload["theta"] = thetas;
  r.verdicts.push_back(std::move(th));
  if (f.degree() == 2) r.verdicts.push_back(riemann_spray_form_check(f, c.probes, c.tol));
}

inline void run_antonelli(Context& c, Report& r, Json& payload) {
  Verdict v = antonelli_residual(c.file.field, c.probes, c.tol);
  const auto& conn = std::get<AntonelliConnection>(v.payload);
  const std::size_t n = c.file.field.dim();
  payload["x_ref"] = to_json(conn.x_ref);
  Json samples = Json::array();
  for (std::size_t d = 0; d < std::min<std::size_t>(3, conn.directions.size()); ++d) {
    Json g = Json::array();
    for (std::size_t i = 0; i < n; ++i) {
      Mat gi(n, n);
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) gi(j, k) = conn.gamma[d](i, j, k);
      g.push_back(to_json(gi));
    }
    Json s;
    s["y"] = to_json(conn.directions[d]);
    s["gamma"] = g;
    samples.push_back(s);
  }
  payload["gamma_samples"] = samples;
  r.verdicts.push_back(std::move(v));
}

inline void run_isotropic(Context& c, Report& r, Json& payload) {
  IsotropicResult res = isotropic_fit_and_check(c.file.field, c.probes, c.tols);
  Json fits = Json::array();
  for (const auto& f : res.fits) {
    Json j;
    j["x"] = to_json(f.x);
    j["c"] = f.c;
    j["fit_residual"] = f.fit_residual;
    j["E_norm"] = f.E_norm;
    fits.push_back(j);
  }
  payload["fits"] = fits;
  r.verdicts.push_back(std::move(res.c_bound));
  r.verdicts.push_back(std::move(res.e_bound));
  r.verdicts.push_back(weakly_berwald_check(c.file.field, c.probes, c.tol));
}

inline constexpr double geodesic_drift_tol = 1e-6;

inline void run_geodesic(Context& c, Report& r, Json& payload) {
  const auto& f = c.file.field;
  const std::size_t n = f.dim();
  Vec x0, y0;
  if (c.opt.x0 && c.opt.y0) {
    x0 = *c.opt.x0;
    y0 = *c.opt.y0;
  } else if (!c.file.config.probes.empty()) {
    x0 = c.file.config.probes.front().x;
    y0 = c.file.config.probes.front().y;
  } else {
    throw UsageError("geodesic needs --x0 and --y0 (or a probe line in the metric file)");
  }
  if (static_cast<std::size_t>(x0.size()) != n || static_cast<std::size_t>(y0.size()) != n)
    throw UsageError("--x0 and --y0 need n components");
  f.box().require(as_span(x0));

  const GeodesicPath path = integrate(f, x0, y0, c.opt.t_end, c.opt.steps);
  std::string csv = "t";
  for (std::size_t i = 1; i <= n; ++i) csv += fmt::format(",x{}", i);
  for (std::size_t i = 1; i <= n; ++i) csv += fmt::format(",y{}", i);
  csv += ",F\n";
  for (const auto& s : path.samples) {
    csv += fmt::format("{:.17g}", s.t);
    for (Eigen::Index i = 0; i < s.x.size(); ++i) csv += fmt::format(",{:.17g}", s.x(i));
    for (Eigen::Index i = 0; i < s.y.size(); ++i) csv += fmt::format(",{:.17g}", s.y(i));
    csv += fmt::format(",{:.17g}\n", s.F);
  }
  r.csv = std::move(csv);

  const double tol = c.opt.tol ? *c.opt.tol : geodesic_drift_tol;
  r.verdicts.push_back(make_verdict("speed_conservation", path.speed_drift(), tol));
  payload["x0"] = to_json(x0);
  payload["y0"] = to_json(y0);
  payload["t_end"] = c.opt.t_end;
  payload["steps"] = c.opt.steps;
  payload["samples"] = path.samples.size();
  payload["exited"] = path.exited;
  payload["exit_reason"] = path.exit_reason;
  payload["min_rcond"] = path.min_rcond;
  Json fin;
  fin["t"] = path.samples.back().t;
  fin["x"] = to_json(path.samples.back().x);
  fin["y"] = to_json(path.samples.back().y);
  fin["F"] = path.samples.back().F;
  payload["final"] = fin;
}

}  // namespace detail

/// Runs one command against a parsed metric file. Input problems surface as
/// ParseError / UsageError / DomainError and degeneracy as DegenerateMetric;
/// see exit_code_for.
inline Report run_command(std::string_view cmd, const MetricFile& file,
                          const CommandOptions& opt = {}) {
  if (std::find(std::begin(command_names), std::end(command_names), cmd) ==
      std::end(command_names))
    throw UsageError("unknown command '" + std::string(cmd) + "'");

  detail::Context c = detail::make_context(file, opt);
  Report r;
  Json payload = Json::object();

  if (cmd == "identities") {
    detail::run_identities(c, r, payload);
  } else if (cmd == "spray") {
    detail::run_spray(c, r, payload);
  } else if (cmd == "curvature") {
    detail::run_curvature(c, r, payload);
  } else if (cmd == "classify-dually-flat") {
    detail::run_dually_flat(c, r, payload);
  } else if (cmd == "classify-antonelli") {
    detail::run_antonelli(c, r, payload);
  } else if (cmd == "classify-isotropic") {
    detail::run_isotropic(c, r, payload);
  } else if (cmd == "geodesic") {
    detail::run_geodesic(c, r, payload);
  } else {
    Json sec = Json::object();
    detail::run_identities(c, r, sec["identities"]);
    detail::run_spray(c, r, sec["spray"]);
    detail::run_curvature(c, r, sec["curvature"]);
    detail::run_dually_flat(c, r, sec["dually_flat"]);
    if (c.probes.size() >= 2)
      detail::run_antonelli(c, r, sec["antonelli"]);
    else
      sec["antonelli"] = "skipped: needs at least 2 base points";
    if (file.field.dim() >= 2)
      detail::run_isotropic(c, r, sec["isotropic"]);
    else
      sec["isotropic"] = "skipped: needs n >= 2";
    payload = std::move(sec);
  }

  const bool ok = std::all_of(r.verdicts.begin(), r.verdicts.end(),
                              [](const Verdict& v) { return v.pass || !v.gating; });
  r.exit_code = ok ? exit_pass : exit_verdict_failure;

  Json& d = r.doc;
  d["tool"] = "mroot";
  d["version"] = std::string(tool_version);
  d["command"] = std::string(cmd);
  d["seed"] = c.seed;
  Json metric;
  metric["n"] = file.field.dim();
  metric["m"] = file.field.degree();
  metric["entries"] = file.field.entries().size();
  d["metric"] = metric;
  Json probes;
  probes["explicit"] = c.explicit_probes;
  probes["base_points"] = c.probes.size();
  probes["directions"] = probe_count(c.probes);
  d["probes"] = probes;
  Json verdicts = Json::array();
  for (const auto& v : r.verdicts) verdicts.push_back(to_json(v));
  d["verdicts"] = verdicts;
  d["payload"] = payload;
  d["exit_code"] = r.exit_code;
  return r;
}

/// Exit status for an exception escaping run_command or the parser.
inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const DegenerateMetric*>(&e)) return exit_degenerate;
  return exit_input_error;
}

}  // namespace mroot
