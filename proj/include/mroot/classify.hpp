#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include <fmt/format.h>

#include "metric_eval.hpp"
#include "probes.hpp"
#include "spray.hpp"
#include "tensor.hpp"

namespace mroot {

struct Tolerances {
  double identity = 1e-7;
  double fit = 1e-7;
  double c = 1e-6;
  double E = 1e-7;
};

/// Recovered 1-form theta_l(x), one vector per base point.
struct OneForm {
  std::vector<Vec> x;
  std::vector<Vec> theta;
};

/// Gamma^i_jk(y) = d2 G^i / dy^j dy^k sampled at the reference base point.
struct AntonelliConnection {
  Vec x_ref;
  std::vector<Vec> directions;
  std::vector<Tensor<3>> gamma;
};

struct IsotropicFit {
  Vec x;
  double c = 0.0;
  double fit_residual = 0.0;
  double E_norm = 0.0;
};

using VerdictPayload =
    std::variant<std::monostate, OneForm, AntonelliConnection, std::vector<IsotropicFit>>;

/// Named residual checked against a tolerance. Non-gating verdicts are
/// reported but do not decide the exit status.
struct Verdict {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  bool gating = true;
  std::vector<Residual> details;
  VerdictPayload payload;
};

inline Verdict make_verdict(std::string name, double residual, double tol, bool gating = true) {
  Verdict v;
  v.name = std::move(name);
  v.residual = residual;
  v.tolerance = tol;
  v.pass = residual <= tol;
  v.gating = gating;
  return v;
}

namespace detail {

template <class Fn>
void for_each_probe(const SymTensorField& field, const ProbeSet& probes, Fn&& fn) {
  for (const auto& b : probes)
    for (const auto& y : b.fan) fn(b, evaluate(field, {b.x, y}));
}

}  // namespace detail

/// Residual of the dual-flatness identity
///   A_{x^l} = (1 / 2A) [(2/m - 1) A_l A_0 + A A_{0l}],
/// max over probes and l of |r_l| / (1 + |A_{x^l}|).
inline Verdict dually_flat_residual(const SymTensorField& field, const ProbeSet& probes,
                                    double tol) {
  double worst = 0.0;
  detail::for_each_probe(field, probes, [&](const BaseProbes&, const MetricEval& ev) {
    const double c = 2.0 / static_cast<double>(ev.m) - 1.0;
    const Vec r = ev.A_xl - (c * ev.A_i * ev.A0 + ev.A * ev.A0l) / (2.0 * ev.A);
    for (Eigen::Index l = 0; l < r.size(); ++l)
      worst = std::max(worst, std::abs(r(l)) / (1.0 + std::abs(ev.A_xl(l))));
  });
  return make_verdict("dually_flat", worst, tol);
}

/// The defining form [F^2]_{x^k y^l} y^k - 2 [F^2]_{x^l}, each component
/// scaled by 1 + |2 [F^2]_{x^l}|.
inline Verdict dually_flat_raw(const SymTensorField& field, const ProbeSet& probes, double tol) {
  double worst = 0.0;
  detail::for_each_probe(field, probes, [&](const BaseProbes&, const MetricEval& ev) {
    const double c = 2.0 / static_cast<double>(ev.m);
    const Vec L_x = c * ev.apow(c - 1.0) * ev.A_xl;
    const Vec L_xy_y = c * (ev.apow(c - 2.0) * (c - 1.0) * ev.A0 * ev.A_i + ev.apow(c - 1.0) * ev.A0l);
    const Vec r = L_xy_y - 2.0 * L_x;
    for (Eigen::Index l = 0; l < r.size(); ++l)
      worst = std::max(worst, std::abs(r(l)) / (1.0 + 2.0 * std::abs(L_x(l))));
  });
  return make_verdict("dually_flat_raw", worst, tol);
}

/// Least-squares theta_l at one base point from A_0(x, y) = (theta . y) A(x, y)
/// over the fan. Throws UsageError when the fan does not determine theta.
inline Vec fit_theta(const SymTensorField& field, const BaseProbes& base) {
  const auto n = static_cast<Eigen::Index>(field.dim());
  const auto rows = static_cast<Eigen::Index>(base.fan.size());
  Mat lhs(rows, n);
  Vec rhs(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const MetricEval ev = evaluate(field, {base.x, base.fan[static_cast<std::size_t>(r)]});
    lhs.row(r) = ev.A * ev.y.transpose();
    rhs(r) = ev.A0;
  }
  Eigen::ColPivHouseholderQR<Mat> qr(lhs);
  if (rows < n || qr.rank() < n)
    throw UsageError(fmt::format("rank-deficient theta fit: {} directions of rank {} for n = {}",
                                 rows, qr.rank(), n));
  return qr.solve(rhs);
}

/// Fits theta at every base point, then checks both the fit A_0 = theta A
/// and the 1-form identity A_{x^l} = (1/3m) [2 theta A_l + m A theta_l].
/// Informational: theta need not exist when A is reducible (always possible
/// for m = 2), so this never gates on its own.
inline Verdict recover_theta(const SymTensorField& field, const ProbeSet& probes, double tol) {
  OneForm form;
  double fit = 0.0;
  double ident = 0.0;
  const double m = static_cast<double>(field.degree());
  for (const auto& b : probes) {
    const Vec theta = fit_theta(field, b);
    for (const auto& y : b.fan) {
      const MetricEval ev = evaluate(field, {b.x, y});
      const double th = theta.dot(ev.y);
      fit = std::max(fit, std::abs(ev.A0 - th * ev.A) / (1.0 + std::abs(ev.A0)));
      const Vec r = ev.A_xl - (2.0 * th * ev.A_i + m * ev.A * theta) / (3.0 * m);
      for (Eigen::Index l = 0; l < r.size(); ++l)
        ident = std::max(ident, std::abs(r(l)) / (1.0 + std::abs(ev.A_xl(l))));
    }
    form.x.push_back(b.x);
    form.theta.push_back(theta);
  }
  Verdict v = make_verdict("theta_form", std::max(fit, ident), tol, false);
  v.details = {{"theta_fit", fit}, {"theta_identity", ident}};
  v.payload = std::move(form);
  return v;
}

/// Riemannian (m = 2) case with a recovered theta:
///  (a) 3 d a_ij / dx^l = theta_l a_ij + theta_i a_lj + theta_j a_il,
///  (b) G^i = theta^i F^2 / 12 + (theta . y) y^i / 6, theta^i = 2 A^{ik} theta_k,
///      compared with the variational spray.
inline Verdict riemann_spray_form_check(const SymTensorField& field, const ProbeSet& probes,
                                       double tol) {
  if (field.degree() != 2) throw UsageError("the Riemannian spray form requires m = 2");
  const std::size_t n = field.dim();
  double coeff = 0.0;
  double spray_diff = 0.0;
  for (const auto& b : probes) {
    const Vec theta = fit_theta(field, b);
    const auto xs = as_span(b.x);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t l = 0; l < n; ++l) {
          const std::size_t ij[] = {i, j}, lj[] = {l, j}, il[] = {i, l};
          const double lhs = 3.0 * field.entry(ij).derivative(l).eval(xs);
          const double rhs = theta(static_cast<Eigen::Index>(l)) * field.entry(ij).eval(xs) +
                             theta(static_cast<Eigen::Index>(i)) * field.entry(lj).eval(xs) +
                             theta(static_cast<Eigen::Index>(j)) * field.entry(il).eval(xs);
          coeff = std::max(coeff, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
        }
    for (const auto& y : b.fan) {
      const MetricEval ev = evaluate(field, {b.x, y});
      const Vec theta_up = 2.0 * ev.A_inv * theta;
      const Vec G = theta_up * ev.F2() / 12.0 + theta.dot(ev.y) * ev.y / 6.0;
      const Vec direct = spray_general(ev);
      spray_diff = std::max(spray_diff, (G - direct).cwiseAbs().maxCoeff() /
                                            (1.0 + direct.cwiseAbs().maxCoeff()));
    }
  }
  Verdict v = make_verdict("riemann_spray_form", std::max(coeff, spray_diff), tol, false);
  v.details = {{"coefficient_identity", coeff}, {"spray_form", spray_diff}};
  return v;
}

/// Directions of the first fan admissible at every base point.
inline std::vector<Vec> common_fan(const SymTensorField& field, const ProbeSet& probes) {
  std::vector<Vec> fan;
  for (const auto& y : probes.front().fan) {
    bool ok = true;
    for (const auto& b : probes) ok = ok && admissible(field, b.x, y, 0.0);
    if (ok) fan.push_back(y);
  }
  return fan;
}

/// Antonelli test: (a) spray independent of x across base points;
/// (b) with Gamma = d2 G / dy dy at the first base point,
///     A_{x^l} = [Gamma^i_lk y^k + 1/2 Gamma^i_{jk,l} y^j y^k] A_i.
inline Verdict antonelli_residual(const SymTensorField& field, const ProbeSet& probes,
                                  double tol) {
  if (probes.size() < 2) throw UsageError("the Antonelli test needs at least 2 base points");
  const std::vector<Vec> fan = common_fan(field, probes);
  if (fan.empty()) throw UsageError("no direction is admissible at every base point");
  const std::size_t n = field.dim();

  double indep = 0.0;
  for (const auto& y : fan) {
    std::vector<Vec> G;
    double scale = 0.0;
    for (const auto& b : probes) {
      G.push_back(spray(field, {b.x, y}));
      scale = std::max(scale, G.back().cwiseAbs().maxCoeff());
    }
    for (std::size_t a = 0; a < G.size(); ++a)
      for (std::size_t c = a + 1; c < G.size(); ++c)
        indep = std::max(indep, (G[a] - G[c]).cwiseAbs().maxCoeff() / (1.0 + scale));
  }

  AntonelliConnection conn;
  conn.x_ref = probes.front().x;
  double ident = 0.0;
  for (const auto& y : fan) {
    const ProbePoint p{conn.x_ref, y};
    const SprayEval s = spray_jet(field, p);
    const MetricEval ev = evaluate(field, p);
    for (std::size_t l = 0; l < n; ++l) {
      double rhs = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double coef = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          coef += s.d2G(i, l, k) * y(static_cast<Eigen::Index>(k));
          for (std::size_t j = 0; j < n; ++j)
            coef += 0.5 * s.B(i, j, k, l) * y(static_cast<Eigen::Index>(j)) *
                    y(static_cast<Eigen::Index>(k));
        }
        rhs += coef * ev.A_i(static_cast<Eigen::Index>(i));
      }
      const double lhs = ev.A_xl(static_cast<Eigen::Index>(l));
      ident = std::max(ident, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
    }
    conn.directions.push_back(y);
    conn.gamma.push_back(s.d2G);
  }

  Verdict v = make_verdict("antonelli", std::max(indep, ident), tol);
  v.details = {{"x_independence", indep}, {"antonelli_identity", ident}};
  v.payload = std::move(conn);
  return v;
}

/// Max over probes of ||E||_inf / (1 + ||g||_inf).
inline Verdict weakly_berwald_check(const SymTensorField& field, const ProbeSet& probes,
                                    double tol) {
  double worst = 0.0;
  for (const auto& b : probes)
    for (const auto& y : b.fan) {
      const ProbePoint p{b.x, y};
      const Mat E = spray_jet(field, p).E;
      const Mat g = evaluate(field, p).g;
      worst = std::max(worst, E.cwiseAbs().maxCoeff() / (1.0 + g.cwiseAbs().maxCoeff()));
    }
  return make_verdict("weakly_berwald", worst, tol);
}

struct IsotropicResult {
  std::vector<IsotropicFit> fits;
  Verdict c_bound;  // max |c| over base points whose fit passed
  Verdict e_bound;  // max ||E|| over the same base points
};

/// Per base point, the least-squares c minimizing
/// sum_fan ||E - (n+1)/2 c F^{-1} h||_F^2, then the implication
/// "fit passes => c = 0 and E = 0". fit_residual is the RMS Frobenius
/// misfit over the fan. `inject_c` adds (n+1)/2 inject_c F^{-1} h to E
/// before fitting, for validating the harness.
inline IsotropicResult isotropic_fit_and_check(const SymTensorField& field,
                                                  const ProbeSet& probes, const Tolerances& tol,
                                                  double inject_c = 0.0) {
  const std::size_t n = field.dim();
  if (n < 2) throw UsageError("isotropic mean Berwald check requires n >= 2");
  const double k = 0.5 * static_cast<double>(n + 1);

  IsotropicResult out;
  double c_max = 0.0;
  double e_max = 0.0;
  for (const auto& b : probes) {
    if (b.fan.size() < n * (n + 1) / 2)
      throw UsageError(fmt::format("isotropic fit needs at least {} directions per base point",
                                   n * (n + 1) / 2));
    std::vector<Mat> Es, Ps;
    double num = 0.0;
    double den = 0.0;
    IsotropicFit fit;
    fit.x = b.x;
    for (const auto& y : b.fan) {
      const ProbePoint p{b.x, y};
      const MetricEval ev = evaluate(field, p);
      const Mat P = k / ev.F() * ev.h;
      Mat E = spray_jet(field, p).E;
      if (inject_c != 0.0) E += inject_c * P;
      num += (E.array() * P.array()).sum();
      den += P.squaredNorm();
      fit.E_norm = std::max(fit.E_norm, E.norm());
      Es.push_back(std::move(E));
      Ps.push_back(P);
    }
    fit.c = den > 0.0 ? num / den : 0.0;
    double ss = 0.0;
    for (std::size_t i = 0; i < Es.size(); ++i) ss += (Es[i] - fit.c * Ps[i]).squaredNorm();
    fit.fit_residual = std::sqrt(ss / static_cast<double>(Es.size()));
    if (fit.fit_residual <= tol.fit) {
      c_max = std::max(c_max, std::abs(fit.c));
      e_max = std::max(e_max, fit.E_norm);
    }
    out.fits.push_back(std::move(fit));
  }
  out.c_bound = make_verdict("isotropic_implies_c_zero", c_max, tol.c);
  out.e_bound = make_verdict("isotropic_implies_weakly_berwald", e_max, tol.E);
  out.c_bound.payload = out.fits;
  return out;
}

}  // namespace mroot
