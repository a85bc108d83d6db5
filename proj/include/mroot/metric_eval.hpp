#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "errors.hpp"
#include "poly.hpp"
#include "sym_field.hpp"

namespace mroot {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Base point x and direction y.
struct ProbePoint {
  Vec x;
  Vec y;
};

struct EvalOptions {
  // Probes whose (A_ij) has reciprocal condition number below this are
  // rejected as degenerate.
  double min_rcond = 1e-12;
};

/// Reciprocal spectral condition number of a symmetric matrix; 0 when it
/// is not positive definite.
inline double spd_rcond(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  if (ev.size() == 0 || ev(0) <= 0.0) return 0.0;
  return ev(0) / ev(ev.size() - 1);
}

/// Everything the m-th root formulas need at one probe point.
struct MetricEval {
  std::size_t n = 0;
  std::size_t m = 0;
  Vec x;
  Vec y;

  double A = 0.0;
  Vec A_i;                   // dA/dy^i
  Mat A_ij;                  // d2A/dy^i dy^j
  std::vector<Mat> A_ijk;    // A_ijk[k](i, j)
  Vec A_xl;                  // dA/dx^l
  Mat A_xy;                  // A_xy(l, k) = d2A / dx^k dy^l
  double A0 = 0.0;           // A_{x^k} y^k
  Vec A0l;                   // A_{x^k y^l} y^k
  Mat g;
  Mat g_inv;
  Mat A_inv;                 // (A_ij)^{-1}
  Vec y_low;                 // g_ij y^j
  Mat h;

  double F() const { return std::exp(std::log(A) / static_cast<double>(m)); }
  double F2() const { return apow(2.0 / static_cast<double>(m)); }

  /// A^p on the A > 0 cone.
  double apow(double p) const { return std::exp(p * std::log(A)); }
};

inline Vec to_vec(std::span<const double> v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::span<const double> as_span(const Vec& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

/// Fundamental tensor g_ij = A^{2/m-2}/m^2 [m A A_ij + (2-m) A_i A_j].
inline Mat fundamental_tensor(const MetricEval& ev) {
  const double m = static_cast<double>(ev.m);
  return ev.apow(2.0 / m - 2.0) / (m * m) *
         (m * ev.A * ev.A_ij + (2.0 - m) * ev.A_i * ev.A_i.transpose());
}

/// g^{ij} = A^{-2/m} [m A A^{ij} + (m-2)/(m-1) y^i y^j].
inline Mat metric_inverse(const MetricEval& ev) {
  const double m = static_cast<double>(ev.m);
  return ev.apow(-2.0 / m) * (m * ev.A * ev.A_inv + (m - 2.0) / (m - 1.0) * ev.y * ev.y.transpose());
}

/// Angular metric h_ij = A^{2/m-2}/m^2 [m A A_ij + (1-m) A_i A_j].
inline Mat angular_metric(const MetricEval& ev) {
  const double m = static_cast<double>(ev.m);
  return ev.apow(2.0 / m - 2.0) / (m * m) *
         (m * ev.A * ev.A_ij + (1.0 - m) * ev.A_i * ev.A_i.transpose());
}

/// Evaluates A, its y-derivatives through third order, the mixed
/// x/y-derivatives and the derived tensors at p.
///
/// Throws DomainError when x leaves the box and DegenerateMetric when the
/// probe is outside the admissible cone.
inline MetricEval evaluate(const SymTensorField& field, const ProbePoint& p,
                           const EvalOptions& opt = {}) {
  const std::size_t n = field.dim();
  if (static_cast<std::size_t>(p.x.size()) != n || static_cast<std::size_t>(p.y.size()) != n)
    throw UsageError("probe dimension does not match the metric");
  if (p.y.norm() == 0.0)
    throw DegenerateMetric(DegenerateMetric::Kind::zero_direction, "direction y must be nonzero");

  MetricEval ev;
  ev.n = n;
  ev.m = field.degree();
  ev.x = p.x;
  ev.y = p.y;

  const auto xs = as_span(p.x);
  const auto ys = as_span(p.y);
  const YJet a(form_at(field, xs), ys, 3);

  ev.A = a.value();
  if (!(ev.A > 0.0))
    throw DegenerateMetric(DegenerateMetric::Kind::nonpositive_A,
                           fmt::format("outside admissible cone: A = {:.6g} <= 0", ev.A));

  ev.A_i.resize(n);
  ev.A_ij.resize(n, n);
  ev.A_ijk.assign(n, Mat(n, n));
  for (std::size_t i = 0; i < n; ++i) {
    ev.A_i(i) = a(i);
    for (std::size_t j = 0; j < n; ++j) {
      ev.A_ij(i, j) = a(i, j);
      for (std::size_t k = 0; k < n; ++k) ev.A_ijk[k](i, j) = a(i, j, k);
    }
  }

  const double rcond = spd_rcond(ev.A_ij);
  Eigen::LLT<Mat> llt(ev.A_ij);
  if (llt.info() != Eigen::Success || rcond < opt.min_rcond)
    throw DegenerateMetric(
        DegenerateMetric::Kind::singular_hessian,
        fmt::format("(A_ij) not positive definite (rcond = {:.3g})", rcond), rcond);
  ev.A_inv = llt.solve(Mat::Identity(n, n));

  ev.A_xl.resize(n);
  ev.A_xy.resize(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const YJet q(dx_form_at(field, xs, k), ys, 1);
    ev.A_xl(k) = q.value();
    for (std::size_t l = 0; l < n; ++l) ev.A_xy(l, k) = q(l);
  }
  ev.A0 = ev.A_xl.dot(ev.y);
  ev.A0l = ev.A_xy * ev.y;

  ev.g = fundamental_tensor(ev);
  if (Eigen::LLT<Mat>(ev.g).info() != Eigen::Success)
    throw DegenerateMetric(DegenerateMetric::Kind::indefinite_g,
                           "fundamental tensor not positive definite", spd_rcond(ev.g));
  ev.g_inv = metric_inverse(ev);
  ev.y_low = ev.g * ev.y;
  ev.h = angular_metric(ev);
  return ev;
}

struct Residual {
  std::string name;
  double value;
};

/// Residuals of the m-th root identity block, each normalized by (1 + |A|):
/// Euler relations for A_i and A_ij, the lowered direction y_i, the three
/// contractions of A^{ij}, and g^{ik} g_kj = delta. Works from the stored
/// fields of ev, so a corrupted MetricEval shows up here.
inline std::vector<Residual> euler_report(const MetricEval& ev) {
  const double m = static_cast<double>(ev.m);
  const double scale = 1.0 + std::abs(ev.A);
  const auto n = static_cast<Eigen::Index>(ev.n);
  const Mat id = Mat::Identity(n, n);
  auto maxabs = [](const auto& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; };

  std::vector<Residual> r;
  r.push_back({"euler_gradient", std::abs(ev.y.dot(ev.A_i) - m * ev.A) / scale});
  r.push_back({"euler_hessian", maxabs(Vec(ev.A_ij * ev.y - (m - 1.0) * ev.A_i)) / scale});
  r.push_back({"lowered_direction",
               maxabs(Vec(ev.y_low - ev.apow(2.0 / m - 1.0) / m * ev.A_i)) / scale});
  r.push_back({"ainv_hessian", maxabs(Mat(ev.A_inv * ev.A_ij - id)) / scale});
  r.push_back({"ainv_gradient", maxabs(Vec(ev.A_inv * ev.A_i - ev.y / (m - 1.0))) / scale});
  r.push_back({"ainv_quadratic",
               std::abs(ev.A_i.dot(ev.A_inv * ev.A_i) - m * ev.A / (m - 1.0)) / scale});
  r.push_back({"metric_inverse", maxabs(Mat(ev.g_inv * ev.g - id)) / scale});
  return r;
}

}  // namespace mroot
