#pragma once

#include <cstddef>
#include <vector>

#include "metric_eval.hpp"
#include "poly.hpp"
#include "tensor.hpp"

namespace mroot {

/// Spray coefficients via the m-th root shortcut
/// G^i = 1/2 (A_{0j} - A_{x^j}) A^{ij}.
inline Vec spray_mroot(const MetricEval& ev) { return 0.5 * ev.A_inv * (ev.A0l - ev.A_xl); }

/// Spray coefficients from the variational formula
/// G^i = 1/4 g^{il} ([F^2]_{x^k y^l} y^k - [F^2]_{x^l}), with the F^2
/// derivatives expanded through A.
inline Vec spray_general(const MetricEval& ev) {
  const double m = static_cast<double>(ev.m);
  const double c = 2.0 / m;
  const Vec L_x = c * ev.apow(c - 1.0) * ev.A_xl;
  const Vec L_xy_y = c * ev.apow(c - 2.0) * ((c - 1.0) * ev.A0 * ev.A_i + ev.A * ev.A0l);
  return 0.25 * ev.g_inv * (L_xy_y - L_x);
}

inline Vec spray(const SymTensorField& field, const ProbePoint& p, const EvalOptions& opt = {}) {
  return spray_mroot(evaluate(field, p, opt));
}

/// d A^{ij} / dy^l = -A^{ia} A_{abl} A^{bj}.
inline Mat d_ainv_dy(const MetricEval& ev, std::size_t l) {
  return -ev.A_inv * ev.A_ijk[l] * ev.A_inv;
}

/// Spray with its y-derivatives through third order. B(i, j, k, l) is the
/// Berwald curvature d3 G^i / dy^j dy^k dy^l; E_jk = 1/2 B^m_{jkm}.
struct SprayEval {
  Vec G;
  Mat dG;          // dG(i, j) = dG^i / dy^j
  Tensor<3> d2G;   // d2G(i, j, k)
  Tensor<4> B;
  Mat E;
};

namespace detail {

inline Mat slice2(const YJet& a, std::size_t p) {
  const std::size_t n = a.dim();
  Mat r(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r(i, j) = a(i, j, p);
  return r;
}

inline Mat slice3(const YJet& a, std::size_t p, std::size_t q) {
  const std::size_t n = a.dim();
  Mat r(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r(i, j) = a(i, j, p, q);
  return r;
}

inline Mat slice4(const YJet& a, std::size_t p, std::size_t q, std::size_t s) {
  const std::size_t n = a.dim();
  Mat r(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r(i, j) = a(i, j, p, q, s);
  return r;
}

}  // namespace detail

/// Analytic spray jet. With M = (A_ij)^{-1} and N_j = A_{0j} - A_{x^j},
/// G = M N / 2; derivatives of M follow from dM = -M dH M applied
/// recursively (needs A through fifth order in y), derivatives of N from
/// the x-derivative forms through fourth order in y.
inline SprayEval spray_jet(const SymTensorField& field, const ProbePoint& p,
                           const EvalOptions& opt = {}) {
  const MetricEval ev = evaluate(field, p, opt);
  const std::size_t n = ev.n;
  const auto xs = as_span(p.x);
  const auto ys = as_span(p.y);

  const YJet a(form_at(field, xs), ys, 5);
  std::vector<YJet> q;
  q.reserve(n);
  for (std::size_t k = 0; k < n; ++k) q.emplace_back(dx_form_at(field, xs, k), ys, 4);

  const Mat& M = ev.A_inv;
  using Mats = std::vector<Mat>;
  using Vecs = std::vector<Vec>;
  auto idx2 = [n](std::size_t i, std::size_t j) { return i + n * j; };
  auto idx3 = [n](std::size_t i, std::size_t j, std::size_t k) { return i + n * (j + n * k); };

  Mats H1(n), H2(n * n), H3(n * n * n);
  for (std::size_t a1 = 0; a1 < n; ++a1) {
    H1[a1] = ev.A_ijk[a1];
    for (std::size_t b = 0; b < n; ++b) {
      H2[idx2(a1, b)] = detail::slice3(a, a1, b);
      for (std::size_t c = 0; c < n; ++c) H3[idx3(a1, b, c)] = detail::slice4(a, a1, b, c);
    }
  }

  Mats M1(n), M2(n * n), M3(n * n * n);
  for (std::size_t i = 0; i < n; ++i) M1[i] = -M * H1[i] * M;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      M2[idx2(i, j)] = -(M1[j] * H1[i] * M + M * H2[idx2(i, j)] * M + M * H1[i] * M1[j]);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        const Mat& Mjk = M2[idx2(j, k)];
        const Mat& Hij = H2[idx2(i, j)];
        const Mat& Hik = H2[idx2(i, k)];
        M3[idx3(i, j, k)] =
            -(Mjk * H1[i] * M + M1[j] * Hik * M + M1[j] * H1[i] * M1[k] +
              M1[k] * Hij * M + M * H3[idx3(i, j, k)] * M + M * Hij * M1[k] +
              M1[k] * H1[i] * M1[j] + M * Hik * M1[j] + M * H1[i] * Mjk);
      }

  Vec N0(n);
  Vecs N1(n, Vec(n)), N2(n * n, Vec(n)), N3(n * n * n, Vec(n));
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += ys[k] * q[k](j);
    N0(j) = s - q[j].value();
    for (std::size_t i = 0; i < n; ++i) {
      s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += ys[k] * q[k](j, i);
      N1[i](j) = q[i](j) + s - q[j](i);
      for (std::size_t b = 0; b < n; ++b) {
        s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += ys[k] * q[k](j, i, b);
        N2[idx2(i, b)](j) = q[i](j, b) + q[b](j, i) + s - q[j](i, b);
        for (std::size_t c = 0; c < n; ++c) {
          s = 0.0;
          for (std::size_t k = 0; k < n; ++k) s += ys[k] * q[k](j, i, b, c);
          N3[idx3(i, b, c)](j) =
              q[i](j, b, c) + q[b](j, i, c) + q[c](j, i, b) + s - q[j](i, b, c);
        }
      }
    }
  }

  SprayEval out;
  out.G = 0.5 * M * N0;
  out.dG.resize(n, n);
  out.d2G = Tensor<3>(n);
  out.B = Tensor<4>(n);
  for (std::size_t a1 = 0; a1 < n; ++a1) {
    const Vec g1 = 0.5 * (M1[a1] * N0 + M * N1[a1]);
    out.dG.col(a1) = g1;
    for (std::size_t b = 0; b < n; ++b) {
      const std::size_t ab = idx2(a1, b);
      const Vec g2 = 0.5 * (M2[ab] * N0 + M1[a1] * N1[b] + M1[b] * N1[a1] + M * N2[ab]);
      for (std::size_t i = 0; i < n; ++i) out.d2G(i, a1, b) = g2(i);
      for (std::size_t c = 0; c < n; ++c) {
        const std::size_t ac = idx2(a1, c);
        const std::size_t bc = idx2(b, c);
        const Vec g3 = 0.5 * (M3[idx3(a1, b, c)] * N0 + M2[ab] * N1[c] + M2[ac] * N1[b] +
                              M2[bc] * N1[a1] + M1[a1] * N2[bc] + M1[b] * N2[ac] +
                              M1[c] * N2[ab] + M * N3[idx3(a1, b, c)]);
        for (std::size_t i = 0; i < n; ++i) out.B(i, a1, b, c) = g3(i);
      }
    }
  }

  out.E = Mat::Zero(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += out.B(i, j, k, i);
      out.E(j, k) = 0.5 * s;
    }
  return out;
}

inline Tensor<4> berwald(const SymTensorField& field, const ProbePoint& p,
                         const EvalOptions& opt = {}) {
  return spray_jet(field, p, opt).B;
}

inline Mat mean_berwald(const SymTensorField& field, const ProbePoint& p,
                        const EvalOptions& opt = {}) {
  return spray_jet(field, p, opt).E;
}

/// True when A_ij at p is far enough from singular that the finite
/// difference stencil of berwald_fd stays inside the admissible cone.
inline bool well_conditioned(const SymTensorField& field, const ProbePoint& p,
                             double min_rcond = 1e-2) {
  try {
    return spd_rcond(evaluate(field, p).A_ij) >= min_rcond;
  } catch (const DegenerateMetric&) {
    return false;
  }
}

/// Nested central-difference oracle for the Berwald curvature: the
/// composition of three central differences in y with step h, refined once
/// by Richardson extrapolation (h, h/2). Default h = 1e-3 |y|.
/// If error_estimate is given, a second refinement from (h/2, h/4) is also
/// formed and max |difference| between the two is stored there.
inline Tensor<4> berwald_fd(const SymTensorField& field, const ProbePoint& p, double h = 0.0,
                            const EvalOptions& opt = {}, double* error_estimate = nullptr) {
  const std::size_t n = field.dim();
  if (h <= 0.0) h = 1e-3 * p.y.norm();

  auto nested = [&](double step) {
    Tensor<4> d(n);
    ProbePoint q = p;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = j; k < n; ++k)
        for (std::size_t l = k; l < n; ++l) {
          Vec acc = Vec::Zero(static_cast<Eigen::Index>(n));
          for (int s = 0; s < 8; ++s) {
            const double sj = (s & 1) ? -1.0 : 1.0;
            const double sk = (s & 2) ? -1.0 : 1.0;
            const double sl = (s & 4) ? -1.0 : 1.0;
            q.y = p.y;
            q.y(static_cast<Eigen::Index>(j)) += sj * step;
            q.y(static_cast<Eigen::Index>(k)) += sk * step;
            q.y(static_cast<Eigen::Index>(l)) += sl * step;
            acc += sj * sk * sl * spray(field, q, opt);
          }
          acc /= 8.0 * step * step * step;
          const std::size_t perm[6][3] = {{j, k, l}, {j, l, k}, {k, j, l},
                                          {k, l, j}, {l, j, k}, {l, k, j}};
          for (const auto& pr : perm)
            for (std::size_t i = 0; i < n; ++i)
              d(i, pr[0], pr[1], pr[2]) = acc(static_cast<Eigen::Index>(i));
        }
    return d;
  };

  auto richardson = [&](const Tensor<4>& coarse, const Tensor<4>& fine) {
    Tensor<4> out(n);
    for (std::size_t t = 0; t < out.size(); ++t)
      out.data()[t] = (4.0 * fine.data()[t] - coarse.data()[t]) / 3.0;
    return out;
  };

  const Tensor<4> fine = nested(0.5 * h);
  const Tensor<4> out = richardson(nested(h), fine);
  if (error_estimate) {
    const Tensor<4> finer = richardson(fine, nested(0.25 * h));
    double e = 0.0;
    for (std::size_t t = 0; t < out.size(); ++t)
      e = std::max(e, std::abs(out.data()[t] - finer.data()[t]));
    *error_estimate = e;
  }
  return out;
}

}  // namespace mroot
