#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "sym_field.hpp"

namespace mroot {

/// A homogeneous polynomial in y with numeric coefficients: the field
/// frozen at one base point, or one of its x-derivatives.
struct HomogeneousForm {
  struct Monomial {
    std::vector<unsigned> exponents;
    double coeff;
  };
  std::size_t n = 0;
  std::vector<Monomial> terms;
};

/// A(x, .) as a form in y; coefficients include the multinomial weights.
inline HomogeneousForm form_at(const SymTensorField& field, std::span<const double> x) {
  field.box().require(x);
  HomogeneousForm f{field.dim(), {}};
  for (const auto& s : field.slots())
    f.terms.push_back({s.exponents, s.multiplicity * s.coeff.eval(x)});
  return f;
}

/// dA/dx^l (x, .) as a form in y.
inline HomogeneousForm dx_form_at(const SymTensorField& field, std::span<const double> x,
                                  std::size_t l) {
  field.box().require(x);
  HomogeneousForm f{field.dim(), {}};
  for (const auto& s : field.slots())
    if (!s.dx[l].is_zero()) f.terms.push_back({s.exponents, s.multiplicity * s.dx[l].eval(x)});
  return f;
}

/// All y-derivatives of a form up to a fixed order at one direction,
/// stored densely: order k holds n^k values, flat index i1 + n*i2 + ...
class YJet {
public:
  static constexpr std::size_t max_order = 5;

  YJet() = default;

  YJet(const HomogeneousForm& form, std::span<const double> y, std::size_t order)
      : n_(form.n), order_(order) {
    if (order_ > max_order) order_ = max_order;
    std::size_t size = 1;
    for (std::size_t k = 0; k <= order_; ++k) {
      d_[k].assign(size, 0.0);
      size *= n_;
    }
    std::vector<unsigned> counts(n_);
    std::vector<std::size_t> tuple;
    for (std::size_t k = 0; k <= order_; ++k) {
      const std::size_t total = d_[k].size();
      tuple.assign(k, 0);
      for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        std::fill(counts.begin(), counts.end(), 0u);
        for (std::size_t r = 0; r < k; ++r) {
          ++counts[rem % n_];
          rem /= n_;
        }
        double acc = 0.0;
        for (const auto& t : form.terms) acc += t.coeff * monomial_derivative(t.exponents, counts, y);
        d_[k][flat] = acc;
      }
    }
  }

  std::size_t dim() const noexcept { return n_; }
  std::size_t order() const noexcept { return order_; }

  template <class... I>
  double operator()(I... idx) const {
    constexpr std::size_t k = sizeof...(I);
    static_assert(k <= max_order);
    std::size_t flat = 0;
    std::size_t stride = 1;
    const std::array<std::size_t, k> ids{static_cast<std::size_t>(idx)...};
    for (std::size_t i : ids) {
      flat += i * stride;
      stride *= n_;
    }
    return d_[k][flat];
  }

  double value() const { return d_[0][0]; }

private:
  static double monomial_derivative(const std::vector<unsigned>& e,
                                    const std::vector<unsigned>& d,
                                    std::span<const double> y) {
    double v = 1.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (d[i] > e[i]) return 0.0;
      for (unsigned r = 0; r < d[i]; ++r) v *= static_cast<double>(e[i] - r);
      for (unsigned r = d[i]; r < e[i]; ++r) v *= y[i];
    }
    return v;
  }

  std::size_t n_ = 0;
  std::size_t order_ = 0;
  std::array<std::vector<double>, max_order + 1> d_;
};

}  // namespace mroot
