#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "errors.hpp"
#include "expr.hpp"

namespace mroot {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Closed axis-aligned box bounding the admissible base points.
class Box {
public:
  Box() = default;
  explicit Box(std::vector<Interval> sides) : sides_(std::move(sides)) {}

  std::size_t dim() const noexcept { return sides_.size(); }
  const Interval& operator[](std::size_t i) const { return sides_[i]; }

  bool contains(std::span<const double> x) const {
    if (x.size() != sides_.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (!(x[i] >= sides_[i].lo && x[i] <= sides_[i].hi)) return false;
    return true;
  }

  void require(std::span<const double> x) const {
    if (!contains(x))
      throw DomainError(fmt::format("point ({}) outside the domain box", fmt::join(x, ", ")));
  }

private:
  std::vector<Interval> sides_;
};

/// Sorted multi-index i1 <= ... <= im of a fully symmetric tensor entry.
class MultiIndex {
public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<std::size_t> indices) : idx_(std::move(indices)) {
    std::sort(idx_.begin(), idx_.end());
  }

  std::span<const std::size_t> indices() const noexcept { return idx_; }
  std::size_t degree() const noexcept { return idx_.size(); }

  /// Number of distinct orderings: m! / prod(repeat counts!).
  double multiplicity() const {
    double num = 1.0;
    std::size_t run = 0;
    for (std::size_t k = 0; k < idx_.size(); ++k) {
      num *= static_cast<double>(k + 1);
      run = (k > 0 && idx_[k] == idx_[k - 1]) ? run + 1 : 1;
      num /= static_cast<double>(run);
    }
    return num;
  }

  /// Exponent vector of the monomial y^{i1} ... y^{im}.
  std::vector<unsigned> exponents(std::size_t n) const {
    std::vector<unsigned> e(n, 0);
    for (auto i : idx_) ++e[i];
    return e;
  }

  auto operator<=>(const MultiIndex&) const = default;

private:
  std::vector<std::size_t> idx_;
};

/// Degree-m fully symmetric coefficient field a_{i1...im}(x) on a box.
/// Entries are stored on sorted multi-indices; absent entries are zero.
/// First x-derivatives of every entry are taken symbolically once, at
/// construction.
class SymTensorField {
public:
  SymTensorField(std::size_t n, std::size_t m, Box box, std::map<MultiIndex, Expr> entries)
      : n_(n), m_(m), box_(std::move(box)), entries_(std::move(entries)) {
    if (n_ < 1) throw UsageError("dimension n must be >= 1");
    if (m_ < 2) throw UsageError("degree m must be >= 2");
    if (box_.dim() != n_) throw UsageError("domain box dimension does not match n");
    for (auto it = entries_.begin(); it != entries_.end();) {
      const auto& mi = it->first;
      if (mi.degree() != m_) throw UsageError("multi-index degree does not match m");
      for (auto i : mi.indices())
        if (i >= n_) throw UsageError(fmt::format("index {} out of range 1..{}", i + 1, n_));
      if (it->second.arity() > n_) throw UsageError("entry references a coordinate beyond n");
      if (it->second.is_zero()) {
        it = entries_.erase(it);
        continue;
      }
      ++it;
    }
    for (const auto& [mi, e] : entries_) {
      Slot s{mi, mi.multiplicity(), mi.exponents(n_), e, {}};
      for (std::size_t l = 0; l < n_; ++l) s.dx.push_back(e.derivative(l));
      slots_.push_back(std::move(s));
    }
  }

  std::size_t dim() const noexcept { return n_; }
  std::size_t degree() const noexcept { return m_; }
  const Box& box() const noexcept { return box_; }
  const std::map<MultiIndex, Expr>& entries() const noexcept { return entries_; }

  /// Entry for the given indices in any order; the zero function if absent.
  Expr entry(std::span<const std::size_t> indices) const {
    const MultiIndex key(std::vector<std::size_t>(indices.begin(), indices.end()));
    auto it = entries_.find(key);
    return it == entries_.end() ? Expr::constant(0.0) : it->second;
  }

  double eval_coeff(const MultiIndex& idx, std::span<const double> x) const {
    box_.require(x);
    auto it = entries_.find(idx);
    return it == entries_.end() ? 0.0 : it->second.eval(x);
  }

  /// True when every entry is constant in x.
  bool x_constant() const {
    return std::all_of(slots_.begin(), slots_.end(), [](const Slot& s) {
      return std::all_of(s.dx.begin(), s.dx.end(), [](const Expr& d) { return d.is_zero(); });
    });
  }

  struct Slot {
    MultiIndex index;
    double multiplicity;
    std::vector<unsigned> exponents;
    Expr coeff;
    std::vector<Expr> dx;  // d coeff / dx^l
  };

  std::span<const Slot> slots() const noexcept { return slots_; }

private:
  std::size_t n_;
  std::size_t m_;
  Box box_;
  std::map<MultiIndex, Expr> entries_;
  std::vector<Slot> slots_;
};

}  // namespace mroot
