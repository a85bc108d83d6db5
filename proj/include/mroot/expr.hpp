#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "errors.hpp"

namespace mroot {

/// Immutable closed-form scalar function of the base-point coordinates x.
///
/// Vocabulary: constants, coordinates, sums, products, non-negative integer
/// powers, exp and reciprocal. The set is closed under d/dx^l, so every
/// derivative is again an Expr. Nodes are shared and never mutated, so
/// copies are cheap and concurrent evaluation is safe.
class Expr {
public:
  enum class Kind { constant, coordinate, sum, product, power, exp, recip };

  Expr() : Expr(constant(0.0)) {}

  static Expr constant(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::constant;
    n->value = v;
    return Expr(std::move(n));
  }

  static Expr coordinate(std::size_t index) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::coordinate;
    n->index = index;
    return Expr(std::move(n));
  }

  static Expr sum(std::vector<Expr> terms) {
    std::vector<Expr> kept;
    double folded = 0.0;
    for (auto& t : terms) {
      if (t.kind() == Kind::constant)
        folded += t.value();
      else if (t.kind() == Kind::sum)
        kept.insert(kept.end(), t.children().begin(), t.children().end());
      else
        kept.push_back(std::move(t));
    }
    if (folded != 0.0) kept.push_back(constant(folded));
    if (kept.empty()) return constant(0.0);
    if (kept.size() == 1) return kept.front();
    return make_nary(Kind::sum, std::move(kept));
  }

  static Expr product(std::vector<Expr> factors) {
    std::vector<Expr> kept;
    double folded = 1.0;
    for (auto& f : factors) {
      if (f.kind() == Kind::constant)
        folded *= f.value();
      else if (f.kind() == Kind::product)
        kept.insert(kept.end(), f.children().begin(), f.children().end());
      else
        kept.push_back(std::move(f));
    }
    if (folded == 0.0) return constant(0.0);
    if (kept.empty()) return constant(folded);
    if (folded != 1.0) kept.insert(kept.begin(), constant(folded));
    if (kept.size() == 1) return kept.front();
    return make_nary(Kind::product, std::move(kept));
  }

  static Expr power(Expr base, unsigned exponent) {
    if (exponent == 0) return constant(1.0);
    if (exponent == 1) return base;
    if (base.kind() == Kind::constant)
      return constant(std::pow(base.value(), static_cast<double>(exponent)));
    auto n = std::make_shared<Node>();
    n->kind = Kind::power;
    n->exponent = exponent;
    n->children.push_back(std::move(base));
    return Expr(std::move(n));
  }

  static Expr exp(Expr arg) {
    if (arg.kind() == Kind::constant) return constant(std::exp(arg.value()));
    return make_unary(Kind::exp, std::move(arg));
  }

  static Expr recip(Expr arg) {
    if (arg.kind() == Kind::constant && arg.value() != 0.0)
      return constant(1.0 / arg.value());
    return make_unary(Kind::recip, std::move(arg));
  }

  static Expr difference(Expr a, Expr b) {
    return sum({std::move(a), product({constant(-1.0), std::move(b)})});
  }

  Kind kind() const noexcept { return node_->kind; }
  double value() const noexcept { return node_->value; }
  std::size_t index() const noexcept { return node_->index; }
  unsigned exponent() const noexcept { return node_->exponent; }
  std::span<const Expr> children() const noexcept { return node_->children; }

  bool is_zero() const noexcept {
    return kind() == Kind::constant && value() == 0.0;
  }

  /// Highest coordinate index referenced plus one (0 for constants).
  std::size_t arity() const {
    if (kind() == Kind::coordinate) return index() + 1;
    std::size_t a = 0;
    for (const auto& c : children()) a = std::max(a, c.arity());
    return a;
  }

  double eval(std::span<const double> x) const {
    switch (kind()) {
      case Kind::constant:
        return value();
      case Kind::coordinate:
        if (index() >= x.size())
          throw DomainError(fmt::format("coordinate x{} not available", index() + 1));
        return x[index()];
      case Kind::sum: {
        double s = 0.0;
        for (const auto& c : children()) s += c.eval(x);
        return s;
      }
      case Kind::product: {
        double p = 1.0;
        for (const auto& c : children()) p *= c.eval(x);
        return p;
      }
      case Kind::power: {
        const double b = children()[0].eval(x);
        double p = 1.0;
        for (unsigned k = 0; k < exponent(); ++k) p *= b;
        return p;
      }
      case Kind::exp: {
        const double v = std::exp(children()[0].eval(x));
        if (!std::isfinite(v)) throw DomainError("exp overflow");
        return v;
      }
      case Kind::recip: {
        const double d = children()[0].eval(x);
        if (d == 0.0) throw DomainError("reciprocal of zero");
        return 1.0 / d;
      }
    }
    return 0.0;
  }

  /// Exact symbolic partial derivative with respect to x^l (0-based).
  Expr derivative(std::size_t l) const {
    switch (kind()) {
      case Kind::constant:
        return constant(0.0);
      case Kind::coordinate:
        return constant(index() == l ? 1.0 : 0.0);
      case Kind::sum: {
        std::vector<Expr> terms;
        for (const auto& c : children()) terms.push_back(c.derivative(l));
        return sum(std::move(terms));
      }
      case Kind::product: {
        std::vector<Expr> terms;
        const auto kids = children();
        for (std::size_t i = 0; i < kids.size(); ++i) {
          Expr di = kids[i].derivative(l);
          if (di.is_zero()) continue;
          std::vector<Expr> factors(kids.begin(), kids.end());
          factors[i] = std::move(di);
          terms.push_back(product(std::move(factors)));
        }
        return sum(std::move(terms));
      }
      case Kind::power: {
        const Expr& u = children()[0];
        return product({constant(static_cast<double>(exponent())),
                        power(u, exponent() - 1), u.derivative(l)});
      }
      case Kind::exp:
        return product({*this, children()[0].derivative(l)});
      case Kind::recip:
        return product({constant(-1.0), power(*this, 2), children()[0].derivative(l)});
    }
    return constant(0.0);
  }

  /// Prefix-syntax rendering; parses back to an equivalent expression.
  std::string str() const {
    switch (kind()) {
      case Kind::constant:
        return fmt::format("{}", value());
      case Kind::coordinate:
        return fmt::format("x{}", index() + 1);
      case Kind::power:
        return fmt::format("pow({}, {})", children()[0].str(), exponent());
      case Kind::exp:
        return "exp(" + children()[0].str() + ")";
      case Kind::recip:
        return "recip(" + children()[0].str() + ")";
      case Kind::sum:
      case Kind::product: {
        std::string s = kind() == Kind::sum ? "sum(" : "mul(";
        for (std::size_t i = 0; i < children().size(); ++i) {
          if (i) s += ", ";
          s += children()[i].str();
        }
        return s + ")";
      }
    }
    return {};
  }

private:
  struct Node {
    Kind kind = Kind::constant;
    double value = 0.0;
    std::size_t index = 0;
    unsigned exponent = 0;
    std::vector<Expr> children;
  };

  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  static Expr make_unary(Kind k, Expr arg) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->children.push_back(std::move(arg));
    return Expr(std::move(n));
  }

  static Expr make_nary(Kind k, std::vector<Expr> kids) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->children = std::move(kids);
    return Expr(std::move(n));
  }

  std::shared_ptr<const Node> node_;
};

/// Central difference (e(x + h e_l) - e(x - h e_l)) / 2h. Oracle for
/// Expr::derivative; callers guarantee the stencil stays in the domain.
inline double fd_oracle(const Expr& e, std::size_t l, std::span<const double> x, double h) {
  std::vector<double> xp(x.begin(), x.end());
  std::vector<double> xm(x.begin(), x.end());
  xp[l] += h;
  xm[l] -= h;
  return (e.eval(xp) - e.eval(xm)) / (2.0 * h);
}

}  // namespace mroot
