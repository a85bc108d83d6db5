#pragma once

#include <cctype>
#include <charconv>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "expr.hpp"

namespace mroot {

// Prefix/function grammar:
//   expr := number | x<k> | name '(' expr {',' expr} ')'
//   name := sum | mul | sub | pow | exp | recip
// pow takes a non-negative integer literal as its second argument.
// Coordinates are 1-based in text and 0-based in Expr.
class ExprParser {
public:
  ExprParser(std::string_view text, std::size_t dim, std::size_t line = 1,
             std::size_t column_offset = 0)
      : text_(text), dim_(dim), line_(line), col0_(column_offset) {}

  Expr parse() {
    Expr e = expression();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what, line_, col0_ + pos_ + 1);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string_view identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  double number() {
    if (pos_ < text_.size() && text_[pos_] == '+') ++pos_;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr == first) fail("malformed number");
    pos_ += static_cast<std::size_t>(ptr - first);
    return v;
  }

  std::vector<Expr> arguments() {
    std::vector<Expr> args;
    expect('(');
    args.push_back(expression());
    while (peek(',')) {
      ++pos_;
      args.push_back(expression());
    }
    expect(')');
    return args;
  }

  Expr expression() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.')
      return Expr::constant(number());
    if (!std::isalpha(static_cast<unsigned char>(c))) fail("unexpected character");

    const std::size_t start = pos_;
    const std::string_view name = identifier();
    if (name.size() > 1 && name[0] == 'x' &&
        name.find_first_not_of("0123456789", 1) == std::string_view::npos) {
      std::size_t k = 0;
      std::from_chars(name.data() + 1, name.data() + name.size(), k);
      if (k < 1 || k > dim_) {
        pos_ = start;
        fail("coordinate " + std::string(name) + " out of range 1.." + std::to_string(dim_));
      }
      return Expr::coordinate(k - 1);
    }

    if (name == "pow") {
      expect('(');
      Expr base = expression();
      expect(',');
      skip_ws();
      const std::size_t at = pos_;
      const double k = number();
      if (k < 0.0 || k != static_cast<double>(static_cast<unsigned>(k))) {
        pos_ = at;
        fail("pow exponent must be a non-negative integer");
      }
      expect(')');
      return Expr::power(std::move(base), static_cast<unsigned>(k));
    }

    auto args = arguments();
    auto want = [&](std::size_t count) {
      if (args.size() != count) {
        pos_ = start;
        fail(std::string(name) + " takes " + std::to_string(count) + " argument(s)");
      }
    };
    if (name == "sum") return Expr::sum(std::move(args));
    if (name == "mul") return Expr::product(std::move(args));
    if (name == "sub") {
      want(2);
      return Expr::difference(args[0], args[1]);
    }
    if (name == "exp") {
      want(1);
      return Expr::exp(args[0]);
    }
    if (name == "recip") {
      want(1);
      return Expr::recip(args[0]);
    }
    pos_ = start;
    fail("unknown function '" + std::string(name) + "'");
  }

  std::string_view text_;
  std::size_t dim_;
  std::size_t line_;
  std::size_t col0_;
  std::size_t pos_ = 0;
};

inline Expr parse_expr(std::string_view text, std::size_t dim) {
  return ExprParser(text, dim).parse();
}

}  // namespace mroot
