#pragma once

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "expr_parser.hpp"
#include "metric_eval.hpp"
#include "sym_field.hpp"

namespace mroot {

/// Per-file run settings; command-line flags override them.
struct RunConfig {
  std::uint64_t seed = 1;
  std::optional<double> tol;
  std::optional<std::size_t> fan;
  std::optional<std::size_t> bases;
  std::vector<ProbePoint> probes;
};

struct MetricFile {
  SymTensorField field;
  RunConfig config;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Column (1-based) of `part` inside `line`; both views share storage.
inline std::size_t column_of(std::string_view line, std::string_view part) {
  return static_cast<std::size_t>(part.data() - line.data()) + 1;
}

template <class T>
T parse_number(std::string_view line, std::string_view text, std::size_t lineno) {
  text = trim(text);
  T v{};
  const char* first = text.data();
  if (!text.empty() && text.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
    throw ParseError("malformed number '" + std::string(text) + "'", lineno,
                     text.empty() ? 1 : column_of(line, text));
  return v;
}

inline std::vector<double> parse_list(std::string_view line, std::string_view text,
                                      std::size_t lineno) {
  std::vector<double> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(parse_number<double>(line, text.substr(0, comma), lineno));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace detail

/// Parses the text metric format:
///
///   # comment
///   n = 2
///   m = 2
///   box.1 = -1, 1
///   box.2 = -1, 1
///   seed = 7                    (optional)
///   tol = 1e-9                  (optional; also fan, bases)
///   probe = 0, 0 ; 1, 0         (optional, repeatable: x ; y)
///   1 1 : 1
///   2 2 : recip(pow(sub(1, x1), 2))
///
/// Indices and coordinates are 1-based. Header lines may appear in any
/// order; every coordinate needs a box side. Duplicate entries (same index
/// multiset) are rejected.
inline MetricFile parse_metric_file(std::string_view text) {
  struct Line {
    std::size_t no;
    std::string_view full;
    std::string_view body;
  };
  std::vector<Line> headers, entries;
  std::size_t lineno = 0;
  while (!text.empty()) {
    ++lineno;
    const auto nl = text.find('\n');
    std::string_view full = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    std::string_view body = full.substr(0, full.find('#'));
    if (detail::trim(body).empty()) continue;
    if (body.find(':') != std::string_view::npos)
      entries.push_back({lineno, full, body});
    else if (body.find('=') != std::string_view::npos)
      headers.push_back({lineno, full, body});
    else
      throw ParseError("expected 'key = value' or 'indices : expression'", lineno,
                       detail::column_of(full, detail::trim(body)));
  }

  std::optional<std::size_t> n, m;
  std::map<std::size_t, Interval> sides;
  RunConfig cfg;
  std::vector<Line> probe_lines;
  for (const auto& h : headers) {
    const auto eq = h.body.find('=');
    const auto key = detail::trim(h.body.substr(0, eq));
    const auto val = h.body.substr(eq + 1);
    if (key == "n") {
      n = detail::parse_number<std::size_t>(h.full, val, h.no);
      if (*n < 1) throw ParseError("n must be >= 1", h.no, detail::column_of(h.full, key));
    } else if (key == "m") {
      m = detail::parse_number<std::size_t>(h.full, val, h.no);
      if (*m < 2) throw ParseError("m must be >= 2", h.no, detail::column_of(h.full, key));
    } else if (key == "seed") {
      cfg.seed = detail::parse_number<std::uint64_t>(h.full, val, h.no);
    } else if (key == "tol") {
      cfg.tol = detail::parse_number<double>(h.full, val, h.no);
    } else if (key == "fan") {
      cfg.fan = detail::parse_number<std::size_t>(h.full, val, h.no);
    } else if (key == "bases") {
      cfg.bases = detail::parse_number<std::size_t>(h.full, val, h.no);
    } else if (key == "probe") {
      probe_lines.push_back(h);
    } else if (key.starts_with("box.")) {
      const auto i = detail::parse_number<std::size_t>(h.full, key.substr(4), h.no);
      const auto lohi = detail::parse_list(h.full, val, h.no);
      if (lohi.size() != 2 || !(lohi[0] < lohi[1]))
        throw ParseError("box side must be 'lo, hi' with lo < hi", h.no,
                         detail::column_of(h.full, detail::trim(val)));
      if (!sides.emplace(i, Interval{lohi[0], lohi[1]}).second)
        throw ParseError("duplicate box side", h.no, detail::column_of(h.full, key));
    } else {
      throw ParseError("unknown key '" + std::string(key) + "'", h.no,
                       detail::column_of(h.full, key));
    }
  }
  if (!n) throw ParseError("missing 'n'", lineno, 1);
  if (!m) throw ParseError("missing 'm'", lineno, 1);

  std::vector<Interval> box(*n);
  for (std::size_t i = 1; i <= *n; ++i) {
    auto it = sides.find(i);
    if (it == sides.end()) throw ParseError("missing box." + std::to_string(i), lineno, 1);
    box[i - 1] = it->second;
  }
  for (const auto& [i, side] : sides)
    if (i < 1 || i > *n)
      throw ParseError("box." + std::to_string(i) + " out of range 1.." + std::to_string(*n),
                       lineno, 1);

  for (const auto& p : probe_lines) {
    const auto val = p.body.substr(p.body.find('=') + 1);
    const auto semi = val.find(';');
    if (semi == std::string_view::npos)
      throw ParseError("probe must be 'x1, ..., xn ; y1, ..., yn'", p.no,
                       detail::column_of(p.full, detail::trim(val)));
    const auto xs = detail::parse_list(p.full, val.substr(0, semi), p.no);
    const auto ys = detail::parse_list(p.full, val.substr(semi + 1), p.no);
    if (xs.size() != *n || ys.size() != *n)
      throw ParseError("probe needs n coordinates for x and for y", p.no,
                       detail::column_of(p.full, detail::trim(val)));
    cfg.probes.push_back({to_vec(xs), to_vec(ys)});
  }

  std::map<MultiIndex, Expr> coeffs;
  for (const auto& e : entries) {
    const auto colon = e.body.find(':');
    std::string_view idx_text = e.body.substr(0, colon);
    std::vector<std::size_t> idx;
    while (true) {
      const auto tok_start = idx_text.find_first_not_of(" \t");
      if (tok_start == std::string_view::npos) break;
      idx_text.remove_prefix(tok_start);
      const auto tok_end = std::min(idx_text.find_first_of(" \t"), idx_text.size());
      const auto tok = idx_text.substr(0, tok_end);
      const auto i = detail::parse_number<std::size_t>(e.full, tok, e.no);
      if (i < 1 || i > *n)
        throw ParseError("index " + std::string(tok) + " out of range 1.." + std::to_string(*n),
                         e.no, detail::column_of(e.full, tok));
      idx.push_back(i - 1);
      idx_text.remove_prefix(tok_end);
    }
    if (idx.size() != *m)
      throw ParseError("entry needs exactly m = " + std::to_string(*m) + " indices", e.no, 1);
    const auto expr_text = e.body.substr(colon + 1);
    Expr ex = ExprParser(expr_text, *n, e.no, detail::column_of(e.full, expr_text) - 1).parse();
    if (!coeffs.emplace(MultiIndex(std::move(idx)), std::move(ex)).second)
      throw ParseError("duplicate entry for this index set", e.no, 1);
  }

  return {SymTensorField(*n, *m, Box(std::move(box)), std::move(coeffs)), std::move(cfg)};
}

}  // namespace mroot
