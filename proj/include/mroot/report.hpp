#pragma once

#include <cmath>
#include <string>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "classify.hpp"

namespace mroot {

using Json = nlohmann::ordered_json;

/// Serializes with insertion-ordered keys and every float written with 17
/// significant digits, so equal inputs give byte-identical output.
inline void write_json(const Json& j, std::string& out, int indent = 2, int depth = 0) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        write_json(it.value(), out, indent, depth + 1);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        write_json(j[i], out, indent, depth + 1);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? fmt::format("{:.17g}", v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

inline std::string to_json_text(const Json& j) {
  std::string s;
  write_json(j, s);
  s += '\n';
  return s;
}

inline Json to_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline Json to_json(const Mat& m) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(to_json(Vec(m.row(i).transpose())));
  return a;
}

inline Json to_json(const Verdict& v) {
  Json j;
  j["name"] = v.name;
  j["residual"] = v.residual;
  j["tolerance"] = v.tolerance;
  j["pass"] = v.pass;
  j["gating"] = v.gating;
  if (!v.details.empty()) {
    Json d;
    for (const auto& r : v.details) d[r.name] = r.value;
    j["details"] = d;
  }
  return j;
}

/// Fixed-width human-readable verdict table.
inline std::string verdict_table(const std::vector<Verdict>& verdicts) {
  std::string s = fmt::format("{:<34} {:>24} {:>12}  {}\n", "check", "residual", "tolerance",
                              "result");
  for (const auto& v : verdicts) {
    s += fmt::format("{:<34} {:>24.17g} {:>12.3g}  {}{}\n", v.name, v.residual, v.tolerance,
                     v.pass ? "PASS" : "FAIL", v.gating ? "" : " (info)");
    for (const auto& d : v.details) s += fmt::format("  {:<32} {:>24.17g}\n", d.name, d.value);
  }
  return s;
}

}  // namespace mroot
