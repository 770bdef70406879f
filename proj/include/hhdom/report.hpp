#pragma once

// JSON and CSV views of the library reports. Doubles are written in
// shortest round-trip form; infinities become the strings "inf" / "-inf"
// because JSON has no infinity.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "hhdom/convexity.hpp"
#include "hhdom/hadamard.hpp"
#include "hhdom/search.hpp"

namespace hhdom::report {

using nlohmann::json;

inline json number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

inline std::string csv_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return hhdom::detail::format_double(v);
}

inline json to_json(const Triple& p) {
  return json{{"x", number(p.x)}, {"y", number(p.y)}, {"t", number(p.t)}};
}

inline json to_json(const CheckReport& r) {
  return json{{"verdict", std::string(to_string(r.verdict))},
              {"samples_checked", r.samples_checked},
              {"worst_gap", number(r.worst_gap)},
              {"witness", to_json(r.witness)},
              {"witness_scale", number(r.witness_scale)},
              {"violations", r.violations},
              {"warnings", r.warnings}};
}

inline json to_json(const HHReport& r) {
  return json{{"label", r.label},
              {"bound", std::string(to_string(r.bound))},
              {"coefficient", number(r.coefficient)},
              {"lhs", number(r.lhs)},
              {"rhs", number(r.rhs)},
              {"margin", number(r.margin)},
              {"holds", r.holds},
              {"vacuous", r.vacuous},
              {"quad_error", number(r.quad_error)},
              {"inputs",
               json{{"f", r.inputs.f},
                    {"g", r.inputs.g},
                    {"h", r.inputs.h},
                    {"phi", r.inputs.phi},
                    {"interval", r.inputs.interval}}},
              {"warnings", r.warnings}};
}

inline json to_json(const ViolationRecord& v) {
  return json{{"x", number(v.x)},        {"y", number(v.y)},     {"t", number(v.t)},
              {"gap", number(v.gap)},    {"lhs_abs", number(v.lhs_abs)},
              {"rhs", number(v.rhs)},    {"refined", v.refined}};
}

/// `max_records` of 0 keeps every record.
inline json to_json(const SearchReport& r, std::size_t max_records) {
  json records = json::array();
  const std::size_t keep =
      max_records == 0 ? r.records.size() : std::min(max_records, r.records.size());
  for (std::size_t i = 0; i < keep; ++i) records.push_back(to_json(r.records[i]));
  return json{{"message", r.records.empty() ? "no violation found at this sampling density"
                                            : "violations found"},
              {"samples_checked", r.samples_checked},
              {"worst_sample_gap", number(r.worst_sample_gap)},
              {"worst_gap", number(r.worst_gap)},
              {"violations_total", r.records.size()},
              {"truncated", keep < r.records.size()},
              {"records", std::move(records)}};
}

inline json to_json(const Lemma2Report& r) {
  return json{
      {"statement1", json{{"holds", r.statement1()}, {"dominance", to_json(r.dominance)}}},
      {"statement2", json{{"holds", r.statement2()},
                          {"g_minus_f", to_json(r.g_minus_f)},
                          {"g_plus_f", to_json(r.g_plus_f)}}},
      {"statement3", json{{"holds", r.statement3()},
                          {"l", to_string(r.l)},
                          {"k", to_string(r.k)},
                          {"l_convex", to_json(r.l_convex)},
                          {"k_convex", to_json(r.k_convex)}}},
      {"agreement", r.agreement()}};
}

inline std::string csv(const CheckReport& r) {
  std::string out = "x,y,t,gap\n";
  for (const auto& s : r.samples) {
    out += csv_number(s.point.x) + "," + csv_number(s.point.y) + "," + csv_number(s.point.t) +
           "," + csv_number(s.gap) + "\n";
  }
  return out;
}

inline std::string csv(const Lemma2Report& r) {
  std::string out = "x,y,t,dominance_gap,g_minus_f_defect,g_plus_f_defect,l_defect,k_defect\n";
  for (const auto& s : r.samples) {
    out += csv_number(s.point.x) + "," + csv_number(s.point.y) + "," + csv_number(s.point.t) +
           "," + csv_number(s.dominance_gap) + "," + csv_number(s.g_minus_f_defect) + "," +
           csv_number(s.g_plus_f_defect) + "," + csv_number(s.l_defect) + "," +
           csv_number(s.k_defect) + "\n";
  }
  return out;
}

inline std::string csv(const std::vector<HHReport>& reports) {
  std::string out = "label,bound,coefficient,lhs,rhs,margin,holds,vacuous,quad_error\n";
  for (const auto& r : reports) {
    out += r.label + "," + std::string(to_string(r.bound)) + "," + csv_number(r.coefficient) +
           "," + csv_number(r.lhs) + "," + csv_number(r.rhs) + "," + csv_number(r.margin) + "," +
           (r.holds ? "true" : "false") + "," + (r.vacuous ? "true" : "false") + "," +
           csv_number(r.quad_error) + "\n";
  }
  return out;
}

inline std::string csv(const SearchReport& r) {
  std::string out = "x,y,t,gap,lhs_abs,rhs,refined\n";
  for (const auto& v : r.records) {
    out += csv_number(v.x) + "," + csv_number(v.y) + "," + csv_number(v.t) + "," +
           csv_number(v.gap) + "," + csv_number(v.lhs_abs) + "," + csv_number(v.rhs) + "," +
           (v.refined ? "true" : "false") + "\n";
  }
  return out;
}

namespace detail {

inline void flatten(const json& j, const std::string& path, std::string& out) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      flatten(value, path.empty() ? key : path + "." + key, out);
    }
  } else if (j.is_array()) {
    if (j.empty()) {
      out += path + ": []\n";
      return;
    }
    for (std::size_t i = 0; i < j.size(); ++i) {
      flatten(j[i], path + "[" + std::to_string(i) + "]", out);
    }
  } else if (j.is_number_float()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", j.get<double>());
    out += path + ": " + buf + "\n";
  } else if (j.is_string()) {
    out += path + ": " + j.get<std::string>() + "\n";
  } else {
    out += path + ": " + j.dump() + "\n";
  }
}

}  // namespace detail

/// One "path: value" line per leaf; floats at 12 significant digits.
inline std::string text(const json& j) {
  std::string out;
  detail::flatten(j, "", out);
  return out;
}

}  // namespace hhdom::report
