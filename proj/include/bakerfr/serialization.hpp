// JSON and CSV forms of maps, distributions and FR reports. Rationals are
// written as [numerator, denominator] pairs (strings when beyond int64).
#pragma once

#include <cstdint>
#include <limits>
#include <ostream>
#include <string>

#include "json.hpp"

#include "bakerfr/core_maps.hpp"
#include "bakerfr/errors.hpp"
#include "bakerfr/fluctuation.hpp"
#include "bakerfr/rational.hpp"

namespace bakerfr {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

inline Json big_to_json(const BigInt& v) {
  if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
    return Json(v.convert_to<std::int64_t>());
  return Json(v.str());
}

inline BigInt big_from_json(const Json& j) {
  if (j.is_number_integer()) return BigInt(j.get<std::int64_t>());
  if (j.is_string()) {
    const Rational r = parse_rational(j.get<std::string>());
    if (denominator_of(r) != 1) throw ConstructionError("expected an integer, got " + j.dump());
    return numerator_of(r);
  }
  throw ConstructionError("expected an integer, got " + j.dump());
}

inline Json rational_to_json(const Rational& r) {
  return Json::array({big_to_json(numerator_of(r)), big_to_json(denominator_of(r))});
}

inline Rational rational_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw ConstructionError("expected [num, den], got " + j.dump());
  const BigInt den = big_from_json(j[1]);
  if (den == 0) throw ConstructionError("rational with zero denominator in JSON");
  return Rational(big_from_json(j[0]), den);
}

inline Json map_to_json(const PiecewiseAffineMap<Rational>& map) {
  Json branches = Json::array();
  for (const auto& b : map.branches()) {
    const auto& d = b.domain();
    const auto& a = b.action();
    branches.push_back({
        {"label", std::string(1, to_char(b.label()))},
        {"domain", {{"x", {rational_to_json(d.x_lo), rational_to_json(d.x_hi)}},
                    {"y", {rational_to_json(d.y_lo), rational_to_json(d.y_hi)}}}},
        {"linear", {{rational_to_json(a.xx), rational_to_json(a.xy)}, {rational_to_json(a.yx), rational_to_json(a.yy)}}},
        {"offset", {rational_to_json(a.x0), rational_to_json(a.y0)}},
        {"jacobian", rational_to_json(b.jacobian())},
    });
  }
  return {{"schema_version", kSchemaVersion}, {"name", map.name()}, {"branches", branches}};
}

inline PiecewiseAffineMap<Rational> map_from_json(const Json& j) {
  try {
    std::vector<AffineBranch<Rational>> out;
    for (const auto& b : j.at("branches")) {
      const std::string label = b.at("label").get<std::string>();
      if (label.size() != 1) throw ConstructionError("bad region label '" + label + "'");
      const auto& d = b.at("domain");
      const auto& lin = b.at("linear");
      const auto& off = b.at("offset");
      const Rect<Rational> dom{rational_from_json(d.at("x").at(0)), rational_from_json(d.at("x").at(1)),
                               rational_from_json(d.at("y").at(0)), rational_from_json(d.at("y").at(1))};
      const AffineAction<Rational> act{rational_from_json(lin.at(0).at(0)), rational_from_json(lin.at(0).at(1)),
                                       rational_from_json(lin.at(1).at(0)), rational_from_json(lin.at(1).at(1)),
                                       rational_from_json(off.at(0)),       rational_from_json(off.at(1))};
      out.emplace_back(dom, act, region_from_char(label[0]), rational_from_json(b.at("jacobian")));
    }
    return PiecewiseAffineMap<Rational>(j.at("name").get<std::string>(), std::move(out));
  } catch (const nlohmann::json::exception& e) {
    throw ConstructionError(std::string("malformed map document: ") + e.what());
  }
}

inline Json distribution_to_json(const SymbolDistribution& d) {
  Json p = Json::array();
  for (const auto& [g, v] : d.p) p.push_back({{"g", g}, {"p", rational_to_json(v)}});
  return {{"family", to_string(d.family)}, {"l", to_string(d.l)}, {"n", d.n}, {"distribution", p}};
}

/// g, p, p_exact
inline void write_distribution_csv(std::ostream& os, const SymbolDistribution& d) {
  os << "g,p,p_exact\n";
  os.precision(17);
  for (const auto& [g, v] : d.p) os << g << ',' << to_double(v) << ',' << to_string(v) << '\n';
}

inline Json fr_report_to_json(const FRReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"g", row.g},
                    {"P(g)", to_string(row.p_plus)},
                    {"P(-g)", to_string(row.p_minus)},
                    {"alpha", to_string(row.alpha)},
                    {"lhs", row.lhs},
                    {"target", row.target},
                    {"bound", row.bound},
                    {"e_n", row.e_n},
                    {"lhs_normalized", row.lhs_normalized},
                    {"pass", row.pass}});
  return {{"family", to_string(r.family)},
          {"l", to_string(r.l)},
          {"n", r.n},
          {"unit_base", to_string(r.unit_base)},
          {"alpha_min", to_string(r.alpha_min)},
          {"alpha_max", to_string(r.alpha_max)},
          {"mean_lambda", r.mean_lambda.value()},
          {"p_star", r.p_star},
          {"e_n_in_range", r.e_n_in_range},
          {"pass", r.passed()},
          {"rows", rows}};
}

/// g, P(g), P(-g), lhs, target, bound, pass
inline void write_fr_csv(std::ostream& os, const FRReport& r) {
  os << "g,P(g),P(-g),lhs,target,bound,pass\n";
  os.precision(17);
  for (const auto& row : r.rows)
    os << row.g << ',' << to_string(row.p_plus) << ',' << to_string(row.p_minus) << ',' << row.lhs << ','
       << row.target << ',' << row.bound << ',' << (row.pass ? 1 : 0) << '\n';
}

inline Json empirical_fr_to_json(const EmpiricalFRReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"g", row.g},
                    {"count(g)", row.count_plus},
                    {"count(-g)", row.count_minus},
                    {"lhs", row.lhs},
                    {"sigma", row.sigma},
                    {"target", row.target},
                    {"bound", row.bound},
                    {"pass", row.pass}});
  return {{"family", to_string(r.family)}, {"l", to_string(r.l)},   {"n", r.n},
          {"samples", r.samples},          {"z", r.z},              {"min_count", r.min_count},
          {"excluded", r.excluded},        {"pass", r.passed()},    {"rows", rows}};
}

/// g, P(g), P(-g), lhs, target, bound, pass (empirical frequencies)
inline void write_fr_csv(std::ostream& os, const EmpiricalFRReport& r) {
  os << "g,P(g),P(-g),lhs,target,bound,pass\n";
  os.precision(17);
  const double nn = static_cast<double>(r.samples);
  for (const auto& row : r.rows)
    os << row.g << ',' << static_cast<double>(row.count_plus) / nn << ',' << static_cast<double>(row.count_minus) / nn
       << ',' << row.lhs << ',' << row.target << ',' << row.bound << ',' << (row.pass ? 1 : 0) << '\n';
}

}  // namespace bakerfr
