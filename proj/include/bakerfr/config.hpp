// Experiment configuration: typed fields, `key = value` text form, and the
// override mechanism shared by config files, sweep lines and CLI flags.
#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bakerfr/errors.hpp"
#include "bakerfr/rational.hpp"

namespace bakerfr {

enum class Family { Map1, Map2, Composite };
enum class Mode { Exact, MonteCarlo };

inline std::string to_string(Family f) {
  switch (f) {
    case Family::Map1: return "map1";
    case Family::Map2: return "map2";
    case Family::Composite: return "composite";
  }
  return "?";
}
inline std::string to_string(Mode m) { return m == Mode::Exact ? "exact" : "montecarlo"; }

inline Family parse_family(const std::string& s) {
  if (s == "map1") return Family::Map1;
  if (s == "map2") return Family::Map2;
  if (s == "composite") return Family::Composite;
  throw ConstructionError("unknown family '" + s + "' (map1, map2, composite)");
}
inline Mode parse_mode(const std::string& s) {
  if (s == "exact") return Mode::Exact;
  if (s == "montecarlo") return Mode::MonteCarlo;
  throw ConstructionError("unknown mode '" + s + "' (exact, montecarlo)");
}

namespace detail {
inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline std::int64_t parse_int(const std::string& key, const std::string& v, std::int64_t lo) {
  std::size_t used = 0;
  std::int64_t out = 0;
  try {
    out = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw ConstructionError(key + ": expected an integer, got '" + v + "'");
  if (out < lo) throw ConstructionError(key + ": must be at least " + std::to_string(lo));
  return out;
}
}  // namespace detail

struct ExperimentConfig {
  Family family = Family::Map2;
  Rational l{1, 8};
  std::int64_t n = 10;
  std::int64_t ensemble = 100000;
  std::int64_t transient = 100;
  std::uint64_t seed = 1;
  Mode mode = Mode::Exact;
  std::string out = "out";
  std::int64_t samples = 1000;       // rational sample points (reversibility)
  std::int64_t particles = 100000;   // multibaker
  std::int64_t steps = 1000;         // multibaker
  std::vector<Rational> b_values;    // multibaker linear-response sweep
  std::int64_t threads = 0;          // 0: all cores; never changes results

  static std::vector<std::string> keys() {
    return {"family", "l", "n", "ensemble", "transient", "seed", "mode", "out",
            "samples", "particles", "steps", "b_values", "threads"};
  }

  void set(const std::string& key, const std::string& raw) {
    const std::string v = detail::trim(raw);
    if (key == "family") family = parse_family(v);
    else if (key == "l") l = parse_rational(v);
    else if (key == "n") n = detail::parse_int(key, v, 1);
    else if (key == "ensemble") ensemble = detail::parse_int(key, v, 1);
    else if (key == "transient") transient = detail::parse_int(key, v, 0);
    else if (key == "seed") seed = static_cast<std::uint64_t>(detail::parse_int(key, v, 0));
    else if (key == "mode") mode = parse_mode(v);
    else if (key == "out") {
      if (v.empty()) throw ConstructionError("out: empty path");
      out = v;
    }
    else if (key == "samples") samples = detail::parse_int(key, v, 1);
    else if (key == "particles") particles = detail::parse_int(key, v, 1);
    else if (key == "steps") steps = detail::parse_int(key, v, 1);
    else if (key == "b_values") {
      b_values.clear();
      std::stringstream ss(v);
      std::string item;
      while (std::getline(ss, item, ','))
        if (!detail::trim(item).empty()) b_values.push_back(parse_rational(item));
    }
    else if (key == "threads") threads = detail::parse_int(key, v, 0);
    else throw ConstructionError("unknown config key '" + key + "'");
  }

  std::string get(const std::string& key) const {
    if (key == "family") return to_string(family);
    if (key == "l") return to_string(l);
    if (key == "n") return std::to_string(n);
    if (key == "ensemble") return std::to_string(ensemble);
    if (key == "transient") return std::to_string(transient);
    if (key == "seed") return std::to_string(seed);
    if (key == "mode") return to_string(mode);
    if (key == "out") return out;
    if (key == "samples") return std::to_string(samples);
    if (key == "particles") return std::to_string(particles);
    if (key == "steps") return std::to_string(steps);
    if (key == "b_values") {
      std::string s;
      for (std::size_t i = 0; i < b_values.size(); ++i) s += (i ? "," : "") + to_string(b_values[i]);
      return s;
    }
    if (key == "threads") return std::to_string(threads);
    throw ConstructionError("unknown config key '" + key + "'");
  }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// One `key = value` per line; '#' starts a comment.
inline std::string to_kv(const ExperimentConfig& c) {
  std::string s;
  for (const auto& k : ExperimentConfig::keys()) s += k + " = " + c.get(k) + "\n";
  return s;
}

inline void apply_kv_line(ExperimentConfig& c, const std::string& line, int lineno = 0) {
  std::string body = line.substr(0, line.find('#'));
  body = detail::trim(body);
  if (body.empty()) return;
  const auto eq = body.find('=');
  if (eq == std::string::npos)
    throw ConstructionError("line " + std::to_string(lineno) + ": expected key = value, got '" + body + "'");
  c.set(detail::trim(body.substr(0, eq)), body.substr(eq + 1));
}

inline void apply_kv(ExperimentConfig& c, const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) apply_kv_line(c, line, ++lineno);
}

inline ExperimentConfig parse_kv(const std::string& text, ExperimentConfig base = {}) {
  apply_kv(base, text);
  return base;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConstructionError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Sweep file: each non-blank line holds whitespace-separated key=value overrides.
inline std::vector<std::vector<std::pair<std::string, std::string>>> parse_sweep(const std::string& text) {
  std::vector<std::vector<std::pair<std::string, std::string>>> runs;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string body = detail::trim(line.substr(0, line.find('#')));
    if (body.empty()) continue;
    std::istringstream ls(body);
    std::string tok;
    std::vector<std::pair<std::string, std::string>> run;
    while (ls >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos || eq == 0)
        throw ConstructionError("sweep line " + std::to_string(lineno) + ": expected key=value, got '" + tok + "'");
      run.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
    }
    runs.push_back(std::move(run));
  }
  return runs;
}

}  // namespace bakerfr
