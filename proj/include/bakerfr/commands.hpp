// CLI command implementations. Each command writes its files into cfg.out
// and returns 0 when every asserted check passed, 1 otherwise. Invalid
// configurations raise ConstructionError / UnsupportedOperation / UndefinedValue.
#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "bakerfr/config.hpp"
#include "bakerfr/core_maps.hpp"
#include "bakerfr/family.hpp"
#include "bakerfr/fluctuation.hpp"
#include "bakerfr/multibaker.hpp"
#include "bakerfr/observables.hpp"
#include "bakerfr/periodic_orbits.hpp"
#include "bakerfr/serialization.hpp"
#include "bakerfr/transfer.hpp"

namespace bakerfr {

struct CommandResult {
  int exit_code = 0;
  std::vector<std::string> files;
  std::string summary;
};

namespace detail {

class OutputDir {
 public:
  explicit OutputDir(const std::string& path) : root_(path) { std::filesystem::create_directories(root_); }

  void write(const std::string& name, const std::string& content) {
    const auto p = root_ / name;
    std::ofstream os(p, std::ios::binary);
    if (!os) throw ConstructionError("cannot write '" + p.string() + "'");
    os << content;
    files_.push_back(p.string());
  }
  void write_json(const std::string& name, Json j) {
    Json doc{{"schema_version", kSchemaVersion}};
    for (auto& [k, v] : j.items())
      if (k != "schema_version") doc[k] = v;
    write(name, doc.dump(2) + "\n");
  }
  std::vector<std::string> files() const { return files_; }

 private:
  std::filesystem::path root_;
  std::vector<std::string> files_;
};

inline BakerFamily family_of(const ExperimentConfig& cfg) {
  return cfg.family == Family::Map1 ? BakerFamily::simple(cfg.l) : BakerFamily::generalized(cfg.l);
}

inline Json config_json(const ExperimentConfig& cfg) {
  Json j;
  for (const auto& k : ExperimentConfig::keys())
    if (k != "out" && k != "threads") j[k] = cfg.get(k);
  return j;
}

inline EnsembleSpec ensemble_of(const ExperimentConfig& cfg) {
  return {static_cast<std::uint64_t>(cfg.ensemble), cfg.seed, 8192, static_cast<unsigned>(cfg.threads)};
}

/// Boundary-free rational points: numerators over a large prime never land on a branch edge.
inline std::vector<PhasePoint<Rational>> rational_samples(std::size_t count, std::uint64_t seed) {
  constexpr std::int64_t prime = 1000003;
  Rng rng = shard_rng(seed, 0);
  std::vector<PhasePoint<Rational>> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto a = static_cast<std::int64_t>(1 + rng() % (prime - 1));
    const auto b = static_cast<std::int64_t>(1 + rng() % (prime - 1));
    out.push_back({make_rational(a, prime), make_rational(b, prime)});
  }
  return out;
}

}  // namespace detail

inline CommandResult cmd_density(const ExperimentConfig& cfg) {
  if (cfg.family == Family::Composite)
    throw UnsupportedOperation("density: the composite map depends on y and has no unstable projection");
  const BakerFamily fam = detail::family_of(cfg);
  detail::OutputDir out(cfg.out);
  const auto f = project_unstable(fam.map());
  const StepDensity<Rational> analytic = fam.kind() == MapKind::Generalized
                                             ? generalized_invariant_density(fam.l())
                                             : StepDensity<Rational>::uniform();
  bool match = false;
  std::ostringstream csv;
  Json j = detail::config_json(cfg);
  if (cfg.mode == Mode::Exact) {
    const auto rho = invariant_density(f);
    match = same_function(rho, analytic);
    write_density_csv(csv, rho);
    Json vals = Json::array();
    for (const auto& v : rho.values()) vals.push_back(to_string(v));
    j["density"] = vals;
  } else {
    const auto rho = invariant_density(project_unstable(fam.map().cast<double>()), 1e-12, 10000);
    match = sup_distance(rho, analytic.cast<double>()) <= 1e-9;
    write_density_csv(csv, rho);
    j["density"] = rho.values();
  }
  Json an = Json::array();
  for (const auto& v : analytic.values()) an.push_back(to_string(v));
  j["breakpoints"] = Json::array();
  for (const auto& b : analytic.breakpoints()) j["breakpoints"].push_back(to_string(b));
  j["analytic"] = an;
  j["pass"] = match;
  out.write("density.csv", csv.str());
  out.write_json("density.json", j);
  return {match ? 0 : 1, out.files(), match ? "density matches the closed form" : "density mismatch"};
}

inline CommandResult cmd_fr(const ExperimentConfig& cfg) {
  detail::OutputDir out(cfg.out);
  Json j = detail::config_json(cfg);
  if (cfg.mode == Mode::Exact) {
    if (cfg.family == Family::Composite)
      throw UnsupportedOperation("fr: the composite map is only available in montecarlo mode");
    const BakerFamily fam = detail::family_of(cfg);
    const auto dist = exact_distribution(fam, cfg.n);
    const auto rep = fr_report(dist);
    std::ostringstream csv, dcsv;
    write_fr_csv(csv, rep);
    write_distribution_csv(dcsv, dist);
    j["report"] = fr_report_to_json(rep);
    j["pass"] = rep.passed();
    out.write("fr.csv", csv.str());
    out.write("distribution.csv", dcsv.str());
    out.write_json("fr.json", j);
    return {rep.passed() ? 0 : 1, out.files(), rep.passed() ? "FR band holds" : "FR band violated"};
  }
  const BakerFamily fam = cfg.family == Family::Map1 ? BakerFamily::simple(cfg.l) : BakerFamily::generalized(cfg.l);
  if (mean_lambda_analytic(fam).is_zero())
    throw UndefinedValue("<Lambda> = 0: the fluctuation relation is undefined here");
  const auto map = cfg.family == Family::Composite ? build_composite_K(cfg.l, default_strip(cfg.l)).cast<double>()
                                                   : fam.map().cast<double>();
  const auto emp = monte_carlo_distribution(fam, map, cfg.n, detail::ensemble_of(cfg), cfg.transient);
  const auto rep = empirical_fr_report(fam, emp);
  const auto cmp = compare_to_exact(emp, exact_distribution(fam, cfg.n));
  std::ostringstream csv;
  write_fr_csv(csv, rep);
  Json bins = Json::array();
  for (const auto& b : cmp.bins)
    bins.push_back({{"g", b.g}, {"p_exact", b.p_exact}, {"p_hat", b.p_hat}, {"stderr", b.std_error}, {"pass", b.pass}});
  j["report"] = empirical_fr_to_json(rep);
  j["against_exact"] = {{"bins", bins}, {"excluded", cmp.excluded}, {"pass", cmp.passed()}};
  const bool ok = rep.passed() && cmp.passed();
  j["pass"] = ok;
  out.write("fr.csv", csv.str());
  out.write_json("fr.json", j);
  return {ok ? 0 : 1, out.files(), ok ? "empirical FR band holds" : "empirical FR check failed"};
}

inline CommandResult cmd_upo(const ExperimentConfig& cfg) {
  if (cfg.family == Family::Composite) throw UnsupportedOperation("upo: not defined for the composite map");
  const BakerFamily fam = detail::family_of(cfg);
  detail::OutputDir out(cfg.out);
  Json j = detail::config_json(cfg);
  if (fam.kind() == MapKind::Simple) {
    const auto orbits = enumerate_orbits(fam, static_cast<int>(cfg.n));
    const auto upo = upo_distribution(fam, static_cast<int>(cfg.n));
    const auto dp = exact_distribution(fam, cfg.n);
    bool realized = true;
    for (const auto& o : orbits) realized = realized && o.realized;
    const bool ok = upo == dp && realized;
    std::ostringstream ocsv, dcsv;
    write_orbits_csv(ocsv, orbits);
    write_distribution_csv(dcsv, upo);
    j["orbits"] = orbits.size();
    j["upo"] = distribution_to_json(upo);
    j["equals_exact"] = upo == dp;
    j["pass"] = ok;
    out.write("orbits.csv", ocsv.str());
    out.write("upo_distribution.csv", dcsv.str());
    out.write_json("upo.json", j);
    return {ok ? 0 : 1, out.files(), ok ? "UPO distribution equals the exact one" : "UPO mismatch"};
  }
  const auto diag = upo_diagnostic(fam, static_cast<int>(cfg.n));
  std::ostringstream dcsv;
  write_distribution_csv(dcsv, diag.upo);
  j["cycles"] = diag.cycles;
  j["unrealized"] = diag.unrealized;
  j["normalization"] = to_string(diag.normalization);
  j["max_abs_difference"] = diag.max_abs_difference;
  j["upo"] = distribution_to_json(diag.upo);
  j["exact"] = distribution_to_json(diag.dp);
  out.write("upo_distribution.csv", dcsv.str());
  out.write_json("upo.json", j);
  return {0, out.files(), "diagnostic only (generalized map)"};
}

inline CommandResult cmd_multibaker(const ExperimentConfig& cfg) {
  if (cfg.family != Family::Map2) throw UnsupportedOperation("multibaker: the lift is defined for map2 only");
  detail::OutputDir out(cfg.out);
  Json j = detail::config_json(cfg);
  const Rational psi = analytic_current(cfg.l);
  const auto est = simulate_current(cfg.l, static_cast<std::uint64_t>(cfg.particles), cfg.steps, cfg.seed,
                                    cfg.transient, static_cast<unsigned>(cfg.threads));
  bool ok = std::abs(est.psi_hat - to_double(psi)) <= 4 * est.std_error;
  j["psi_analytic"] = to_string(psi);
  j["psi_hat"] = est.psi_hat;
  j["stderr"] = est.std_error;
  j["lambda_analytic"] = mean_lambda_analytic(BakerFamily::generalized(cfg.l)).value();
  j["lambda_hat"] = est.lambda_hat;
  if (!cfg.b_values.empty()) {
    const auto rows = linear_response_sweep(cfg.b_values, static_cast<std::uint64_t>(cfg.particles), cfg.steps,
                                            cfg.seed, cfg.transient, static_cast<unsigned>(cfg.threads));
    std::ostringstream csv;
    write_sweep_csv(csv, rows);
    out.write("sweep.csv", csv.str());
    Json sweep = Json::array();
    for (const auto& r : rows) {
      sweep.push_back({{"b", to_string(r.b)},
                       {"psi_over_b", r.psi_over_b()},
                       {"psi_over_b_analytic", to_double(r.psi_analytic / r.b)},
                       {"lambda_over_b2", r.lambda_over_b2()},
                       {"consistent", r.consistent()}});
      ok = ok && r.consistent();
    }
    j["sweep"] = sweep;
  }
  j["pass"] = ok;
  out.write_json("multibaker.json", j);
  return {ok ? 0 : 1, out.files(), ok ? "current consistent with Psi(b)" : "current outside 4 stderr"};
}

inline CommandResult cmd_reversibility(const ExperimentConfig& cfg) {
  const auto pts = detail::rational_samples(static_cast<std::size_t>(cfg.samples), cfg.seed);
  detail::OutputDir out(cfg.out);
  Json j = detail::config_json(cfg);
  const bool composite = cfg.family == Family::Composite;
  const BakerFamily fam = composite ? BakerFamily::generalized(cfg.l) : detail::family_of(cfg);
  const auto M = composite ? build_composite_K(cfg.l, default_strip(cfg.l)) : fam.map();
  const auto rep = verify_reversibility(M, fam.involution(), pts);
  std::map<std::string, std::size_t> by_identity;
  for (const auto& v : rep.violations) ++by_identity[v.identity];
  Json conj = Json::array();
  for (const auto& [from, to] : rep.conjugacy)
    conj.push_back({{"from", std::string(1, to_char(from))}, {"to", to ? std::string(1, to_char(*to)) : "none"}});
  j["points_checked"] = rep.points_checked;
  j["violations"] = by_identity;
  j["conjugacy"] = conj;
  j["conjugacy_ok"] = rep.conjugacy_ok;
  // The composite map must fail pointwise yet stay reversible on the region level.
  const bool ok = composite ? (!rep.pointwise_ok() && rep.conjugacy_ok) : rep.passed();
  j["pass"] = ok;
  out.write_json("reversibility.json", j);
  return {ok ? 0 : 1, out.files(), ok ? "reversibility checks as expected" : "reversibility check failed"};
}

inline CommandResult cmd_map(const ExperimentConfig& cfg) {
  detail::OutputDir out(cfg.out);
  const auto M = cfg.family == Family::Composite ? build_composite_K(cfg.l, default_strip(cfg.l))
                                                 : detail::family_of(cfg).map();
  out.write_json("map.json", map_to_json(M));
  return {0, out.files(), "map written"};
}

inline CommandResult cmd_trajectory(const ExperimentConfig& cfg) {
  if (cfg.family == Family::Composite) throw UnsupportedOperation("trajectory: use map1 or map2");
  const BakerFamily fam = detail::family_of(cfg);
  if (cfg.n > kExactStepCap) throw ConstructionError("trajectory: exact iteration is capped at 64 steps");
  detail::OutputDir out(cfg.out);
  const auto x0 = detail::rational_samples(1, cfg.seed).front();
  const auto seg = trajectory(fam, fam.map(), x0, cfg.n);
  std::ostringstream csv;
  write_trajectory_csv(csv, fam, seg);
  out.write("trajectory.csv", csv.str());
  return {seg.symbols.admissible ? 0 : 1, out.files(), "trajectory written"};
}

using Command = std::function<CommandResult(const ExperimentConfig&)>;

inline const std::map<std::string, Command>& command_table() {
  static const std::map<std::string, Command> table{
      {"density", cmd_density},   {"fr", cmd_fr},   {"upo", cmd_upo},           {"multibaker", cmd_multibaker},
      {"reversibility", cmd_reversibility},         {"map", cmd_map},           {"trajectory", cmd_trajectory}};
  return table;
}

}  // namespace bakerfr
