// Distributions of the g statistic and the Lambda fluctuation relation:
// exact forward DP over the region chain, brute-force enumeration,
// Monte Carlo histograms, per-g FR reports and the alpha-correction check.
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bakerfr/core_maps.hpp"
#include "bakerfr/errors.hpp"
#include "bakerfr/family.hpp"
#include "bakerfr/observables.hpp"
#include "bakerfr/rational.hpp"
#include "bakerfr/sampling.hpp"
#include "bakerfr/transfer.hpp"

namespace bakerfr {

inline constexpr std::int64_t kMaxDistributionLength = 10000;
inline constexpr int kMaxBruteForceLength = 12;

enum class StartMeasure { Stationary, Lebesgue };

struct SymbolDistribution {
  MapKind family = MapKind::Generalized;
  Rational l;
  std::int64_t n = 0;
  std::map<std::int64_t, Rational> p;  // only g with P(g) > 0

  Rational at(std::int64_t g) const {
    const auto it = p.find(g);
    return it == p.end() ? Rational(0) : it->second;
  }
  Rational total() const {
    Rational s(0);
    for (const auto& [g, v] : p) s += v;
    return s;
  }
  Rational mean_g() const {
    Rational s(0);
    for (const auto& [g, v] : p) s += v * g;
    return s;
  }
  bool support_symmetric() const {
    for (const auto& [g, v] : p)
      if (at(-g) == 0) return false;
    return true;
  }
  friend bool operator==(const SymbolDistribution&, const SymbolDistribution&) = default;
};

inline RegionMeasures start_measure(const BakerFamily& fam, StartMeasure start) {
  return start == StartMeasure::Stationary ? fam.chain().mu : fam.lebesgue_measures();
}

/// P(g) = sum over admissible (i_0..i_{n-1}) of mu_{i_0} prod p_{i_k i_{k+1}}, by forward DP.
inline SymbolDistribution exact_distribution(const BakerFamily& fam, std::int64_t n,
                                             StartMeasure start = StartMeasure::Stationary) {
  if (n < 1) throw ConstructionError("segment length must be at least 1");
  if (n > kMaxDistributionLength) throw ConstructionError("segment length exceeds the DP guard");
  const auto& chain = fam.chain();
  const auto mu = start_measure(fam, start);
  const std::size_t k = chain.p.states.size();
  const std::size_t width = static_cast<std::size_t>(2 * n + 1);
  std::vector<int> u(k);
  for (std::size_t i = 0; i < k; ++i) u[i] = fam.units(chain.p.states[i]);

  std::vector<std::vector<Rational>> dp(k, std::vector<Rational>(width, Rational(0)));
  for (std::size_t i = 0; i < k; ++i) dp[i][static_cast<std::size_t>(n + u[i])] = mu.at(chain.p.states[i]);
  for (std::int64_t step = 1; step < n; ++step) {
    std::vector<std::vector<Rational>> next(k, std::vector<Rational>(width, Rational(0)));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        const Rational& pij = chain.p.p[i][j];
        if (pij == 0) continue;
        for (std::size_t g = 0; g < width; ++g) {
          if (dp[i][g] == 0) continue;
          next[j][static_cast<std::size_t>(static_cast<std::int64_t>(g) + u[j])] += dp[i][g] * pij;
        }
      }
    dp = std::move(next);
  }
  SymbolDistribution out{fam.kind(), fam.l(), n, {}};
  for (std::size_t g = 0; g < width; ++g) {
    Rational s(0);
    for (std::size_t i = 0; i < k; ++i) s += dp[i][g];
    if (s != 0) out.p[static_cast<std::int64_t>(g) - n] = s;
  }
  return out;
}

/// Every one of the k^n label strings, inadmissible ones included, is visited.
inline SymbolDistribution brute_force_distribution(const BakerFamily& fam, int n,
                                                   StartMeasure start = StartMeasure::Stationary) {
  if (n < 1 || n > kMaxBruteForceLength) throw ConstructionError("brute force needs 1 <= n <= 12");
  const auto& chain = fam.chain();
  const auto mu = start_measure(fam, start);
  const std::size_t k = chain.p.states.size();
  std::vector<std::vector<bool>> ok(k, std::vector<bool>(k));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) ok[i][j] = chain.p.p[i][j] != 0;

  SymbolDistribution out{fam.kind(), fam.l(), n, {}};
  std::vector<std::size_t> code(static_cast<std::size_t>(n), 0);
  for (;;) {
    bool admissible = true;
    for (int t = 0; t + 1 < n && admissible; ++t) admissible = ok[code[t]][code[t + 1]];
    if (admissible) {
      Rational w = mu.at(chain.p.states[code[0]]);
      std::int64_t g = fam.units(chain.p.states[code[0]]);
      for (int t = 1; t < n; ++t) {
        w *= chain.p.p[code[t - 1]][code[t]];
        g += fam.units(chain.p.states[code[t]]);
      }
      if (w != 0) out.p[g] += w;
    }
    int pos = n - 1;
    while (pos >= 0 && ++code[pos] == k) code[pos--] = 0;
    if (pos < 0) break;
  }
  return out;
}

// Monte Carlo.

struct EmpiricalDistribution {
  std::int64_t n = 0;
  std::uint64_t samples = 0;
  std::map<std::int64_t, std::uint64_t> counts;

  std::uint64_t count(std::int64_t g) const {
    const auto it = counts.find(g);
    return it == counts.end() ? 0 : it->second;
  }
  double p_hat(std::int64_t g) const {
    return samples == 0 ? 0.0 : static_cast<double>(count(g)) / static_cast<double>(samples);
  }
  double stderr_at(std::int64_t g) const {
    const double p = p_hat(g);
    return samples == 0 ? 0.0 : std::sqrt(p * (1 - p) / static_cast<double>(samples));
  }
  /// Wilson score interval at z standard errors.
  std::pair<double, double> wilson(std::int64_t g, double z = 1.96) const {
    const double nn = static_cast<double>(samples);
    const double p = p_hat(g);
    const double d = 1 + z * z / nn;
    const double c = (p + z * z / (2 * nn)) / d;
    const double h = z * std::sqrt(p * (1 - p) / nn + z * z / (4 * nn * nn)) / d;
    return {c - h, c + h};
  }
  double mean_g() const {
    double s = 0;
    for (const auto& [g, c] : counts) s += static_cast<double>(g) * static_cast<double>(c);
    return samples == 0 ? 0.0 : s / static_cast<double>(samples);
  }
  friend bool operator==(const EmpiricalDistribution&, const EmpiricalDistribution&) = default;
};

inline constexpr std::int64_t kDefaultTransient = 100;

/// Uniform initial points, `transient` steps, then g over the next n points.
inline EmpiricalDistribution monte_carlo_distribution(const BakerFamily& fam, const PiecewiseAffineMap<double>& map,
                                                      std::int64_t n, const EnsembleSpec& spec,
                                                      std::int64_t transient = kDefaultTransient) {
  if (n < 1) throw ConstructionError("segment length must be at least 1");
  const auto& units = fam.units_by_region();
  auto body = [&](std::uint64_t, std::uint64_t count, Rng& rng) {
    EmpiricalDistribution part{n, 0, {}};
    for (std::uint64_t s = 0; s < count; ++s) {
      PhasePoint<double> p = uniform_point(rng);
      for (std::int64_t t = 0; t < transient; ++t) p = noisy_step(map, p, rng);
      std::int64_t g = 0;
      for (std::int64_t t = 0; t < n; ++t) g += units[index_of(noisy_advance(map, p, rng))];
      ++part.counts[g];
      ++part.samples;
    }
    return part;
  };
  auto merge = [](EmpiricalDistribution& into, const EmpiricalDistribution& part) {
    into.samples += part.samples;
    for (const auto& [g, c] : part.counts) into.counts[g] += c;
  };
  return run_sharded<EmpiricalDistribution>(spec, body, merge, EmpiricalDistribution{n, 0, {}});
}

struct BinComparison {
  std::int64_t g = 0;
  double p_exact = 0;
  double p_hat = 0;
  double std_error = 0;
  bool pass = true;
};

struct DistributionComparison {
  std::vector<BinComparison> bins;
  std::size_t excluded = 0;
  bool passed() const {
    for (const auto& b : bins)
      if (!b.pass) return false;
    return true;
  }
};

/// Per-bin |p_hat - p| <= z * sqrt(p(1-p)/N); bins with fewer than min_count hits are skipped.
inline DistributionComparison compare_to_exact(const EmpiricalDistribution& emp, const SymbolDistribution& exact,
                                               double z = 4.0, std::uint64_t min_count = 25) {
  DistributionComparison out;
  std::map<std::int64_t, bool> keys;
  for (const auto& [g, v] : exact.p) keys[g] = true;
  for (const auto& [g, c] : emp.counts) keys[g] = true;
  const double nn = static_cast<double>(emp.samples);
  for (const auto& [g, unused] : keys) {
    if (emp.count(g) < min_count) {
      ++out.excluded;
      continue;
    }
    BinComparison b;
    b.g = g;
    b.p_exact = to_double(exact.at(g));
    b.p_hat = emp.p_hat(g);
    b.std_error = std::sqrt(b.p_exact * (1 - b.p_exact) / nn);
    b.pass = std::abs(b.p_hat - b.p_exact) <= z * b.std_error;
    out.bins.push_back(b);
  }
  return out;
}

// Fluctuation-relation reports.

struct FRRow {
  std::int64_t g = 0;
  Rational p_plus, p_minus;
  Rational alpha;  // P(g) / (P(-g) unit_base^g)
  double lhs = 0;     // ln(P(g)/P(-g))
  double target = 0;  // g ln(unit_base)
  double bound = 0;   // ln(alpha_max)
  double e_n = 0;
  double lhs_normalized = 0;  // lhs / (n <Lambda>)
  bool pass = false;
};

struct FRReport {
  MapKind family = MapKind::Generalized;
  Rational l;
  std::int64_t n = 0;
  Rational unit_base;
  Rational alpha_min, alpha_max;
  LogQuantity mean_lambda;
  double p_star = 0;
  bool e_n_in_range = true;
  std::vector<FRRow> rows;

  bool passed() const {
    if (!e_n_in_range) return false;
    for (const auto& r : rows)
      if (!r.pass) return false;
    return true;
  }
};

inline FRReport fr_report(const SymbolDistribution& dist) {
  const BakerFamily fam = BakerFamily::of(dist.family, dist.l);
  FRReport rep;
  rep.family = dist.family;
  rep.l = dist.l;
  rep.n = dist.n;
  rep.unit_base = fam.unit_base();
  rep.alpha_max = fam.alpha_max();
  rep.alpha_min = 1 / rep.alpha_max;
  rep.mean_lambda = mean_lambda_analytic(fam);
  if (rep.mean_lambda.is_zero()) throw UndefinedValue("<Lambda> = 0: the fluctuation relation is undefined here");
  const double unit = log_of(rep.unit_base);
  const double scale = static_cast<double>(dist.n) * rep.mean_lambda.value();
  rep.p_star = unit / rep.mean_lambda.value();
  const double bound = log_of(rep.alpha_max);
  for (const auto& [g, v] : dist.p) {
    if (std::abs(g) > dist.n) rep.e_n_in_range = false;
    if (g <= 0) continue;
    const Rational minus = dist.at(-g);
    if (minus == 0) continue;
    FRRow row;
    row.g = g;
    row.p_plus = v;
    row.p_minus = minus;
    const Rational ratio = v / minus;
    row.alpha = ratio / pow(rep.unit_base, g);
    row.lhs = log_of(ratio);
    row.target = static_cast<double>(g) * unit;
    row.bound = bound;
    row.e_n = row.target / scale;
    row.lhs_normalized = row.lhs / scale;
    row.pass = rep.alpha_min <= row.alpha && row.alpha <= rep.alpha_max;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

struct EmpiricalFRRow {
  std::int64_t g = 0;
  std::uint64_t count_plus = 0, count_minus = 0;
  double lhs = 0;
  double sigma = 0;
  double target = 0;
  double bound = 0;
  bool pass = false;
};

struct EmpiricalFRReport {
  MapKind family = MapKind::Generalized;
  Rational l;
  std::int64_t n = 0;
  std::uint64_t samples = 0;
  double z = 4.0;
  std::uint64_t min_count = 25;
  std::size_t excluded = 0;
  std::vector<EmpiricalFRRow> rows;

  bool passed() const {
    for (const auto& r : rows)
      if (!r.pass) return false;
    return true;
  }
};

/// ln(c_g / c_-g) against g ln(unit_base) with band ln(alpha_max) widened by
/// z standard errors (delta method: var = 1/c_g + 1/c_-g).
inline EmpiricalFRReport empirical_fr_report(const BakerFamily& fam, const EmpiricalDistribution& emp,
                                             double z = 4.0, std::uint64_t min_count = 25) {
  EmpiricalFRReport rep;
  rep.family = fam.kind();
  rep.l = fam.l();
  rep.n = emp.n;
  rep.samples = emp.samples;
  rep.z = z;
  rep.min_count = min_count;
  const double unit = log_of(fam.unit_base());
  const double bound = log_of(fam.alpha_max());
  for (const auto& [g, c] : emp.counts) {
    if (g <= 0) continue;
    const std::uint64_t cm = emp.count(-g);
    if (c < min_count || cm < min_count) {
      ++rep.excluded;
      continue;
    }
    EmpiricalFRRow row;
    row.g = g;
    row.count_plus = c;
    row.count_minus = cm;
    row.lhs = std::log(static_cast<double>(c) / static_cast<double>(cm));
    row.sigma = std::sqrt(1.0 / static_cast<double>(c) + 1.0 / static_cast<double>(cm));
    row.target = static_cast<double>(g) * unit;
    row.bound = bound;
    row.pass = std::abs(row.lhs - row.target) <= bound + z * row.sigma;
    rep.rows.push_back(row);
  }
  return rep;
}

// Per-sequence corrections alpha_omega.

struct AlphaReport {
  std::int64_t n = 0;
  std::uint64_t sequences = 0;
  Rational bound_lo, bound_hi;
  Rational seen_min, seen_max;
  std::string witness_min, witness_max;
  std::vector<std::string> violations;  // sequences outside the bounds or where the two routes differ

  bool extrema_attained() const { return seen_min == bound_lo && seen_max == bound_hi; }
  bool passed() const { return violations.empty(); }
};

/// The common value q_j of the non-zero entries of column j (p_ij = p_kj).
inline std::vector<Rational> column_values(const StochasticMatrix& p) {
  const std::size_t k = p.states.size();
  std::vector<Rational> q(k, Rational(0));
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < k; ++i) {
      if (p.p[i][j] == 0) continue;
      if (q[j] != 0 && q[j] != p.p[i][j]) throw ConsistencyError("transition column is not constant on its support");
      q[j] = p.p[i][j];
    }
  return q;
}

/// alpha_omega = [mu_{i_0} / mu_{s(i_{n-1})}] prod_i q_i^{-Delta_{i, s(i)}},
/// Delta_{ij} = [i_0 = i] - [i_{n-1} = j], s the G M region conjugacy.
inline Rational alpha_by_deltas(const BakerFamily& fam, const std::vector<Region>& seq) {
  const auto& chain = fam.chain();
  const auto q = column_values(chain.p);
  const Region first = seq.front(), last = seq.back();
  Rational a = chain.mu.at(first) / chain.mu.at(fam.conjugate(last));
  for (std::size_t i = 0; i < chain.p.states.size(); ++i) {
    const Region r = chain.p.states[i];
    const int delta = (first == r ? 1 : 0) - (last == fam.conjugate(r) ? 1 : 0);
    a *= pow(q[i], -delta);
  }
  return a;
}

inline Rational sequence_weight(const BakerFamily& fam, const std::vector<Region>& seq) {
  const auto& chain = fam.chain();
  Rational w = chain.mu.at(seq.front());
  for (std::size_t k = 0; k + 1 < seq.size(); ++k) w *= chain.p(seq[k], seq[k + 1]);
  return w;
}

/// w(omega) / (w(reversed omega) unit_base^g).
inline Rational alpha_by_ratio(const BakerFamily& fam, const std::vector<Region>& seq) {
  std::int64_t g = 0;
  for (Region r : seq) g += fam.units(r);
  const Rational back = sequence_weight(fam, reversed_symbols(fam, seq));
  if (back == 0) throw ConsistencyError("reversed sequence is inadmissible");
  return sequence_weight(fam, seq) / (back * pow(fam.unit_base(), g));
}

inline AlphaReport alpha_bounds_check(const BakerFamily& fam, std::int64_t n) {
  if (n < 1 || n > 16) throw ConstructionError("alpha enumeration needs 1 <= n <= 16");
  AlphaReport rep;
  rep.n = n;
  rep.bound_hi = fam.alpha_max();
  rep.bound_lo = 1 / rep.bound_hi;
  const auto& chain = fam.chain();
  std::vector<Region> seq;
  bool first = true;
  auto visit = [&](auto&& self) -> void {
    if (static_cast<std::int64_t>(seq.size()) == n) {
      ++rep.sequences;
      const Rational a = alpha_by_deltas(fam, seq);
      const Rational b = alpha_by_ratio(fam, seq);
      std::string s;
      for (Region r : seq) s += to_char(r);
      if (a != b || a < rep.bound_lo || a > rep.bound_hi) rep.violations.push_back(s);
      if (first || a < rep.seen_min) {
        rep.seen_min = a;
        rep.witness_min = s;
      }
      if (first || a > rep.seen_max) {
        rep.seen_max = a;
        rep.witness_max = s;
      }
      first = false;
      return;
    }
    for (Region r : chain.p.states) {
      if (!seq.empty() && !chain.p.allowed(seq.back(), r)) continue;
      seq.push_back(r);
      self(self);
      seq.pop_back();
    }
  };
  visit(visit);
  return rep;
}

// Irreversible composite K = M o N.

struct IrreversibleReport {
  EmpiricalFRReport fr;
  bool n_keeps_x = true;        // N acts on y only, so regions are preserved
  bool n_unit_jacobian = true;  // N does not contract
  bool k_invertible = false;
  bool passed() const { return fr.passed() && n_keeps_x && n_unit_jacobian; }
};

inline IrreversibleReport verify_fr_irreversible(const Rational& l, const Strip& strip, std::int64_t n,
                                                 const EnsembleSpec& spec, std::int64_t transient = kDefaultTransient) {
  const BakerFamily fam = BakerFamily::generalized(l);
  const auto N = build_perturbation_N(l, strip.x_tilde, strip.eps);
  const auto K = compose(fam.map(), N, "composite_K");
  IrreversibleReport rep;
  for (const auto& b : N.branches()) {
    const auto& a = b.action();
    if (!(a.xx == 1 && a.xy == 0 && a.x0 == 0)) rep.n_keeps_x = false;
    if (b.jacobian() != 1) rep.n_unit_jacobian = false;
    if (fam.map().region_of(PhasePoint<Rational>{b.domain().x_lo, b.domain().y_lo}) != b.label())
      rep.n_keeps_x = false;
  }
  rep.k_invertible = K.invertible();
  const auto emp = monte_carlo_distribution(fam, K.cast<double>(), n, spec, transient);
  rep.fr = empirical_fr_report(fam, emp);
  return rep;
}

/// <Lambda> estimated from one stationary point per sample, in natural-log units.
struct MeanLambdaEstimate {
  double mean = 0;
  double std_error = 0;
  std::uint64_t samples = 0;
};

inline MeanLambdaEstimate mean_lambda_monte_carlo(const BakerFamily& fam, const PiecewiseAffineMap<double>& map,
                                                  const EnsembleSpec& spec,
                                                  std::int64_t transient = kDefaultTransient) {
  const auto& units = fam.units_by_region();
  const double unit = log_of(fam.unit_base());
  auto body = [&](std::uint64_t, std::uint64_t count, Rng& rng) {
    Moments m;
    for (std::uint64_t s = 0; s < count; ++s) {
      PhasePoint<double> p = uniform_point(rng);
      for (std::int64_t t = 0; t < transient; ++t) p = noisy_step(map, p, rng);
      m.add(units[index_of(map.region_of(p))] * unit);
    }
    return m;
  };
  const Moments m = run_sharded<Moments>(spec, body, [](Moments& a, const Moments& b) { a.merge(b); });
  return {m.mean(), m.stderr_of_mean(), m.count};
}

}  // namespace bakerfr
