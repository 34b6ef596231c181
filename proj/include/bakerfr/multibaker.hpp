// Multibaker lift of the generalized map: an unbounded chain of unit cells
// where points leaving region B move one cell right and points leaving C
// one cell left. The mean drift per step is the current Psi.
#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <vector>

#include "bakerfr/core_maps.hpp"
#include "bakerfr/errors.hpp"
#include "bakerfr/family.hpp"
#include "bakerfr/observables.hpp"
#include "bakerfr/rational.hpp"
#include "bakerfr/sampling.hpp"

namespace bakerfr {

template <class S>
struct ChainState {
  std::int64_t cell = 0;
  PhasePoint<S> local;
  friend bool operator==(const ChainState&, const ChainState&) = default;
};

inline int cell_shift(Region r) {
  if (r == Region::B) return 1;
  if (r == Region::C) return -1;
  return 0;
}

template <class S>
ChainState<S> lift_step(const PiecewiseAffineMap<S>& map, const ChainState<S>& s) {
  const auto& b = map.branch_at(s.local);
  return {s.cell + cell_shift(b.label()), b.action()(s.local)};
}

/// Psi = (1 - 4l)/(1 + 4l); cross-checked against b/(4 - 3b) and mu_B - mu_C.
inline Rational analytic_current(const Rational& l) {
  check_generalized_l(l);
  const Rational psi = (1 - 4 * l) / (1 + 4 * l);
  if (psi != psi_of_bias(bias_of(l))) throw ConsistencyError("current: bias form disagrees");
  const auto mu = generalized_region_measures_closed_form(l);
  if (psi != mu.at(Region::B) - mu.at(Region::C)) throw ConsistencyError("current: measure form disagrees");
  return psi;
}

struct CurrentEstimate {
  double psi_hat = 0;
  double std_error = 0;
  std::int64_t steps = 0;
  std::uint64_t particles = 0;
  double lambda_hat = 0;  // psi_hat * phi
  double lambda_std_error = 0;
};

/// Particles start uniformly in cell 0, run `transient` steps, then the
/// displacement over `steps` steps is recorded per particle.
inline CurrentEstimate simulate_current(const Rational& l, std::uint64_t particles, std::int64_t steps,
                                        std::uint64_t seed, std::int64_t transient = 100, unsigned threads = 0) {
  if (steps < 1) throw ConstructionError("simulate_current needs at least one step");
  const BakerFamily fam = BakerFamily::generalized(l);
  const auto map = fam.map().cast<double>();
  EnsembleSpec spec{particles, seed, 1024, threads};
  auto body = [&](std::uint64_t, std::uint64_t count, Rng& rng) {
    Moments m;
    for (std::uint64_t s = 0; s < count; ++s) {
      PhasePoint<double> p = uniform_point(rng);
      for (std::int64_t t = 0; t < transient; ++t) p = noisy_step(map, p, rng);
      std::int64_t cell = 0;
      for (std::int64_t t = 0; t < steps; ++t) cell += cell_shift(noisy_advance(map, p, rng));
      m.add(static_cast<double>(cell) / static_cast<double>(steps));
    }
    return m;
  };
  const Moments m = run_sharded<Moments>(spec, body, [](Moments& a, const Moments& b) { a.merge(b); });
  const double phi = log_of(fam.unit_base());
  return {m.mean(), m.stderr_of_mean(), steps, m.count, m.mean() * phi, m.stderr_of_mean() * phi};
}

struct ResponseRow {
  Rational b;
  Rational l;
  Rational psi_analytic;
  LogQuantity lambda_analytic;
  CurrentEstimate sim;

  double psi_over_b() const { return sim.psi_hat / to_double(b); }
  double lambda_over_b2() const { return sim.lambda_hat / (to_double(b) * to_double(b)); }
  /// |psi_hat - Psi| <= z stderr and the same for <Lambda>.
  bool consistent(double z = 4.0) const {
    return std::abs(sim.psi_hat - to_double(psi_analytic)) <= z * sim.std_error &&
           std::abs(sim.lambda_hat - lambda_analytic.value()) <= z * sim.lambda_std_error;
  }
};

inline std::vector<ResponseRow> linear_response_sweep(const std::vector<Rational>& b_values, std::uint64_t particles,
                                                      std::int64_t steps, std::uint64_t seed,
                                                      std::int64_t transient = 100, unsigned threads = 0) {
  std::vector<ResponseRow> rows;
  std::uint64_t k = 0;
  for (const auto& b : b_values) {
    if (!(b > 0 && b < 1)) throw ConstructionError("bias b must lie in (0, 1), got " + to_string(b));
    const Rational l = l_of_bias(b);
    if (bias_of(l) != b) throw ConsistencyError("bias inversion failed");
    const BakerFamily fam = BakerFamily::generalized(l);
    rows.push_back({b, l, analytic_current(l), mean_lambda_analytic(fam),
                    simulate_current(l, particles, steps, seed + k++, transient, threads)});
  }
  return rows;
}

/// b, l, psi_analytic, psi_hat, stderr, lambda_analytic, lambda_hat
inline void write_sweep_csv(std::ostream& os, const std::vector<ResponseRow>& rows) {
  os << "b,l,psi_analytic,psi_hat,stderr,lambda_analytic,lambda_hat\n";
  os.precision(17);
  for (const auto& r : rows)
    os << to_string(r.b) << ',' << to_string(r.l) << ',' << to_double(r.psi_analytic) << ',' << r.sim.psi_hat << ','
       << r.sim.std_error << ',' << r.lambda_analytic.value() << ',' << r.sim.lambda_hat << '\n';
}

}  // namespace bakerfr
