// Phase-space contraction along trajectories: Lambda(x), segment averages,
// the g statistic, e_n, reversed segments and the dissipation function.
//
// Contraction is carried as an integer number of units of ln(unit_base)
// (phi = ln J_C for the generalized map, ln(l/r) for the simple one), so
// every identity between segment averages is an integer identity.
#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bakerfr/core_maps.hpp"
#include "bakerfr/errors.hpp"
#include "bakerfr/family.hpp"
#include "bakerfr/rational.hpp"
#include "bakerfr/transfer.hpp"

namespace bakerfr {

inline constexpr std::int64_t kExactStepCap = 64;

template <class S>
double log_jacobian(const S& j) {
  if constexpr (is_exact_v<S>) {
    return log_of(j);
  } else {
    return std::log(j);
  }
}

/// Lambda(p) = -ln J_M(p).
template <class S>
double lambda_at(const PiecewiseAffineMap<S>& map, const PhasePoint<S>& p) {
  return -log_jacobian(map.jacobian_at(p));
}

/// Lambda(p) in contraction units of the family, read off the region label.
template <class S>
int lambda_units_at(const BakerFamily& fam, const PiecewiseAffineMap<S>& map, const PhasePoint<S>& p) {
  return fam.units(map.region_of(p));
}

struct ContractionStats {
  std::int64_t n = 0;
  std::int64_t g = 0;
  Rational unit_base{1};
  std::optional<LogQuantity> mean_lambda;

  /// n * lambda_bar = g ln(unit_base)
  LogQuantity total() const { return {Rational(g), unit_base}; }
  double lambda_bar() const { return n == 0 ? 0.0 : static_cast<double>(g) * log_of(unit_base) / n; }
  bool e_n_defined() const { return mean_lambda && !mean_lambda->is_zero(); }
  double e_n() const {
    if (!e_n_defined()) throw UndefinedValue("e_n is undefined when <Lambda> = 0");
    return lambda_bar() / mean_lambda->value();
  }
};

/// <Lambda> in units of ln(unit_base): (l - r) ln(l/r) for the simple map,
/// phi (1 - 4l)/(1 + 4l) for the generalized map.
inline LogQuantity mean_lambda_analytic(const BakerFamily& fam) {
  const Rational& l = fam.l();
  if (fam.kind() == MapKind::Simple) return {l - (1 - l), fam.unit_base()};
  return {(1 - 4 * l) / (1 + 4 * l), fam.unit_base()};
}

inline Rational bias_of(const Rational& l) { return 2 - 1 / (1 - 2 * l); }
inline Rational l_of_bias(const Rational& b) { return (1 - b) / (2 * (2 - b)); }
inline Rational psi_of_bias(const Rational& b) { return b / (4 - 3 * b); }

/// Independent derivations of <Lambda>, each as coefficient * ln(base).
struct NamedLog {
  std::string route;
  LogQuantity value;
};

inline std::vector<NamedLog> mean_lambda_routes(const BakerFamily& fam) {
  std::vector<NamedLog> out;
  out.push_back({"closed_form", mean_lambda_analytic(fam)});
  const MarkovChain& chain = fam.chain();
  Rational avg(0);
  for (Region r : chain.mu.states) avg += chain.mu.at(r) * fam.units(r);
  out.push_back({"stationary_average", {avg, fam.unit_base()}});
  if (fam.kind() == MapKind::Generalized) {
    // -Psi(b) ln((2 - b)/2)
    const Rational b = bias_of(fam.l());
    out.push_back({"bias_form", {-psi_of_bias(b), (2 - b) / 2}});
    out.push_back({"phi_times_current", {chain.mu.at(Region::B) - chain.mu.at(Region::C), fam.unit_base()}});
  } else {
    const auto dens = invariant_density(project_unstable(fam.map()));
    const Rational mu_a = dens.mass(Rational(0), fam.l());
    out.push_back({"density_route", {mu_a - (1 - mu_a), fam.unit_base()}});
  }
  return out;
}

/// Segment-start average over x_0 .. x_{n-1}.
template <class S>
ContractionStats average_contraction(const BakerFamily& fam, const PiecewiseAffineMap<S>& map,
                                     PhasePoint<S> x0, std::int64_t n) {
  if (n < 1) throw ConstructionError("segment length must be at least 1");
  if constexpr (is_exact_v<S>) {
    if (n > kExactStepCap * 8)
      throw ConstructionError("exact trajectory too long; use the float backend");
  }
  const auto& units = fam.units_by_region();
  ContractionStats st;
  st.n = n;
  st.unit_base = fam.unit_base();
  st.mean_lambda = mean_lambda_analytic(fam);
  for (std::int64_t k = 0; k < n; ++k) {
    st.g += units[index_of(map.region_of(x0))];
    if (k + 1 < n) x0 = map.apply(x0);
  }
  return st;
}

struct SymbolSequence {
  std::vector<Region> labels;
  bool admissible = true;

  std::string str() const {
    std::string s;
    for (Region r : labels) s += to_char(r);
    return s;
  }
};

inline bool admissible(const StochasticMatrix& p, const std::vector<Region>& labels) {
  for (std::size_t k = 0; k + 1 < labels.size(); ++k)
    if (!p.allowed(labels[k], labels[k + 1])) return false;
  return true;
}

inline SymbolSequence make_symbols(const BakerFamily& fam, std::vector<Region> labels) {
  const bool ok = admissible(fam.chain().p, labels);
  return {std::move(labels), ok};
}

template <class S>
struct TrajectorySegment {
  PhasePoint<S> initial;
  std::int64_t n = 0;
  std::vector<PhasePoint<S>> points;  // x_0 .. x_n when stored
  SymbolSequence symbols;             // labels of x_0 .. x_n
};

template <class S>
TrajectorySegment<S> trajectory(const BakerFamily& fam, const PiecewiseAffineMap<S>& map, const PhasePoint<S>& x0,
                                std::int64_t n, bool store_points = true) {
  TrajectorySegment<S> seg{x0, n, {}, {}};
  std::vector<Region> labels;
  PhasePoint<S> p = x0;
  for (std::int64_t k = 0; k <= n; ++k) {
    if (store_points) seg.points.push_back(p);
    labels.push_back(map.region_of(p));
    if (k < n) p = map.apply(p);
  }
  seg.symbols = make_symbols(fam, std::move(labels));
  return seg;
}

/// Symbols of x_0 .. x_{n-1} read backward with the G M conjugacy applied:
/// the symbols of the reversed segment started at G M^n x_0.
inline std::vector<Region> reversed_symbols(const BakerFamily& fam, const std::vector<Region>& forward) {
  std::vector<Region> out(forward.rbegin(), forward.rend());
  for (auto& r : out) r = fam.conjugate(r);
  return out;
}

/// G M^n x0; with exact scalars also checks it equals M^{-n} G x0.
template <class S>
PhasePoint<S> reversed_initial(const PiecewiseAffineMap<S>& map, const PiecewiseAffineMap<S>& G,
                               const PhasePoint<S>& x0, std::int64_t n) {
  if (!map.invertible()) throw UnsupportedOperation(map.name() + " is not invertible, no reversed segment");
  const PhasePoint<S> fwd = G.apply(iterate(map, x0, n));
  if constexpr (is_exact_v<S>) {
    if (iterate_inverse(map, G.apply(x0), n) != fwd)
      throw UnsupportedOperation(map.name() + " is not reversible under " + G.name());
  }
  return fwd;
}

/// The same segment viewed from its middle point x_{n/2}; g and n are unchanged.
template <class S>
struct MiddlePointView {
  PhasePoint<S> middle;
  std::int64_t offset = 0;
  ContractionStats stats;
};

template <class S>
MiddlePointView<S> middle_point_view(const BakerFamily& fam, const PiecewiseAffineMap<S>& map,
                                     const PhasePoint<S>& x0, std::int64_t n) {
  const std::int64_t half = n / 2;
  return {iterate(map, x0, half), half, average_contraction(fam, map, x0, n)};
}

/// Omega(p) = ln(rho(p)/rho(GMp)) + Lambda(p); rho is a density in x.
struct DissipationValue {
  Rational density_ratio{1};
  int units = 0;
  Rational unit_base{1};

  double value() const { return log_of(density_ratio) + units * log_of(unit_base); }
  bool is_zero() const { return density_ratio == 1 && (units == 0 || unit_base == 1); }
};

inline DissipationValue dissipation_function(const BakerFamily& fam, const StepDensity<Rational>& rho,
                                             const PhasePoint<Rational>& p) {
  const auto& m = fam.map();
  const auto g = fam.involution();
  const PhasePoint<Rational> back = g.apply(m.apply(p));
  const Rational a = rho(p.x);
  const Rational b = rho(back.x);
  if (a <= 0 || b <= 0) throw UndefinedValue("dissipation function needs a positive density at p and GMp");
  return {a / b, fam.units(m.region_of(p)), fam.unit_base()};
}

inline DissipationValue dissipation_function(const BakerFamily& fam, const PhasePoint<Rational>& p) {
  return dissipation_function(fam, StepDensity<Rational>::uniform(), p);
}

/// k, x, y, region, cumulative g (over x_0 .. x_k).
template <class S>
void write_trajectory_csv(std::ostream& os, const BakerFamily& fam, const TrajectorySegment<S>& seg) {
  os << "k,x,y,region,g\n";
  std::int64_t g = 0;
  for (std::size_t k = 0; k < seg.points.size(); ++k) {
    const Region r = seg.symbols.labels[k];
    g += fam.units(r);
    os << k << ',';
    if constexpr (is_exact_v<S>) {
      os << to_string(seg.points[k].x) << ',' << to_string(seg.points[k].y);
    } else {
      os << seg.points[k].x << ',' << seg.points[k].y;
    }
    os << ',' << to_char(r) << ',' << g << '\n';
  }
}

}  // namespace bakerfr
