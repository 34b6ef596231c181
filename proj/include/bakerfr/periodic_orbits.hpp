// Periodic-orbit expansion of the g distribution. For the simple map every
// binary code of length n is a fixed point of M^n with weight l^alpha r^beta;
// for the generalized map the same recipe is only a diagnostic.
#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "bakerfr/errors.hpp"
#include "bakerfr/family.hpp"
#include "bakerfr/fluctuation.hpp"
#include "bakerfr/rational.hpp"
#include "bakerfr/transfer.hpp"

namespace bakerfr {

inline constexpr int kMaxOrbitLength = 20;

struct PeriodicOrbit {
  std::vector<Region> cycle;
  int alpha = 0;  // visits to A (simple map)
  int beta = 0;   // visits to B (simple map)
  std::int64_t g = 0;
  Rational weight;   // inverse unstable Jacobian of the cycle
  Rational x_point;  // periodic point whose itinerary starts the cycle
  bool realized = true;

  std::string code() const {
    std::string s;
    for (Region r : cycle) s += to_char(r);
    return s;
  }
};

namespace detail {

/// Depth-first over codes so that affine prefixes S x + T are shared.
template <class Allowed, class Emit>
void walk_codes(const IntervalMap<Rational>& f, const std::vector<Region>& alphabet, int n, Allowed allowed,
                Emit emit) {
  std::vector<Region> code;
  std::vector<Rational> slope{Rational(1)}, offset{Rational(0)}, inv_j{Rational(1)};
  auto branch_of = [&](Region r) -> const IntervalBranch<Rational>& {
    for (const auto& b : f.branches())
      if (b.label == r) return b;
    throw ConsistencyError("no interval branch for a region");
  };
  auto rec = [&](auto&& self) -> void {
    if (static_cast<int>(code.size()) == n) {
      if (!allowed(code.back(), code.front())) return;
      emit(code, slope.back(), offset.back(), inv_j.back());
      return;
    }
    for (Region r : alphabet) {
      if (!code.empty() && !allowed(code.back(), r)) continue;
      const auto& b = branch_of(r);
      code.push_back(r);
      slope.push_back(b.slope * slope.back());
      offset.push_back(b.slope * offset.back() + b.offset);
      inv_j.push_back(inv_j.back() / abs(b.slope));
      self(self);
      code.pop_back();
      slope.pop_back();
      offset.pop_back();
      inv_j.pop_back();
    }
  };
  rec(rec);
}

inline bool follows_code(const IntervalMap<Rational>& f, Rational x, const std::vector<Region>& code) {
  for (Region r : code) {
    if (f.branch_at(x).label != r) return false;
    x = f.apply(x);
  }
  return true;
}

}  // namespace detail

/// All 2^n codes of length n for the simple map with their exact periodic points.
inline std::vector<PeriodicOrbit> enumerate_orbits(const BakerFamily& fam, int n) {
  if (n < 1 || n > kMaxOrbitLength) throw ConstructionError("orbit length must be in [1, 20]");
  if (fam.kind() != MapKind::Simple)
    throw UnsupportedOperation("periodic-orbit enumeration is exact only for the simple map");
  const auto f = project_unstable(fam.map());
  std::vector<PeriodicOrbit> out;
  out.reserve(std::size_t{1} << n);
  detail::walk_codes(
      f, {Region::A, Region::B}, n, [](Region, Region) { return true; },
      [&](const std::vector<Region>& code, const Rational& s, const Rational& t, const Rational& w) {
        PeriodicOrbit o;
        o.cycle = code;
        for (Region r : code) (r == Region::A ? o.alpha : o.beta) += 1;
        o.g = o.alpha - o.beta;
        o.weight = w;
        o.x_point = t / (1 - s);
        out.push_back(std::move(o));
      });
  for (auto& o : out) o.realized = detail::follows_code(f, o.x_point, o.cycle);
  return out;
}

/// (J^u)^{-1} = l^alpha r^beta, from the orbit's symbol counts.
inline Rational orbit_weight(const BakerFamily& fam, const PeriodicOrbit& o) {
  if (fam.kind() != MapKind::Simple) throw UnsupportedOperation("closed-form orbit weight needs the simple map");
  return pow(fam.l(), o.alpha) * pow(1 - fam.l(), o.beta);
}

inline SymbolDistribution upo_distribution(const BakerFamily& fam, int n) {
  const auto orbits = enumerate_orbits(fam, n);
  SymbolDistribution d{fam.kind(), fam.l(), n, {}};
  Rational norm(0);
  for (const auto& o : orbits) {
    d.p[o.g] += o.weight;
    norm += o.weight;
  }
  if (norm != 1) {
    for (auto& [g, v] : d.p) v /= norm;
  }
  return d;
}

struct UpoDiagnostic {
  std::int64_t n = 0;
  std::uint64_t cycles = 0;
  std::uint64_t unrealized = 0;
  Rational normalization;  // sum of raw weights
  SymbolDistribution upo;
  SymbolDistribution dp;
  double max_abs_difference = 0;
};

/// Generalized map: weights 1/J^u over admissible cyclic codes, compared with
/// the DP distribution. Nothing is asserted about agreement.
inline UpoDiagnostic upo_diagnostic(const BakerFamily& fam, int n) {
  if (n < 1 || n > 16) throw ConstructionError("diagnostic cycle length must be in [1, 16]");
  const auto f = project_unstable(fam.map());
  const auto& chain = fam.chain();
  UpoDiagnostic diag;
  diag.n = n;
  diag.upo = SymbolDistribution{fam.kind(), fam.l(), n, {}};
  detail::walk_codes(
      f, fam.regions(), n, [&](Region a, Region b) { return chain.p.allowed(a, b); },
      [&](const std::vector<Region>& code, const Rational& s, const Rational& t, const Rational& w) {
        ++diag.cycles;
        std::int64_t g = 0;
        for (Region r : code) g += fam.units(r);
        if (!detail::follows_code(f, t / (1 - s), code)) ++diag.unrealized;
        diag.upo.p[g] += w;
        diag.normalization += w;
      });
  for (auto& [g, v] : diag.upo.p) v /= diag.normalization;
  diag.dp = exact_distribution(fam, n);
  for (std::int64_t g = -n; g <= n; ++g)
    diag.max_abs_difference =
        std::max(diag.max_abs_difference, std::abs(to_double(diag.upo.at(g)) - to_double(diag.dp.at(g))));
  return diag;
}

/// code, alpha, beta, weight numerator, weight denominator, x_point
inline void write_orbits_csv(std::ostream& os, const std::vector<PeriodicOrbit>& orbits) {
  os << "code,alpha,beta,weight_num,weight_den,x_point\n";
  for (const auto& o : orbits)
    os << o.code() << ',' << o.alpha << ',' << o.beta << ',' << numerator_of(o.weight) << ','
       << denominator_of(o.weight) << ',' << to_string(o.x_point) << '\n';
}

}  // namespace bakerfr
