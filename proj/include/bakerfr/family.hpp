// A baker-map family instance: map kind plus parameter l, with everything
// that follows from it (map, involution, region chain, contraction unit).
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bakerfr/core_maps.hpp"
#include "bakerfr/errors.hpp"
#include "bakerfr/rational.hpp"
#include "bakerfr/transfer.hpp"

namespace bakerfr {

/// coefficient * ln(base), kept symbolic so identities between logarithmic
/// quantities can be checked exactly.
struct LogQuantity {
  Rational coefficient;
  Rational base;

  double value() const { return coefficient == 0 ? 0.0 : to_double(coefficient) * log_of(base); }
  bool is_zero() const { return coefficient == 0 || base == 1; }
};

/// Exact equality of c ln b and c' ln b' for the forms that occur here
/// (same base, or reciprocal bases with opposite coefficients).
inline bool same_value(const LogQuantity& a, const LogQuantity& b) {
  if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
  if (a.base == b.base) return a.coefficient == b.coefficient;
  if (a.base * b.base == 1) return a.coefficient == -b.coefficient;
  return false;
}

/// Contraction per step in units of ln(unit_base): J = unit_base^(-k), k in {-1,0,1}.
template <class S>
int contraction_units(const S& jacobian, const S& unit_base) {
  if (jacobian == S(1)) return 0;
  if (jacobian * unit_base == S(1)) return 1;
  if (jacobian == unit_base) return -1;
  throw ConsistencyError("jacobian is not a power of the contraction unit");
}

struct MarkovChain {
  StochasticMatrix p;
  RegionMeasures mu;
};

class BakerFamily {
 public:
  static BakerFamily simple(const Rational& l) {
    if (!(l > 0 && l < 1)) throw ConstructionError("simple baker map needs 0 < l < 1, got " + to_string(l));
    return BakerFamily(MapKind::Simple, l);
  }
  static BakerFamily generalized(const Rational& l) {
    check_generalized_l(l);
    return BakerFamily(MapKind::Generalized, l);
  }
  static BakerFamily of(MapKind kind, const Rational& l) {
    return kind == MapKind::Simple ? simple(l) : generalized(l);
  }

  MapKind kind() const { return kind_; }
  const Rational& l() const { return l_; }
  std::string tag() const { return to_string(kind_); }

  const PiecewiseAffineMap<Rational>& map() const { return map_; }
  PiecewiseAffineMap<Rational> involution() const { return build_involution(kind_); }

  std::vector<Region> regions() const {
    if (kind_ == MapKind::Simple) return {Region::A, Region::B};
    return {Region::A, Region::B, Region::C, Region::D};
  }

  /// e^unit: l/r for the simple map (Lambda_A = ln(l/r)), J_C = 2(1-2l) for the generalized map (phi).
  Rational unit_base() const {
    if (kind_ == MapKind::Simple) return l_ / (1 - l_);
    return 2 * (1 - 2 * l_);
  }

  /// Lambda on a region in contraction units, derived from the branch Jacobians.
  int units(Region r) const { return units_[index_of(r)]; }
  const std::vector<int>& units_by_region() const { return units_; }

  /// The region j with G M (i) = j: A<->B for the simple map; B<->C with A, D fixed otherwise.
  Region conjugate(Region r) const {
    if (kind_ == MapKind::Simple) return r == Region::A ? Region::B : Region::A;
    if (r == Region::B) return Region::C;
    if (r == Region::C) return Region::B;
    return r;
  }

  /// Upper bound of the per-sequence correction alpha; 1 for the simple map, 1/(4l) otherwise.
  Rational alpha_max() const { return kind_ == MapKind::Simple ? Rational(1) : 1 / (4 * l_); }

  /// Region chain: Bernoulli (p_ij = mu_j) for the simple map, the four-state chain otherwise.
  const MarkovChain& chain() const { return chain_; }

  /// Lebesgue measure of each region (the microcanonical start).
  RegionMeasures lebesgue_measures() const {
    RegionMeasures out{regions(), {}};
    for (Region r : out.states) out.mu.push_back(map_.region_rect(r)->area());
    return out;
  }

 private:
  BakerFamily(MapKind kind, Rational l)
      : kind_(kind),
        l_(std::move(l)),
        map_(kind_ == MapKind::Simple ? build_simple_baker(l_) : build_generalized_baker(l_)) {
    units_.assign(kMaxRegions, 0);
    if (unit_base() == 1) {
      // All jacobians are 1 here; keep the region pattern the rest of the family has.
      if (kind_ == MapKind::Simple) {
        units_[index_of(Region::A)] = 1;
        units_[index_of(Region::B)] = -1;
      } else {
        units_[index_of(Region::B)] = 1;
        units_[index_of(Region::C)] = -1;
      }
    }
    bool seen[kMaxRegions] = {};
    for (const auto& b : map_.branches()) {
      if (unit_base() == 1) break;
      const int u = contraction_units(b.jacobian(), unit_base());
      if (seen[index_of(b.label())] && units_[index_of(b.label())] != u)
        throw ConsistencyError("region with two different jacobians");
      seen[index_of(b.label())] = true;
      units_[index_of(b.label())] = u;
    }
    if (kind_ == MapKind::Simple) {
      // Bernoulli chain: p_ij = mu_j
      const Rational r = 1 - l_;
      chain_ = {StochasticMatrix{{Region::A, Region::B}, {{l_, r}, {l_, r}}},
                RegionMeasures{{Region::A, Region::B}, {l_, r}}};
    } else {
      chain_ = {transition_matrix(l_), region_measures(l_)};
    }
  }

  MapKind kind_;
  Rational l_;
  PiecewiseAffineMap<Rational> map_;
  std::vector<int> units_;
  MarkovChain chain_;
};

}  // namespace bakerfr
