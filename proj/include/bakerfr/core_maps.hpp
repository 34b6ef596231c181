// Piecewise-affine maps of the unit square: the simple and generalized
// dissipative baker maps, their time-reversal involutions, the irreversible
// strip perturbation N and compositions such as K = M o N.
//
// Every rectangle (branch domain or image) uses one boundary convention:
// [lo, hi) on each axis, closed at the top when hi == 1. With it the branch
// domains of each map partition [0,1]^2 and region lookup is total.
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bakerfr/errors.hpp"
#include "bakerfr/rational.hpp"

namespace bakerfr {

enum class Region : std::uint8_t { A = 0, B = 1, C = 2, D = 3 };

inline constexpr std::size_t kMaxRegions = 4;

inline char to_char(Region r) { return static_cast<char>('A' + static_cast<int>(r)); }

inline Region region_from_char(char c) {
  if (c < 'A' || c > 'D') throw ConstructionError(std::string("unknown region label '") + c + "'");
  return static_cast<Region>(c - 'A');
}

inline std::size_t index_of(Region r) { return static_cast<std::size_t>(r); }

template <class S>
struct PhasePoint {
  S x;
  S y;
  friend bool operator==(const PhasePoint&, const PhasePoint&) = default;
};

template <class S>
bool in_unit_interval_convention(const S& v, const S& lo, const S& hi) {
  return lo <= v && (v < hi || (v == hi && hi == S(1)));
}

template <class S>
struct Rect {
  S x_lo, x_hi, y_lo, y_hi;

  bool contains(const PhasePoint<S>& p) const {
    return in_unit_interval_convention(p.x, x_lo, x_hi) && in_unit_interval_convention(p.y, y_lo, y_hi);
  }
  bool empty() const { return !(x_lo < x_hi) || !(y_lo < y_hi); }
  S area() const { return empty() ? S(0) : S((x_hi - x_lo) * (y_hi - y_lo)); }
  /// Closure containment, used for region-level (coarse) statements.
  bool encloses(const Rect& o) const {
    return x_lo <= o.x_lo && o.x_hi <= x_hi && y_lo <= o.y_lo && o.y_hi <= y_hi;
  }
  Rect intersect(const Rect& o) const {
    return {std::max(x_lo, o.x_lo), std::min(x_hi, o.x_hi), std::max(y_lo, o.y_lo), std::min(y_hi, o.y_hi)};
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

template <class S>
S overlap_area(const Rect<S>& a, const Rect<S>& b) {
  return a.intersect(b).area();
}

/// (x, y) -> (xx*x + xy*y + x0, yx*x + yy*y + y0). Only axis-aligned linear
/// parts (diagonal or anti-diagonal) are admitted, so rectangles map to rectangles.
template <class S>
struct AffineAction {
  S xx, xy, yx, yy;
  S x0, y0;

  static AffineAction identity() { return {S(1), S(0), S(0), S(1), S(0), S(0)}; }

  PhasePoint<S> operator()(const PhasePoint<S>& p) const {
    return {S(xx * p.x + xy * p.y + x0), S(yx * p.x + yy * p.y + y0)};
  }
  S det() const { return S(xx * yy - xy * yx); }
  bool axis_aligned() const { return (xy == S(0) && yx == S(0)) || (xx == S(0) && yy == S(0)); }
  bool diagonal() const { return xy == S(0) && yx == S(0); }

  AffineAction inverse() const {
    const S d = det();
    if (d == S(0)) throw UnsupportedOperation("singular affine action has no inverse");
    const S ixx = yy / d, ixy = -xy / d, iyx = -yx / d, iyy = xx / d;
    return {ixx, ixy, iyx, iyy, S(-(ixx * x0 + ixy * y0)), S(-(iyx * x0 + iyy * y0))};
  }

  /// outer o (*this)
  AffineAction then(const AffineAction& outer) const {
    return {S(outer.xx * xx + outer.xy * yx), S(outer.xx * xy + outer.xy * yy),
            S(outer.yx * xx + outer.yy * yx), S(outer.yx * xy + outer.yy * yy),
            S(outer.xx * x0 + outer.xy * y0 + outer.x0), S(outer.yx * x0 + outer.yy * y0 + outer.y0)};
  }

  /// Image of a rectangle, canonicalised to the half-open convention.
  Rect<S> image(const Rect<S>& r) const {
    const PhasePoint<S> a = (*this)({r.x_lo, r.y_lo});
    const PhasePoint<S> b = (*this)({r.x_hi, r.y_hi});
    return {std::min(a.x, b.x), std::max(a.x, b.x), std::min(a.y, b.y), std::max(a.y, b.y)};
  }

  template <class T>
  AffineAction<T> cast() const {
    return {scalar_cast<T>(xx), scalar_cast<T>(xy), scalar_cast<T>(yx),
            scalar_cast<T>(yy), scalar_cast<T>(x0), scalar_cast<T>(y0)};
  }
  friend bool operator==(const AffineAction&, const AffineAction&) = default;
};

template <class S>
S abs_value(const S& v) {
  return v < S(0) ? S(-v) : v;
}

template <class S>
class AffineBranch {
 public:
  AffineBranch(Rect<S> domain, AffineAction<S> action, Region label)
      : domain_(std::move(domain)), action_(std::move(action)), label_(label) {
    if (!action_.axis_aligned()) throw ConstructionError("branch action is not axis aligned");
    jacobian_ = abs_value(action_.det());
    if (jacobian_ == S(0)) throw ConstructionError("branch action is singular");
  }

  /// Same as above, but also asserts a stated Jacobian against |det|.
  AffineBranch(Rect<S> domain, AffineAction<S> action, Region label, const S& declared_jacobian)
      : AffineBranch(std::move(domain), std::move(action), label) {
    if constexpr (is_exact_v<S>) {
      if (jacobian_ != declared_jacobian) throw ConstructionError("declared jacobian differs from |det|");
    } else {
      if (std::abs(jacobian_ - declared_jacobian) > 1e-12 * std::max(S(1), jacobian_))
        throw ConstructionError("declared jacobian differs from |det|");
    }
  }

  const Rect<S>& domain() const { return domain_; }
  const AffineAction<S>& action() const { return action_; }
  const S& jacobian() const { return jacobian_; }
  Region label() const { return label_; }
  Rect<S> image() const { return action_.image(domain_); }

  /// Stretch along x and contraction along y; defined for diagonal actions.
  S unstable_factor() const {
    if (!action_.diagonal()) throw UnsupportedOperation("unstable factor needs a diagonal action");
    return abs_value(action_.xx);
  }
  S stable_factor() const {
    if (!action_.diagonal()) throw UnsupportedOperation("stable factor needs a diagonal action");
    return abs_value(action_.yy);
  }

  template <class T>
  AffineBranch<T> cast() const {
    const Rect<T> d{scalar_cast<T>(domain_.x_lo), scalar_cast<T>(domain_.x_hi), scalar_cast<T>(domain_.y_lo),
                    scalar_cast<T>(domain_.y_hi)};
    return AffineBranch<T>(d, action_.template cast<T>(), label_);
  }

  friend bool operator==(const AffineBranch& a, const AffineBranch& b) {
    return a.domain_ == b.domain_ && a.action_ == b.action_ && a.label_ == b.label_;
  }

 private:
  Rect<S> domain_;
  AffineAction<S> action_;
  Region label_;
  S jacobian_;
};

template <class S>
class PiecewiseAffineMap {
 public:
  PiecewiseAffineMap(std::string name, std::vector<AffineBranch<S>> branches)
      : name_(std::move(name)), branches_(std::move(branches)) {
    if (branches_.empty()) throw ConstructionError(name_ + ": map without branches");
    validate_partition();
    invertible_ = images_tile();
  }

  const std::string& name() const { return name_; }
  const std::vector<AffineBranch<S>>& branches() const { return branches_; }
  bool invertible() const { return invertible_; }

  const AffineBranch<S>& branch_at(const PhasePoint<S>& p) const {
    for (const auto& b : branches_)
      if (b.domain().contains(p)) return b;
    throw std::out_of_range(name_ + ": point outside the unit square");
  }

  PhasePoint<S> apply(const PhasePoint<S>& p) const { return branch_at(p).action()(p); }

  PhasePoint<S> apply_inverse(const PhasePoint<S>& p) const {
    if (!invertible_) throw UnsupportedOperation(name_ + " is not invertible");
    for (const auto& b : branches_)
      if (b.image().contains(p)) return b.action().inverse()(p);
    throw std::out_of_range(name_ + ": point outside the unit square");
  }

  S jacobian_at(const PhasePoint<S>& p) const { return branch_at(p).jacobian(); }
  Region region_of(const PhasePoint<S>& p) const { return branch_at(p).label(); }

  /// Bounding box of all branch domains carrying `label`.
  std::optional<Rect<S>> region_rect(Region label) const {
    std::optional<Rect<S>> box;
    for (const auto& b : branches_) {
      if (b.label() != label) continue;
      const Rect<S>& d = b.domain();
      if (!box) {
        box = d;
      } else {
        box = Rect<S>{std::min(box->x_lo, d.x_lo), std::max(box->x_hi, d.x_hi), std::min(box->y_lo, d.y_lo),
                      std::max(box->y_hi, d.y_hi)};
      }
    }
    return box;
  }

  std::vector<Region> labels() const {
    std::vector<Region> out;
    for (const auto& b : branches_)
      if (std::find(out.begin(), out.end(), b.label()) == out.end()) out.push_back(b.label());
    std::sort(out.begin(), out.end());
    return out;
  }

  template <class T>
  PiecewiseAffineMap<T> cast() const {
    std::vector<AffineBranch<T>> out;
    out.reserve(branches_.size());
    for (const auto& b : branches_) out.push_back(b.template cast<T>());
    return PiecewiseAffineMap<T>(name_, std::move(out));
  }

  friend bool operator==(const PiecewiseAffineMap& a, const PiecewiseAffineMap& b) {
    return a.name_ == b.name_ && a.branches_ == b.branches_;
  }

 private:
  static bool close_to(const S& a, const S& b) {
    if constexpr (is_exact_v<S>) {
      return a == b;
    } else {
      return std::abs(a - b) <= 1e-12;
    }
  }

  void validate_partition() const {
    S total(0);
    for (std::size_t i = 0; i < branches_.size(); ++i) {
      const Rect<S>& d = branches_[i].domain();
      if (d.empty()) throw ConstructionError(name_ + ": empty branch domain");
      if (d.x_lo < S(0) || d.y_lo < S(0) || d.x_hi > S(1) || d.y_hi > S(1))
        throw ConstructionError(name_ + ": branch domain leaves the unit square");
      const Rect<S> img = branches_[i].image();
      const S lo = std::min(img.x_lo, img.y_lo);
      const S hi = std::max(img.x_hi, img.y_hi);
      if ((lo < S(0) && !close_to(lo, S(0))) || (hi > S(1) && !close_to(hi, S(1))))
        throw ConstructionError(name_ + ": branch image leaves the unit square");
      total += d.area();
      for (std::size_t j = i + 1; j < branches_.size(); ++j) {
        if (!close_to(overlap_area(d, branches_[j].domain()), S(0)))
          throw ConstructionError(name_ + ": overlapping branch domains");
      }
    }
    if (!close_to(total, S(1))) throw ConstructionError(name_ + ": branch domains do not cover the unit square");
  }

  bool images_tile() const {
    S total(0);
    for (std::size_t i = 0; i < branches_.size(); ++i) {
      const Rect<S> a = branches_[i].image();
      total += a.area();
      for (std::size_t j = i + 1; j < branches_.size(); ++j)
        if (!close_to(overlap_area(a, branches_[j].image()), S(0))) return false;
    }
    return close_to(total, S(1));
  }

  std::string name_;
  std::vector<AffineBranch<S>> branches_;
  bool invertible_ = false;
};

// Free-function surface.

template <class S>
PhasePoint<S> apply(const PiecewiseAffineMap<S>& map, const PhasePoint<S>& p) {
  return map.apply(p);
}

template <class S>
PhasePoint<S> apply_inverse(const PiecewiseAffineMap<S>& map, const PhasePoint<S>& p) {
  return map.apply_inverse(p);
}

template <class S>
S jacobian_at(const PiecewiseAffineMap<S>& map, const PhasePoint<S>& p) {
  return map.jacobian_at(p);
}

template <class S>
Region region_of(const PiecewiseAffineMap<S>& map, const PhasePoint<S>& p) {
  return map.region_of(p);
}

template <class S>
PhasePoint<S> iterate(const PiecewiseAffineMap<S>& map, PhasePoint<S> p, std::int64_t steps) {
  for (std::int64_t k = 0; k < steps; ++k) p = map.apply(p);
  return p;
}

template <class S>
PhasePoint<S> iterate_inverse(const PiecewiseAffineMap<S>& map, PhasePoint<S> p, std::int64_t steps) {
  for (std::int64_t k = 0; k < steps; ++k) p = map.apply_inverse(p);
  return p;
}

/// outer o inner. Each inner branch is split along the preimages of the outer
/// branch domains; labels are inherited from the outer map.
template <class S>
PiecewiseAffineMap<S> compose(const PiecewiseAffineMap<S>& outer, const PiecewiseAffineMap<S>& inner,
                              std::string name) {
  std::vector<AffineBranch<S>> out;
  for (const auto& ib : inner.branches()) {
    const AffineAction<S> back = ib.action().inverse();
    for (const auto& ob : outer.branches()) {
      const Rect<S> piece = ib.domain().intersect(back.image(ob.domain()));
      if (piece.empty()) continue;
      out.emplace_back(piece, ib.action().then(ob.action()), ob.label());
    }
  }
  return PiecewiseAffineMap<S>(std::move(name), std::move(out));
}

// Builders. All builders produce exact maps; use cast<double>() for the float backend.

enum class MapKind { Simple, Generalized };

inline std::string to_string(MapKind k) { return k == MapKind::Simple ? "map1" : "map2"; }

/// x/l, r*y on [0,l); (x-l)/r, r + l*y on [l,1]; r = 1 - l.
inline PiecewiseAffineMap<Rational> build_simple_baker(const Rational& l) {
  if (!(l > 0 && l < 1)) throw ConstructionError("simple baker map needs 0 < l < 1, got " + to_string(l));
  const Rational r = 1 - l;
  const Rational zero(0), one(1);
  std::vector<AffineBranch<Rational>> branches;
  branches.emplace_back(Rect<Rational>{zero, l, zero, one}, AffineAction<Rational>{1 / l, zero, zero, r, zero, zero},
                        Region::A, r / l);
  branches.emplace_back(Rect<Rational>{l, one, zero, one},
                        AffineAction<Rational>{1 / r, zero, zero, l, -l / r, r}, Region::B, l / r);
  return PiecewiseAffineMap<Rational>("simple_baker", std::move(branches));
}

inline PiecewiseAffineMap<Rational> build_generalized_baker(const Rational& l) {
  if (!(l > 0 && l <= Rational(1, 4)))
    throw ConstructionError("generalized baker map needs 0 < l <= 1/4, got " + to_string(l));
  const Rational zero(0), one(1), half(1, 2), three_q(3, 4);
  const Rational s = 1 - 2 * l;
  std::vector<AffineBranch<Rational>> b;
  b.emplace_back(Rect<Rational>{zero, l, zero, one},
                 AffineAction<Rational>{1 / (2 * l), zero, zero, 2 * l, half, s}, Region::A, one);
  b.emplace_back(Rect<Rational>{l, half, zero, one},
                 AffineAction<Rational>{1 / s, zero, zero, half, -l / s, half}, Region::B, 1 / (2 * s));
  b.emplace_back(Rect<Rational>{half, three_q, zero, one},
                 AffineAction<Rational>{Rational(2), zero, zero, s, -half, zero}, Region::C, 2 * s);
  b.emplace_back(Rect<Rational>{three_q, one, zero, one},
                 AffineAction<Rational>{Rational(2), zero, zero, half, Rational(-3, 2), zero}, Region::D, one);
  return PiecewiseAffineMap<Rational>("generalized_baker", std::move(b));
}

/// Time-reversal involution. Simple: mirror about the anti-diagonal,
/// (1-y, 1-x). Generalized: (1 - y/2, 1 - 2x) on x < 1/2 and
/// ((1-y)/2, 2 - 2x) on x >= 1/2; it swaps the two halves and mirrors each
/// along its diagonal. Branch labels are placeholders (A, B for the halves).
inline PiecewiseAffineMap<Rational> build_involution(MapKind kind) {
  const Rational zero(0), one(1), half(1, 2);
  std::vector<AffineBranch<Rational>> b;
  if (kind == MapKind::Simple) {
    b.emplace_back(Rect<Rational>{zero, one, zero, one},
                   AffineAction<Rational>{zero, Rational(-1), Rational(-1), zero, one, one}, Region::A, one);
    return PiecewiseAffineMap<Rational>("simple_involution", std::move(b));
  }
  b.emplace_back(Rect<Rational>{zero, half, zero, one},
                 AffineAction<Rational>{zero, -half, Rational(-2), zero, one, one}, Region::A, one);
  b.emplace_back(Rect<Rational>{half, one, zero, one},
                 AffineAction<Rational>{zero, -half, Rational(-2), zero, half, Rational(2)}, Region::B, one);
  return PiecewiseAffineMap<Rational>("generalized_involution", std::move(b));
}

struct Strip {
  Rational x_tilde;
  Rational eps;
};

/// x_tilde = l + (1/2 - l)/4, eps = (1/2 - l)/8.
inline Strip default_strip(const Rational& l) {
  const Rational width = Rational(1, 2) - l;
  return {l + width / 4, width / 8};
}

/// Irreversible perturbation: inside the strip [x_tilde, x_tilde + eps) it
/// flips y -> 1 - y for y < 1/2 and is the identity above; identity outside.
/// Branches follow the generalized map's regions so region_of agrees with M.
inline PiecewiseAffineMap<Rational> build_perturbation_N(const Rational& l, const Rational& x_tilde,
                                                         const Rational& eps) {
  if (!(l > 0 && l <= Rational(1, 4))) throw ConstructionError("perturbation needs 0 < l <= 1/4");
  if (eps < 0) throw ConstructionError("perturbation strip width must be non-negative");
  if (!(l <= x_tilde && x_tilde + eps < Rational(1, 2)))
    throw ConstructionError("perturbation strip [" + to_string(x_tilde) + ", " + to_string(x_tilde + eps) +
                            ") is not inside region B");
  const Rational zero(0), one(1), half(1, 2);
  const auto id = AffineAction<Rational>::identity();
  const AffineAction<Rational> flip{one, zero, zero, Rational(-1), zero, one};
  std::vector<AffineBranch<Rational>> b;
  auto add = [&](Rect<Rational> r, const AffineAction<Rational>& a, Region label) {
    if (!r.empty()) b.emplace_back(r, a, label);
  };
  add({zero, l, zero, one}, id, Region::A);
  add({l, x_tilde, zero, one}, id, Region::B);
  add({x_tilde, x_tilde + eps, zero, half}, flip, Region::B);
  add({x_tilde, x_tilde + eps, half, one}, id, Region::B);
  add({x_tilde + eps, half, zero, one}, id, Region::B);
  add({half, Rational(3, 4), zero, one}, id, Region::C);
  add({Rational(3, 4), one, zero, one}, id, Region::D);
  return PiecewiseAffineMap<Rational>("perturbation_N", std::move(b));
}

/// K = M o N for the generalized map with the given strip.
inline PiecewiseAffineMap<Rational> build_composite_K(const Rational& l, const Strip& strip) {
  return compose(build_generalized_baker(l), build_perturbation_N(l, strip.x_tilde, strip.eps), "composite_K");
}

// Reversibility verification.

template <class S>
struct IdentityViolation {
  PhasePoint<S> point;
  std::string identity;
};

template <class S>
struct ReversibilityReport {
  std::size_t points_checked = 0;
  std::vector<IdentityViolation<S>> violations;
  /// Region i of M -> region j with G M (i) = j; nullopt when GM(i) is not a single region.
  std::vector<std::pair<Region, std::optional<Region>>> conjugacy;
  bool conjugacy_ok = true;

  bool pointwise_ok() const { return violations.empty(); }
  bool passed() const { return pointwise_ok() && conjugacy_ok; }
};

/// Region-level image G M (region i), computed from branch rectangles.
template <class S>
std::vector<std::pair<Region, std::optional<Region>>> region_conjugacy(const PiecewiseAffineMap<S>& M,
                                                                         const PiecewiseAffineMap<S>& G) {
  std::vector<std::pair<Region, std::optional<Region>>> out;
  for (Region label : M.labels()) {
    std::optional<Region> target;
    bool consistent = true;
    S covered(0);
    for (const auto& mb : M.branches()) {
      if (mb.label() != label) continue;
      const Rect<S> img = mb.image();
      const AffineBranch<S>* gb = nullptr;
      for (const auto& cand : G.branches())
        if (cand.domain().encloses(img)) gb = &cand;
      if (gb == nullptr) {
        consistent = false;
        break;
      }
      const Rect<S> back = gb->action().image(img);
      std::optional<Region> hit;
      for (Region j : M.labels())
        if (M.region_rect(j)->encloses(back)) hit = j;
      if (!hit || (target && *target != *hit)) {
        consistent = false;
        break;
      }
      target = hit;
      covered += back.area();
    }
    // GM must map the region onto the whole target region, not into a part of it.
    if (consistent && target && covered != M.region_rect(*target)->area()) consistent = false;
    out.emplace_back(label, consistent ? target : std::nullopt);
  }
  return out;
}

/// Checks, per sample point: G G p = p, G M G M p = p, J_M(p) J_M(GMp) = 1,
/// J_G(p) = 1; plus the region conjugacy of G M. Exact only with Rational.
template <class S>
ReversibilityReport<S> verify_reversibility(const PiecewiseAffineMap<S>& M, const PiecewiseAffineMap<S>& G,
                                            const std::vector<PhasePoint<S>>& samples) {
  ReversibilityReport<S> rep;
  for (const auto& p : samples) {
    ++rep.points_checked;
    if (G.apply(G.apply(p)) != p) rep.violations.push_back({p, "GG=I"});
    if (G.jacobian_at(p) != S(1)) rep.violations.push_back({p, "J_G=1"});
    const PhasePoint<S> gm = G.apply(M.apply(p));
    if (G.apply(M.apply(gm)) != p) rep.violations.push_back({p, "GMGM=I"});
    if (M.jacobian_at(p) * M.jacobian_at(gm) != S(1)) rep.violations.push_back({p, "J_M(x)J_M(GMx)=1"});
  }
  rep.conjugacy = region_conjugacy(M, G);
  for (const auto& [from, to] : rep.conjugacy)
    if (!to) rep.conjugacy_ok = false;
  return rep;
}

}  // namespace bakerfr
