// Transfer-operator machinery on the unstable (x) direction: the projected
// one-dimensional map, Frobenius-Perron steps on piecewise-constant densities,
// the Markov-partition transfer matrix, its invariant density, and the
// region-level stochastic matrix with its stationary measures.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bakerfr/core_maps.hpp"
#include "bakerfr/errors.hpp"
#include "bakerfr/linalg.hpp"
#include "bakerfr/rational.hpp"

namespace bakerfr {

template <class S>
struct IntervalBranch {
  S lo, hi;  // [lo, hi), closed at 1
  S slope, offset;
  Region label;

  S operator()(const S& x) const { return S(slope * x + offset); }
  S image_lo() const { return std::min((*this)(lo), (*this)(hi)); }
  S image_hi() const { return std::max((*this)(lo), (*this)(hi)); }
};

/// Piecewise-affine map of [0,1]: the dynamics along the unstable direction.
template <class S>
class IntervalMap {
 public:
  IntervalMap(std::string name, std::vector<IntervalBranch<S>> branches)
      : name_(std::move(name)), branches_(std::move(branches)) {
    std::sort(branches_.begin(), branches_.end(), [](const auto& a, const auto& b) { return a.lo < b.lo; });
    if (branches_.empty() || branches_.front().lo != S(0) || branches_.back().hi != S(1))
      throw ConstructionError(name_ + ": interval branches must cover [0,1]");
    for (std::size_t i = 0; i + 1 < branches_.size(); ++i)
      if (branches_[i].hi != branches_[i + 1].lo) throw ConstructionError(name_ + ": interval branches leave gaps");
  }

  const std::string& name() const { return name_; }
  const std::vector<IntervalBranch<S>>& branches() const { return branches_; }

  const IntervalBranch<S>& branch_at(const S& x) const {
    for (const auto& b : branches_)
      if (in_unit_interval_convention(x, b.lo, b.hi)) return b;
    throw std::out_of_range(name_ + ": point outside [0,1]");
  }
  S apply(const S& x) const { return branch_at(x)(x); }

  std::vector<S> boundaries() const {
    std::vector<S> out{S(0)};
    for (const auto& b : branches_) out.push_back(b.hi);
    return out;
  }

 private:
  std::string name_;
  std::vector<IntervalBranch<S>> branches_;
};

/// The x-branches of a map whose x-action ignores y. Maps with y-dependent
/// branching (N, K) are rejected.
template <class S>
IntervalMap<S> project_unstable(const PiecewiseAffineMap<S>& map) {
  std::vector<IntervalBranch<S>> out;
  for (const auto& b : map.branches()) {
    const Rect<S>& d = b.domain();
    const AffineAction<S>& a = b.action();
    if (d.y_lo != S(0) || d.y_hi != S(1) || a.xy != S(0))
      throw UnsupportedOperation(map.name() + " has y-dependent x-dynamics and cannot be projected");
    out.push_back({d.x_lo, d.x_hi, a.xx, a.x0, b.label()});
  }
  return IntervalMap<S>(map.name() + "_unstable", std::move(out));
}

/// Piecewise-constant probability density on [0,1].
template <class S>
class StepDensity {
 public:
  StepDensity(std::vector<S> breakpoints, std::vector<S> values)
      : StepDensity(std::move(breakpoints), std::move(values), Unchecked{}) {
    validate();
  }

  static StepDensity uniform() { return StepDensity({S(0), S(1)}, {S(1)}); }

  const std::vector<S>& breakpoints() const { return breakpoints_; }
  const std::vector<S>& values() const { return values_; }

  S operator()(const S& x) const {
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (in_unit_interval_convention(x, breakpoints_[i], breakpoints_[i + 1])) return values_[i];
    throw std::out_of_range("density evaluated outside [0,1]");
  }

  S integral() const {
    S total(0);
    for (std::size_t i = 0; i < values_.size(); ++i) total += values_[i] * (breakpoints_[i + 1] - breakpoints_[i]);
    return total;
  }

  /// Probability mass of [a, b).
  S mass(const S& a, const S& b) const {
    S total(0);
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const S lo = std::max(a, breakpoints_[i]);
      const S hi = std::min(b, breakpoints_[i + 1]);
      if (lo < hi) total += values_[i] * (hi - lo);
    }
    return total;
  }

  /// Same function on the union of current and `extra` breakpoints.
  StepDensity refined(const std::vector<S>& extra) const {
    std::vector<S> bp = breakpoints_;
    for (const S& e : extra)
      if (S(0) < e && e < S(1)) bp.push_back(e);
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    std::vector<S> vals;
    vals.reserve(bp.size() - 1);
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) vals.push_back((*this)(bp[i]));
    return StepDensity(std::move(bp), std::move(vals), Unchecked{});
  }

  /// Drops breakpoints between equal neighbouring values.
  StepDensity merged() const {
    std::vector<S> bp{breakpoints_.front()};
    std::vector<S> vals{values_.front()};
    for (std::size_t i = 1; i < values_.size(); ++i) {
      if (values_[i] == vals.back()) continue;
      bp.push_back(breakpoints_[i]);
      vals.push_back(values_[i]);
    }
    bp.push_back(breakpoints_.back());
    return StepDensity(std::move(bp), std::move(vals), Unchecked{});
  }

  template <class T>
  StepDensity<T> cast() const {
    std::vector<T> bp, vals;
    for (const auto& b : breakpoints_) bp.push_back(scalar_cast<T>(b));
    for (const auto& v : values_) vals.push_back(scalar_cast<T>(v));
    return StepDensity<T>(std::move(bp), std::move(vals));
  }

 private:
  struct Unchecked {};
  StepDensity(std::vector<S> breakpoints, std::vector<S> values, Unchecked)
      : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {}

  template <class>
  friend class StepDensity;
  template <class T>
  friend StepDensity<T> frobenius_perron_step(const IntervalMap<T>&, const StepDensity<T>&);
  template <class T>
  friend StepDensity<T> renormalized(const StepDensity<T>&);

  void validate() const {
    if (breakpoints_.size() < 2 || values_.size() + 1 != breakpoints_.size())
      throw ConstructionError("density needs n+1 breakpoints for n values");
    if (breakpoints_.front() != S(0) || breakpoints_.back() != S(1))
      throw ConstructionError("density breakpoints must start at 0 and end at 1");
    for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i)
      if (!(breakpoints_[i] < breakpoints_[i + 1])) throw ConstructionError("density breakpoints must increase");
    for (const auto& v : values_)
      if (v < S(0)) throw ConstructionError("density values must be non-negative");
    const S total = integral();
    if constexpr (is_exact_v<S>) {
      if (total != 1) throw ConstructionError("density integrates to " + to_string(total) + ", not 1");
    } else {
      if (std::abs(total - 1.0) > 1e-12) throw ConstructionError("density is not normalised");
    }
  }

  std::vector<S> breakpoints_;
  std::vector<S> values_;
};

template <class S>
StepDensity<S> renormalized(const StepDensity<S>& rho) {
  const S total = rho.integral();
  std::vector<S> vals = rho.values();
  for (auto& v : vals) v /= total;
  return StepDensity<S>(rho.breakpoints(), std::move(vals));
}

/// sup |a - b| over [0,1].
template <class S>
S sup_distance(const StepDensity<S>& a, const StepDensity<S>& b) {
  const StepDensity<S> ra = a.refined(b.breakpoints());
  const StepDensity<S> rb = b.refined(a.breakpoints());
  S worst(0);
  for (std::size_t i = 0; i < ra.values().size(); ++i) worst = std::max(worst, abs_value(S(ra.values()[i] - rb.values()[i])));
  return worst;
}

template <class S>
bool same_function(const StepDensity<S>& a, const StepDensity<S>& b) {
  return sup_distance(a, b) == S(0);
}

/// rho'(z) = sum over branches of rho(f^-1(z)) / |f'|.
template <class S>
StepDensity<S> frobenius_perron_step(const IntervalMap<S>& map, const StepDensity<S>& rho) {
  const StepDensity<S> fine = rho.refined(map.boundaries());
  struct Piece {
    S lo, hi, value;
  };
  std::vector<Piece> pieces;
  std::vector<S> bp{S(0), S(1)};
  for (std::size_t i = 0; i < fine.values().size(); ++i) {
    const S& a = fine.breakpoints()[i];
    const S& c = fine.breakpoints()[i + 1];
    if (fine.values()[i] == S(0)) continue;
    const auto& br = map.branch_at(a);
    const S fa = br(a), fc = br(c);
    Piece p{std::min(fa, fc), std::max(fa, fc), S(fine.values()[i] / abs_value(br.slope))};
    bp.push_back(p.lo);
    bp.push_back(p.hi);
    pieces.push_back(std::move(p));
  }
  // Rounded image endpoints within `eps` of each other are one breakpoint.
  const S eps = is_exact_v<S> ? S(0) : S(1e-12);
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end(), [&](const S& a, const S& b) { return abs_value(S(b - a)) <= eps; }),
           bp.end());
  if constexpr (!is_exact_v<S>) bp.back() = S(1);
  std::vector<S> vals(bp.size() - 1, S(0));
  for (const auto& p : pieces) {
    for (std::size_t i = 0; i + 1 < bp.size(); ++i)
      if (p.lo <= bp[i] + eps && bp[i + 1] <= p.hi + eps) vals[i] += p.value;
  }
  return StepDensity<S>(std::move(bp), std::move(vals), typename StepDensity<S>::Unchecked{}).merged();
}

/// Frobenius-Perron matrix on the Markov partition generated by the branch
/// images; acts on vectors of cell densities.
template <class S>
struct TransferMatrix {
  std::vector<S> cells;  // breakpoints of the Markov partition
  Matrix<S> entries;     // entries[i][j]: density flowing from cell j into cell i

  S width(std::size_t i) const { return cells[i + 1] - cells[i]; }
  std::vector<S> widths() const {
    std::vector<S> w;
    for (std::size_t i = 0; i + 1 < cells.size(); ++i) w.push_back(width(i));
    return w;
  }
};

template <class S>
TransferMatrix<S> transfer_matrix(const IntervalMap<S>& map) {
  std::vector<S> cells{S(0), S(1)};
  for (const auto& b : map.branches()) {
    cells.push_back(b.image_lo());
    cells.push_back(b.image_hi());
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  const std::size_t n = cells.size() - 1;
  auto cell_of_domain = [&](const IntervalBranch<S>& b) {
    for (std::size_t j = 0; j < n; ++j)
      if (cells[j] <= b.lo && b.hi <= cells[j + 1]) return j;
    throw UnsupportedOperation(map.name() + ": branch domain straddles a Markov cell");
  };
  TransferMatrix<S> t{cells, Matrix<S>(n, std::vector<S>(n, S(0)))};
  for (const auto& b : map.branches()) {
    const std::size_t j = cell_of_domain(b);
    for (std::size_t i = 0; i < n; ++i)
      if (b.image_lo() <= cells[i] && cells[i + 1] <= b.image_hi()) t.entries[i][j] += S(1) / abs_value(b.slope);
  }
  // Mass conservation: sum_i w_i T_ij = w_j.
  for (std::size_t j = 0; j < n; ++j) {
    S mass(0);
    for (std::size_t i = 0; i < n; ++i) mass += t.width(i) * t.entries[i][j];
    const S err = abs_value(S(mass - t.width(j)));
    if constexpr (is_exact_v<S>) {
      if (err != 0) throw ConsistencyError(map.name() + ": transfer matrix does not conserve mass");
    } else {
      if (err > 1e-12) throw ConsistencyError(map.name() + ": transfer matrix does not conserve mass");
    }
  }
  return t;
}

/// Repeated Frobenius-Perron steps until the sup-norm change is <= tol
/// (exactly 0 with Rational).
template <class S>
StepDensity<S> iterate_density(const IntervalMap<S>& map, StepDensity<S> rho, const S& tol, int max_iter) {
  S residual(0);
  for (int it = 0; it < max_iter; ++it) {
    StepDensity<S> next = frobenius_perron_step(map, rho);
    if constexpr (!is_exact_v<S>) next = renormalized(next);
    residual = sup_distance(next, rho);
    rho = std::move(next);
    if (residual <= tol) return rho;
  }
  throw ConvergenceError(map.name() + ": density iteration did not converge", to_double(residual));
}

/// Invariant density. Rational: exact eigenvector of the transfer matrix at
/// eigenvalue 1, confirmed as an exact fixed point of the Frobenius-Perron
/// step. Floating point: power iteration from the uniform density.
template <class S>
StepDensity<S> invariant_density(const IntervalMap<S>& map, const S& tol = S(0), int max_iter = 10000) {
  if constexpr (is_exact_v<S>) {
    (void)tol;
    (void)max_iter;
    const TransferMatrix<S> t = transfer_matrix(map);
    std::vector<S> v = right_fixed_vector(t.entries, t.widths());
    StepDensity<S> rho(t.cells, std::move(v));
    if (!same_function(frobenius_perron_step(map, rho), rho))
      throw ConsistencyError(map.name() + ": eigenvector is not a fixed point of the Frobenius-Perron step");
    return rho;
  } else {
    return iterate_density(map, StepDensity<S>::uniform(), tol, max_iter);
  }
}

/// Closed-form transfer matrix of the generalized map: [[1-2l, 1/2], [2l, 1/2]].
inline Matrix<Rational> generalized_transfer_matrix(const Rational& l) {
  return {{1 - 2 * l, Rational(1, 2)}, {2 * l, Rational(1, 2)}};
}

/// Closed-form invariant density of the generalized map: 2/(1+4l) on [0,1/2), 8l/(1+4l) on [1/2,1].
inline StepDensity<Rational> generalized_invariant_density(const Rational& l) {
  return StepDensity<Rational>({Rational(0), Rational(1, 2), Rational(1)}, {2 / (1 + 4 * l), 8 * l / (1 + 4 * l)});
}

template <class S>
void write_density_csv(std::ostream& os, const StepDensity<S>& rho) {
  os << "breakpoint,value,value_exact\n";
  auto exact = [](const S& v) {
    if constexpr (is_exact_v<S>) {
      return to_string(v);
    } else {
      return std::string();
    }
  };
  auto num = [](const S& v) {
    std::ostringstream s;
    s.precision(17);
    s << to_double(v);
    return s.str();
  };
  const auto& bp = rho.breakpoints();
  const auto& vals = rho.values();
  for (std::size_t i = 0; i < vals.size(); ++i) os << num(bp[i]) << ',' << num(vals[i]) << ',' << exact(vals[i]) << '\n';
  os << num(bp.back()) << ',' << num(vals.back()) << ',' << exact(vals.back()) << '\n';
}

// Region-level Markov chain.

struct StochasticMatrix {
  std::vector<Region> states;
  Matrix<Rational> p;  // rows: source region

  std::size_t position(Region r) const {
    for (std::size_t i = 0; i < states.size(); ++i)
      if (states[i] == r) return i;
    throw std::out_of_range(std::string("region ") + to_char(r) + " not in chain");
  }
  const Rational& operator()(Region from, Region to) const { return p[position(from)][position(to)]; }
  bool allowed(Region from, Region to) const { return (*this)(from, to) != 0; }
};

struct RegionMeasures {
  std::vector<Region> states;
  std::vector<Rational> mu;

  const Rational& at(Region r) const {
    for (std::size_t i = 0; i < states.size(); ++i)
      if (states[i] == r) return mu[i];
    throw std::out_of_range(std::string("region ") + to_char(r) + " has no measure");
  }
  friend bool operator==(const RegionMeasures&, const RegionMeasures&) = default;
};

inline void check_stochastic(const StochasticMatrix& m) {
  for (const auto& row : m.p) {
    Rational sum(0);
    for (const auto& v : row) {
      if (v < 0) throw ConsistencyError("negative transition probability");
      sum += v;
    }
    if (sum != 1) throw ConsistencyError("transition row does not sum to 1");
  }
}

inline void check_generalized_l(const Rational& l) {
  if (!(l > 0 && l <= Rational(1, 4))) throw ConstructionError("l must lie in (0, 1/4], got " + to_string(l));
}

/// Region transition matrix of the generalized map (rows A, B, C, D):
/// A, C -> C, D with 1/2 each; B, D -> A with 2l, B with 1-2l.
inline StochasticMatrix transition_matrix(const Rational& l) {
  check_generalized_l(l);
  const Rational z(0), h(1, 2);
  StochasticMatrix m{{Region::A, Region::B, Region::C, Region::D},
                     {{z, z, h, h}, {2 * l, 1 - 2 * l, z, z}, {z, z, h, h}, {2 * l, 1 - 2 * l, z, z}}};
  check_stochastic(m);
  return m;
}

/// p_ij = |{x in i : f(x) in j}| / |i|, valid because the invariant density is
/// constant on every region. Independent of the closed form above.
inline StochasticMatrix transition_matrix_from_map(const PiecewiseAffineMap<Rational>& map) {
  const IntervalMap<Rational> f = project_unstable(map);
  const std::vector<Region> states = map.labels();
  StochasticMatrix m{states, Matrix<Rational>(states.size(), std::vector<Rational>(states.size(), Rational(0)))};
  for (const auto& b : f.branches()) {
    const std::size_t i = m.position(b.label);
    for (const auto& target : f.branches()) {
      // Preimage of [target.lo, target.hi) inside this branch.
      const Rational u = (target.lo - b.offset) / b.slope;
      const Rational v = (target.hi - b.offset) / b.slope;
      const Rational lo = std::max(b.lo, std::min(u, v));
      const Rational hi = std::min(b.hi, std::max(u, v));
      if (lo < hi) m.p[i][m.position(target.label)] += (hi - lo) / (b.hi - b.lo);
    }
  }
  check_stochastic(m);
  return m;
}

/// Closed form: 2l/(1+4l) for A, C, D and (1-2l)/(1+4l) for B.
inline RegionMeasures generalized_region_measures_closed_form(const Rational& l) {
  check_generalized_l(l);
  const Rational a = 2 * l / (1 + 4 * l);
  return {{Region::A, Region::B, Region::C, Region::D}, {a, (1 - 2 * l) / (1 + 4 * l), a, a}};
}

/// Region measures of the generalized map, computed two ways (left fixed
/// vector of P; invariant density times region width) and cross-checked.
inline RegionMeasures region_measures(const Rational& l) {
  const StochasticMatrix p = transition_matrix(l);
  RegionMeasures by_chain{p.states, left_fixed_vector(p.p)};

  const PiecewiseAffineMap<Rational> m = build_generalized_baker(l);
  const StepDensity<Rational> rho = invariant_density(project_unstable(m));
  RegionMeasures by_density{p.states, {}};
  for (Region r : p.states) {
    const Rect<Rational> box = *m.region_rect(r);
    by_density.mu.push_back(rho.mass(box.x_lo, box.x_hi));
  }
  if (!(by_chain == by_density))
    throw ConsistencyError("region measures disagree between the chain and the density route");
  Rational total(0);
  for (const auto& v : by_chain.mu) total += v;
  if (total != 1) throw ConsistencyError("region measures do not sum to 1");
  return by_chain;
}

}  // namespace bakerfr
