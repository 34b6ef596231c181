// Independent reference computations for the tests. Nothing here calls the
// library's map tables, chain builders or DP; formulas are written out by hand.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bakerfr/rational.hpp"

namespace oracle {

using bakerfr::Rational;
using Pt = std::pair<Rational, Rational>;

inline Rational q(std::int64_t a, std::int64_t b = 1) { return bakerfr::make_rational(a, b); }

inline Pt simple_baker(const Rational& l, const Pt& p) {
  const Rational r = 1 - l;
  if (p.first < l) return {p.first / l, r * p.second};
  return {(p.first - l) / r, r + l * p.second};
}

inline Pt simple_involution(const Pt& p) { return {1 - p.second, 1 - p.first}; }

inline char generalized_region(const Rational& l, const Rational& x) {
  if (x < l) return 'A';
  if (x < q(1, 2)) return 'B';
  if (x < q(3, 4)) return 'C';
  return 'D';
}

inline Pt generalized_baker(const Rational& l, const Pt& p) {
  const Rational& x = p.first;
  const Rational& y = p.second;
  switch (generalized_region(l, x)) {
    case 'A': return {x / (2 * l) + q(1, 2), 2 * l * y + 1 - 2 * l};
    case 'B': return {(x - l) / (1 - 2 * l), y / 2 + q(1, 2)};
    case 'C': return {2 * x - q(1, 2), (1 - 2 * l) * y};
    default: return {2 * x - q(3, 2), y / 2};
  }
}

inline Pt generalized_involution(const Pt& p) {
  if (p.first < q(1, 2)) return {1 - p.second / 2, 1 - 2 * p.first};
  return {(1 - p.second) / 2, 2 - 2 * p.first};
}

/// Null vector of T - I for T = [[a, b], [c, d]] with column sums 1, scaled so
/// that (rho_l + rho_r)/2 = 1.
inline std::pair<Rational, Rational> generalized_density(const Rational& l) {
  const Rational a = 1 - 2 * l, b = q(1, 2);
  Rational rl = b, rr = 1 - a;
  const Rational norm = (rl + rr) / 2;
  return {rl / norm, rr / norm};
}

/// Region probabilities = density x region width.
inline std::map<char, Rational> generalized_measures(const Rational& l) {
  const auto [rl, rr] = generalized_density(l);
  return {{'A', rl * l}, {'B', rl * (q(1, 2) - l)}, {'C', rr / 4}, {'D', rr / 4}};
}

inline Rational generalized_transition(const Rational& l, char from, char to) {
  const bool left_target = to == 'A' || to == 'B';
  const bool from_left_image = from == 'B' || from == 'D';  // images of B and D lie in x < 1/2
  if (from_left_image != left_target) return 0;
  if (to == 'A') return 2 * l;
  if (to == 'B') return 1 - 2 * l;
  return q(1, 2);
}

inline int generalized_units(char r) { return r == 'B' ? 1 : r == 'C' ? -1 : 0; }

/// Recursive enumeration over all region strings of length n.
inline std::map<std::int64_t, Rational> generalized_distribution(const Rational& l, int n) {
  const auto mu = generalized_measures(l);
  std::map<std::int64_t, Rational> out;
  std::function<void(std::string&)> rec = [&](std::string& s) {
    if (static_cast<int>(s.size()) == n) {
      Rational w = mu.at(s[0]);
      std::int64_t g = 0;
      for (std::size_t k = 0; k < s.size(); ++k) {
        g += generalized_units(s[k]);
        if (k + 1 < s.size()) w *= generalized_transition(l, s[k], s[k + 1]);
      }
      if (w != 0) out[g] += w;
      return;
    }
    for (char c : std::string("ABCD")) {
      s.push_back(c);
      rec(s);
      s.pop_back();
    }
  };
  std::string s;
  rec(s);
  return out;
}

inline Rational binomial(int n, int k) {
  Rational c(1);
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

/// P(alpha - beta = g) = C(n, alpha) l^alpha r^beta.
inline std::map<std::int64_t, Rational> simple_distribution(const Rational& l, int n) {
  std::map<std::int64_t, Rational> out;
  for (int a = 0; a <= n; ++a) out[2 * a - n] = binomial(n, a) * bakerfr::pow(l, a) * bakerfr::pow(1 - l, n - a);
  return out;
}

/// Per-sequence FR correction from its first and last symbols only:
/// alpha = h(i_0) / h(s(i_{n-1})), h = mu_i / (column value of i).
inline Rational generalized_alpha(const Rational& l, const std::string& seq) {
  const auto mu = generalized_measures(l);
  auto column = [&](char c) { return c == 'A' ? 2 * l : c == 'B' ? 1 - 2 * l : q(1, 2); };
  auto h = [&](char c) { return mu.at(c) / column(c); };
  auto swap_bc = [](char c) { return c == 'B' ? 'C' : c == 'C' ? 'B' : c; };
  return h(seq.front()) / h(swap_bc(seq.back()));
}

inline Rational current(const Rational& l) {
  const Rational b = (1 - 4 * l) / (1 - 2 * l);
  return b / (4 - 3 * b);
}

}  // namespace oracle
