// Dense Gaussian elimination for the handful of tiny systems this library
// solves (stationary vectors of 2x2 and 4x4 chains). Exact with Rational.
#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "bakerfr/errors.hpp"
#include "bakerfr/rational.hpp"

namespace bakerfr {

template <class S>
using Matrix = std::vector<std::vector<S>>;

template <class S>
std::vector<S> solve_linear(Matrix<S> a, std::vector<S> b) {
  const std::size_t n = a.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = n;
    if constexpr (is_exact_v<S>) {
      for (std::size_t r = col; r < n; ++r)
        if (a[r][col] != 0) {
          pivot = r;
          break;
        }
    } else {
      double best = 0.0;
      for (std::size_t r = col; r < n; ++r)
        if (std::abs(a[r][col]) > best) {
          best = std::abs(a[r][col]);
          pivot = r;
        }
      if (best < 1e-300) pivot = n;
    }
    if (pivot == n) throw ConsistencyError("singular linear system");
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == S(0)) continue;
      const S f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<S> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

/// mu with mu P = mu and sum(mu) = 1 (row-stochastic P).
template <class S>
std::vector<S> left_fixed_vector(const Matrix<S>& p) {
  const std::size_t n = p.size();
  Matrix<S> a(n, std::vector<S>(n, S(0)));
  std::vector<S> rhs(n, S(0));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) a[j][i] = p[i][j] - (i == j ? S(1) : S(0));
  for (std::size_t i = 0; i < n; ++i) a[n - 1][i] = S(1);
  rhs[n - 1] = S(1);
  return solve_linear(std::move(a), std::move(rhs));
}

/// v with T v = v and sum_j w_j v_j = 1.
template <class S>
std::vector<S> right_fixed_vector(const Matrix<S>& t, const std::vector<S>& weights) {
  const std::size_t n = t.size();
  Matrix<S> a(n, std::vector<S>(n, S(0)));
  std::vector<S> rhs(n, S(0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = t[i][j] - (i == j ? S(1) : S(0));
  a[n - 1] = weights;
  rhs[n - 1] = S(1);
  return solve_linear(std::move(a), std::move(rhs));
}

}  // namespace bakerfr
