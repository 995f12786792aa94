#pragma once
// Shared fixtures for the unit tests.
#include "frlc/lc_core.hpp"
#include "frlc/rng.hpp"
#include "frlc/solver.hpp"

namespace frlc::test {

inline Matrix uniform_matrix(Index r, Index c, Rng& rng, double lo = 0.0, double hi = 1.0) {
  Matrix M(r, c);
  for (Index j = 0; j < c; ++j)
    for (Index i = 0; i < r; ++i) M(i, j) = lo + (hi - lo) * rng.uniform();
  return M;
}

inline Vector simplex(Index n, Rng& rng) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = 0.2 + rng.uniform();
  return v / v.sum();
}

inline Vector uniform_marginal(Index n) { return Vector::Constant(n, 1.0 / double(n)); }

// Feasible factors for (a, b) with random inner structure.
inline LcFactors random_factors(const Vector& a, const Vector& b, Index r1, Index r2, std::uint64_t seed) {
  return initialize_couplings(a, b, r1, r2, seed);
}

// Strictly positive factors without any marginal structure.
inline LcFactors loose_factors(Index n, Index m, Index r1, Index r2, Rng& rng) {
  return LcFactors(uniform_matrix(n, r1, rng, 0.1, 1.0), uniform_matrix(m, r2, rng, 0.1, 1.0),
                   uniform_matrix(r1, r2, rng, 0.1, 1.0));
}

inline Matrix symmetric_cost(Index n, Rng& rng) {
  Matrix A = uniform_matrix(n, n, rng);
  A = (A + A.transpose()).eval();
  A.diagonal().setZero();
  return A;
}

}  // namespace frlc::test
