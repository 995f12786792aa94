#pragma once

#include "frlc/lc_core.hpp"

#include <vector>

namespace frlc {

struct Barycenters {
  Matrix Y1;  // r1 x d
  Matrix Y2;  // r2 x d
};

// Y1 = diag(1/gQ) Q^T Z1, Y2 = diag(1/gR) R^T Z2.
Barycenters lc_project(const LcFactors& f, const Matrix& Z1, const Matrix& Z2);

enum class Side { Left, Right };

// Factored form P = Q' diag(1/g) R'^T.
struct Diagonalized {
  Matrix Q, R;
  Vector g;
};
Diagonalized diagonalize(const LcFactors& f, Side side);

struct OptimalG {
  Vector g;
  std::vector<Index> zero_entries;  // omega_i == 0 (g leaves the simplex interior)
};
// argmin over the simplex of <Q diag(1/g) R^T, C> = sum_i omega_i / g_i with
// omega = diag(Q^T C R): g ∝ sqrt(omega).
OptimalG optimal_g(const Matrix& Q, const Matrix& R, const CostSpec& c);

// mass * (max C - min C) * ln(min(n, m) / (r - 1)), clipped at 0.
double rank_bound(const CostSpec& c, Index n, Index m, Index r, double mass);

// Number of singular values above 1e-10 * sigma_1 (a lower bound on rk+).
Index numeric_nonneg_rank_upper(const Matrix& P);

}  // namespace frlc
