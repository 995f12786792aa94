#pragma once

// Small-scale ground truth used by the test suites.

#include "frlc/types.hpp"

#include <vector>

namespace frlc::oracle {

struct ExactResult {
  double cost = 0.0;
  Matrix plan;
  std::vector<Index> assignment;  // empty for non-permutation plans
};

enum class AssignmentPath { Auto, Exhaustive, Hungarian };

// Uniform marginals 1/n: min over permutations of (1/n) sum_i C(i, s(i)).
ExactResult exact_ot_uniform(const Matrix& C, AssignmentPath path = AssignmentPath::Auto);

// Log-domain Sinkhorn on exp(-C / eps) run to L1 residual 1e-12.
ExactResult entropic_reference(const Matrix& C, const Vector& a, const Vector& b, double eps,
                               int max_iter = 1000000);

// sum_{ijkl} (A_ik - B_jl)^2 P_ij P_kl by direct loops; sizes up to 30.
double brute_gw_cost(const Matrix& A, const Matrix& B, const Matrix& P);

}  // namespace frlc::oracle
