#pragma once

// Diagonal scalings diag(u) K diag(v) onto (softly) prescribed marginals.

#include "frlc/types.hpp"

namespace frlc {

struct ScalingResult {
  Matrix scaled;
  Vector u, v;
  int iters = 0;
  double final_residual = 0.0;
  bool converged = true;
  bool log_domain = false;  // fallback engaged after over/underflow
};

// strict = true throws NotConverged on hitting max_iter; otherwise the last
// iterate is returned with converged = false.
struct ScalingControl {
  double delta = 1e-9;
  int max_iter = 1000;
  bool strict = true;
  // Optional warm start for the scalings (entries must be positive).
  const Vector* u0 = nullptr;
  const Vector* v0 = nullptr;
};

// Balanced: rows exact (terminal u-update), columns within delta in L1.
ScalingResult sinkhorn(const Matrix& K, const Marginal& a, const Marginal& b, ScalingControl ctl);
inline ScalingResult sinkhorn(const Matrix& K, const Marginal& a, const Marginal& b, double delta,
                              int max_iter) {
  return sinkhorn(K, a, b, ScalingControl{delta, max_iter, true});
}

// Rows tight on a, columns pulled toward g_prev with exponent tau / (tau + 1/gamma).
ScalingResult sr_right_projection(const Matrix& K, double gamma, double tau, const Marginal& a,
                                  const Marginal& g_prev, ScalingControl ctl);

// Columns tight on b, rows pulled toward g_prev.
ScalingResult sr_left_projection(const Matrix& K, double gamma, double tau, const Marginal& g_prev,
                                 const Marginal& b, ScalingControl ctl);

// Both sides relaxed with the same exponent.
ScalingResult unbalanced_projection(const Matrix& K, double gamma, double tau, const Marginal& a,
                                    const Marginal& b, ScalingControl ctl);
// Row side weighted by tau_a, column side by tau_b.
ScalingResult unbalanced_projection(const Matrix& K, double gamma, double tau_a, double tau_b, const Marginal& a,
                                    const Marginal& b, ScalingControl ctl);

double relaxation_exponent(double gamma, double tau);

}  // namespace frlc
