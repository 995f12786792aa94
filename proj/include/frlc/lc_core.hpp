#pragma once

// Latent-coupling factorization P = Q diag(1/gQ) T diag(1/gR) R^T.

#include "frlc/types.hpp"

#include <optional>
#include <utility>

namespace frlc {

std::pair<Vector, Vector> inner_marginals(const Matrix& Q, const Matrix& R);

// Immutable (Q, R, T) triple; the inner marginals are recomputed on construction.
class LcFactors {
 public:
  LcFactors() = default;
  LcFactors(Matrix Q, Matrix R, Matrix T);

  const Matrix& Q() const { return Q_; }
  const Matrix& R() const { return R_; }
  const Matrix& T() const { return T_; }
  const Vector& gQ() const { return gQ_; }
  const Vector& gR() const { return gR_; }

  Index n() const { return Q_.rows(); }
  Index m() const { return R_.rows(); }
  Index r1() const { return Q_.cols(); }
  Index r2() const { return R_.cols(); }

  // diag(1/gQ) T diag(1/gR); throws DegenerateMarginal on vanishing inner mass.
  Matrix X() const;

 private:
  Matrix Q_, R_, T_;
  Vector gQ_, gR_;
};

// Cost matrix held densely or as C1 * C2^T, plus optional intra-domain costs for GW.
class CostSpec {
 public:
  static CostSpec dense(Matrix C);
  static CostSpec factored(Matrix C1, Matrix C2);
  static CostSpec intra(Matrix A, Matrix B);  // GW only, no linear term

  CostSpec& with_intra(Matrix A, Matrix B);

  bool has_linear() const { return C_.has_value() || C1_.has_value(); }
  bool is_factored() const { return C1_.has_value(); }
  bool has_intra() const { return A_.has_value() && B_.has_value(); }

  Index rows() const;
  Index cols() const;

  Matrix times(const Matrix& R) const;    // C R
  Matrix times_t(const Matrix& Q) const;  // C^T Q
  Matrix sandwich(const Matrix& Q, const Matrix& R) const;  // Q^T C R
  Matrix materialize() const;
  double max_entry() const;
  double min_entry() const;

  const Matrix& C() const;
  const Matrix& C1() const;
  const Matrix& C2() const;
  const Matrix& A() const;
  const Matrix& B() const;

 private:
  std::optional<Matrix> C_, C1_, C2_, A_, B_;
};

void check_shapes(const LcFactors& f, const CostSpec& c);

Matrix reconstruct_plan(const LcFactors& f);
Vector apply_plan(const LcFactors& f, const Vector& v);    // P v
Vector apply_plan_t(const LcFactors& f, const Vector& u);  // P^T u

// <C, P>_F of the linear part of c.
double primal_cost(const LcFactors& f, const CostSpec& c);

struct Residuals {
  double left = 0.0;   // ||P 1 - a||_1
  double right = 0.0;  // ||P^T 1 - b||_1
};
Residuals marginal_residuals(const LcFactors& f, const Marginal& a, const Marginal& b);

}  // namespace frlc
