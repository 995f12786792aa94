#include "frlc/lc_core.hpp"

#include "frlc/kernels.hpp"

#include <algorithm>

namespace frlc {

namespace {

Vector safe_inverse(const Vector& g, const char* which) {
  Vector out(g.size());
  for (Index k = 0; k < g.size(); ++k) {
    if (!(g[k] >= kDegenerateMass))
      fail(ErrorKind::DegenerateMarginal, std::string(which) + " entry " + std::to_string(k) +
                                              " = " + std::to_string(g[k]));
    out[k] = 1.0 / std::max(g[k], kMassFloor);
  }
  return out;
}

}  // namespace

std::pair<Vector, Vector> inner_marginals(const Matrix& Q, const Matrix& R) {
  return {Q.colwise().sum().transpose(), R.colwise().sum().transpose()};
}

LcFactors::LcFactors(Matrix Q, Matrix R, Matrix T) : Q_(std::move(Q)), R_(std::move(R)), T_(std::move(T)) {
  require_shape(T_.rows() == Q_.cols() && T_.cols() == R_.cols(),
                "T must be r1 x r2 with r1 = cols(Q), r2 = cols(R)");
  auto [gq, gr] = inner_marginals(Q_, R_);
  gQ_ = std::move(gq);
  gR_ = std::move(gr);
}

Matrix LcFactors::X() const {
  const Vector iq = safe_inverse(gQ_, "gQ");
  const Vector ir = safe_inverse(gR_, "gR");
  return iq.asDiagonal() * T_ * ir.asDiagonal();
}

CostSpec CostSpec::dense(Matrix C) {
  CostSpec c;
  c.C_ = std::move(C);
  return c;
}

CostSpec CostSpec::factored(Matrix C1, Matrix C2) {
  require_shape(C1.cols() == C2.cols(), "factored cost needs C1, C2 with equal inner width");
  CostSpec c;
  c.C1_ = std::move(C1);
  c.C2_ = std::move(C2);
  return c;
}

CostSpec CostSpec::intra(Matrix A, Matrix B) {
  CostSpec c;
  c.with_intra(std::move(A), std::move(B));
  return c;
}

CostSpec& CostSpec::with_intra(Matrix A, Matrix B) {
  require_shape(A.rows() == A.cols() && B.rows() == B.cols(), "intra-domain costs must be square");
  if (has_linear())
    require_shape(A.rows() == rows() && B.rows() == cols(), "intra-domain costs disagree with C");
  A_ = std::move(A);
  B_ = std::move(B);
  return *this;
}

Index CostSpec::rows() const {
  if (C_) return C_->rows();
  if (C1_) return C1_->rows();
  if (A_) return A_->rows();
  return 0;
}

Index CostSpec::cols() const {
  if (C_) return C_->cols();
  if (C2_) return C2_->rows();
  if (B_) return B_->rows();
  return 0;
}

const Matrix& CostSpec::C() const {
  if (!C_) fail(ErrorKind::InvalidArgument, "cost is not dense");
  return *C_;
}
const Matrix& CostSpec::C1() const {
  if (!C1_) fail(ErrorKind::InvalidArgument, "cost is not factored");
  return *C1_;
}
const Matrix& CostSpec::C2() const {
  if (!C2_) fail(ErrorKind::InvalidArgument, "cost is not factored");
  return *C2_;
}
const Matrix& CostSpec::A() const {
  if (!A_) fail(ErrorKind::MissingIntraCost, "A is required for GW objectives");
  return *A_;
}
const Matrix& CostSpec::B() const {
  if (!B_) fail(ErrorKind::MissingIntraCost, "B is required for GW objectives");
  return *B_;
}

Matrix CostSpec::times(const Matrix& R) const {
  if (C1_) return kernels::matmul(*C1_, kernels::matmul_tn(*C2_, R));
  return kernels::matmul(C(), R);
}

Matrix CostSpec::times_t(const Matrix& Q) const {
  if (C1_) return kernels::matmul(*C2_, kernels::matmul_tn(*C1_, Q));
  return kernels::matmul_tn(C(), Q);
}

Matrix CostSpec::sandwich(const Matrix& Q, const Matrix& R) const {
  if (C1_) return kernels::matmul_tn(kernels::matmul_tn(*C1_, Q), kernels::matmul_tn(*C2_, R));
  return kernels::matmul_tn(Q, kernels::matmul(C(), R));
}

Matrix CostSpec::materialize() const {
  if (C1_) return kernels::matmul(*C1_, C2_->transpose());
  return C();
}

double CostSpec::max_entry() const {
  if (C_) return C_->maxCoeff();
  return materialize().maxCoeff();
}

double CostSpec::min_entry() const {
  if (C_) return C_->minCoeff();
  return materialize().minCoeff();
}

void check_shapes(const LcFactors& f, const CostSpec& c) {
  require_shape(c.rows() == f.n() && c.cols() == f.m(),
                "cost is " + std::to_string(c.rows()) + "x" + std::to_string(c.cols()) +
                    " but factors are " + std::to_string(f.n()) + "x" + std::to_string(f.m()));
}

Matrix reconstruct_plan(const LcFactors& f) {
  return kernels::matmul(kernels::matmul(f.Q(), f.X()), f.R().transpose());
}

Vector apply_plan(const LcFactors& f, const Vector& v) {
  require_shape(v.size() == f.m(), "apply_plan: vector length differs from m");
  const Matrix X = f.X();
  return f.Q() * (X * (f.R().transpose() * v));
}

Vector apply_plan_t(const LcFactors& f, const Vector& u) {
  require_shape(u.size() == f.n(), "apply_plan_t: vector length differs from n");
  const Matrix X = f.X();
  return f.R() * (X.transpose() * (f.Q().transpose() * u));
}

double primal_cost(const LcFactors& f, const CostSpec& c) {
  check_shapes(f, c);
  return c.sandwich(f.Q(), f.R()).cwiseProduct(f.X()).sum();
}

Residuals marginal_residuals(const LcFactors& f, const Marginal& a, const Marginal& b) {
  require_shape(a.size() == f.n() && b.size() == f.m(), "marginal lengths differ from factors");
  Residuals r;
  r.left = (apply_plan(f, Vector::Ones(f.m())) - a).lpNorm<1>();
  r.right = (apply_plan_t(f, Vector::Ones(f.n())) - b).lpNorm<1>();
  return r;
}

}  // namespace frlc
