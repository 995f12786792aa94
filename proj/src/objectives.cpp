#include "frlc/objectives.hpp"

#include "frlc/kernels.hpp"

#include <algorithm>

namespace frlc {

namespace {

constexpr double kStepFloor = 1e-15;

double max_abs(const Matrix& M) { return M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff(); }

// Subtracts from column k of G the weighted mean sum_i G_ik F_ik / g_k:
// the rank-one correction from differentiating through g = F^T 1.
Matrix rank_one_corrected(const Matrix& G, const Matrix& F, const Vector& g) {
  const Vector w = G.cwiseProduct(F).colwise().sum().transpose().cwiseQuotient(g);
  return G.rowwise() - w.transpose();
}

}  // namespace

ObjectiveKind parse_objective(const std::string& s) {
  if (s == "w" || s == "W") return ObjectiveKind::W;
  if (s == "gw" || s == "GW") return ObjectiveKind::GW;
  if (s == "fgw" || s == "FGW") return ObjectiveKind::FGW;
  fail(ErrorKind::InvalidArgument, "unknown objective '" + s + "' (expected w, gw or fgw)");
}

std::string to_string(ObjectiveKind k) {
  switch (k) {
    case ObjectiveKind::W: return "w";
    case ObjectiveKind::GW: return "gw";
    case ObjectiveKind::FGW: return "fgw";
  }
  return "?";
}

GradientTriple grad_w(const LcFactors& f, const CostSpec& c) {
  check_shapes(f, c);
  const Matrix X = f.X();
  const Matrix CR = c.times(f.R());       // n x r2
  const Matrix CtQ = c.times_t(f.Q());    // m x r1
  const Matrix CRXt = CR * X.transpose(); // n x r1
  const Matrix CtQX = CtQ * X;            // m x r2

  GradientTriple g;
  g.dQ = rank_one_corrected(CRXt, f.Q(), f.gQ());
  g.dR = rank_one_corrected(CtQX, f.R(), f.gR());
  const Matrix QtCR = kernels::matmul_tn(f.Q(), CR);
  g.dT = f.gQ().cwiseInverse().asDiagonal() * QtCR * f.gR().cwiseInverse().asDiagonal();
  return g;
}

GradientTriple grad_gw(const LcFactors& f, const CostSpec& c) {
  const Matrix& A = c.A();
  const Matrix& B = c.B();
  require_shape(A.rows() == f.n() && B.rows() == f.m(), "intra-domain costs disagree with factors");
  const Matrix X = f.X();
  const Matrix AQ = kernels::matmul(A, f.Q());
  const Matrix BR = kernels::matmul(B, f.R());
  const Matrix QtAQ = kernels::matmul_tn(f.Q(), AQ);
  const Matrix RtBR = kernels::matmul_tn(f.R(), BR);

  const Matrix XBXt = X * RtBR * X.transpose();  // r1 x r1
  const Matrix XtAX = X.transpose() * QtAQ * X;  // r2 x r2

  GradientTriple g;
  const Vector a2q = kernels::hadamard_square_matvec(A, f.Q().rowwise().sum());
  const Vector b2r = kernels::hadamard_square_matvec(B, f.R().rowwise().sum());

  const Matrix GQ = -4.0 * kernels::matmul(AQ, XBXt);
  g.dQ = rank_one_corrected(GQ, f.Q(), f.gQ());
  g.dQ.colwise() += 2.0 * a2q;

  const Matrix GR = -4.0 * kernels::matmul(BR, XtAX);
  g.dR = rank_one_corrected(GR, f.R(), f.gR());
  g.dR.colwise() += 2.0 * b2r;

  g.dT = -4.0 * f.gQ().cwiseInverse().asDiagonal() * (QtAQ * X * RtBR) * f.gR().cwiseInverse().asDiagonal();
  return g;
}

GradientTriple grad_fgw(const LcFactors& f, const CostSpec& c, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail(ErrorKind::InvalidArgument, "FGW alpha must lie in [0, 1]");
  const GradientTriple w = grad_w(f, c);
  const GradientTriple q = grad_gw(f, c);
  return {alpha * w.dQ + (1.0 - alpha) * q.dQ, alpha * w.dR + (1.0 - alpha) * q.dR,
          alpha * w.dT + (1.0 - alpha) * q.dT};
}

GradientTriple gradient(const LcFactors& f, const CostSpec& c, const Objective& obj) {
  switch (obj.kind) {
    case ObjectiveKind::W: return grad_w(f, c);
    case ObjectiveKind::GW: return grad_gw(f, c);
    case ObjectiveKind::FGW: return grad_fgw(f, c, obj.alpha);
  }
  fail(ErrorKind::InvalidArgument, "unknown objective");
}

Matrix latent_gradient(const LcFactors& f, const CostSpec& c, const Objective& obj) {
  const Vector iq = f.gQ().cwiseInverse();
  const Vector ir = f.gR().cwiseInverse();
  Matrix lin, quad;
  if (obj.kind != ObjectiveKind::GW) {
    check_shapes(f, c);
    lin = iq.asDiagonal() * c.sandwich(f.Q(), f.R()) * ir.asDiagonal();
    if (obj.kind == ObjectiveKind::W) return lin;
  }
  const Matrix QtAQ = kernels::matmul_tn(f.Q(), kernels::matmul(c.A(), f.Q()));
  const Matrix RtBR = kernels::matmul_tn(f.R(), kernels::matmul(c.B(), f.R()));
  quad = -4.0 * iq.asDiagonal() * (QtAQ * f.X() * RtBR) * ir.asDiagonal();
  if (obj.kind == ObjectiveKind::GW) return quad;
  return obj.alpha * lin + (1.0 - obj.alpha) * quad;
}

double gw_cost(const LcFactors& f, const CostSpec& c) {
  const Matrix& A = c.A();
  const Matrix& B = c.B();
  require_shape(A.rows() == f.n() && B.rows() == f.m(), "intra-domain costs disagree with factors");
  const Matrix X = f.X();
  // Outer marginals of P; for tight couplings these are just Q1 and R1.
  const Vector p = apply_plan(f, Vector::Ones(f.m()));
  const Vector q = apply_plan_t(f, Vector::Ones(f.n()));
  const double pa = p.dot(kernels::hadamard_square_matvec(A, p));
  const double qb = q.dot(kernels::hadamard_square_matvec(B, q));
  const Matrix QtAQ = kernels::matmul_tn(f.Q(), kernels::matmul(A, f.Q()));
  const Matrix RtBR = kernels::matmul_tn(f.R(), kernels::matmul(B, f.R()));
  const double cross = (X.transpose() * QtAQ * X).cwiseProduct(RtBR).sum();
  return pa + qb - 2.0 * cross;
}

double objective_value(const LcFactors& f, const CostSpec& c, const Objective& obj) {
  switch (obj.kind) {
    case ObjectiveKind::W: return primal_cost(f, c);
    case ObjectiveKind::GW: return gw_cost(f, c);
    case ObjectiveKind::FGW: return obj.alpha * primal_cost(f, c) + (1.0 - obj.alpha) * gw_cost(f, c);
  }
  fail(ErrorKind::InvalidArgument, "unknown objective");
}

StepSizes step_size(const GradientTriple& g, double gamma) {
  if (!(gamma > 0.0)) fail(ErrorKind::InvalidArgument, "gamma must be positive");
  StepSizes s;
  s.gamma_qr = gamma / std::max(std::max(max_abs(g.dQ), max_abs(g.dR)), kStepFloor);
  s.gamma_t = gamma / std::max(max_abs(g.dT), kStepFloor);
  return s;
}

Kernels assemble_kernels(const LcFactors& f, const GradientTriple& g, double gamma_qr, double gamma_t) {
  return {kernels::gibbs(f.Q(), g.dQ, gamma_qr), kernels::gibbs(f.R(), g.dR, gamma_qr),
          kernels::gibbs(f.T(), g.dT, gamma_t)};
}

}  // namespace frlc
