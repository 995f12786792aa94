#include "frlc/analysis.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace frlc {

namespace {

void require_positive(const Vector& g, const char* which) {
  for (Index k = 0; k < g.size(); ++k)
    if (!(g[k] >= kDegenerateMass))
      fail(ErrorKind::DegenerateMarginal, std::string(which) + " entry " + std::to_string(k) + " vanishes");
}

}  // namespace

Barycenters lc_project(const LcFactors& f, const Matrix& Z1, const Matrix& Z2) {
  require_shape(Z1.rows() == f.n() && Z2.rows() == f.m(), "lc_project: point counts differ from factors");
  if (Z1.cols() != Z2.cols()) fail(ErrorKind::DimMismatch, "lc_project: point dimensions differ");
  require_positive(f.gQ(), "gQ");
  require_positive(f.gR(), "gR");
  return {f.gQ().cwiseInverse().asDiagonal() * (f.Q().transpose() * Z1),
          f.gR().cwiseInverse().asDiagonal() * (f.R().transpose() * Z2)};
}

Diagonalized diagonalize(const LcFactors& f, Side side) {
  require_positive(f.gQ(), "gQ");
  require_positive(f.gR(), "gR");
  if (side == Side::Left) return {f.Q() * f.gQ().cwiseInverse().asDiagonal() * f.T(), f.R(), f.gR()};
  return {f.Q(), f.R() * f.gR().cwiseInverse().asDiagonal() * f.T().transpose(), f.gQ()};
}

OptimalG optimal_g(const Matrix& Q, const Matrix& R, const CostSpec& c) {
  require_shape(Q.cols() == R.cols(), "optimal_g needs Q and R of equal rank");
  require_shape(c.rows() == Q.rows() && c.cols() == R.rows(), "optimal_g: cost shape differs from factors");
  const Vector omega = c.sandwich(Q, R).diagonal();
  OptimalG out;
  for (Index i = 0; i < omega.size(); ++i) {
    if (omega[i] < 0) fail(ErrorKind::NegativeOmega, "omega entry " + std::to_string(i) + " is negative");
    if (omega[i] == 0) out.zero_entries.push_back(i);
  }
  const Vector s = omega.cwiseSqrt();
  const double total = s.sum();
  if (total > 0) out.g = s / total;
  else out.g = Vector::Constant(omega.size(), 1.0 / double(omega.size()));  // every g is optimal
  return out;
}

double rank_bound(const CostSpec& c, Index n, Index m, Index r, double mass) {
  if (r < 2) fail(ErrorKind::InvalidRank, "rank_bound needs r >= 2");
  const double spread = c.max_entry() - c.min_entry();
  const double bound = mass * spread * std::log(double(std::min(n, m)) / double(r - 1));
  return std::max(0.0, bound);
}

Index numeric_nonneg_rank_upper(const Matrix& P) {
  if (P.size() == 0) return 0;
  Eigen::BDCSVD<Matrix> svd(P);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  Index k = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s[i] > 1e-10 * s[0]) ++k;
  return k;
}

}  // namespace frlc
