#include "frlc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace frlc::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ExactResult from_assignment(const Matrix& C, std::vector<Index> sigma) {
  const Index n = C.rows();
  ExactResult r;
  double s = 0.0;
  for (Index i = 0; i < n; ++i) s += C(i, sigma[i]);
  r.cost = s / double(n);
  r.plan = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) r.plan(i, sigma[i]) = 1.0 / double(n);
  r.assignment = std::move(sigma);
  return r;
}

std::vector<Index> exhaustive(const Matrix& C) {
  const Index n = C.rows();
  if (n > 10) fail(ErrorKind::TooLarge, "exhaustive assignment is limited to n <= 10");
  std::vector<Index> perm(n), best;
  std::iota(perm.begin(), perm.end(), Index(0));
  double best_cost = kInf;
  do {
    double s = 0.0;
    for (Index i = 0; i < n; ++i) s += C(i, perm[i]);
    if (s < best_cost) {
      best_cost = s;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Shortest augmenting path with row/column potentials, O(n^3).
std::vector<Index> hungarian(const Matrix& C) {
  const Index n = C.rows();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<Index> match(n + 1, 0), way(n + 1, 0);  // match[j] = row assigned to column j (1-based)
  for (Index i = 1; i <= n; ++i) {
    match[0] = i;
    Index j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const Index i0 = match[j0];
      double delta = kInf;
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = C(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const Index j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<Index> sigma(n);
  for (Index j = 1; j <= n; ++j) sigma[match[j] - 1] = j - 1;
  return sigma;
}

double log_sum_exp(const double* x, Index len, Index stride) {
  double mx = -kInf;
  for (Index k = 0; k < len; ++k) mx = std::max(mx, x[k * stride]);
  if (mx == -kInf) return mx;
  double s = 0.0;
  for (Index k = 0; k < len; ++k) s += std::exp(x[k * stride] - mx);
  return mx + std::log(s);
}

}  // namespace

ExactResult exact_ot_uniform(const Matrix& C, AssignmentPath path) {
  if (C.rows() != C.cols()) fail(ErrorKind::ShapeMismatch, "exact_ot_uniform needs a square cost");
  if (C.rows() == 0) fail(ErrorKind::InvalidArgument, "empty cost");
  if (path == AssignmentPath::Exhaustive) return from_assignment(C, exhaustive(C));
  if (path == AssignmentPath::Hungarian || C.rows() > 8) return from_assignment(C, hungarian(C));
  return from_assignment(C, exhaustive(C));
}

namespace {

// Entropic problem restricted to the support of a and b, in dual potentials.
struct Dual {
  const Matrix& C;
  const Vector& a;
  const Vector& b;
  double eps;
  Vector f, g;

  Matrix plan() const {
    return ((f.replicate(1, C.cols()) + g.transpose().replicate(C.rows(), 1) - C) / eps).array().exp().matrix();
  }
  double objective() const { return a.dot(f) + b.dot(g) - eps * plan().sum(); }
  double residual() const {
    const Matrix P = plan();
    return (P.rowwise().sum() - a).lpNorm<1>() + (P.colwise().sum().transpose() - b).lpNorm<1>();
  }

  void sinkhorn_sweep(Matrix& work) {
    const Index n = C.rows(), m = C.cols();
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < m; ++j) work(i, j) = (g[j] - C(i, j)) / eps;
      f[i] = eps * (std::log(a[i]) - log_sum_exp(&work(i, 0), m, n));
    }
    for (Index j = 0; j < m; ++j) {
      for (Index i = 0; i < n; ++i) work(i, j) = (f[i] - C(i, j)) / eps;
      g[j] = eps * (std::log(b[j]) - log_sum_exp(&work(0, j), n, 1));
    }
  }

  // Damped Newton ascent on the dual with the last g fixed (the dual is
  // invariant under f + c, g - c). Returns false when no ascent step exists.
  bool newton_step() {
    const Index n = C.rows(), m = C.cols();
    const Matrix P = plan();
    const Index k = n + m - 1;
    Matrix H = Matrix::Zero(k, k);
    Vector grad(k);
    H.topLeftCorner(n, n) = Matrix(P.rowwise().sum().asDiagonal());
    H.topRightCorner(n, m - 1) = P.leftCols(m - 1);
    H.bottomLeftCorner(m - 1, n) = P.leftCols(m - 1).transpose();
    H.bottomRightCorner(m - 1, m - 1) = Matrix(P.colwise().sum().transpose().head(m - 1).asDiagonal());
    grad.head(n) = a - P.rowwise().sum();
    grad.tail(m - 1) = b.head(m - 1) - P.colwise().sum().transpose().head(m - 1);
    const Vector step = eps * H.fullPivLu().solve(grad);
    if (!step.allFinite()) return false;
    const double base = objective();
    const Vector f0 = f, g0 = g;
    for (double t = 1.0; t > 1e-10; t *= 0.5) {
      f = f0 + t * step.head(n);
      g.head(m - 1) = g0.head(m - 1) + t * step.tail(m - 1);
      if (objective() >= base) return true;
    }
    f = f0;
    g = g0;
    return false;
  }
};

}  // namespace

ExactResult entropic_reference(const Matrix& C, const Vector& a, const Vector& b, double eps, int max_iter) {
  if (!(eps > 0)) fail(ErrorKind::InvalidArgument, "entropic_reference needs eps > 0");
  const Index n = C.rows(), m = C.cols();
  require_shape(a.size() == n && b.size() == m, "entropic_reference: marginal lengths differ from C");
  const double tol = 1e-12;

  std::vector<Index> I, J;
  for (Index i = 0; i < n; ++i)
    if (a[i] > 0) I.push_back(i);
  for (Index j = 0; j < m; ++j)
    if (b[j] > 0) J.push_back(j);
  if (I.empty() || J.empty()) fail(ErrorKind::InvalidArgument, "entropic_reference: empty marginal support");
  const Matrix Cs = C(I, J);
  const Vector as = a(I), bs = b(J);

  Dual d{Cs, as, bs, eps, Vector::Zero(Index(I.size())), Vector::Zero(Index(J.size()))};
  Matrix work(Cs.rows(), Cs.cols());
  double res = kInf;
  int it = 0;
  // Sinkhorn brings the potentials close; at small eps its rate degrades to
  // O(1/k), so Newton finishes the job.
  const int sinkhorn_budget = std::min(max_iter, 20000);
  while (it < sinkhorn_budget) {
    ++it;
    d.sinkhorn_sweep(work);
    if (it % 10 == 0 && (res = d.residual()) <= tol) break;
  }
  for (int k = 0; k < 100 && res > tol; ++k) {
    if (!d.newton_step()) break;
    res = d.residual();
  }
  while (res > tol && it < max_iter) {
    ++it;
    d.sinkhorn_sweep(work);
    if (it % 10 == 0) res = d.residual();
  }
  if (res > tol) throw NotConverged("entropic_reference did not reach 1e-12", res, it);

  ExactResult r;
  r.plan = Matrix::Zero(n, m);
  r.plan(I, J) = d.plan();
  r.cost = r.plan.cwiseProduct(C).sum();
  return r;
}

double brute_gw_cost(const Matrix& A, const Matrix& B, const Matrix& P) {
  const Index n = P.rows(), m = P.cols();
  if (n > 30 || m > 30) fail(ErrorKind::TooLarge, "brute_gw_cost is limited to 30 x 30");
  require_shape(A.rows() == n && A.cols() == n && B.rows() == m && B.cols() == m,
                "brute_gw_cost: A, B, P shapes disagree");
  double s = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < m; ++j)
      for (Index k = 0; k < n; ++k)
        for (Index l = 0; l < m; ++l) {
          const double d = A(i, k) - B(j, l);
          s += d * d * P(i, j) * P(k, l);
        }
  return s;
}

}  // namespace frlc::oracle
