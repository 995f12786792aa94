#include "frlc/partition.hpp"

#include "frlc/projections.hpp"
#include "frlc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace frlc {

namespace {

// With a full-rank template, R = T = diag(hbar) makes the LC plan equal to Q,
// so a random Q starts the solver well away from the product coupling. The
// generic random start composes three near-uniform factors and lands within
// ~1e-5 of it, a saddle point of the GW objective.
LcFactors template_init(const Vector& h, const Vector& hbar, std::uint64_t seed) {
  Rng rng(seed);
  Matrix KQ(h.size(), hbar.size());
  for (Index j = 0; j < KQ.cols(); ++j)
    for (Index i = 0; i < KQ.rows(); ++i) KQ(i, j) = std::exp(rng.uniform());
  Matrix Q = sinkhorn(KQ, h, hbar, ScalingControl{1e-12, 10000, false}).scaled;
  // Exact inner marginal so that P = Q holds.
  Q = (Q * Q.colwise().sum().transpose().cwiseInverse().cwiseProduct(hbar).asDiagonal()).eval();
  const Matrix D = hbar.asDiagonal();
  return LcFactors(std::move(Q), D, D);
}

}  // namespace

GraphCost parse_graph_cost(const std::string& s) {
  if (s == "adjacency") return GraphCost::Adjacency;
  if (s == "heat") return GraphCost::Heat;
  fail(ErrorKind::InvalidArgument, "unknown graph cost '" + s + "' (expected adjacency or heat)");
}

Vector sorted_interpolation(const Vector& h, Index k) {
  if (k < 1 || h.size() == 0) fail(ErrorKind::InvalidArgument, "sorted_interpolation needs k >= 1 and non-empty h");
  std::vector<double> s(h.data(), h.data() + h.size());
  std::sort(s.begin(), s.end(), std::greater<>());
  const Index n = Index(s.size());
  Vector out(k);
  for (Index j = 0; j < k; ++j) {
    const double x = k > 1 ? double(j) / double(k - 1) * double(n - 1) : 0.0;
    const Index lo = std::min<Index>(Index(x), n - 1);
    const Index hi = std::min<Index>(lo + 1, n - 1);
    const double w = x - double(lo);
    out[j] = (1.0 - w) * s[lo] + w * s[hi];
  }
  return out / out.sum();
}

PartitionResult partition_graph(const GraphSpec& g, const PartitionOptions& opt) {
  if (opt.clusters < 1 || opt.clusters > g.n)
    fail(ErrorKind::InvalidRank, "clusters must lie in [1, number of nodes]");
  const Index k = opt.clusters;
  PartitionResult out;
  if (k == 1) {
    out.labels.assign(g.n, 0);
    out.template_mass = Vector::Ones(1);
    return out;
  }

  Matrix A = opt.cost == GraphCost::Heat ? heat_kernel_cost(g, opt.t) : adjacency_cost(g);
  if (g.directed && opt.cost == GraphCost::Adjacency) A = 0.5 * (A + A.transpose()).eval();
  const Vector h = degree_distribution(g);
  const Vector hbar = opt.prior == TemplatePrior::Sorted ? sorted_interpolation(h, k)
                                                         : Vector::Constant(k, 1.0 / double(k));

  ProblemSpec p;
  p.a = h;
  p.b = hbar;
  p.r1 = p.r2 = k;  // full rank on the template side
  p.mode = Mode::SrRight;
  p.objective.kind = ObjectiveKind::GW;
  p.gamma = opt.gamma;
  p.tau = opt.tau;
  p.tau2 = opt.tau2;
  p.max_iter = opt.max_iter;
  p.min_iter = std::min(opt.min_iter, opt.max_iter);
  p.seed = opt.seed;

  const CostSpec c = CostSpec::intra(std::move(A), Matrix::Identity(k, k));
  out.report = frlc_solve(p, c, template_init(h, hbar, opt.seed));
  const Matrix P = reconstruct_plan(out.report.factors);
  out.labels.resize(g.n);
  for (Index i = 0; i < g.n; ++i) {
    Index best;
    P.row(i).maxCoeff(&best);
    out.labels[i] = int(best);
  }
  out.template_mass = P.colwise().sum().transpose();
  return out;
}

}  // namespace frlc
