#include "frlc/solver.hpp"

#include "frlc/kernels.hpp"
#include "frlc/projections.hpp"
#include "frlc/rng.hpp"

#include <chrono>
#include <cmath>

namespace frlc {

Mode parse_mode(const std::string& s) {
  if (s == "balanced") return Mode::Balanced;
  if (s == "unbalanced") return Mode::Unbalanced;
  if (s == "sr-left") return Mode::SrLeft;
  if (s == "sr-right") return Mode::SrRight;
  fail(ErrorKind::InvalidArgument, "unknown mode '" + s + "' (expected balanced, unbalanced, sr-left, sr-right)");
}

std::string to_string(Mode m) {
  switch (m) {
    case Mode::Balanced: return "balanced";
    case Mode::Unbalanced: return "unbalanced";
    case Mode::SrLeft: return "sr-left";
    case Mode::SrRight: return "sr-right";
  }
  return "?";
}

InitKind parse_init(const std::string& s) {
  if (s == "random") return InitKind::Random;
  if (s == "rank2") return InitKind::Rank2;
  fail(ErrorKind::InvalidArgument, "unknown init '" + s + "' (expected random or rank2)");
}

std::string to_string(InitKind k) { return k == InitKind::Random ? "random" : "rank2"; }

void ProblemSpec::validate() const {
  auto bad = [](const std::string& what) { fail(ErrorKind::InvalidArgument, what); };
  if (a.size() == 0 || b.size() == 0) bad("marginals must be non-empty");
  if ((a.array() < 0).any() || (b.array() < 0).any()) bad("marginals must be non-negative");
  if (r1 < 1 || r2 < 1) fail(ErrorKind::InvalidRank, "ranks must be at least 1");
  if (r1 > a.size() || r2 > b.size())
    fail(ErrorKind::InvalidRank, "rank exceeds the number of points (r1 <= n, r2 <= m)");
  if (!(gamma > 0) || !(tau >= 0) || !(tau2 >= 0) || !(delta > 0) || !(epsilon > 0))
    bad("gamma, delta, epsilon must be positive and tau, tau2 non-negative");
  if (min_iter < 1 || max_iter < 1 || max_inner_balanced < 1 || max_inner_relaxed < 1)
    bad("iteration limits must be positive");
  if (objective.kind == ObjectiveKind::FGW && !(objective.alpha > 0 && objective.alpha < 1))
    bad("FGW alpha must lie in (0, 1)");
  if (mode == Mode::Balanced && std::abs(a.sum() - b.sum()) > 1e-8) bad("balanced mode needs equal marginal masses");
}

namespace {

Matrix uniform_matrix(Rng& rng, Index rows, Index cols) {
  Matrix M(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) M(i, j) = rng.uniform();
  return M;
}

// Scales `g` to carry `mass`.
Vector with_mass(const Vector& g, double mass) { return g * (mass / g.sum()); }

// T between inner marginals whose masses may differ in relaxed modes: the
// side matching the tight outer marginal stays exact, the other is rescaled.
ScalingResult project_latent(const Matrix& KT, const Vector& gQ, const Vector& gR, Mode mode,
                             ScalingControl ctl) {
  if (mode == Mode::SrLeft) {
    std::swap(ctl.u0, ctl.v0);
    ScalingResult s = sinkhorn(KT.transpose(), gR, with_mass(gQ, gR.sum()), ctl);
    s.scaled.transposeInPlace();
    std::swap(s.u, s.v);
    return s;
  }
  return sinkhorn(KT, gQ, with_mass(gR, gQ.sum()), ctl);
}

}  // namespace

LcFactors initialize_couplings(const Marginal& a, const Marginal& b, Index r1, Index r2, std::uint64_t seed,
                               double delta, int max_iter) {
  if (r1 < 1 || r2 < 1 || r1 > a.size() || r2 > b.size())
    fail(ErrorKind::InvalidRank, "initialize_couplings: ranks must satisfy 1 <= r1 <= n, 1 <= r2 <= m");
  Rng rng(seed);
  const Matrix CQ = uniform_matrix(rng, a.size(), r1);
  const Matrix CR = uniform_matrix(rng, b.size(), r2);
  const Matrix CT = uniform_matrix(rng, r1, r2);

  const ScalingControl ctl{delta, max_iter, true};
  const Vector gq = Vector::Constant(r1, a.sum() / double(r1));
  const Vector gr = Vector::Constant(r2, b.sum() / double(r2));
  Matrix Q = sinkhorn(CQ.array().exp().matrix(), a, gq, ctl).scaled;
  Matrix R = sinkhorn(CR.array().exp().matrix(), b, gr, ctl).scaled;
  auto [gQ, gR] = inner_marginals(Q, R);
  Matrix T = sinkhorn(CT.array().exp().matrix(), gQ, with_mass(gR, gQ.sum()), ctl).scaled;
  return LcFactors(std::move(Q), std::move(R), std::move(T));
}

LcFactors rank2_init(const Marginal& a, const Marginal& b, Index r1, Index r2, const CostSpec& c) {
  if (r1 < 2 || r2 < 2) fail(ErrorKind::InvalidRank, "rank2_init needs r1, r2 >= 2");
  if (r1 > a.size() || r2 > b.size()) fail(ErrorKind::InvalidRank, "rank exceeds the number of points");
  require_shape(c.rows() == a.size() && c.cols() == b.size(), "rank2_init: cost shape differs from marginals");

  auto ramp = [](Index k) {
    Vector v = Vector::LinSpaced(k, 1.0, double(k));
    return Vector(v / v.sum());
  };
  const Vector gq = Vector::Constant(r1, a.sum() / double(r1));
  const Vector gr = Vector::Constant(r2, b.sum() / double(r2));
  const double lambda = std::min({a.minCoeff() / a.sum(), b.minCoeff() / b.sum(), 1.0 / double(std::max(r1, r2))}) / 2.0;

  // Two-component mixture of product couplings: outer and inner marginals
  // are both exact by construction.
  auto factor = [&](const Vector& outer, const Vector& inner) {
    const double mass = outer.sum();
    const Vector o1 = ramp(outer.size()) * mass;
    const Vector i1 = ramp(inner.size());
    const Vector o2 = (outer - lambda * o1) / (1.0 - lambda);
    const Vector i2 = (inner / mass - lambda * i1) / (1.0 - lambda);
    return Matrix(lambda * o1 * i1.transpose() + (1.0 - lambda) * o2 * i2.transpose());
  };
  Matrix Q = factor(a, gq);
  Matrix R = factor(b, gr);
  auto [gQ, gR] = inner_marginals(Q, R);

  Matrix KT = Matrix::Constant(r1, r2, 1e-8);
  for (Index k = 0; k < std::min(r1, r2); ++k) KT(k, k) += 1.0 / double(std::min(r1, r2));
  Matrix T = sinkhorn(KT, gQ, with_mass(gR, gQ.sum()), ScalingControl{1e-12, 100000, false}).scaled;
  return LcFactors(std::move(Q), std::move(R), std::move(T));
}

double delta_criterion(const LcFactors& prev, const LcFactors& curr, double gamma_qr, double gamma_t) {
  require_shape(prev.Q().rows() == curr.Q().rows() && prev.Q().cols() == curr.Q().cols() &&
                    prev.R().rows() == curr.R().rows() && prev.R().cols() == curr.R().cols(),
                "delta_criterion: factor shapes differ");
  const double gq2 = gamma_qr * gamma_qr;
  const double gt2 = gamma_t * gamma_t;
  return (curr.Q() - prev.Q()).squaredNorm() / gq2 + (curr.R() - prev.R()).squaredNorm() / gq2 +
         (curr.T() - prev.T()).squaredNorm() / gt2;
}

SolveReport frlc_solve(const ProblemSpec& p, const CostSpec& c, const std::optional<LcFactors>& init) {
  p.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const Index n = p.a.size();
  const Index m = p.b.size();
  require_shape(c.rows() == n && c.cols() == m, "cost shape differs from marginals");
  if (p.objective.kind != ObjectiveKind::W && !c.has_intra())
    fail(ErrorKind::MissingIntraCost, "GW and FGW objectives need intra-domain costs A and B");
  if (p.objective.kind != ObjectiveKind::GW && !c.has_linear())
    fail(ErrorKind::InvalidArgument, "W and FGW objectives need a cost matrix C");

  LcFactors f;
  if (init) {
    f = *init;
    require_shape(f.n() == n && f.m() == m && f.r1() == p.r1 && f.r2() == p.r2,
                  "initial factors disagree with the problem shape");
  } else if (p.init == InitKind::Rank2 && p.r1 >= 2 && p.r2 >= 2) {
    f = rank2_init(p.a, p.b, p.r1, p.r2, c);
  } else {
    f = initialize_couplings(p.a, p.b, p.r1, p.r2, p.seed);
  }

  SolveReport rep;
  const ScalingControl relaxed{p.delta, p.max_inner_relaxed, false};
  const ScalingControl tight{p.delta, p.max_inner_balanced, false};
  auto note = [&rep](const ScalingResult& s) {
    if (!s.converged) ++rep.inner_stalls;
    if (s.log_domain) ++rep.log_domain_events;
  };

  // Dual potentials of the last latent projection in gradient units
  // (log scaling / step); rescaled by the next step they warm-start Sinkhorn,
  // which otherwise needs thousands of sweeps once T is sharply peaked.
  Vector pot_u, pot_v;

  for (int k = 1; k <= p.max_iter; ++k) {
    const GradientTriple g = gradient(f, c, p.objective);
    const StepSizes st = step_size(g, p.gamma);
    const Matrix KQ = kernels::gibbs(f.Q(), g.dQ, st.gamma_qr);
    const Matrix KR = kernels::gibbs(f.R(), g.dR, st.gamma_qr);

    ScalingResult sq, sr;
    switch (p.mode) {
      case Mode::Balanced:
        sq = sr_right_projection(KQ, st.gamma_qr, p.tau, p.a, f.gQ(), relaxed);
        sr = sr_right_projection(KR, st.gamma_qr, p.tau, p.b, f.gR(), relaxed);
        break;
      case Mode::Unbalanced:
        sq = unbalanced_projection(KQ, st.gamma_qr, p.tau, p.a, f.gQ(), relaxed);
        sr = unbalanced_projection(KR, st.gamma_qr, p.tau2, p.b, f.gR(), relaxed);
        break;
      case Mode::SrLeft:
        sq = unbalanced_projection(KQ, st.gamma_qr, p.tau, p.a, f.gQ(), relaxed);
        sr = sr_right_projection(KR, st.gamma_qr, p.tau, p.b, f.gR(), relaxed);
        break;
      case Mode::SrRight:
        sq = sr_right_projection(KQ, st.gamma_qr, p.tau, p.a, f.gQ(), relaxed);
        // Outer marginal b relaxed by tau2, inner marginal anchored by tau.
        sr = unbalanced_projection(KR, st.gamma_qr, p.tau2, p.tau, p.b, f.gR(), relaxed);
        break;
    }
    note(sq);
    note(sr);

    // Latent step with the new sub-couplings; T is unchanged so far.
    const LcFactors mid(std::move(sq.scaled), std::move(sr.scaled), f.T());
    const Matrix dT = latent_gradient(mid, c, p.objective);
    const double gamma_t = step_size(GradientTriple{Matrix(), Matrix(), dT}, p.gamma).gamma_t;
    const Matrix KT = kernels::gibbs(f.T(), dT, gamma_t);
    ScalingControl tctl = tight;
    Vector u0, v0;
    if (pot_u.size() == p.r1 && pot_v.size() == p.r2) {
      u0 = (gamma_t * pot_u).array().exp().matrix();
      v0 = (gamma_t * pot_v).array().exp().matrix();
      tctl.u0 = &u0;
      tctl.v0 = &v0;
    }
    ScalingResult stt = project_latent(KT, mid.gQ(), mid.gR(), p.mode, tctl);
    note(stt);
    if ((stt.u.array() > 0).all() && (stt.v.array() > 0).all()) {
      pot_u = stt.u.array().log().matrix() / gamma_t;
      pot_v = stt.v.array().log().matrix() / gamma_t;
    }

    LcFactors next(mid.Q(), mid.R(), std::move(stt.scaled));
    const double d = delta_criterion(f, next, st.gamma_qr, gamma_t);
    f = std::move(next);
    rep.delta_trace.push_back(d);
    rep.cost_trace.push_back(objective_value(f, c, p.objective));
    rep.iters = k;
    if (d <= p.epsilon && k >= p.min_iter) {
      rep.converged = true;
      break;
    }
  }

  // Inner Sinkhorn calls are capped, and once T is sharply peaked they stop
  // short of delta. A last KL projection of T itself onto its marginal
  // polytope (kernel = T, so the iterate barely moves) restores feasibility.
  {
    ScalingControl fin_ctl{p.delta, 100 * p.max_inner_balanced, false};
    ScalingResult fin = project_latent(f.T(), f.gQ(), f.gR(), p.mode, fin_ctl);
    rep.final_projection_iters = fin.iters;
    if (!fin.converged) ++rep.inner_stalls;
    f = LcFactors(f.Q(), f.R(), std::move(fin.scaled));
  }
  rep.cost = objective_value(f, c, p.objective);
  rep.residuals = marginal_residuals(f, p.a, p.b);
  rep.factors = std::move(f);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace frlc
