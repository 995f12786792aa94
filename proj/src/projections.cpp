#include "frlc/projections.hpp"

#include "frlc/kernels.hpp"

#include <cmath>
#include <limits>

namespace frlc {

namespace {

constexpr double kScaleHuge = 1e280;
constexpr double kScaleTiny = 1e-280;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

enum class Side { Row, Col, None };
enum class Stop { MarginalL1, LogChange };

// One scaling problem: exponents per side (1 = tight), update order, stopping
// rule and which side receives the terminal update.
struct Plan {
  const Matrix& K;
  const Vector& row_target;
  const Vector& col_target;
  double kappa_row;
  double kappa_col;
  Side first;
  Stop stop;
  Side terminal;
  double inv_gamma;  // scales the log-change criterion
  const char* name;
};

bool out_of_range(const Vector& x) {
  for (Index i = 0; i < x.size(); ++i) {
    const double v = x[i];
    if (!std::isfinite(v)) return true;
    if (v != 0.0 && (v > kScaleHuge || v < kScaleTiny)) return true;
  }
  return false;
}

void validate(const Plan& p) {
  require_shape(p.K.rows() == p.row_target.size() && p.K.cols() == p.col_target.size(),
                std::string(p.name) + ": kernel is " + std::to_string(p.K.rows()) + "x" +
                    std::to_string(p.K.cols()) + ", targets have lengths " +
                    std::to_string(p.row_target.size()) + ", " + std::to_string(p.col_target.size()));
  for (Index e = 0; e < p.K.size(); ++e) {
    const double k = p.K.data()[e];
    if (!(k >= 0.0) || !std::isfinite(k))
      fail(ErrorKind::NonPositiveKernel, std::string(p.name) + ": kernel has a negative or non-finite entry");
  }
  if ((p.row_target.array() < 0).any() || (p.col_target.array() < 0).any())
    fail(ErrorKind::InvalidArgument, std::string(p.name) + ": negative target mass");
  const Vector rs = p.K.rowwise().sum();
  const Vector cs = p.K.colwise().sum().transpose();
  for (Index i = 0; i < rs.size(); ++i)
    if (rs[i] <= 0.0 && p.row_target[i] > 0.0 && p.kappa_row > 0.0)
      fail(ErrorKind::NonPositiveKernel, std::string(p.name) + ": zero kernel row " + std::to_string(i));
  for (Index j = 0; j < cs.size(); ++j)
    if (cs[j] <= 0.0 && p.col_target[j] > 0.0 && p.kappa_col > 0.0)
      fail(ErrorKind::NonPositiveKernel, std::string(p.name) + ": zero kernel column " + std::to_string(j));
}

// Returns false if an entry of the product underflowed while its target is positive.
bool scaled_update(const Vector& target, const Vector& prod, double kappa, Vector& out) {
  for (Index i = 0; i < target.size(); ++i) {
    if (kappa == 0.0) {
      out[i] = 1.0;
      continue;
    }
    if (target[i] == 0.0) {
      out[i] = 0.0;
      continue;
    }
    if (prod[i] < kMassFloor) return false;
    const double ratio = target[i] / prod[i];
    out[i] = kappa == 1.0 ? ratio : std::pow(ratio, kappa);
  }
  return true;
}

double log_change(const Vector& prev, const Vector& next) {
  double worst = 0.0;
  for (Index i = 0; i < prev.size(); ++i) {
    if (prev[i] == next[i]) continue;
    if (prev[i] == 0.0 || next[i] == 0.0) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, std::abs(std::log(next[i] / prev[i])));
  }
  return worst;
}

double marginal_l1(const Plan& p, const Vector& u, const Vector& v, const Vector& Kv) {
  const Vector Ktu = kernels::matvec_t(p.K, u);
  return (u.cwiseProduct(Kv) - p.row_target).lpNorm<1>() +
         (v.cwiseProduct(Ktu) - p.col_target).lpNorm<1>();
}

// ---- log-domain engine -------------------------------------------------------

struct LogState {
  Matrix logK;
  Vector f, g;  // log u, log v
};

Vector lse_rows(const Matrix& logK, const Vector& g) {
  Vector out(logK.rows());
  for (Index i = 0; i < logK.rows(); ++i) {
    double mx = kNegInf;
    for (Index j = 0; j < logK.cols(); ++j) mx = std::max(mx, logK(i, j) + g[j]);
    if (mx == kNegInf) {
      out[i] = kNegInf;
      continue;
    }
    double s = 0.0;
    for (Index j = 0; j < logK.cols(); ++j) s += std::exp(logK(i, j) + g[j] - mx);
    out[i] = mx + std::log(s);
  }
  return out;
}

Vector lse_cols(const Matrix& logK, const Vector& f) {
  Vector out(logK.cols());
  for (Index j = 0; j < logK.cols(); ++j) {
    double mx = kNegInf;
    for (Index i = 0; i < logK.rows(); ++i) mx = std::max(mx, logK(i, j) + f[i]);
    if (mx == kNegInf) {
      out[j] = kNegInf;
      continue;
    }
    double s = 0.0;
    for (Index i = 0; i < logK.rows(); ++i) s += std::exp(logK(i, j) + f[i] - mx);
    out[j] = mx + std::log(s);
  }
  return out;
}

void log_update(const Vector& target, const Vector& lse, double kappa, Vector& out) {
  for (Index i = 0; i < target.size(); ++i) {
    if (kappa == 0.0) out[i] = 0.0;
    else if (target[i] == 0.0) out[i] = kNegInf;
    else out[i] = kappa * (std::log(target[i]) - lse[i]);
  }
}

double log_diff(const Vector& a, const Vector& b) {
  double worst = 0.0;
  for (Index i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) continue;
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

void log_row(const Plan& p, LogState& s) { log_update(p.row_target, lse_rows(s.logK, s.g), p.kappa_row, s.f); }
void log_col(const Plan& p, LogState& s) { log_update(p.col_target, lse_cols(s.logK, s.f), p.kappa_col, s.g); }

double log_marginal_l1(const Plan& p, const LogState& s) {
  const Vector lr = lse_rows(s.logK, s.g);
  const Vector lc = lse_cols(s.logK, s.f);
  double res = 0.0;
  for (Index i = 0; i < lr.size(); ++i) res += std::abs(std::exp(s.f[i] + lr[i]) - p.row_target[i]);
  for (Index j = 0; j < lc.size(); ++j) res += std::abs(std::exp(s.g[j] + lc[j]) - p.col_target[j]);
  return res;
}

ScalingResult run_log(const Plan& p, const Vector& u0, const Vector& v0, int iters_done, double delta,
                      int max_iter) {
  LogState s;
  s.logK = p.K.array().log().matrix();
  s.f = u0.array().log().matrix();
  s.g = v0.array().log().matrix();

  ScalingResult out;
  out.log_domain = true;
  out.converged = false;
  out.final_residual = std::numeric_limits<double>::infinity();
  int it = iters_done;
  while (it < max_iter) {
    ++it;
    const Vector fp = s.f;
    const Vector gp = s.g;
    if (p.first == Side::Row) {
      log_row(p, s);
      log_col(p, s);
    } else {
      log_col(p, s);
      log_row(p, s);
    }
    const double res = p.stop == Stop::MarginalL1
                           ? log_marginal_l1(p, s)
                           : p.inv_gamma * std::max(log_diff(fp, s.f), log_diff(gp, s.g));
    out.final_residual = res;
    if (p.stop == Stop::MarginalL1 ? res <= delta : res < delta) {
      out.converged = true;
      break;
    }
  }
  if (p.terminal == Side::Row) log_row(p, s);
  if (p.terminal == Side::Col) log_col(p, s);
  out.iters = it;
  out.u = s.f.array().exp().matrix();
  out.v = s.g.array().exp().matrix();
  out.scaled = (s.logK.colwise() + s.f).rowwise() + s.g.transpose();
  out.scaled = out.scaled.array().exp().matrix();
  return out;
}

// ---- plain-domain engine -----------------------------------------------------

ScalingResult run(const Plan& p, ScalingControl ctl) {
  validate(p);
  if (ctl.max_iter < 1) fail(ErrorKind::InvalidArgument, std::string(p.name) + ": max_iter must be positive");

  const Index n = p.K.rows();
  const Index m = p.K.cols();
  Vector u = Vector::Ones(n);
  Vector v = Vector::Ones(m);
  if (ctl.u0 && ctl.u0->size() == n && !out_of_range(*ctl.u0) && (ctl.u0->array() > 0).all()) u = *ctl.u0;
  if (ctl.v0 && ctl.v0->size() == m && !out_of_range(*ctl.v0) && (ctl.v0->array() > 0).all()) v = *ctl.v0;

  auto row_step = [&](Vector& uu, const Vector& vv) {
    return scaled_update(p.row_target, kernels::matvec(p.K, vv), p.kappa_row, uu);
  };
  auto col_step = [&](const Vector& uu, Vector& vv) {
    return scaled_update(p.col_target, kernels::matvec_t(p.K, uu), p.kappa_col, vv);
  };

  ScalingResult out;
  out.converged = false;
  out.final_residual = std::numeric_limits<double>::infinity();
  bool overflow = false;
  int it = 0;
  while (it < ctl.max_iter) {
    ++it;
    const Vector up = u;
    const Vector vp = v;
    bool ok;
    if (p.first == Side::Row) ok = row_step(u, v) && col_step(u, v);
    else ok = col_step(u, v) && row_step(u, v);
    if (!ok || out_of_range(u) || out_of_range(v)) {
      u = up;
      v = vp;
      --it;
      overflow = true;
      break;
    }
    double res;
    if (p.stop == Stop::MarginalL1) res = marginal_l1(p, u, v, kernels::matvec(p.K, v));
    else res = p.inv_gamma * std::max(log_change(up, u), log_change(vp, v));
    out.final_residual = res;
    if (p.stop == Stop::MarginalL1 ? res <= ctl.delta : res < ctl.delta) {
      out.converged = true;
      break;
    }
  }

  if (overflow) {
    out = run_log(p, u, v, it, ctl.delta, ctl.max_iter);
  } else {
    bool ok = true;
    if (p.terminal == Side::Row) ok = row_step(u, v);
    if (p.terminal == Side::Col) ok = col_step(u, v);
    if (!ok || out_of_range(u) || out_of_range(v)) {
      out = run_log(p, u, v, it, ctl.delta, ctl.max_iter);
    } else {
      out.iters = it;
      out.u = std::move(u);
      out.v = std::move(v);
      out.scaled = out.u.asDiagonal() * p.K * out.v.asDiagonal();
    }
  }

  if (!out.converged && ctl.strict)
    throw NotConverged(std::string(p.name) + " did not reach tolerance " + std::to_string(ctl.delta) +
                           " in " + std::to_string(out.iters) + " iterations",
                       out.final_residual, out.iters);
  return out;
}

}  // namespace

double relaxation_exponent(double gamma, double tau) {
  if (!(gamma > 0.0)) fail(ErrorKind::InvalidArgument, "gamma must be positive");
  if (!(tau >= 0.0)) fail(ErrorKind::InvalidArgument, "tau must be non-negative");
  if (std::isinf(tau)) return 1.0;
  return tau / (tau + 1.0 / gamma);
}

ScalingResult sinkhorn(const Matrix& K, const Marginal& a, const Marginal& b, ScalingControl ctl) {
  const double sa = a.sum(), sb = b.sum();
  if (std::abs(sa - sb) > 1e-8 * std::max(1.0, std::max(sa, sb)))
    fail(ErrorKind::InvalidArgument, "sinkhorn: marginal masses differ (" + std::to_string(sa) + " vs " +
                                         std::to_string(sb) + ")");
  Plan p{K, a, b, 1.0, 1.0, Side::Row, Stop::MarginalL1, Side::Row, 1.0, "sinkhorn"};
  return run(p, ctl);
}

ScalingResult sr_right_projection(const Matrix& K, double gamma, double tau, const Marginal& a,
                                  const Marginal& g_prev, ScalingControl ctl) {
  const double kappa = relaxation_exponent(gamma, tau);
  Plan p{K, a, g_prev, 1.0, kappa, Side::Row, Stop::LogChange, Side::Row, 1.0 / gamma, "sr_right_projection"};
  return run(p, ctl);
}

ScalingResult sr_left_projection(const Matrix& K, double gamma, double tau, const Marginal& g_prev,
                                 const Marginal& b, ScalingControl ctl) {
  const double kappa = relaxation_exponent(gamma, tau);
  Plan p{K, g_prev, b, kappa, 1.0, Side::Col, Stop::LogChange, Side::Col, 1.0 / gamma, "sr_left_projection"};
  return run(p, ctl);
}

ScalingResult unbalanced_projection(const Matrix& K, double gamma, double tau, const Marginal& a,
                                    const Marginal& b, ScalingControl ctl) {
  return unbalanced_projection(K, gamma, tau, tau, a, b, ctl);
}

ScalingResult unbalanced_projection(const Matrix& K, double gamma, double tau_a, double tau_b, const Marginal& a,
                                    const Marginal& b, ScalingControl ctl) {
  Plan p{K, a, b, relaxation_exponent(gamma, tau_a), relaxation_exponent(gamma, tau_b), Side::Row, Stop::LogChange,
         Side::None, 1.0 / gamma, "unbalanced_projection"};
  return run(p, ctl);
}

}  // namespace frlc
