#pragma once

#include "frlc/lc_core.hpp"
#include "frlc/objectives.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace frlc {

enum class Mode { Balanced, Unbalanced, SrLeft, SrRight };
enum class InitKind { Random, Rank2 };

Mode parse_mode(const std::string& s);
std::string to_string(Mode m);
InitKind parse_init(const std::string& s);
std::string to_string(InitKind k);

struct ProblemSpec {
  Marginal a, b;
  Index r1 = 1, r2 = 1;
  Mode mode = Mode::Balanced;
  Objective objective;
  double gamma = 90.0;
  double tau = 75.0;
  double tau2 = 75.0;  // relaxed R-side weight (unbalanced and sr-right)
  double delta = 1e-9;
  double epsilon = 1e-6;
  int min_iter = 25;
  int max_iter = 200;
  int max_inner_balanced = 1000;
  int max_inner_relaxed = 50;
  std::uint64_t seed = 0;
  InitKind init = InitKind::Random;

  void validate() const;
};

struct SolveReport {
  LcFactors factors;
  std::vector<double> cost_trace;   // objective after each outer iteration
  std::vector<double> delta_trace;  // stopping criterion after each outer iteration
  Residuals residuals;
  double cost = 0.0;
  int iters = 0;
  bool converged = false;  // delta <= epsilon reached
  int inner_stalls = 0;    // projections that hit their iteration cap
  int log_domain_events = 0;
  int final_projection_iters = 0;
  double seconds = 0.0;
};

LcFactors initialize_couplings(const Marginal& a, const Marginal& b, Index r1, Index r2, std::uint64_t seed,
                               double delta = 1e-12, int max_iter = 10000);

LcFactors rank2_init(const Marginal& a, const Marginal& b, Index r1, Index r2, const CostSpec& c);

double delta_criterion(const LcFactors& prev, const LcFactors& curr, double gamma_qr, double gamma_t);

SolveReport frlc_solve(const ProblemSpec& p, const CostSpec& c, const std::optional<LcFactors>& init = {});

}  // namespace frlc
