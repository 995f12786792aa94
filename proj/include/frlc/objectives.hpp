#pragma once

#include "frlc/lc_core.hpp"

#include <string>

namespace frlc {

struct GradientTriple {
  Matrix dQ, dR, dT;
};

enum class ObjectiveKind { W, GW, FGW };

struct Objective {
  ObjectiveKind kind = ObjectiveKind::W;
  double alpha = 0.5;  // weight of the linear term, FGW only
};

ObjectiveKind parse_objective(const std::string& s);
std::string to_string(ObjectiveKind k);

GradientTriple grad_w(const LcFactors& f, const CostSpec& c);
GradientTriple grad_gw(const LcFactors& f, const CostSpec& c);
GradientTriple grad_fgw(const LcFactors& f, const CostSpec& c, double alpha);
GradientTriple gradient(const LcFactors& f, const CostSpec& c, const Objective& obj);

// dT block alone (the latent step needs it after Q and R have moved).
Matrix latent_gradient(const LcFactors& f, const CostSpec& c, const Objective& obj);

// sum_{ijkl} (A_ik - B_jl)^2 P_ij P_kl using r-sized contractions only.
double gw_cost(const LcFactors& f, const CostSpec& c);
double objective_value(const LcFactors& f, const CostSpec& c, const Objective& obj);

struct StepSizes {
  double gamma_qr = 0.0;
  double gamma_t = 0.0;
};
StepSizes step_size(const GradientTriple& g, double gamma);

struct Kernels {
  Matrix KQ, KR, KT;
};
Kernels assemble_kernels(const LcFactors& f, const GradientTriple& g, double gamma_qr, double gamma_t);

}  // namespace frlc
