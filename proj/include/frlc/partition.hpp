#pragma once

// Graph partitioning by semi-relaxed GW against a k-node template graph.

#include "frlc/datasets.hpp"
#include "frlc/solver.hpp"

#include <string>
#include <vector>

namespace frlc {

enum class GraphCost { Adjacency, Heat };
GraphCost parse_graph_cost(const std::string& s);

enum class TemplatePrior { Sorted, Uniform };

struct PartitionOptions {
  Index clusters = 2;
  GraphCost cost = GraphCost::Heat;
  double t = 10.0;
  TemplatePrior prior = TemplatePrior::Sorted;
  double tau = 75.0;    // Q side (node marginal, tight)
  double tau2 = 0.01;   // template marginal, relaxed
  double gamma = 90.0;
  int max_iter = 200;
  int min_iter = 25;
  std::uint64_t seed = 0;
};

struct PartitionResult {
  std::vector<int> labels;
  Vector template_mass;  // learned P^T 1
  SolveReport report;
};

// Sort h in decreasing order and linearly interpolate it at k evenly spaced
// positions, then renormalise.
Vector sorted_interpolation(const Vector& h, Index k);

PartitionResult partition_graph(const GraphSpec& g, const PartitionOptions& opt);

}  // namespace frlc
