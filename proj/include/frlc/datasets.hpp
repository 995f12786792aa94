#pragma once

#include "frlc/lc_core.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace frlc {

struct PointCloud {
  Matrix points;            // n x d
  std::vector<int> labels;  // empty or length n
};

// Eight Gaussians (n points) and two moons (m points). Geometry follows the
// common generative-modelling benchmark: Gaussians centred at radius 5 on the
// axes and diagonals with per-axis variance sqrt(0.1); moons drawn with noise
// 0.2, then scaled by 3 and shifted by -1.
std::pair<PointCloud, PointCloud> gen_moons_gaussians(Index n, Index m, std::uint64_t seed);

PointCloud gen_eight_gaussians(Index n, std::uint64_t seed);
PointCloud gen_two_moons(Index m, std::uint64_t seed);

enum class MixtureSide { First, Second };
// Three Gaussians at (0,0), (0,1), (1,1) or two at (0.5,0.5), (-0.5,0.5);
// covariance 0.05 I; dim 10 pads the means with zeros.
PointCloud gen_gaussian_mixture(int dim, Index n, MixtureSide which, std::uint64_t seed);

// `samples` points in total, component chosen uniformly per point.
PointCloud gen_roots_of_unity(int n_roots, Index samples, double radius, double sigma, std::uint64_t seed);
Matrix roots_of_unity_centers(int n_roots, double radius);

CostSpec cost_euclidean(const Matrix& Z1, const Matrix& Z2, bool squared);
CostSpec cost_sqeuclidean_factored(const Matrix& Z1, const Matrix& Z2);

struct Edge {
  Index u = 0, v = 0;
  double w = 1.0;
};

struct GraphSpec {
  Index n = 0;
  std::vector<Edge> edges;
  bool directed = false;
};

// Edge list: one "u v [w]" per line. Lines starting with '#' are comments,
// except "# directed" and "# nodes N".
GraphSpec load_graph(const std::string& path);
GraphSpec parse_graph(const std::string& text);

// Nodes with no incident edge; these receive a unit self-loop in the
// matrices below.
std::vector<Index> isolated_nodes(const GraphSpec& g);

Matrix adjacency_cost(const GraphSpec& g);
// exp(-t L_sym) with L_sym = I - D^{-1/2} W D^{-1/2} of the symmetrised graph.
Matrix heat_kernel_cost(const GraphSpec& g, double t);
Vector degree_distribution(const GraphSpec& g);

}  // namespace frlc
