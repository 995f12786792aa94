#include "frlc/datasets.hpp"

#include "frlc/kernels.hpp"
#include "frlc/rng.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <fstream>
#include <sstream>

namespace frlc {

PointCloud gen_eight_gaussians(Index n, std::uint64_t seed) {
  const double s = 1.0 / std::sqrt(2.0);
  const double centers[8][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {s, s}, {s, -s}, {-s, s}, {-s, -s}};
  const double scale = 5.0;
  const double sd = std::pow(0.1, 0.25);  // covariance sqrt(0.1) I
  Rng rng(seed);
  PointCloud pc;
  pc.points.resize(n, 2);
  pc.labels.resize(n);
  for (Index i = 0; i < n; ++i) {
    const int k = int(rng.below(8));
    pc.labels[i] = k;
    pc.points(i, 0) = scale * centers[k][0] + sd * rng.normal();
    pc.points(i, 1) = scale * centers[k][1] + sd * rng.normal();
  }
  return pc;
}

PointCloud gen_two_moons(Index m, std::uint64_t seed) {
  const Index n_out = m / 2;
  const Index n_in = m - n_out;
  const double noise = 0.2;
  Rng rng(seed);
  PointCloud pc;
  pc.points.resize(m, 2);
  pc.labels.resize(m);
  for (Index i = 0; i < n_out; ++i) {
    const double th = n_out > 1 ? M_PI * double(i) / double(n_out - 1) : 0.0;
    pc.points(i, 0) = std::cos(th);
    pc.points(i, 1) = std::sin(th);
    pc.labels[i] = 0;
  }
  for (Index i = 0; i < n_in; ++i) {
    const double th = n_in > 1 ? M_PI * double(i) / double(n_in - 1) : 0.0;
    pc.points(n_out + i, 0) = 1.0 - std::cos(th);
    pc.points(n_out + i, 1) = 1.0 - std::sin(th) - 0.5;
    pc.labels[n_out + i] = 1;
  }
  for (Index i = 0; i < m; ++i) {
    pc.points(i, 0) = 3.0 * (pc.points(i, 0) + noise * rng.normal()) - 1.0;
    pc.points(i, 1) = 3.0 * (pc.points(i, 1) + noise * rng.normal()) - 1.0;
  }
  return pc;
}

std::pair<PointCloud, PointCloud> gen_moons_gaussians(Index n, Index m, std::uint64_t seed) {
  if (n < 8 || m < 8) fail(ErrorKind::InvalidArgument, "gen_moons_gaussians needs n, m >= 8");
  // Distinct streams for the two clouds.
  return {gen_eight_gaussians(n, seed), gen_two_moons(m, seed ^ 0x9e3779b97f4a7c15ULL)};
}

PointCloud gen_gaussian_mixture(int dim, Index n, MixtureSide which, std::uint64_t seed) {
  if (dim != 2 && dim != 10) fail(ErrorKind::InvalidArgument, "gen_gaussian_mixture: dim must be 2 or 10");
  std::vector<std::pair<double, double>> means;
  if (which == MixtureSide::First) means = {{0, 0}, {0, 1}, {1, 1}};
  else means = {{0.5, 0.5}, {-0.5, 0.5}};
  const double sd = std::sqrt(0.05);
  Rng rng(seed);
  PointCloud pc;
  pc.points = Matrix::Zero(n, dim);
  pc.labels.resize(n);
  for (Index i = 0; i < n; ++i) {
    const int k = int(rng.below(means.size()));
    pc.labels[i] = k;
    for (int d = 0; d < dim; ++d) pc.points(i, d) = sd * rng.normal();
    pc.points(i, 0) += means[k].first;
    pc.points(i, 1) += means[k].second;
  }
  return pc;
}

Matrix roots_of_unity_centers(int n_roots, double radius) {
  Matrix c(n_roots, 2);
  for (int k = 0; k < n_roots; ++k) {
    const double th = 2.0 * M_PI * double(k) / double(n_roots);
    c(k, 0) = radius * std::cos(th);
    c(k, 1) = radius * std::sin(th);
  }
  return c;
}

PointCloud gen_roots_of_unity(int n_roots, Index samples, double radius, double sigma, std::uint64_t seed) {
  if (n_roots < 1) fail(ErrorKind::InvalidArgument, "gen_roots_of_unity needs at least one root");
  const Matrix c = roots_of_unity_centers(n_roots, radius);
  Rng rng(seed);
  PointCloud pc;
  pc.points.resize(samples, 2);
  pc.labels.resize(samples);
  for (Index i = 0; i < samples; ++i) {
    const int k = int(rng.below(n_roots));
    pc.labels[i] = k;
    pc.points(i, 0) = c(k, 0) + sigma * rng.normal();
    pc.points(i, 1) = c(k, 1) + sigma * rng.normal();
  }
  return pc;
}

CostSpec cost_euclidean(const Matrix& Z1, const Matrix& Z2, bool squared) {
  return CostSpec::dense(kernels::pairwise_distance(Z1, Z2, squared));
}

CostSpec cost_sqeuclidean_factored(const Matrix& Z1, const Matrix& Z2) {
  if (Z1.cols() != Z2.cols()) fail(ErrorKind::DimMismatch, "point dimensions differ");
  const Index d = Z1.cols();
  Matrix C1(Z1.rows(), d + 2), C2(Z2.rows(), d + 2);
  C1.col(0) = Z1.rowwise().squaredNorm();
  C1.col(1).setOnes();
  C1.rightCols(d) = -2.0 * Z1;
  C2.col(0).setOnes();
  C2.col(1) = Z2.rowwise().squaredNorm();
  C2.rightCols(d) = Z2;
  return CostSpec::factored(std::move(C1), std::move(C2));
}

GraphSpec parse_graph(const std::string& text) {
  GraphSpec g;
  Index declared = 0;
  Index max_node = -1;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      std::istringstream hs(line.substr(first + 1));
      std::string key;
      hs >> key;
      if (key == "directed") g.directed = true;
      if (key == "nodes" && !(hs >> declared)) throw ParseError("bad '# nodes' header", lineno);
      continue;
    }
    std::istringstream ls(line);
    long long u, v;
    if (!(ls >> u >> v)) throw ParseError("expected 'u v [w]'", lineno);
    double w = 1.0;
    if (!(ls >> w)) {
      w = 1.0;
      ls.clear();
    }
    std::string rest;
    if (ls >> rest) throw ParseError("trailing token '" + rest + "'", lineno);
    if (u < 0 || v < 0) throw ParseError("negative node id", lineno);
    if (!(w > 0) || !std::isfinite(w)) throw ParseError("edge weight must be positive", lineno);
    g.edges.push_back({Index(u), Index(v), w});
    max_node = std::max<Index>(max_node, std::max<Index>(u, v));
  }
  g.n = std::max(declared, max_node + 1);
  return g;
}

GraphSpec load_graph(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorKind::InvalidArgument, "cannot open graph file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_graph(ss.str());
}

std::vector<Index> isolated_nodes(const GraphSpec& g) {
  std::vector<bool> seen(g.n, false);
  for (const Edge& e : g.edges) seen[e.u] = seen[e.v] = true;
  std::vector<Index> out;
  for (Index i = 0; i < g.n; ++i)
    if (!seen[i]) out.push_back(i);
  return out;
}

namespace {

Matrix weight_matrix(const GraphSpec& g, bool symmetrise) {
  Matrix W = Matrix::Zero(g.n, g.n);
  for (const Edge& e : g.edges) {
    W(e.u, e.v) += e.w;
    if (!g.directed && e.u != e.v) W(e.v, e.u) += e.w;
  }
  if (g.directed && symmetrise) W = 0.5 * (W + W.transpose()).eval();
  for (Index i : isolated_nodes(g)) W(i, i) = 1.0;
  return W;
}

}  // namespace

Matrix adjacency_cost(const GraphSpec& g) { return weight_matrix(g, false); }

Matrix heat_kernel_cost(const GraphSpec& g, double t) {
  const Matrix W = weight_matrix(g, true);
  const Vector d = W.rowwise().sum();
  const Vector s = d.cwiseSqrt().cwiseInverse();
  const Matrix L = Matrix::Identity(g.n, g.n) - s.asDiagonal() * W * s.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> es(L);
  const Vector ev = (-t * es.eigenvalues().array()).exp().matrix();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

Vector degree_distribution(const GraphSpec& g) {
  const Vector d = weight_matrix(g, true).rowwise().sum();
  return d / d.sum();
}

}  // namespace frlc
