#include "frlc/metrics.hpp"

#include "frlc/types.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace frlc {

namespace {

struct Contingency {
  std::vector<std::vector<double>> n;  // rows: truth classes, cols: predicted
  std::vector<double> a, b;            // row and column sums
  double total = 0.0;
};

Contingency contingency(const std::vector<int>& truth, const std::vector<int>& pred) {
  if (truth.size() != pred.size()) fail(ErrorKind::ShapeMismatch, "label vectors differ in length");
  std::map<int, int> ti, pi;
  for (int t : truth) ti.emplace(t, int(ti.size()));
  for (int p : pred) pi.emplace(p, int(pi.size()));
  Contingency c;
  c.n.assign(ti.size(), std::vector<double>(pi.size(), 0.0));
  c.a.assign(ti.size(), 0.0);
  c.b.assign(pi.size(), 0.0);
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const int i = ti[truth[k]], j = pi[pred[k]];
    c.n[i][j] += 1;
    c.a[i] += 1;
    c.b[j] += 1;
  }
  c.total = double(truth.size());
  return c;
}

double comb2(double x) { return x * (x - 1) / 2.0; }

double entropy(const std::vector<double>& counts, double total) {
  double h = 0.0;
  for (double c : counts)
    if (c > 0) h -= (c / total) * std::log(c / total);
  return h;
}

}  // namespace

double adjusted_rand_index(const std::vector<int>& truth, const std::vector<int>& pred) {
  const Contingency c = contingency(truth, pred);
  double sum_ij = 0, sum_a = 0, sum_b = 0;
  for (const auto& row : c.n)
    for (double x : row) sum_ij += comb2(x);
  for (double x : c.a) sum_a += comb2(x);
  for (double x : c.b) sum_b += comb2(x);
  const double expected = sum_a * sum_b / comb2(c.total);
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;  // both partitions trivial and identical in structure
  return (sum_ij - expected) / (max_index - expected);
}

double adjusted_mutual_info(const std::vector<int>& truth, const std::vector<int>& pred) {
  const Contingency c = contingency(truth, pred);
  const double N = c.total;
  // Single-cluster on both sides: perfect agreement by convention.
  if (c.a.size() == c.b.size() && (c.a.size() == 1 || c.a.size() == std::size_t(N))) return 1.0;

  double mi = 0.0;
  for (std::size_t i = 0; i < c.a.size(); ++i)
    for (std::size_t j = 0; j < c.b.size(); ++j) {
      const double nij = c.n[i][j];
      if (nij > 0) mi += (nij / N) * std::log(N * nij / (c.a[i] * c.b[j]));
    }

  // Expected mutual information under the hypergeometric model.
  double emi = 0.0;
  const double lgN = std::lgamma(N + 1);
  for (double ai : c.a)
    for (double bj : c.b) {
      const double lo = std::max(1.0, ai + bj - N);
      const double hi = std::min(ai, bj);
      for (double nij = lo; nij <= hi; nij += 1.0) {
        const double term = (nij / N) * std::log(N * nij / (ai * bj));
        const double lp = std::lgamma(ai + 1) + std::lgamma(bj + 1) + std::lgamma(N - ai + 1) +
                          std::lgamma(N - bj + 1) - lgN - std::lgamma(nij + 1) - std::lgamma(ai - nij + 1) -
                          std::lgamma(bj - nij + 1) - std::lgamma(N - ai - bj + nij + 1);
        emi += term * std::exp(lp);
      }
    }
  const double norm = 0.5 * (entropy(c.a, N) + entropy(c.b, N));
  const double denom = norm - emi;
  if (std::abs(denom) < 1e-15) return 1.0;
  return (mi - emi) / denom;
}

}  // namespace frlc
