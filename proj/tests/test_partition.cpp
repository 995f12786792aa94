#include "frlc/metrics.hpp"
#include "frlc/partition.hpp"

#include <doctest.h>

#include <string>

using namespace frlc;

namespace {

GraphSpec two_cliques(int size) {
  std::string text;
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < size; ++i)
      for (int j = i + 1; j < size; ++j)
        text += std::to_string(c * size + i) + " " + std::to_string(c * size + j) + "\n";
  return parse_graph(text);
}

}  // namespace

TEST_CASE("sorted_interpolation") {
  Vector h(4);
  h << 0.1, 0.4, 0.2, 0.3;
  const Vector s = sorted_interpolation(h, 4);
  CHECK(s[0] == doctest::Approx(0.4));
  CHECK(s[3] == doctest::Approx(0.1));
  const Vector s2 = sorted_interpolation(h, 2);
  CHECK(s2[0] == doctest::Approx(0.8));
  CHECK(s2[1] == doctest::Approx(0.2));
  CHECK(sorted_interpolation(h, 7).sum() == doctest::Approx(1.0));
  CHECK_THROWS_AS(sorted_interpolation(h, 0), Error);
}

TEST_CASE("partition_graph") {
  const GraphSpec g = two_cliques(6);
  std::vector<int> truth(12);
  for (int i = 0; i < 12; ++i) truth[i] = i / 6;
  SUBCASE("disconnected cliques are recovered") {
    for (GraphCost cost : {GraphCost::Heat, GraphCost::Adjacency}) {
      PartitionOptions opt;
      opt.cost = cost;
      opt.seed = 3;
      const PartitionResult r = partition_graph(g, opt);
      CHECK(adjusted_mutual_info(truth, r.labels) == doctest::Approx(1.0));
      CHECK(r.template_mass.sum() == doctest::Approx(1.0).epsilon(1e-3));
    }
  }
  SUBCASE("one cluster") {
    PartitionOptions opt;
    opt.clusters = 1;
    const PartitionResult r = partition_graph(g, opt);
    CHECK(r.labels == std::vector<int>(12, 0));
  }
  SUBCASE("invalid cluster counts") {
    PartitionOptions opt;
    opt.clusters = 13;
    CHECK_THROWS_AS(partition_graph(g, opt), Error);
    opt.clusters = 0;
    CHECK_THROWS_AS(partition_graph(g, opt), Error);
  }
  CHECK(parse_graph_cost("heat") == GraphCost::Heat);
  CHECK_THROWS_AS(parse_graph_cost("laplace"), Error);
}
