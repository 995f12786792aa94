#include "frlc/analysis.hpp"
#include "helpers.hpp"

#include <doctest.h>

using namespace frlc;
using namespace frlc::test;

namespace {

double g_objective(const Vector& omega, const Vector& g) { return omega.cwiseQuotient(g).sum(); }

}  // namespace

TEST_CASE("lc_project") {
  Rng rng(1);
  SUBCASE("identity-like Q returns the points") {
    const Vector a = simplex(5, rng);
    const LcFactors f(Matrix(a.asDiagonal()), Matrix(a.asDiagonal()), Matrix(a.asDiagonal()));
    const Matrix Z = uniform_matrix(5, 2, rng);
    CHECK((lc_project(f, Z, Z).Y1 - Z).cwiseAbs().maxCoeff() <= 1e-14);
  }
  SUBCASE("cluster means") {
    Matrix Z(6, 2);
    Z << 0, 0, 1, 0, 0, 1, 10, 10, 11, 10, 10, 11;
    Matrix Q = Matrix::Zero(6, 2);
    Q.block(0, 0, 3, 1).setConstant(1.0 / 6.0);
    Q.block(3, 1, 3, 1).setConstant(1.0 / 6.0);
    const LcFactors f(Q, Q, Matrix::Identity(2, 2) * 0.5);
    const Matrix Y = lc_project(f, Z, Z).Y1;
    CHECK(std::abs(Y(0, 0) - 1.0 / 3.0) <= 1e-10);
    CHECK(std::abs(Y(1, 1) - 31.0 / 3.0) <= 1e-10);
  }
  SUBCASE("single column gives the weighted mean") {
    const Vector a = simplex(7, rng);
    const Matrix Z = uniform_matrix(7, 3, rng);
    const LcFactors f(a, a, Matrix::Ones(1, 1));
    const Vector mean = Z.transpose() * a;
    CHECK((lc_project(f, Z, Z).Y1.row(0).transpose() - mean).cwiseAbs().maxCoeff() <= 1e-14);
  }
  SUBCASE("rows are convex combinations") {
    const LcFactors f = random_factors(uniform_marginal(8), uniform_marginal(6), 3, 2, 4);
    const Matrix W = f.gQ().cwiseInverse().asDiagonal() * f.Q().transpose();
    CHECK((W.rowwise().sum() - Vector::Ones(3)).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("shape errors") {
    const LcFactors f = random_factors(uniform_marginal(4), uniform_marginal(4), 2, 2, 1);
    CHECK_THROWS_AS(lc_project(f, Matrix::Ones(3, 2), Matrix::Ones(4, 2)), Error);
    CHECK_THROWS_AS(lc_project(f, Matrix::Ones(4, 2), Matrix::Ones(4, 3)), Error);
  }
}

TEST_CASE("diagonalize") {
  SUBCASE("plans agree on both sides") {
    for (std::uint64_t s = 0; s < 10; ++s) {
      Rng rng(10 + s);
      const LcFactors f = random_factors(simplex(7, rng), simplex(6, rng), 3, 4, s);
      const Matrix P = reconstruct_plan(f);
      const Diagonalized l = diagonalize(f, Side::Left);
      const Diagonalized r = diagonalize(f, Side::Right);
      CHECK((l.Q * l.g.cwiseInverse().asDiagonal() * l.R.transpose() - P).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK((r.Q * r.g.cwiseInverse().asDiagonal() * r.R.transpose() - P).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
  SUBCASE("diagonal T is the identity transformation") {
    Rng rng(2);
    const Vector g = simplex(3, rng);
    Matrix Q = uniform_matrix(5, 3, rng);
    Q = (Q * Q.colwise().sum().cwiseInverse().asDiagonal() * g.asDiagonal()).eval();
    const LcFactors f(Q, Q, Matrix(g.asDiagonal()));
    CHECK((diagonalize(f, Side::Left).Q - Q).cwiseAbs().maxCoeff() <= 1e-15);
  }
  SUBCASE("rank one") {
    Rng rng(3);
    const Vector a = simplex(4, rng), b = simplex(3, rng);
    const LcFactors f(a, b, Matrix::Ones(1, 1));
    const Diagonalized d = diagonalize(f, Side::Left);
    CHECK((d.Q * d.R.transpose() / d.g[0] - a * b.transpose()).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("optimal_g") {
  SUBCASE("uniform omega") {
    const Matrix Q = Matrix::Identity(3, 3), R = Matrix::Identity(3, 3);
    const OptimalG g = optimal_g(Q, R, CostSpec::dense(Matrix::Identity(3, 3) * 2.0));
    CHECK((g.g - Vector::Constant(3, 1.0 / 3.0)).cwiseAbs().maxCoeff() <= 1e-15);
  }
  SUBCASE("omega = [1, 4] against a grid") {
    Matrix C = Matrix::Zero(2, 2);
    C(0, 0) = 1;
    C(1, 1) = 4;
    const OptimalG g = optimal_g(Matrix::Identity(2, 2), Matrix::Identity(2, 2), CostSpec::dense(C));
    CHECK(g.g[0] == doctest::Approx(1.0 / 3.0));
    Vector omega(2);
    omega << 1, 4;
    double best = 1e300, arg = 0;
    for (int i = 1; i < 10000; ++i) {
      Vector h(2);
      h << i * 1e-4, 1 - i * 1e-4;
      const double v = g_objective(omega, h);
      if (v < best) best = v, arg = h[0];
    }
    CHECK(std::abs(arg - 1.0 / 3.0) <= 1e-4);
    CHECK(g_objective(omega, g.g) <= best + 1e-12);
  }
  SUBCASE("rank one") {
    Rng rng(4);
    const OptimalG g = optimal_g(uniform_matrix(3, 1, rng), uniform_matrix(4, 1, rng),
                                 CostSpec::dense(uniform_matrix(3, 4, rng)));
    CHECK(g.g.size() == 1);
    CHECK(g.g[0] == doctest::Approx(1.0));
  }
  SUBCASE("beats random simplex points") {
    for (std::uint64_t s = 0; s < 5; ++s) {
      Rng rng(40 + s);
      const Matrix Q = uniform_matrix(6, 4, rng), R = uniform_matrix(5, 4, rng);
      const CostSpec c = CostSpec::dense(uniform_matrix(6, 5, rng));
      const OptimalG g = optimal_g(Q, R, c);
      const Vector omega = c.sandwich(Q, R).diagonal();
      const double v = g_objective(omega, g.g);
      for (int t = 0; t < 10000; ++t) {
        Vector h(4);
        for (Index k = 0; k < 4; ++k) h[k] = -std::log(1.0 - rng.uniform());
        h /= h.sum();
        CHECK(v <= g_objective(omega, h) + 1e-12);
      }
    }
  }
  SUBCASE("negative omega and zero entries") {
    Matrix C = Matrix::Zero(2, 2);
    C(0, 0) = -1;
    C(1, 1) = 1;
    CHECK_THROWS_AS(optimal_g(Matrix::Identity(2, 2), Matrix::Identity(2, 2), CostSpec::dense(C)), Error);
    C(0, 0) = 0;
    const OptimalG g = optimal_g(Matrix::Identity(2, 2), Matrix::Identity(2, 2), CostSpec::dense(C));
    REQUIRE(g.zero_entries.size() == 1);
    CHECK(g.zero_entries[0] == 0);
    CHECK(g.g[0] == 0.0);
  }
}

TEST_CASE("rank_bound") {
  CHECK(rank_bound(CostSpec::dense(Matrix::Constant(4, 4, 2.0)), 4, 4, 2, 1.0) == 0.0);
  CHECK(rank_bound(CostSpec::dense(Matrix::Identity(4, 4)), 4, 4, 5, 1.0) == 0.0);
  CHECK(rank_bound(CostSpec::dense(Matrix::Identity(4, 4)), 4, 4, 2, 1.0) == doctest::Approx(std::log(4.0)));
  CHECK_THROWS_AS(rank_bound(CostSpec::dense(Matrix::Identity(4, 4)), 4, 4, 1, 1.0), Error);
}

TEST_CASE("numeric_nonneg_rank_upper") {
  Rng rng(5);
  const Vector x = uniform_matrix(5, 1, rng), y = uniform_matrix(4, 1, rng);
  CHECK(numeric_nonneg_rank_upper(x * y.transpose()) == 1);
  const LcFactors f = random_factors(uniform_marginal(10), uniform_marginal(9), 3, 3, 2);
  CHECK(numeric_nonneg_rank_upper(reconstruct_plan(f)) <= 3);
  CHECK(numeric_nonneg_rank_upper(uniform_matrix(4, 4, rng, 0.1, 1.0)) == 4);
}
