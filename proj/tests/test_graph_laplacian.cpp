#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "support.hpp"
#include "tnmf/error.hpp"
#include "tnmf/graph_laplacian.hpp"

using namespace tnmf;

namespace {

DistanceMatrix line(std::initializer_list<double> xs) {
  Eigen::MatrixXd p(1, static_cast<Eigen::Index>(xs.size()));
  Eigen::Index j = 0;
  for (double v : xs) p(0, j++) = v;
  return pairwise_distances(p);
}

void check_valid(const GraphRegularizer& g) {
  const Eigen::MatrixXd l = g.laplacian();
  CHECK((l * Eigen::VectorXd::Ones(l.rows())).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(l == l.transpose());
  CHECK((g.adjacency.array() >= 0.0).all());
  CHECK(g.adjacency.diagonal().isZero(0.0));
  CHECK(oracle::min_eigenvalue(l) >= -1e-10);
}

}  // namespace

TEST_CASE("pairwise distances") {
  Eigen::MatrixXd p(2, 2);
  p << 0, 3, 0, 4;
  CHECK(pairwise_distances(p).d(0, 1) == 5.0);

  Eigen::MatrixXd same(2, 2);
  same << 1, 1, 2, 2;
  CHECK(pairwise_distances(same).d(0, 1) == 0.0);

  Eigen::MatrixXd tri(2, 3);
  tri << 0, 1, 0.5, 0, 0, std::sqrt(3.0) / 2;
  const auto d = pairwise_distances(tri);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(d.d(i, j) == doctest::Approx(i == j ? 0.0 : 1.0).epsilon(1e-15));
}

TEST_CASE("pairwise distances do not depend on thread count") {
  std::mt19937_64 rng(11);
  const auto p = testing_support::uniform_matrix(7, 61, rng);
  const auto one = pairwise_distances(p, 1);
  const auto four = pairwise_distances(p, 4);
  CHECK(one.d == four.d);
  CHECK(one.d == one.d.transpose());
  CHECK(one.d.diagonal().isZero(0.0));
}

TEST_CASE("nearest neighbours break ties by index") {
  const auto d = line({0, 1, -1, 2});
  const auto nn = nearest_neighbors(d, 2);
  CHECK(nn[0] == std::vector<Eigen::Index>{1, 2});
  CHECK_THROWS_AS(nearest_neighbors(d, 0), InvariantError);
  CHECK_THROWS_AS(nearest_neighbors(d, 4), InvariantError);
}

TEST_CASE("heat kernel graph") {
  SUBCASE("two points at distance sqrt(sigma)") {
    const double sigma = 2.5;
    const auto g = heat_kernel_knn_graph(line({0, std::sqrt(sigma)}), 1, sigma);
    const double e1 = std::exp(-1.0);
    CHECK(g.adjacency(0, 1) == doctest::Approx(e1).epsilon(1e-14));
    const Eigen::MatrixXd l = g.laplacian();
    CHECK(l(0, 0) == doctest::Approx(e1).epsilon(1e-14));
    CHECK(l(0, 1) == doctest::Approx(-e1).epsilon(1e-14));
  }
  SUBCASE("collinear 0,1,3 with k=1") {
    const auto g = heat_kernel_knn_graph(line({0, 1, 3}), 1, 1.0);
    CHECK(g.adjacency(0, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(g.adjacency(1, 2) == doctest::Approx(std::exp(-4.0)).epsilon(1e-14));
    CHECK(g.adjacency(0, 2) == 0.0);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(heat_kernel_knn_graph(line({0, 1, 3}), 3, 1.0), InvariantError);
    CHECK_THROWS_AS(heat_kernel_knn_graph(line({0, 1, 3}), 1, 0.0), InvariantError);
  }
  SUBCASE("random clouds") {
    std::mt19937_64 rng(3);
    const auto d = pairwise_distances(testing_support::uniform_matrix(4, 40, rng));
    const auto g = heat_kernel_knn_graph(d, 5, mean_squared_knn_distance(d, 5));
    check_valid(g);
    const Eigen::MatrixXd l = g.laplacian();
    CHECK(l.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("cutoff persistent Laplacian") {
  const auto d = line({0, 1, 3});
  SUBCASE("two levels on 0,1,3") {
    CHECK(cutoff_radius(d, 1, 2) == 2.0);
    CHECK(cutoff_radius(d, 2, 2) == 3.0);
    const auto g = cutoff_persistent_laplacian(d, FiltrationWeights({1, 1}));
    Eigen::Matrix3d expected;
    expected << 0, 2, 1, 2, 0, 2, 1, 2, 0;
    CHECK(g.adjacency == expected);
  }
  SUBCASE("single level is the complete graph") {
    const auto g = cutoff_persistent_laplacian(d, FiltrationWeights({1}));
    const Eigen::Matrix3d expected = 3.0 * Eigen::Matrix3d::Identity() - Eigen::Matrix3d::Ones();
    CHECK(g.laplacian() == expected);
    const auto last_only = cutoff_persistent_laplacian(d, FiltrationWeights({0, 0, 0, 1}));
    CHECK(last_only.adjacency == g.adjacency);
  }
  SUBCASE("levels are nested") {
    std::mt19937_64 rng(8);
    const auto dd = pairwise_distances(testing_support::uniform_matrix(3, 30, rng));
    for (std::size_t t = 1; t < 8; ++t) {
      const auto a = cutoff_level_adjacency(dd, t, 8);
      const auto b = cutoff_level_adjacency(dd, t + 1, 8);
      CHECK((a.array() <= b.array()).all());
    }
    CHECK(cutoff_level_adjacency(dd, 8, 8).sum() == 30.0 * 29.0);
  }
  SUBCASE("coincident points fall back to a complete graph") {
    const auto g = cutoff_persistent_laplacian(line({2, 2, 2}), FiltrationWeights({1, 0, 2}));
    CHECK(!g.warning.empty());
    CHECK(g.adjacency(0, 1) == 3.0);
    check_valid(g);
  }
}

TEST_CASE("kNN persistent Laplacian") {
  SUBCASE("two points") {
    const auto g = knn_persistent_laplacian(line({0, 1}), FiltrationWeights({1}));
    CHECK(g.adjacency == (Eigen::Matrix2d() << 0, 1, 1, 0).finished());
  }
  SUBCASE("collinear 0,1,3") {
    const auto d = line({0, 1, 3});
    const Eigen::MatrixXd directed = knn_directed_adjacency(d, 1);
    CHECK(directed(0, 1) == 1.0);
    CHECK(directed(1, 0) == 1.0);
    CHECK(directed(2, 1) == 1.0);
    CHECK(directed.sum() == 3.0);
    const auto g = knn_persistent_laplacian(d, FiltrationWeights({1}));
    CHECK(g.adjacency(0, 1) == 1.0);
    CHECK(g.adjacency(1, 2) == 1.0);
    CHECK(g.adjacency(0, 2) == 0.0);
  }
  SUBCASE("only the first level active") {
    std::mt19937_64 rng(21);
    const auto d = pairwise_distances(testing_support::uniform_matrix(5, 35, rng));
    const auto g = knn_persistent_laplacian(d, FiltrationWeights({0.7, 0, 0, 0}));
    CHECK((g.adjacency.array() == 0.0 || g.adjacency.array() == 0.7).all());
  }
  SUBCASE("a single active level is the symmetrized t-NN graph") {
    std::mt19937_64 rng(22);
    const auto d = pairwise_distances(testing_support::uniform_matrix(3, 25, rng));
    const auto nn = nearest_neighbors(d, 3);
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(25, 25);
    for (Eigen::Index i = 0; i < 25; ++i)
      for (auto j : nn[static_cast<std::size_t>(i)]) expected(i, j) = expected(j, i) = 1.0;
    const auto g = knn_persistent_laplacian(d, FiltrationWeights({0, 0, 1, 0, 0}));
    CHECK(g.adjacency == expected);
  }
  SUBCASE("too many levels") {
    CHECK_THROWS_AS(knn_persistent_laplacian(line({0, 1, 3}), FiltrationWeights::ones(3)), InvariantError);
  }
}

TEST_CASE("weight scaling is linear") {
  std::mt19937_64 rng(9);
  const auto d = pairwise_distances(testing_support::uniform_matrix(4, 30, rng));
  const FiltrationWeights z({0.5, 0, 1.5, 2});
  const FiltrationWeights z3({1.5, 0, 4.5, 6});
  const auto c1 = cutoff_persistent_laplacian(d, z);
  const auto c3 = cutoff_persistent_laplacian(d, z3);
  CHECK((c3.laplacian() - 3.0 * c1.laplacian()).cwiseAbs().maxCoeff() < 1e-12);
  const auto k1 = knn_persistent_laplacian(d, z);
  const auto k3 = knn_persistent_laplacian(d, z3);
  CHECK((k3.laplacian() - 3.0 * k1.laplacian()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("zero eigenvalues count connected components") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 10; ++trial) {
    const auto d = pairwise_distances(testing_support::uniform_matrix(2, 30, rng));
    for (std::size_t t = 1; t <= 4; ++t) {
      const auto g = GraphRegularizer::from_adjacency(cutoff_level_adjacency(d, t, 8));
      CHECK(oracle::count_small_eigenvalues(g.laplacian(), 1e-8) == oracle::components(g.adjacency));
    }
  }
}

TEST_CASE("filtration weights") {
  CHECK_THROWS_AS(FiltrationWeights({0, 0}), InvariantError);
  CHECK_THROWS_AS(FiltrationWeights({1, -1}), InvariantError);
  CHECK_THROWS_AS(FiltrationWeights(std::vector<double>{}), InvariantError);
  CHECK(FiltrationWeights::from_mask(0b101, 3).zeta == std::vector<double>{1, 0, 1});
  CHECK(FiltrationWeights::from_mask(0b101, 3).to_string() == "1,0,1");
  CHECK(FiltrationWeights::ones(2).zeta == std::vector<double>{1, 1});
}
