#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "tnmf/graph_laplacian.hpp"
#include "tnmf/nmf.hpp"

namespace testing_support {

inline Eigen::MatrixXd uniform_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng, double lo = 0.0,
                                      double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = u(rng);
  return m;
}

inline std::vector<int> random_labels(std::size_t n, int classes, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> u(0, classes - 1);
  std::vector<int> out(n);
  for (auto& v : out) v = u(rng);
  return out;
}

// The graph a variant expects, built from the columns of x with the default
// protocol values (k = 8 neighbours, T = 8 levels, all-ones weights).
inline std::shared_ptr<const tnmf::GraphRegularizer> graph_for(tnmf::Variant v, const Eigen::MatrixXd& x,
                                                               std::size_t k = 8, std::size_t levels = 8) {
  using tnmf::Variant;
  if (!tnmf::is_regularized(v)) return nullptr;
  const auto d = tnmf::pairwise_distances(x);
  if (v == Variant::GNMF || v == Variant::rGNMF) {
    return std::make_shared<const tnmf::GraphRegularizer>(
        tnmf::heat_kernel_knn_graph(d, k, tnmf::mean_squared_knn_distance(d, k)));
  }
  if (tnmf::uses_knn_filtration(v)) {
    return std::make_shared<const tnmf::GraphRegularizer>(
        tnmf::knn_persistent_laplacian(d, tnmf::FiltrationWeights::ones(k)));
  }
  return std::make_shared<const tnmf::GraphRegularizer>(
      tnmf::cutoff_persistent_laplacian(d, tnmf::FiltrationWeights::ones(levels)));
}

}  // namespace testing_support
