#include "tnmf/graph_laplacian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "tnmf/error.hpp"

namespace tnmf {

namespace {

void require_points(const DistanceMatrix& d) {
  if (d.size() < 2) throw InvariantError("distance matrix needs at least two points");
  if (d.d.cols() != d.size()) throw InvariantError("distance matrix must be square");
}

struct DistanceRange {
  double min;
  double max;
};

DistanceRange off_diagonal_range(const DistanceMatrix& d) {
  DistanceRange r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  const auto m = d.size();
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i == j) continue;
      r.min = std::min(r.min, d.d(i, j));
      r.max = std::max(r.max, d.d(i, j));
    }
  }
  return r;
}

}  // namespace

Eigen::MatrixXd GraphRegularizer::laplacian() const {
  Eigen::MatrixXd l = -adjacency;
  l.diagonal() += degree;
  return l;
}

GraphRegularizer GraphRegularizer::from_adjacency(Eigen::MatrixXd adjacency) {
  if (adjacency.rows() != adjacency.cols()) throw InvariantError("adjacency must be square");
  adjacency.diagonal().setZero();
  GraphRegularizer g;
  g.degree = adjacency.rowwise().sum();
  g.adjacency = std::move(adjacency);
  return g;
}

FiltrationWeights::FiltrationWeights(std::vector<double> z) : zeta(std::move(z)) { validate(); }

void FiltrationWeights::validate() const {
  if (zeta.empty()) throw InvariantError("filtration weights need at least one level");
  bool any_positive = false;
  for (double z : zeta) {
    if (!std::isfinite(z) || z < 0.0) throw InvariantError("filtration weights must be finite and >= 0");
    any_positive = any_positive || z > 0.0;
  }
  if (!any_positive) throw InvariantError("filtration weights must have a positive entry");
}

FiltrationWeights FiltrationWeights::ones(std::size_t levels) {
  return FiltrationWeights(std::vector<double>(levels, 1.0));
}

FiltrationWeights FiltrationWeights::from_mask(unsigned long long mask, std::size_t levels) {
  std::vector<double> z(levels, 0.0);
  for (std::size_t t = 0; t < levels; ++t) z[t] = ((mask >> t) & 1ULL) ? 1.0 : 0.0;
  return FiltrationWeights(std::move(z));
}

std::string FiltrationWeights::to_string() const {
  std::string s;
  for (std::size_t t = 0; t < zeta.size(); ++t) {
    if (t > 0) s += ',';
    const double z = zeta[t];
    if (z == std::floor(z) && z < 1e15) {
      s += std::to_string(static_cast<long long>(z));
    } else {
      s += std::to_string(z);
    }
  }
  return s;
}

DistanceMatrix pairwise_distances(const Eigen::MatrixXd& points, unsigned threads) {
  const auto m = points.cols();
  if (m < 2) throw InvariantError("need at least two points for pairwise distances");
  DistanceMatrix out{Eigen::MatrixXd::Zero(m, m)};

  auto fill_rows = [&](Eigen::Index first, Eigen::Index stride) {
    for (Eigen::Index i = first; i < m; i += stride) {
      for (Eigen::Index j = i + 1; j < m; ++j) {
        const double v = std::sqrt((points.col(i) - points.col(j)).squaredNorm());
        out.d(i, j) = v;
        out.d(j, i) = v;
      }
    }
  };

  threads = std::max(1u, threads);
  if (threads == 1) {
    fill_rows(0, 1);
  } else {
    // Strided rows balance the triangular workload; each entry is written once.
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(fill_rows, static_cast<Eigen::Index>(t), threads);
  }
  return out;
}

std::vector<std::vector<Eigen::Index>> nearest_neighbors(const DistanceMatrix& d, std::size_t k) {
  require_points(d);
  const auto m = d.size();
  if (k < 1 || k > static_cast<std::size_t>(m - 1)) {
    throw InvariantError("neighbor count " + std::to_string(k) + " outside [1, " + std::to_string(m - 1) + "]");
  }
  std::vector<std::vector<Eigen::Index>> result(static_cast<std::size_t>(m));
  std::vector<Eigen::Index> order;
  for (Eigen::Index i = 0; i < m; ++i) {
    order.clear();
    for (Eigen::Index j = 0; j < m; ++j) {
      if (j != i) order.push_back(j);
    }
    const auto less = [&](Eigen::Index a, Eigen::Index b) {
      const double da = d.d(i, a), db = d.d(i, b);
      return da < db || (da == db && a < b);
    };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), less);
    result[static_cast<std::size_t>(i)].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  }
  return result;
}

namespace {

Eigen::MatrixXi knn_union_edges(const DistanceMatrix& d, std::size_t k) {
  const auto nn = nearest_neighbors(d, k);
  Eigen::MatrixXi edges = Eigen::MatrixXi::Zero(d.size(), d.size());
  for (std::size_t i = 0; i < nn.size(); ++i) {
    for (auto j : nn[i]) {
      edges(static_cast<Eigen::Index>(i), j) = 1;
      edges(j, static_cast<Eigen::Index>(i)) = 1;
    }
  }
  return edges;
}

}  // namespace

double mean_squared_knn_distance(const DistanceMatrix& d, std::size_t k) {
  const auto edges = knn_union_edges(d, k);
  double sum = 0.0;
  std::size_t count = 0;
  for (Eigen::Index j = 0; j < d.size(); ++j) {
    for (Eigen::Index i = j + 1; i < d.size(); ++i) {
      if (edges(i, j)) {
        sum += d.d(i, j) * d.d(i, j);
        ++count;
      }
    }
  }
  return count > 0 ? sum / static_cast<double>(count) : 0.0;
}

GraphRegularizer heat_kernel_knn_graph(const DistanceMatrix& d, std::size_t k, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvariantError("heat-kernel sigma must be positive");
  const auto edges = knn_union_edges(d, k);
  const auto m = d.size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) {
      if (edges(i, j)) a(i, j) = std::exp(-(d.d(i, j) * d.d(i, j)) / sigma);
    }
  }
  return GraphRegularizer::from_adjacency(std::move(a));
}

double cutoff_radius(const DistanceMatrix& d, std::size_t t, std::size_t levels) {
  require_points(d);
  if (levels < 1 || t < 1 || t > levels) throw InvariantError("filtration level out of range");
  const auto r = off_diagonal_range(d);
  if (t == levels) return r.max;
  return r.min + (static_cast<double>(t) / static_cast<double>(levels)) * (r.max - r.min);
}

Eigen::MatrixXd cutoff_level_adjacency(const DistanceMatrix& d, std::size_t t, std::size_t levels) {
  const double radius = cutoff_radius(d, t, levels);
  const auto m = d.size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i != j && d.d(i, j) <= radius) a(i, j) = 1.0;
    }
  }
  return a;
}

GraphRegularizer cutoff_persistent_laplacian(const DistanceMatrix& d, const FiltrationWeights& weights) {
  require_points(d);
  weights.validate();
  const auto m = d.size();
  const auto range = off_diagonal_range(d);
  if (range.max - range.min == 0.0) {
    // Every level is the complete graph, so the levels collapse to their total weight.
    const double total = std::accumulate(weights.zeta.begin(), weights.zeta.end(), 0.0);
    Eigen::MatrixXd complete = Eigen::MatrixXd::Constant(m, m, total);
    auto g = GraphRegularizer::from_adjacency(std::move(complete));
    g.warning = "all pairwise distances are equal; filtration is degenerate, using the complete graph";
    return g;
  }

  const std::size_t levels = weights.levels();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t t = 1; t <= levels; ++t) {
    const double z = weights.zeta[t - 1];
    if (z == 0.0) continue;
    a += z * cutoff_level_adjacency(d, t, levels);
  }
  return GraphRegularizer::from_adjacency(std::move(a));
}

Eigen::MatrixXd knn_directed_adjacency(const DistanceMatrix& d, std::size_t t) {
  const auto nn = nearest_neighbors(d, t);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d.size(), d.size());
  for (std::size_t i = 0; i < nn.size(); ++i) {
    for (auto j : nn[i]) a(static_cast<Eigen::Index>(i), j) = 1.0;
  }
  return a;
}

GraphRegularizer knn_persistent_laplacian(const DistanceMatrix& d, const FiltrationWeights& weights) {
  require_points(d);
  weights.validate();
  const std::size_t levels = weights.levels();
  const auto m = d.size();
  if (levels > static_cast<std::size_t>(m - 1)) {
    throw InvariantError("kNN filtration with " + std::to_string(levels) + " levels needs more than " +
                         std::to_string(levels) + " points");
  }
  // Neighbor lists are nested, so level t is the first t entries of the T-list.
  const auto nn = nearest_neighbors(d, levels);
  Eigen::MatrixXd directed = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t t = 1; t <= levels; ++t) {
    for (std::size_t i = 0; i < nn.size(); ++i) directed(static_cast<Eigen::Index>(i), nn[i][t - 1]) = 1.0;
    const double z = weights.zeta[t - 1];
    if (z == 0.0) continue;
    const Eigen::MatrixXd sym =
        directed + directed.transpose() - directed.cwiseProduct(directed.transpose());
    a += z * sym;
  }
  return GraphRegularizer::from_adjacency(std::move(a));
}

}  // namespace tnmf
