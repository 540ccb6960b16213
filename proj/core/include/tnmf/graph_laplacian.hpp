#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace tnmf {

// Symmetric matrix of Euclidean distances between cells, zero diagonal.
struct DistanceMatrix {
  Eigen::MatrixXd d;

  Eigen::Index size() const noexcept { return d.rows(); }
};

// Graph regularizer kept in split form so multiplicative updates can use the
// adjacency and degree parts separately: laplacian = diag(degree) - adjacency.
struct GraphRegularizer {
  Eigen::MatrixXd adjacency;  // symmetric, nonnegative, zero diagonal
  Eigen::VectorXd degree;     // row sums of adjacency
  std::string warning;        // set when the construction had to fall back

  Eigen::Index size() const noexcept { return adjacency.rows(); }
  Eigen::MatrixXd laplacian() const;

  // Builds the regularizer from an adjacency; the diagonal is zeroed.
  static GraphRegularizer from_adjacency(Eigen::MatrixXd adjacency);
};

// Per-level weights of a filtration. Nonnegative, at least one positive entry.
struct FiltrationWeights {
  std::vector<double> zeta;

  FiltrationWeights() = default;
  explicit FiltrationWeights(std::vector<double> z);

  std::size_t levels() const noexcept { return zeta.size(); }
  void validate() const;

  static FiltrationWeights ones(std::size_t levels);
  // Bit t-1 of mask gives the weight of level t.
  static FiltrationWeights from_mask(unsigned long long mask, std::size_t levels);
  // "1,0,1" style rendering.
  std::string to_string() const;
};

// Distances between the columns of `points`. Each entry is summed directly
// from coordinates, so threads > 1 gives bit-identical output.
DistanceMatrix pairwise_distances(const Eigen::MatrixXd& points, unsigned threads = 1);

// For each point, indices of its k nearest other points, nearest first.
// Ties are broken by the smaller index.
std::vector<std::vector<Eigen::Index>> nearest_neighbors(const DistanceMatrix& d, std::size_t k);

// Default heat-kernel bandwidth: mean squared distance over the edges of the
// symmetrized kNN graph.
double mean_squared_knn_distance(const DistanceMatrix& d, std::size_t k);

// Single-scale kNN graph with heat-kernel weights exp(-d^2 / sigma) on the
// union of both neighbor directions.
GraphRegularizer heat_kernel_knn_graph(const DistanceMatrix& d, std::size_t k, double sigma);

// Radius of filtration level t (1..levels): d_min + (t / levels) * (d_max - d_min).
// The last level is exactly d_max.
double cutoff_radius(const DistanceMatrix& d, std::size_t t, std::size_t levels);

// Binary adjacency of cutoff level t: i != j connected when d_ij <= radius.
Eigen::MatrixXd cutoff_level_adjacency(const DistanceMatrix& d, std::size_t t, std::size_t levels);

// Weighted sum of the cutoff filtration Laplacians. When all distances are equal
// the filtration degenerates and a single complete graph is returned with `warning` set.
GraphRegularizer cutoff_persistent_laplacian(const DistanceMatrix& d, const FiltrationWeights& weights);

// Directed t-NN adjacency: row i has ones at the t nearest neighbors of i.
Eigen::MatrixXd knn_directed_adjacency(const DistanceMatrix& d, std::size_t t);

// Weighted sum over t = 1..T of the symmetrized t-NN graphs, where each level
// is symmetrized as A + A^T - A o A^T (o = Hadamard product).
GraphRegularizer knn_persistent_laplacian(const DistanceMatrix& d, const FiltrationWeights& weights);

}  // namespace tnmf
