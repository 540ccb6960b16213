#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tnmf/expr_data.hpp"

namespace tnmf {

struct ClusterAssignment {
  std::vector<int> labels;    // one per point, in 0..k-1
  Eigen::MatrixXd centroids;  // dim x k, one column per cluster
  double inertia = 0.0;       // total squared distance to assigned centroids
  std::size_t iterations = 0;
  // Inertia after each Lloyd update of the selected restart.
  std::vector<double> inertia_trace;

  int num_clusters() const noexcept { return static_cast<int>(centroids.cols()); }
};

struct KMeansOptions {
  std::size_t restarts = 10;
  std::size_t max_iters = 300;
};

// Lloyd's algorithm from k-means++ seeding on the columns of `points`. Restart r
// is seeded with seed + r; the lowest-inertia restart wins (ties: earliest).
ClusterAssignment kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, KMeansOptions options = {});

// Rows index true classes, columns index clusters.
struct ContingencyTable {
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> n;
  std::vector<std::int64_t> row_sums;
  std::vector<std::int64_t> col_sums;
  std::int64_t total = 0;
};

// truth and pred hold nonnegative integer codes; the table has max+1 rows/columns.
ContingencyTable contingency(std::span<const int> truth, std::span<const int> pred);
ContingencyTable contingency(const LabelVector& y, const ClusterAssignment& c);

double ari(const ContingencyTable& t);

enum class NmiNormalization { Arithmetic, Geometric };
double nmi(const ContingencyTable& t, NmiNormalization normalization = NmiNormalization::Arithmetic);

// Maximum-weight matching of clusters to classes. Result[c] is the class index
// assigned to cluster c, or -1 when there are more clusters than classes.
std::vector<int> align_labels(const ContingencyTable& t);

// Hungarian algorithm on a square cost matrix; returns the column assigned to each row.
std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost);

double accuracy(const ContingencyTable& t);
double accuracy(const LabelVector& y, const ClusterAssignment& c);
double purity(const ContingencyTable& t);
double purity(const LabelVector& y, const ClusterAssignment& c);

struct RSReport {
  std::vector<double> r_scores;  // per sample
  std::vector<double> s_scores;  // per sample
  std::vector<double> cri;       // per class mean R
  std::vector<double> csi;       // per class mean S
  double ri = 0.0;
  double si = 0.0;
  double rsd = 0.0;  // ri - si
  double rsi = 0.0;  // 1 - |ri - si|
  std::string warning;
};

// Residue and similarity scores of the columns of `points` under the class
// codes `classes` (0..L-1, every class nonempty).
RSReport rs_scores(const Eigen::MatrixXd& points, std::span<const int> classes);

// Everything computed for one clustering of a reduced representation.
struct EvalReport {
  std::vector<std::string> sample_ids;
  std::vector<std::string> classes;  // true class names
  std::vector<int> true_codes;
  std::vector<int> cluster_labels;
  std::vector<int> aligned_codes;  // index into classes, -1 if the cluster is unmatched
  double ari = 0.0;
  double nmi = 0.0;
  double purity = 0.0;
  double accuracy = 0.0;
  RSReport rs;

  std::string aligned_name(std::size_t sample) const;
};

// Scores a clustering of the columns of h against the true labels y.
EvalReport evaluate(const Eigen::MatrixXd& h, const std::vector<std::string>& sample_ids, const LabelVector& y,
                    const ClusterAssignment& c);

}  // namespace tnmf
