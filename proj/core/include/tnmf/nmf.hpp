#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "tnmf/graph_laplacian.hpp"

namespace tnmf {

// The eight factorization methods.
//   NMF, GNMF, TNMF, kTNMF     minimize ||X - WH||_F^2      + lambda Tr(H L H^T)
//   rNMF, rGNMF, rTNMF, krTNMF minimize sum_j ||x_j - W h_j|| + lambda Tr(H L H^T)
// with L absent (NMF, rNMF), a heat-kernel kNN graph (GNMF, rGNMF), the cutoff
// persistent Laplacian (TNMF, rTNMF) or the kNN persistent Laplacian (kTNMF, krTNMF).
enum class Variant { NMF, rNMF, GNMF, rGNMF, TNMF, rTNMF, kTNMF, krTNMF };

inline constexpr Variant kAllVariants[] = {Variant::krTNMF, Variant::rTNMF, Variant::kTNMF, Variant::TNMF,
                                           Variant::rGNMF,  Variant::GNMF,  Variant::rNMF,  Variant::NMF};

std::string_view to_string(Variant v);
// Case-insensitive; also accepts "k-TNMF" / "k-rTNMF".
Variant parse_variant(std::string_view name);

// l2,1 loss instead of squared Frobenius.
bool is_robust(Variant v);
bool is_regularized(Variant v);
// Uses a persistent Laplacian (cutoff or kNN).
bool is_topological(Variant v);
bool uses_knn_filtration(Variant v);

struct MethodConfig {
  Variant variant = Variant::NMF;
  int rank = 2;
  double lambda = 1.0;
  // Required for regularized variants; shared because sweeps reuse large graphs.
  std::shared_ptr<const GraphRegularizer> graph;
  std::size_t max_iters = 500;
  // Stop once |f_k - f_{k-1}| / (1 + |f_k|) < rel_tol.
  double rel_tol = 1e-6;
  std::uint64_t seed = 0;
  // Added to every update denominator; also the floor for residual norms in Q.
  double eps = 1e-10;
};

// X ~ W H. W holds the meta-genes (genes x rank), H the reduced cells (rank x cells).
// objective_trace[0] is the objective at the initial factors, then one entry per iteration.
struct FactorPair {
  Eigen::MatrixXd W;
  Eigen::MatrixXd H;
  std::vector<double> objective_trace;
  std::size_t iters_run = 0;
};

// Sum of column Euclidean norms.
double l21_norm(const Eigen::MatrixXd& a);

// Tr(H L H^T) with L = diag(degree) - adjacency.
double graph_penalty(const Eigen::MatrixXd& h, const GraphRegularizer& g);

double objective(const Eigen::MatrixXd& x, const MethodConfig& cfg, const Eigen::MatrixXd& w,
                 const Eigen::MatrixXd& h);

// SVD-based nonnegative initialization; zeros are replaced with mean(X).
FactorPair nndsvda_init(const Eigen::MatrixXd& x, int rank);

// Runs the variant's multiplicative updates (W then H per iteration) from `init`.
// Throws NumericalError if any factor or the objective becomes non-finite.
FactorPair factorize(const Eigen::MatrixXd& x, const MethodConfig& cfg, FactorPair init);

}  // namespace tnmf
