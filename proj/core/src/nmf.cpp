#include "tnmf/nmf.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <cmath>
#include <string>

#include "tnmf/error.hpp"

namespace tnmf {

namespace {

std::string lowercase(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '-' || c == '_') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

// 1 / max(||x_j - W h_j||, eps) for every cell j.
Eigen::VectorXd residual_weights(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w, const Eigen::MatrixXd& h,
                                 double eps) {
  const Eigen::MatrixXd r = x - w * h;
  Eigen::VectorXd q(r.cols());
  for (Eigen::Index j = 0; j < r.cols(); ++j) q(j) = 1.0 / std::max(r.col(j).norm(), eps);
  return q;
}

void check_finite(const Eigen::MatrixXd& m, std::size_t iter, const char* name) {
  if (!m.allFinite()) throw NumericalError(iter, std::string("non-finite entry in ") + name);
}

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::NMF: return "NMF";
    case Variant::rNMF: return "rNMF";
    case Variant::GNMF: return "GNMF";
    case Variant::rGNMF: return "rGNMF";
    case Variant::TNMF: return "TNMF";
    case Variant::rTNMF: return "rTNMF";
    case Variant::kTNMF: return "kTNMF";
    case Variant::krTNMF: return "krTNMF";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  const auto key = lowercase(name);
  for (auto v : kAllVariants) {
    if (lowercase(to_string(v)) == key) return v;
  }
  throw InvariantError("unknown method '" + std::string(name) + "'");
}

bool is_robust(Variant v) {
  return v == Variant::rNMF || v == Variant::rGNMF || v == Variant::rTNMF || v == Variant::krTNMF;
}

bool is_regularized(Variant v) { return v != Variant::NMF && v != Variant::rNMF; }

bool is_topological(Variant v) {
  return v == Variant::TNMF || v == Variant::rTNMF || v == Variant::kTNMF || v == Variant::krTNMF;
}

bool uses_knn_filtration(Variant v) { return v == Variant::kTNMF || v == Variant::krTNMF; }

double l21_norm(const Eigen::MatrixXd& a) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) s += a.col(j).norm();
  return s;
}

double graph_penalty(const Eigen::MatrixXd& h, const GraphRegularizer& g) {
  const Eigen::MatrixXd hl = h * g.degree.asDiagonal() - h * g.adjacency;
  return hl.cwiseProduct(h).sum();
}

double objective(const Eigen::MatrixXd& x, const MethodConfig& cfg, const Eigen::MatrixXd& w,
                 const Eigen::MatrixXd& h) {
  const Eigen::MatrixXd r = x - w * h;
  double f = is_robust(cfg.variant) ? l21_norm(r) : r.squaredNorm();
  if (is_regularized(cfg.variant) && cfg.lambda != 0.0 && cfg.graph) {
    f += cfg.lambda * graph_penalty(h, *cfg.graph);
  }
  return f;
}

FactorPair nndsvda_init(const Eigen::MatrixXd& x, int rank) {
  const auto n = x.rows();
  const auto m = x.cols();
  if (rank < 1 || rank > std::min(n, m)) {
    throw InvariantError("rank " + std::to_string(rank) + " outside [1, " + std::to_string(std::min(n, m)) + "]");
  }
  const double mean = x.mean();
  if (!(mean > 0.0)) throw InvariantError("NNDSVDA needs a matrix with positive mean");

  Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  if (!s.allFinite() || !svd.matrixU().allFinite() || !svd.matrixV().allFinite()) {
    throw NumericalError(0, "SVD failed during NNDSVDA initialization");
  }
  const auto& u = svd.matrixU();
  const auto& v = svd.matrixV();

  FactorPair f;
  f.W = Eigen::MatrixXd::Zero(n, rank);
  f.H = Eigen::MatrixXd::Zero(rank, m);

  // The leading pair of a nonnegative matrix has a single sign pattern.
  f.W.col(0) = std::sqrt(s(0)) * u.col(0).cwiseAbs();
  f.H.row(0) = std::sqrt(s(0)) * v.col(0).cwiseAbs().transpose();

  for (int p = 1; p < rank; ++p) {
    const Eigen::VectorXd up = u.col(p).cwiseMax(0.0);
    const Eigen::VectorXd un = (-u.col(p)).cwiseMax(0.0);
    const Eigen::VectorXd vp = v.col(p).cwiseMax(0.0);
    const Eigen::VectorXd vn = (-v.col(p)).cwiseMax(0.0);
    const double up_norm = up.norm(), un_norm = un.norm();
    const double vp_norm = vp.norm(), vn_norm = vn.norm();
    const double m_pos = up_norm * vp_norm;
    const double m_neg = un_norm * vn_norm;
    if (m_pos == 0.0 && m_neg == 0.0) continue;  // left as zeros, filled below
    if (m_pos > m_neg) {
      const double scale = std::sqrt(s(p) * m_pos);
      f.W.col(p) = scale * up / up_norm;
      f.H.row(p) = scale * vp.transpose() / vp_norm;
    } else {
      const double scale = std::sqrt(s(p) * m_neg);
      f.W.col(p) = scale * un / un_norm;
      f.H.row(p) = scale * vn.transpose() / vn_norm;
    }
  }

  f.W = (f.W.array() == 0.0).select(mean, f.W);
  f.H = (f.H.array() == 0.0).select(mean, f.H);
  return f;
}

FactorPair factorize(const Eigen::MatrixXd& x, const MethodConfig& cfg, FactorPair init) {
  const auto n = x.rows();
  const auto m = x.cols();
  if (init.W.rows() != n || init.H.cols() != m || init.W.cols() != init.H.rows()) {
    throw InvariantError("initial factors do not match the data shape");
  }
  if (init.W.cols() != cfg.rank) throw InvariantError("initial factors do not match the configured rank");
  if (cfg.lambda < 0.0) throw InvariantError("lambda must be >= 0");
  if (!(cfg.eps > 0.0)) throw InvariantError("eps must be positive");
  const bool regularized = is_regularized(cfg.variant);
  if (regularized) {
    if (!cfg.graph) throw InvariantError(std::string(to_string(cfg.variant)) + " needs a graph regularizer");
    if (cfg.graph->size() != m) throw InvariantError("graph size does not match the number of cells");
  }
  if ((init.W.array() < 0.0).any() || (init.H.array() < 0.0).any()) {
    throw InvariantError("initial factors must be nonnegative");
  }

  const bool robust = is_robust(cfg.variant);
  const bool use_graph = regularized && cfg.lambda != 0.0;
  // Robust H updates carry the factor 2 that the l2,1 surrogate puts in front of the graph term.
  const double graph_coef = robust ? 2.0 * cfg.lambda : cfg.lambda;
  const double eps = cfg.eps;

  FactorPair out;
  out.W = std::move(init.W);
  out.H = std::move(init.H);
  Eigen::MatrixXd& w = out.W;
  Eigen::MatrixXd& h = out.H;

  double prev = objective(x, cfg, w, h);
  if (!std::isfinite(prev)) throw NumericalError(0, "initial objective is not finite");
  out.objective_trace.push_back(prev);

  for (std::size_t iter = 1; iter <= cfg.max_iters; ++iter) {
    // W update
    if (robust) {
      const Eigen::VectorXd q = residual_weights(x, w, h, eps);
      const Eigen::MatrixXd hq = h * q.asDiagonal();
      const Eigen::MatrixXd numer = x * hq.transpose();
      const Eigen::MatrixXd denom = w * (hq * h.transpose());
      w.array() *= numer.array() / (denom.array() + eps);
    } else {
      const Eigen::MatrixXd numer = x * h.transpose();
      const Eigen::MatrixXd denom = w * (h * h.transpose());
      w.array() *= numer.array() / (denom.array() + eps);
    }
    check_finite(w, iter, "W");

    // H update
    {
      Eigen::MatrixXd numer;
      Eigen::MatrixXd denom;
      const Eigen::MatrixXd wt_x = w.transpose() * x;
      const Eigen::MatrixXd wt_w_h = (w.transpose() * w) * h;
      if (robust) {
        const Eigen::VectorXd q = residual_weights(x, w, h, eps);
        numer = wt_x * q.asDiagonal();
        denom = wt_w_h * q.asDiagonal();
      } else {
        numer = wt_x;
        denom = wt_w_h;
      }
      if (use_graph) {
        numer += graph_coef * (h * cfg.graph->adjacency);
        denom += graph_coef * (h * cfg.graph->degree.asDiagonal());
      }
      h.array() *= numer.array() / (denom.array() + eps);
    }
    check_finite(h, iter, "H");
    assert((w.array() >= 0.0).all() && (h.array() >= 0.0).all());

    const double f = objective(x, cfg, w, h);
    if (!std::isfinite(f)) throw NumericalError(iter, "objective is not finite");
    out.objective_trace.push_back(f);
    out.iters_run = iter;
    if (std::abs(f - prev) / (1.0 + std::abs(f)) < cfg.rel_tol) break;
    prev = f;
  }
  return out;
}

}  // namespace tnmf
