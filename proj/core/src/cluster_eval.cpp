#include "tnmf/cluster_eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "tnmf/error.hpp"
#include "tnmf/graph_laplacian.hpp"

namespace tnmf {

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double choose2(std::int64_t n) { return 0.5 * static_cast<double>(n) * static_cast<double>(n - 1); }

struct Run {
  std::vector<int> labels;
  Eigen::MatrixXd centroids;
  double inertia = 0.0;
  std::size_t iterations = 0;
  std::vector<double> trace;
};

Eigen::MatrixXd plus_plus_seeds(const Eigen::MatrixXd& x, int k, std::mt19937_64& rng) {
  const auto m = x.cols();
  Eigen::MatrixXd c(x.rows(), k);
  std::vector<char> chosen(static_cast<std::size_t>(m), 0);
  auto first = std::min<Eigen::Index>(static_cast<Eigen::Index>(uniform01(rng) * static_cast<double>(m)), m - 1);
  c.col(0) = x.col(first);
  chosen[static_cast<std::size_t>(first)] = 1;

  Eigen::VectorXd d2(m);
  for (Eigen::Index j = 0; j < m; ++j) d2(j) = (x.col(j) - c.col(0)).squaredNorm();

  for (int s = 1; s < k; ++s) {
    const double total = d2.sum();
    Eigen::Index pick = -1;
    if (total > 0.0) {
      const double target = uniform01(rng) * total;
      double acc = 0.0;
      for (Eigen::Index j = 0; j < m; ++j) {
        acc += d2(j);
        if (d2(j) > 0.0 && acc > target) {
          pick = j;
          break;
        }
      }
      if (pick < 0) {
        // Rounding left target at the very end of the range.
        for (Eigen::Index j = m - 1; j >= 0; --j) {
          if (d2(j) > 0.0) {
            pick = j;
            break;
          }
        }
      }
    } else {
      for (Eigen::Index j = 0; j < m; ++j) {
        if (!chosen[static_cast<std::size_t>(j)]) {
          pick = j;
          break;
        }
      }
    }
    chosen[static_cast<std::size_t>(pick)] = 1;
    c.col(s) = x.col(pick);
    for (Eigen::Index j = 0; j < m; ++j) d2(j) = std::min(d2(j), (x.col(j) - c.col(s)).squaredNorm());
  }
  return c;
}

double assignment_inertia(const Eigen::MatrixXd& x, const Eigen::MatrixXd& c, const std::vector<int>& labels) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) s += (x.col(j) - c.col(labels[static_cast<std::size_t>(j)])).squaredNorm();
  return s;
}

Run lloyd(const Eigen::MatrixXd& x, Eigen::MatrixXd c, std::size_t max_iters) {
  const auto m = x.cols();
  const int k = static_cast<int>(c.cols());
  Run run;
  run.labels.assign(static_cast<std::size_t>(m), -1);
  std::vector<double> dist(static_cast<std::size_t>(m));

  for (std::size_t iter = 1; iter <= max_iters; ++iter) {
    bool changed = false;
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index j = 0; j < m; ++j) {
      int best = 0;
      double best_d = (x.col(j) - c.col(0)).squaredNorm();
      for (int q = 1; q < k; ++q) {
        const double dq = (x.col(j) - c.col(q)).squaredNorm();
        if (dq < best_d) {
          best_d = dq;
          best = q;
        }
      }
      auto& lab = run.labels[static_cast<std::size_t>(j)];
      changed = changed || lab != best;
      lab = best;
      dist[static_cast<std::size_t>(j)] = best_d;
      ++counts[static_cast<std::size_t>(best)];
    }

    // An empty cluster takes over the point farthest from its centroid.
    for (int q = 0; q < k; ++q) {
      if (counts[static_cast<std::size_t>(q)] > 0) continue;
      Eigen::Index far = -1;
      double far_d = -1.0;
      for (Eigen::Index j = 0; j < m; ++j) {
        const auto lab = run.labels[static_cast<std::size_t>(j)];
        if (counts[static_cast<std::size_t>(lab)] > 1 && dist[static_cast<std::size_t>(j)] > far_d) {
          far_d = dist[static_cast<std::size_t>(j)];
          far = j;
        }
      }
      if (far < 0) break;
      --counts[static_cast<std::size_t>(run.labels[static_cast<std::size_t>(far)])];
      run.labels[static_cast<std::size_t>(far)] = q;
      counts[static_cast<std::size_t>(q)] = 1;
      dist[static_cast<std::size_t>(far)] = 0.0;
      c.col(q) = x.col(far);
      changed = true;
    }

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(x.rows(), k);
    for (Eigen::Index j = 0; j < m; ++j) sums.col(run.labels[static_cast<std::size_t>(j)]) += x.col(j);
    for (int q = 0; q < k; ++q) {
      if (counts[static_cast<std::size_t>(q)] > 0) c.col(q) = sums.col(q) / counts[static_cast<std::size_t>(q)];
    }
    run.trace.push_back(assignment_inertia(x, c, run.labels));
    run.iterations = iter;
    if (!changed) break;
  }
  run.centroids = std::move(c);
  run.inertia = run.trace.empty() ? 0.0 : run.trace.back();
  return run;
}

}  // namespace

ClusterAssignment kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, KMeansOptions options) {
  const auto m = points.cols();
  if (k < 1 || k > m) {
    throw InvariantError("cluster count " + std::to_string(k) + " outside [1, " + std::to_string(m) + "]");
  }
  if (!points.allFinite()) throw InvariantError("k-means input has non-finite entries");
  const std::size_t restarts = std::max<std::size_t>(1, options.restarts);

  Run best;
  bool have_best = false;
  for (std::size_t r = 0; r < restarts; ++r) {
    std::mt19937_64 rng(seed + r);
    Run run = lloyd(points, plus_plus_seeds(points, k, rng), std::max<std::size_t>(1, options.max_iters));
    if (!have_best || run.inertia < best.inertia) {
      best = std::move(run);
      have_best = true;
    }
  }

  ClusterAssignment out;
  out.labels = std::move(best.labels);
  out.centroids = std::move(best.centroids);
  out.inertia = best.inertia;
  out.iterations = best.iterations;
  out.inertia_trace = std::move(best.trace);
  return out;
}

ContingencyTable contingency(std::span<const int> truth, std::span<const int> pred) {
  if (truth.size() != pred.size()) {
    throw InvariantError("label vectors differ in length: " + std::to_string(truth.size()) + " vs " +
                         std::to_string(pred.size()));
  }
  int rows = 0, cols = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || pred[i] < 0) throw InvariantError("label codes must be nonnegative");
    rows = std::max(rows, truth[i] + 1);
    cols = std::max(cols, pred[i] + 1);
  }
  ContingencyTable t;
  t.n = decltype(t.n)::Zero(rows, cols);
  for (std::size_t i = 0; i < truth.size(); ++i) ++t.n(truth[i], pred[i]);
  t.row_sums.resize(static_cast<std::size_t>(rows));
  t.col_sums.resize(static_cast<std::size_t>(cols));
  for (int i = 0; i < rows; ++i) t.row_sums[static_cast<std::size_t>(i)] = t.n.row(i).sum();
  for (int j = 0; j < cols; ++j) t.col_sums[static_cast<std::size_t>(j)] = t.n.col(j).sum();
  t.total = static_cast<std::int64_t>(truth.size());
  return t;
}

ContingencyTable contingency(const LabelVector& y, const ClusterAssignment& c) {
  auto t = contingency(std::span<const int>(y.codes()), std::span<const int>(c.labels));
  // Keep empty classes/clusters as explicit zero rows/columns.
  const auto rows = std::max<Eigen::Index>(t.n.rows(), static_cast<Eigen::Index>(y.num_classes()));
  const auto cols = std::max<Eigen::Index>(t.n.cols(), c.num_clusters());
  if (rows != t.n.rows() || cols != t.n.cols()) {
    decltype(t.n) grown = decltype(t.n)::Zero(rows, cols);
    grown.topLeftCorner(t.n.rows(), t.n.cols()) = t.n;
    t.n = std::move(grown);
    t.row_sums.resize(static_cast<std::size_t>(rows), 0);
    t.col_sums.resize(static_cast<std::size_t>(cols), 0);
  }
  return t;
}

double ari(const ContingencyTable& t) {
  double sum_nij = 0.0;
  for (Eigen::Index j = 0; j < t.n.cols(); ++j) {
    for (Eigen::Index i = 0; i < t.n.rows(); ++i) sum_nij += choose2(t.n(i, j));
  }
  double sum_a = 0.0, sum_b = 0.0;
  for (auto a : t.row_sums) sum_a += choose2(a);
  for (auto b : t.col_sums) sum_b += choose2(b);
  const double pairs = choose2(t.total);
  const double expected = pairs > 0.0 ? sum_a * sum_b / pairs : 0.0;
  const double max_index = 0.5 * (sum_a + sum_b);
  const double denom = max_index - expected;
  if (denom == 0.0) {
    // Identical partitions have at most one nonzero cell per row and per column.
    for (Eigen::Index i = 0; i < t.n.rows(); ++i) {
      if ((t.n.row(i).array() > 0).count() > 1) return 0.0;
    }
    for (Eigen::Index j = 0; j < t.n.cols(); ++j) {
      if ((t.n.col(j).array() > 0).count() > 1) return 0.0;
    }
    return 1.0;
  }
  return (sum_nij - expected) / denom;
}

double nmi(const ContingencyTable& t, NmiNormalization normalization) {
  if (t.total <= 0) return 1.0;
  const double total = static_cast<double>(t.total);
  auto entropy = [total](const std::vector<std::int64_t>& sums) {
    double h = 0.0;
    for (auto s : sums) {
      if (s > 0) {
        const double p = static_cast<double>(s) / total;
        h -= p * std::log(p);
      }
    }
    return h;
  };
  const double hy = entropy(t.row_sums);
  const double hc = entropy(t.col_sums);
  double mi = 0.0;
  for (Eigen::Index j = 0; j < t.n.cols(); ++j) {
    for (Eigen::Index i = 0; i < t.n.rows(); ++i) {
      const auto nij = t.n(i, j);
      if (nij == 0) continue;
      const double a = static_cast<double>(t.row_sums[static_cast<std::size_t>(i)]);
      const double b = static_cast<double>(t.col_sums[static_cast<std::size_t>(j)]);
      mi += (static_cast<double>(nij) / total) * std::log(static_cast<double>(nij) * total / (a * b));
    }
  }
  if (hy == 0.0 && hc == 0.0) return 1.0;
  double value = 0.0;
  if (normalization == NmiNormalization::Arithmetic) {
    value = 2.0 * mi / (hy + hc);
  } else {
    const double denom = std::sqrt(hy * hc);
    value = denom > 0.0 ? mi / denom : 0.0;
  }
  return std::clamp(value, 0.0, 1.0);
}

std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost) {
  const auto n = cost.rows();
  if (cost.cols() != n) throw InvariantError("assignment cost matrix must be square");
  if (n == 0) return {};
  // Shortest augmenting path with row/column potentials, 1-based with a virtual column 0.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0), v(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<Eigen::Index> p(static_cast<std::size_t>(n + 1), 0), way(static_cast<std::size_t>(n + 1), 0);
  for (Eigen::Index i = 1; i <= n; ++i) {
    p[0] = i;
    Eigen::Index j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n + 1), inf);
    std::vector<char> used(static_cast<std::size_t>(n + 1), 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const auto i0 = p[static_cast<std::size_t>(j0)];
      double delta = inf;
      Eigen::Index j1 = 0;
      for (Eigen::Index j = 1; j <= n; ++j) {
        const auto js = static_cast<std::size_t>(j);
        if (used[js]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[js];
        if (cur < minv[js]) {
          minv[js] = cur;
          way[js] = j0;
        }
        if (minv[js] < delta) {
          delta = minv[js];
          j1 = j;
        }
      }
      for (Eigen::Index j = 0; j <= n; ++j) {
        const auto js = static_cast<std::size_t>(j);
        if (used[js]) {
          u[static_cast<std::size_t>(p[js])] += delta;
          v[js] -= delta;
        } else {
          minv[js] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const auto j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (Eigen::Index j = 1; j <= n; ++j) {
    row_to_col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = static_cast<int>(j - 1);
  }
  return row_to_col;
}

std::vector<int> align_labels(const ContingencyTable& t) {
  const auto classes = t.n.rows();
  const auto clusters = t.n.cols();
  const auto size = std::max(classes, clusters);
  if (size == 0) return {};
  const double top = static_cast<double>(t.n.size() > 0 ? t.n.maxCoeff() : 0);
  // Rows of the cost matrix are clusters; padding cells weigh nothing.
  Eigen::MatrixXd cost = Eigen::MatrixXd::Constant(size, size, top);
  for (Eigen::Index c = 0; c < clusters; ++c) {
    for (Eigen::Index y = 0; y < classes; ++y) cost(c, y) = top - static_cast<double>(t.n(y, c));
  }
  const auto match = min_cost_assignment(cost);
  std::vector<int> mapping(static_cast<std::size_t>(clusters), -1);
  for (Eigen::Index c = 0; c < clusters; ++c) {
    const int y = match[static_cast<std::size_t>(c)];
    mapping[static_cast<std::size_t>(c)] = y < classes ? y : -1;
  }
  return mapping;
}

double accuracy(const ContingencyTable& t) {
  if (t.total == 0) return 0.0;
  const auto mapping = align_labels(t);
  std::int64_t hits = 0;
  for (std::size_t c = 0; c < mapping.size(); ++c) {
    if (mapping[c] >= 0) hits += t.n(mapping[c], static_cast<Eigen::Index>(c));
  }
  return static_cast<double>(hits) / static_cast<double>(t.total);
}

double accuracy(const LabelVector& y, const ClusterAssignment& c) { return accuracy(contingency(y, c)); }

double purity(const ContingencyTable& t) {
  if (t.total == 0) return 0.0;
  std::int64_t hits = 0;
  for (Eigen::Index c = 0; c < t.n.cols(); ++c) {
    if (t.n.rows() > 0) hits += t.n.col(c).maxCoeff();
  }
  return static_cast<double>(hits) / static_cast<double>(t.total);
}

double purity(const LabelVector& y, const ClusterAssignment& c) { return purity(contingency(y, c)); }

RSReport rs_scores(const Eigen::MatrixXd& points, std::span<const int> classes) {
  const auto m = points.cols();
  if (m < 2) throw InvariantError("RS scores need at least two samples");
  if (classes.size() != static_cast<std::size_t>(m)) throw InvariantError("class vector does not match samples");
  int num_classes = 0;
  for (int c : classes) {
    if (c < 0) throw InvariantError("class codes must be nonnegative");
    num_classes = std::max(num_classes, c + 1);
  }
  std::vector<std::size_t> sizes(static_cast<std::size_t>(num_classes), 0);
  for (int c : classes) ++sizes[static_cast<std::size_t>(c)];
  for (std::size_t l = 0; l < sizes.size(); ++l) {
    if (sizes[l] == 0) throw InvariantError("class " + std::to_string(l) + " has no samples");
  }

  const auto d = pairwise_distances(points).d;
  const double d_max = d.maxCoeff();
  if (!(d_max > 0.0)) throw InvariantError("all samples coincide; S score is undefined (d_max = 0)");

  RSReport rep;
  rep.r_scores.assign(static_cast<std::size_t>(m), 0.0);
  rep.s_scores.assign(static_cast<std::size_t>(m), 0.0);
  for (Eigen::Index a = 0; a < m; ++a) {
    const int ca = classes[static_cast<std::size_t>(a)];
    double inter = 0.0, intra = 0.0;
    for (Eigen::Index b = 0; b < m; ++b) {
      if (classes[static_cast<std::size_t>(b)] == ca) {
        intra += 1.0 - d(a, b) / d_max;
      } else {
        inter += d(a, b);
      }
    }
    rep.r_scores[static_cast<std::size_t>(a)] = inter;
    rep.s_scores[static_cast<std::size_t>(a)] = intra / static_cast<double>(sizes[static_cast<std::size_t>(ca)]);
  }
  const double r_max = *std::max_element(rep.r_scores.begin(), rep.r_scores.end());
  if (r_max > 0.0) {
    for (auto& r : rep.r_scores) r /= r_max;
  } else {
    rep.warning = "a single class covers every sample; R scores are reported as 0";
  }

  rep.cri.assign(static_cast<std::size_t>(num_classes), 0.0);
  rep.csi.assign(static_cast<std::size_t>(num_classes), 0.0);
  for (Eigen::Index a = 0; a < m; ++a) {
    const auto ca = static_cast<std::size_t>(classes[static_cast<std::size_t>(a)]);
    rep.cri[ca] += rep.r_scores[static_cast<std::size_t>(a)];
    rep.csi[ca] += rep.s_scores[static_cast<std::size_t>(a)];
  }
  for (std::size_t l = 0; l < sizes.size(); ++l) {
    rep.cri[l] /= static_cast<double>(sizes[l]);
    rep.csi[l] /= static_cast<double>(sizes[l]);
    rep.ri += rep.cri[l];
    rep.si += rep.csi[l];
  }
  rep.ri /= num_classes;
  rep.si /= num_classes;
  rep.rsd = rep.ri - rep.si;
  rep.rsi = 1.0 - std::abs(rep.ri - rep.si);
  return rep;
}

std::string EvalReport::aligned_name(std::size_t sample) const {
  const int a = aligned_codes.at(sample);
  if (a < 0) return "unmatched-" + std::to_string(cluster_labels.at(sample));
  return classes.at(static_cast<std::size_t>(a));
}

EvalReport evaluate(const Eigen::MatrixXd& h, const std::vector<std::string>& sample_ids, const LabelVector& y,
                    const ClusterAssignment& c) {
  if (y.size() != c.labels.size() || sample_ids.size() != y.size() ||
      static_cast<Eigen::Index>(y.size()) != h.cols()) {
    throw InvariantError("evaluation inputs differ in sample count");
  }
  const auto table = contingency(y, c);
  const auto mapping = align_labels(table);

  EvalReport rep;
  rep.sample_ids = sample_ids;
  rep.classes = y.classes();
  rep.true_codes = y.codes();
  rep.cluster_labels = c.labels;
  rep.aligned_codes.reserve(c.labels.size());
  for (int l : c.labels) rep.aligned_codes.push_back(mapping[static_cast<std::size_t>(l)]);
  rep.ari = ari(table);
  rep.nmi = nmi(table);
  rep.purity = purity(table);
  rep.accuracy = accuracy(table);
  try {
    rep.rs = rs_scores(h, y.codes());
  } catch (const InvariantError& e) {
    // Degenerate geometry should not discard the clustering metrics.
    rep.rs = RSReport{};
    rep.rs.r_scores.assign(y.size(), 0.0);
    rep.rs.s_scores.assign(y.size(), 0.0);
    rep.rs.cri.assign(y.num_classes(), 0.0);
    rep.rs.csi.assign(y.num_classes(), 0.0);
    rep.rs.warning = e.what();
  }
  return rep;
}

}  // namespace tnmf
