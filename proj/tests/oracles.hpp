#pragma once

// Slow, direct reference implementations used only to cross-check the library.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

namespace oracle {

// Pair counting over all M(M-1)/2 sample pairs.
inline double ari(const std::vector<int>& y, const std::vector<int>& c) {
  double n11 = 0, n10 = 0, n01 = 0, n00 = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    for (std::size_t j = i + 1; j < y.size(); ++j) {
      const bool sy = y[i] == y[j];
      const bool sc = c[i] == c[j];
      if (sy && sc) {
        n11 += 1;
      } else if (sy) {
        n10 += 1;
      } else if (sc) {
        n01 += 1;
      } else {
        n00 += 1;
      }
    }
  }
  const double denom = (n00 + n01) * (n01 + n11) + (n00 + n10) * (n10 + n11);
  if (denom == 0.0) return (n10 == 0 && n01 == 0) ? 1.0 : 0.0;
  return 2.0 * (n00 * n11 - n01 * n10) / denom;
}

struct Info {
  double mutual = 0, hy = 0, hc = 0;
};

// Empirical probabilities, natural log.
inline Info information(const std::vector<int>& y, const std::vector<int>& c) {
  const double m = static_cast<double>(y.size());
  std::map<int, long> ny, nc;
  std::map<std::pair<int, int>, long> nj;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ny[y[i]] += 1;
    nc[c[i]] += 1;
    nj[{y[i], c[i]}] += 1;
  }
  std::map<int, double> py, pc;
  std::map<std::pair<int, int>, double> pj;
  for (auto [k, n] : ny) py[k] = n / m;
  for (auto [k, n] : nc) pc[k] = n / m;
  for (auto [k, n] : nj) pj[k] = n / m;
  Info out;
  for (auto [k, p] : py) out.hy -= p * std::log(p);
  for (auto [k, p] : pc) out.hc -= p * std::log(p);
  for (auto [k, p] : pj) out.mutual += p * std::log(p / (py[k.first] * pc[k.second]));
  return out;
}

inline double nmi_arithmetic(const std::vector<int>& y, const std::vector<int>& c) {
  const Info i = information(y, c);
  if (i.hy + i.hc == 0.0) return 1.0;
  return std::clamp(2.0 * i.mutual / (i.hy + i.hc), 0.0, 1.0);
}

inline double nmi_geometric(const std::vector<int>& y, const std::vector<int>& c) {
  const Info i = information(y, c);
  if (i.hy == 0.0 && i.hc == 0.0) return 1.0;
  if (i.hy == 0.0 || i.hc == 0.0) return 0.0;
  return std::clamp(i.mutual / std::sqrt(i.hy * i.hc), 0.0, 1.0);
}

// Largest number of samples matched by any injective cluster -> class map,
// by trying every permutation of the padded square problem.
inline long best_matching(const std::vector<int>& y, const std::vector<int>& c) {
  const int ly = *std::max_element(y.begin(), y.end()) + 1;
  const int lc = *std::max_element(c.begin(), c.end()) + 1;
  const int n = std::max(ly, lc);
  std::vector<std::vector<long>> t(n, std::vector<long>(n, 0));
  for (std::size_t i = 0; i < y.size(); ++i) t[c[i]][y[i]] += 1;
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  long best = 0;
  do {
    long s = 0;
    for (int k = 0; k < n; ++k) s += t[k][perm[k]];
    best = std::max(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline double accuracy(const std::vector<int>& y, const std::vector<int>& c) {
  return static_cast<double>(best_matching(y, c)) / static_cast<double>(y.size());
}

inline double purity(const std::vector<int>& y, const std::vector<int>& c) {
  std::map<int, std::map<int, long>> votes;
  for (std::size_t i = 0; i < y.size(); ++i) votes[c[i]][y[i]] += 1;
  long total = 0;
  for (const auto& [cluster, v] : votes) {
    long top = 0;
    for (auto [cls, n] : v) top = std::max(top, n);
    total += top;
  }
  return static_cast<double>(total) / static_cast<double>(y.size());
}

// Connected components of the graph with an edge wherever adj(i, j) != 0.
inline int components(const Eigen::MatrixXd& adj) {
  const auto n = static_cast<int>(adj.rows());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (adj(i, j) != 0.0) parent[find(i)] = find(j);
    }
  }
  int count = 0;
  for (int i = 0; i < n; ++i) count += find(i) == i;
  return count;
}

inline int count_small_eigenvalues(const Eigen::MatrixXd& sym, double below) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return static_cast<int>((es.eigenvalues().array() < below).count());
}

inline double min_eigenvalue(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// R and S straight from their definitions, one sample at a time.
inline void rs_scores(const Eigen::MatrixXd& p, const std::vector<int>& cls, std::vector<double>& r,
                      std::vector<double>& s) {
  const auto m = p.cols();
  double dmax = 0;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) dmax = std::max(dmax, (p.col(i) - p.col(j)).norm());
  std::vector<double> inter(m, 0.0);
  r.assign(m, 0.0);
  s.assign(m, 0.0);
  for (Eigen::Index i = 0; i < m; ++i) {
    double same = 0;
    for (Eigen::Index j = 0; j < m; ++j) {
      const double d = (p.col(i) - p.col(j)).norm();
      if (cls[i] == cls[j]) {
        s[i] += 1.0 - d / dmax;
        same += 1;
      } else {
        inter[i] += d;
      }
    }
    s[i] /= same;
  }
  const double rmax = *std::max_element(inter.begin(), inter.end());
  for (Eigen::Index i = 0; i < m; ++i) r[i] = rmax > 0 ? inter[i] / rmax : 0.0;
}

}  // namespace oracle
