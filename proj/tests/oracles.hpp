#pragma once

// Reference implementations used only by tests. None of them call into the
// code paths they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "egosum/clustering.hpp"

namespace egosum::oracle {

inline double euclid(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

/// Average-linkage agglomeration that recomputes every cluster distance as the
/// mean of all cross-member point distances at every step.
inline std::vector<Merge> brute_force_average(const std::vector<std::vector<double>>& points) {
  struct Cluster {
    std::size_t id;
    std::vector<std::size_t> members;
  };
  const std::size_t n = points.size();
  std::vector<Cluster> clusters;
  for (std::size_t i = 0; i < n; ++i) clusters.push_back({i, {i}});

  std::vector<Merge> merges;
  for (std::size_t step = 0; step + 1 < n; ++step) {
    double best_d = 0.0;
    std::pair<std::size_t, std::size_t> best_key{0, 0};
    std::size_t bi = 0, bj = 0;
    bool found = false;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        double sum = 0.0;
        for (std::size_t a : clusters[i].members) {
          for (std::size_t b : clusters[j].members) sum += euclid(points[a], points[b]);
        }
        const double d = sum / static_cast<double>(clusters[i].members.size() * clusters[j].members.size());
        const std::pair key{std::min(clusters[i].id, clusters[j].id), std::max(clusters[i].id, clusters[j].id)};
        if (!found || d < best_d || (d == best_d && key < best_key)) {
          found = true;
          best_d = d;
          best_key = key;
          bi = i;
          bj = j;
        }
      }
    }
    Cluster merged{n + step, clusters[bi].members};
    merged.members.insert(merged.members.end(), clusters[bj].members.begin(), clusters[bj].members.end());
    merges.push_back({best_key.first, best_key.second, best_d, merged.members.size()});
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
    clusters[bi] = std::move(merged);
  }
  return merges;
}

/// Stationary vector of the damped chain G = (1 - damping) P + damping / n,
/// from a dense eigendecomposition of G^T: the eigenvector whose eigenvalue is
/// closest to 1, scaled to sum to one.
inline std::vector<double> dense_stationary(const std::vector<std::vector<double>>& p, double damping) {
  const auto n = static_cast<Eigen::Index>(p.size());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      g(i, j) = (1.0 - damping) * p[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +
                damping / static_cast<double>(n);
    }
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(g.transpose());
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < n; ++k) {
    if (std::abs(solver.eigenvalues()(k) - 1.0) < std::abs(solver.eigenvalues()(best) - 1.0)) best = k;
  }
  const Eigen::VectorXd v = solver.eigenvectors().col(best).real();
  const double total = v.sum();
  std::vector<double> pi(p.size());
  for (Eigen::Index i = 0; i < n; ++i) pi[static_cast<std::size_t>(i)] = v(i) / total;
  return pi;
}

/// Transition matrix built straight from the point coordinates with the
/// exp(-d / mean distance) kernel.
inline std::vector<std::vector<double>> kernel_chain(const std::vector<std::vector<double>>& points) {
  const std::size_t n = points.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      d[i][j] = euclid(points[i], points[j]);
      total += d[i][j];
    }
  }
  double sigma = n > 1 ? total / static_cast<double>(n * (n - 1)) : 1.0;
  if (sigma == 0.0) sigma = 1.0;
  std::vector<std::vector<double>> p(n, std::vector<double>(n, 0.0));
  if (n == 1) {
    p[0][0] = 1.0;
    return p;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) row += std::exp(-d[i][j] / sigma);
    }
    for (std::size_t j = 0; j < n; ++j) p[i][j] = i == j ? 0.0 : std::exp(-d[i][j] / sigma) / row;
  }
  return p;
}

/// Index (within `points`) of the smallest accumulated distance, lowest index on ties.
inline std::size_t brute_force_min_distance(const std::vector<std::vector<double>>& points) {
  std::size_t best = 0;
  double best_v = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    double v = 0.0;
    for (std::size_t j = 0; j < points.size(); ++j) v += euclid(points[i], points[j]);
    if (i == 0 || v < best_v) {
      best = i;
      best_v = v;
    }
  }
  return best;
}

}  // namespace egosum::oracle
