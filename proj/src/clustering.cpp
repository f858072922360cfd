#include "hlsm/analysis.hpp"
#include "hlsm/errors.hpp"

#include <algorithm>
#include <limits>
#include <random>

namespace hlsm {

namespace {

struct Lloyd {
  std::vector<int> labels;
  Matrix centroids;
  double wcss = 0.0;
};

double assign(const Matrix& x, const Matrix& c, std::vector<int>& labels) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (Eigen::Index j = 0; j < c.rows(); ++j) {
      const double d = (x.row(i) - c.row(j)).squaredNorm();
      if (d < best) best = d, arg = static_cast<int>(j);
    }
    labels[static_cast<std::size_t>(i)] = arg;
    total += best;
  }
  return total;
}

Matrix seed_plus_plus(const Matrix& x, int k, std::mt19937_64& rng) {
  const Eigen::Index n = x.rows();
  Matrix c(k, x.cols());
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  c.row(0) = x.row(first(rng));
  Vector d2(n);
  for (Eigen::Index i = 0; i < n; ++i) d2(i) = (x.row(i) - c.row(0)).squaredNorm();
  for (int j = 1; j < k; ++j) {
    Eigen::Index pick = 0;
    if (d2.sum() > 0.0) {
      std::discrete_distribution<Eigen::Index> draw(d2.data(), d2.data() + n);
      pick = draw(rng);
    } else {
      pick = first(rng);
    }
    c.row(j) = x.row(pick);
    for (Eigen::Index i = 0; i < n; ++i) d2(i) = std::min(d2(i), (x.row(i) - c.row(j)).squaredNorm());
  }
  return c;
}

Matrix cluster_means(const Matrix& x, const std::vector<int>& labels, int k, std::vector<int>& count) {
  Matrix sum = Matrix::Zero(k, x.cols());
  count.assign(static_cast<std::size_t>(k), 0);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    sum.row(labels[static_cast<std::size_t>(i)]) += x.row(i);
    ++count[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
  }
  for (int j = 0; j < k; ++j) {
    if (count[static_cast<std::size_t>(j)] > 0) sum.row(j) /= count[static_cast<std::size_t>(j)];
  }
  return sum;
}

/// One pass of single-point transfers: x_i leaves cluster a for b when
/// n_b/(n_b+1)·‖x_i − c_b‖² < n_a/(n_a−1)·‖x_i − c_a‖², which lowers the WCSS.
bool transfer_pass(const Matrix& x, std::vector<int>& labels, int k) {
  std::vector<int> count;
  Matrix c = cluster_means(x, labels, k, count);
  bool moved = false;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const auto a = labels[static_cast<std::size_t>(i)];
    const double na = count[static_cast<std::size_t>(a)];
    if (na < 2) continue;
    const double leave = na / (na - 1.0) * (x.row(i) - c.row(a)).squaredNorm();
    int best = a;
    double best_gain = 1e-12 * std::max(1.0, leave);
    for (int b = 0; b < k; ++b) {
      if (b == a) continue;
      const double nb = count[static_cast<std::size_t>(b)];
      const double gain = leave - nb / (nb + 1.0) * (x.row(i) - c.row(b)).squaredNorm();
      if (gain > best_gain) best_gain = gain, best = b;
    }
    if (best == a) continue;
    const double nb = count[static_cast<std::size_t>(best)];
    c.row(a) = (na * c.row(a) - x.row(i)) / (na - 1.0);
    c.row(best) = (nb * c.row(best) + x.row(i)) / (nb + 1.0);
    --count[static_cast<std::size_t>(a)];
    ++count[static_cast<std::size_t>(best)];
    labels[static_cast<std::size_t>(i)] = best;
    moved = true;
  }
  return moved;
}

Lloyd run_lloyd(const Matrix& x, Matrix c, int max_iter) {
  const int k = static_cast<int>(c.rows());
  std::vector<int> labels(static_cast<std::size_t>(x.rows()));
  double wcss = assign(x, c, labels);
  for (int it = 0; it < max_iter; ++it) {
    std::vector<int> count;
    const Matrix means = cluster_means(x, labels, k, count);
    for (int j = 0; j < k; ++j) {
      if (count[static_cast<std::size_t>(j)] > 0) {
        c.row(j) = means.row(j);
        continue;
      }
      // empty cluster: restart it at the point farthest from its centroid
      Eigen::Index far = 0;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double d = (x.row(i) - c.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
        if (d > far_d) far_d = d, far = i;
      }
      c.row(j) = x.row(far);
    }
    std::vector<int> next(labels.size());
    wcss = assign(x, c, next);
    if (next != labels) {
      labels = std::move(next);
      continue;
    }
    // Lloyd fixpoint; single-point transfers may still lower the WCSS
    if (!transfer_pass(x, labels, k)) break;
    std::vector<int> count_after;
    c = cluster_means(x, labels, k, count_after);
    wcss = assign(x, c, labels);
  }
  Lloyd out;
  out.labels = std::move(labels);
  out.centroids = std::move(c);
  out.wcss = wcss;
  return out;
}

}  // namespace

ClusterResult kmeans_cluster(const Matrix& rows, int k, int restarts, std::uint64_t seed, int max_lloyd) {
  if (k < 1) throw DataError("kmeans: k must be positive");
  if (k > rows.rows()) {
    throw DataError("kmeans: k = " + std::to_string(k) + " exceeds the " + std::to_string(rows.rows()) + " rows");
  }
  if (restarts < 1) throw DataError("kmeans: restarts must be positive");
  std::mt19937_64 rng(seed);
  ClusterResult best;
  best.wcss = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Lloyd l = run_lloyd(rows, seed_plus_plus(rows, k, rng), max_lloyd);
    if (l.wcss < best.wcss) {
      best.labels = std::move(l.labels);
      best.centroids = std::move(l.centroids);
      best.wcss = l.wcss;
    }
  }
  best.restarts_used = restarts;
  return best;
}

}  // namespace hlsm
