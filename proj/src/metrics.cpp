#include "hlsm/analysis.hpp"
#include "hlsm/errors.hpp"
#include "hlsm/linalg.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hlsm {

namespace {

void check_frames(const Matrix& u, const Matrix& u_star) {
  if (u.rows() != u_star.rows() || u.cols() != u_star.cols()) {
    throw DimensionError("frame shapes differ: " + std::to_string(u.rows()) + "x" +
                         std::to_string(u.cols()) + " vs " + std::to_string(u_star.rows()) + "x" +
                         std::to_string(u_star.cols()));
  }
  if (orthonormality_error(u) > 1e-6 || orthonormality_error(u_star) > 1e-6) {
    throw DataError("frames must be column-orthonormal");
  }
}

/// Minimum-cost perfect assignment on a square cost matrix (Hungarian method).
std::vector<int> hungarian(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) minv[j] = cur, way[j] = j0;
        if (minv[j] < delta) delta = minv[j], j1 = j;
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> assign(n);
  for (int j = 1; j <= n; ++j) assign[p[j] - 1] = j - 1;
  return assign;
}

}  // namespace

double chordal_distance(const Matrix& u, const Matrix& u_star) {
  check_frames(u, u_star);
  const Vector s = Eigen::JacobiSVD<Matrix>(u.transpose() * u_star).singularValues();
  return std::sqrt(std::max(0.0, 2.0 * static_cast<double>(u.cols()) - 2.0 * s.sum()));
}

Matrix procrustes_rotation(const Matrix& u, const Matrix& u_star) {
  check_frames(u, u_star);
  // argmin_O ‖U − U*O‖_F = P Qᵀ for U*ᵀU = P Σ Qᵀ.
  Eigen::JacobiSVD<Matrix> svd(u_star.transpose() * u, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

double projection_distance(const Matrix& u, const Matrix& u_star) {
  check_frames(u, u_star);
  // ‖UUᵀ − U*U*ᵀ‖_F² = 2r − 2‖UᵀU*‖_F² for orthonormal frames of width r.
  const double cross = (u.transpose() * u_star).squaredNorm();
  return std::max(0.0, 2.0 * static_cast<double>(u.cols()) - 2.0 * cross);
}

double clustering_error(const std::vector<int>& pred, const std::vector<int>& truth, int m) {
  if (pred.size() != truth.size()) throw DimensionError("clustering_error: label vectors differ in length");
  if (pred.empty()) throw DataError("clustering_error: no labels");
  int seen = 0;
  for (std::size_t l = 0; l < pred.size(); ++l) {
    if (pred[l] < 0 || truth[l] < 0) throw DataError("clustering_error: negative label");
    seen = std::max({seen, pred[l] + 1, truth[l] + 1});
  }
  if (m == 0) m = seen;
  if (seen > m) throw DataError("clustering_error: label out of range");

  std::vector<std::vector<double>> confusion(static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(m), 0.0));
  for (std::size_t l = 0; l < pred.size(); ++l) {
    confusion[static_cast<std::size_t>(pred[l])][static_cast<std::size_t>(truth[l])] += 1.0;
  }
  double best_agree = 0.0;
  if (m <= 8) {
    std::vector<int> perm(static_cast<std::size_t>(m));
    std::iota(perm.begin(), perm.end(), 0);
    do {
      double agree = 0.0;
      for (int p = 0; p < m; ++p) agree += confusion[static_cast<std::size_t>(p)][static_cast<std::size_t>(perm[static_cast<std::size_t>(p)])];
      best_agree = std::max(best_agree, agree);
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    auto cost = confusion;
    for (auto& row : cost)
      for (double& c : row) c = -c;
    const auto assign = hungarian(cost);
    for (int p = 0; p < m; ++p) best_agree += confusion[static_cast<std::size_t>(p)][static_cast<std::size_t>(assign[static_cast<std::size_t>(p)])];
  }
  const auto n = static_cast<double>(pred.size());
  return (n - best_agree) / n;
}

RocCurve auc_roc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw DimensionError("auc_roc: scores and labels differ in length");
  std::size_t pos = 0;
  for (std::size_t e = 0; e < labels.size(); ++e) {
    if (labels[e] != 0 && labels[e] != 1) throw DataError("auc_roc: labels must be 0 or 1");
    if (!std::isfinite(scores[e])) throw DataError("auc_roc: non-finite score");
    pos += static_cast<std::size_t>(labels[e]);
  }
  const std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) throw DegenerateInputError("auc_roc: AUC undefined with a single class");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return scores[x] < scores[y]; });

  // Midranks (1-based) summed over positives.
  double rank_sum = 0.0;
  for (std::size_t lo = 0; lo < order.size();) {
    std::size_t hi = lo;
    while (hi < order.size() && scores[order[hi]] == scores[order[lo]]) ++hi;
    const double midrank = 0.5 * static_cast<double>(lo + 1 + hi);
    for (std::size_t q = lo; q < hi; ++q)
      if (labels[order[q]] == 1) rank_sum += midrank;
    lo = hi;
  }
  const double p = static_cast<double>(pos), n = static_cast<double>(neg);
  RocCurve roc;
  roc.auc = (rank_sum - p * (p + 1.0) / 2.0) / (p * n);

  roc.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  for (std::size_t hi = order.size(); hi > 0;) {
    std::size_t lo = hi;
    const double s = scores[order[hi - 1]];
    while (lo > 0 && scores[order[lo - 1]] == s) {
      --lo;
      if (labels[order[lo]] == 1) ++tp;
      else ++fp;
    }
    roc.points.push_back({s, static_cast<double>(fp) / n, static_cast<double>(tp) / p});
    hi = lo;
  }
  return roc;
}

double trapezoid_area(const RocCurve& roc) {
  double area = 0.0;
  for (std::size_t q = 1; q < roc.points.size(); ++q) {
    const auto& a = roc.points[q - 1];
    const auto& b = roc.points[q];
    area += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
  }
  return area;
}

}  // namespace hlsm
