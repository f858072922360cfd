#include "hlsm/analysis.hpp"
#include "hlsm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace hlsm {

ChangePointResult detect_change_points(const Matrix& w_hat, std::optional<double> epsilon) {
  const Eigen::Index t_len = w_hat.rows();
  if (t_len < 2) throw DimensionError("detect_change_points: need at least 2 rows");
  if (epsilon && !(*epsilon >= 0.0)) throw DataError("detect_change_points: epsilon must be nonnegative");

  ChangePointResult res;
  res.gap_profile.resize(static_cast<std::size_t>(t_len - 1));
  for (Eigen::Index t = 0; t + 1 < t_len; ++t) {
    res.gap_profile[static_cast<std::size_t>(t)] = (w_hat.row(t) - w_hat.row(t + 1)).norm();
  }

  if (epsilon) {
    res.epsilon_used = *epsilon;
  } else {
    res.auto_threshold = true;
    std::vector<double> sorted = res.gap_profile;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double best_ratio = 1.0;
    std::size_t cut = sorted.size();
    for (std::size_t q = 0; q + 1 < sorted.size(); ++q) {
      const double hi = sorted[q], lo = sorted[q + 1];
      if (hi == lo) continue;
      const double ratio = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
      if (ratio > best_ratio) {
        best_ratio = ratio;
        cut = q;
      }
    }
    if (cut == sorted.size()) {
      res.degenerate = true;
      res.epsilon_used = std::numeric_limits<double>::infinity();
    } else {
      const double hi = sorted[cut], lo = sorted[cut + 1];
      res.epsilon_used = lo > 0.0 ? std::sqrt(hi * lo) : hi / 2.0;
    }
  }

  res.detected_times.push_back(1);
  for (std::size_t t = 0; t < res.gap_profile.size(); ++t) {
    if (res.gap_profile[t] >= res.epsilon_used) res.detected_times.push_back(t + 2);
  }
  return res;
}

}  // namespace hlsm
