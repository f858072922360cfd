#pragma once

#include "hlsm/loss.hpp"
#include "hlsm/tensor.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hlsm {

// ---- subspace distances ----------------------------------------------------

/// min over orthogonal O of ‖U − U*·O‖_F = √(2r − 2·Σσ_i(UᵀU*)).
double chordal_distance(const Matrix& u, const Matrix& u_star);

/// The minimizing O of chordal_distance (orthogonal Procrustes).
Matrix procrustes_rotation(const Matrix& u, const Matrix& u_star);

/// ‖UUᵀ − U*U*ᵀ‖_F², already squared.
double projection_distance(const Matrix& u, const Matrix& u_star);

// ---- layer clustering ------------------------------------------------------

/// Labels are 0-based throughout the library.
struct ClusterResult {
  std::vector<int> labels;
  Matrix centroids;  // k × d
  double wcss = 0.0;
  int restarts_used = 0;
};

/// Lloyd's algorithm with k-means++ seeding, refined by single-point transfers
/// at each fixpoint; best WCSS over `restarts`.
ClusterResult kmeans_cluster(const Matrix& rows, int k, int restarts = 20, std::uint64_t seed = 0,
                             int max_lloyd = 300);

/// min over label permutations τ of the fraction of l with truth_l ≠ τ(pred_l).
/// `m` = 0 infers the label count from the data.
double clustering_error(const std::vector<int>& pred, const std::vector<int>& truth, int m = 0);

// ---- change points ---------------------------------------------------------

struct ChangePointResult {
  std::vector<std::size_t> detected_times;  // 1-based, sorted, always starts with 1
  double epsilon_used = 0.0;
  std::vector<double> gap_profile;  // ‖Ŵ_t − Ŵ_{t+1}‖, length T − 1
  bool auto_threshold = false;
  bool degenerate = false;  // auto threshold found no separation
};

/// Row screening: t + 1 is a change point iff the gap after row t is ≥ ε.
/// Without ε the threshold sits at the largest ratio between sorted gaps.
ChangePointResult detect_change_points(const Matrix& w_hat, std::optional<double> epsilon = {});

// ---- link prediction -------------------------------------------------------

enum class HoldoutKind { fraction, balanced_half };

struct HoldoutSpec {
  HoldoutKind kind = HoldoutKind::fraction;
  double p_ones = 0.1;
  double p_zeros = 0.1;

  /// "fraction:P1,P0" or "balanced_half".
  static HoldoutSpec parse(const std::string& s);
  std::string to_string() const;
};

struct EvalEntry {
  Index3 index;  // canonical representative
  double label = 0.0;
};

struct Holdout {
  Tensor3 a_test;                  // selected entries (and their mirrors) set to 0
  std::vector<EvalEntry> eval_set;  // one per selected orbit
};

/// Selects canonical entries of each class at random and zeroes them, with
/// their symmetry mirrors, in the returned tensor.
Holdout holdout_protocol(const Tensor3& a, const HoldoutSpec& spec, Symmetry sym,
                         std::uint64_t seed);

struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // from (0, 0) at threshold +inf to (1, 1)
  double auc = 0.0;
};

/// AUC by the Mann–Whitney statistic with midranks for ties.
RocCurve auc_roc(const std::vector<double>& scores, const std::vector<int>& labels);

double trapezoid_area(const RocCurve& roc);

// ---- embedding -------------------------------------------------------------

struct MdsResult {
  Matrix coords;       // rows × dims, centered
  Vector eigenvalues;  // leading eigenvalues of the double-centered Gram, before clipping
  bool clipped = false;
};

MdsResult classical_mds(const Matrix& rows, int dims);

}  // namespace hlsm
