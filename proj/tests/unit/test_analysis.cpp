#include "hlsm/analysis.hpp"
#include "hlsm/errors.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

namespace hlsm {
namespace {

using testing::random_frame;
using testing::random_orthogonal;

TEST(Chordal, BasisVectors) {
  const Matrix e1 = Matrix::Identity(2, 2).col(0);
  const Matrix e2 = Matrix::Identity(2, 2).col(1);
  EXPECT_NEAR(chordal_distance(e1, e2), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(projection_distance(e1, e2), 2.0, 1e-15);
  EXPECT_NEAR(chordal_distance(e1, -e1), 0.0, 1e-15);
}

TEST(Chordal, NoRandomRotationBeatsProcrustes) {
  std::mt19937_64 rng(90);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix u = random_frame(6, 3, rng);
    const Matrix v = random_frame(6, 3, rng);
    const double d = chordal_distance(u, v);
    const Matrix o = procrustes_rotation(u, v);
    EXPECT_LE((o.transpose() * o - Matrix::Identity(3, 3)).norm(), 1e-12);
    EXPECT_NEAR((u - v * o).norm(), d, 1e-12);
    for (int k = 0; k < 500; ++k) EXPECT_GE((u - v * random_orthogonal(3, rng)).norm(), d - 1e-12);
  }
}

TEST(Chordal, SandwichesProjectionDistance) {
  std::mt19937_64 rng(91);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix u = random_frame(7, 2, rng);
    const Matrix v = random_frame(7, 2, rng);
    const double c2 = std::pow(chordal_distance(u, v), 2);
    const double p = projection_distance(u, v);
    EXPECT_GE(p, c2 - 1e-12);
    EXPECT_LE(p, 2.0 * c2 + 1e-12);
    EXPECT_NEAR(p, (u * u.transpose() - v * v.transpose()).squaredNorm(), 1e-12);
    EXPECT_LE(c2, 0.5 * p + 0.25 * p * p + 1e-12);
  }
}

TEST(Chordal, RejectsBadFrames) {
  std::mt19937_64 rng(92);
  EXPECT_THROW(chordal_distance(random_frame(5, 2, rng), random_frame(5, 3, rng)), DimensionError);
  EXPECT_THROW(chordal_distance(2.0 * random_frame(5, 2, rng), random_frame(5, 2, rng)), DataError);
}

double brute_wcss(const Matrix& x, int k) {
  const auto n = static_cast<std::size_t>(x.rows());
  std::vector<int> assign(n, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    std::vector<int> count(static_cast<std::size_t>(k), 0);
    for (int a : assign) ++count[static_cast<std::size_t>(a)];
    if (std::all_of(count.begin(), count.end(), [](int c) { return c > 0; })) {
      double w = 0.0;
      for (int c = 0; c < k; ++c) {
        Vector mean = Vector::Zero(x.cols());
        for (std::size_t i = 0; i < n; ++i)
          if (assign[i] == c) mean += x.row(static_cast<Eigen::Index>(i)).transpose();
        mean /= count[static_cast<std::size_t>(c)];
        for (std::size_t i = 0; i < n; ++i)
          if (assign[i] == c) w += (x.row(static_cast<Eigen::Index>(i)).transpose() - mean).squaredNorm();
      }
      best = std::min(best, w);
    }
    std::size_t p = 0;
    while (p < n && ++assign[p] == k) assign[p++] = 0;
    if (p == n) break;
  }
  return best;
}

TEST(KMeans, MatchesExhaustivePartition) {
  std::mt19937_64 rng(93);
  for (int trial = 0; trial < 30; ++trial) {
    const Matrix x = testing::random_matrix(5 + trial % 4, 2, rng);
    const int k = 2 + trial % 2;
    const ClusterResult r = kmeans_cluster(x, k, 20, static_cast<std::uint64_t>(trial));
    EXPECT_GE(r.wcss, brute_wcss(x, k) - 1e-12);
    EXPECT_NEAR(r.wcss, brute_wcss(x, k), 1e-9);
  }
}

TEST(KMeans, ResultIsLloydFixpoint) {
  std::mt19937_64 rng(930);
  const Matrix x = testing::random_matrix(40, 3, rng);
  const ClusterResult r = kmeans_cluster(x, 4, 5, 2);
  double wcss = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    Eigen::Index nearest = 0;
    (r.centroids.rowwise() - x.row(i)).rowwise().squaredNorm().minCoeff(&nearest);
    EXPECT_EQ(nearest, r.labels[static_cast<std::size_t>(i)]);
    wcss += (x.row(i) - r.centroids.row(nearest)).squaredNorm();
  }
  EXPECT_NEAR(wcss, r.wcss, 1e-10);
  for (int c = 0; c < 4; ++c) {
    Vector mean = Vector::Zero(3);
    int count = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      if (r.labels[static_cast<std::size_t>(i)] == c) mean += x.row(i).transpose(), ++count;
    ASSERT_GT(count, 0);
    EXPECT_LE((mean / count - r.centroids.row(c).transpose()).norm(), 1e-12);
  }
  EXPECT_EQ(kmeans_cluster(x, 4, 5, 2).labels, r.labels);
}

TEST(KMeans, SeparatedGroups) {
  Matrix x(6, 1);
  x << 0.0, 0.1, 0.2, 10.0, 10.1, 10.2;
  const ClusterResult r = kmeans_cluster(x, 2, 5, 1);
  EXPECT_EQ(clustering_error(r.labels, {0, 0, 0, 1, 1, 1}), 0.0);
  EXPECT_NEAR(r.wcss, 0.04, 1e-12);
  EXPECT_EQ(r.centroids.rows(), 2);
  EXPECT_THROW(kmeans_cluster(x, 7), DataError);
  EXPECT_THROW(kmeans_cluster(x, 0), DataError);
}

TEST(ClusteringError, Examples) {
  EXPECT_EQ(clustering_error({1, 1, 0, 0}, {0, 0, 1, 1}), 0.0);
  EXPECT_EQ(clustering_error({0, 0, 0, 1}, {0, 0, 1, 1}), 0.25);
  EXPECT_DOUBLE_EQ(clustering_error({0, 1, 2}, {0, 0, 0}, 3), 2.0 / 3.0);
  EXPECT_THROW(clustering_error({0, 1}, {0}), DimensionError);
}

TEST(ClusteringError, MatchesPermutationSearch) {
  std::mt19937_64 rng(94);
  std::uniform_int_distribution<int> lab(0, 3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> pred(12), truth(12);
    for (auto& v : pred) v = lab(rng);
    for (auto& v : truth) v = lab(rng);
    std::vector<int> perm{0, 1, 2, 3};
    int best = 12;
    do {
      int miss = 0;
      for (std::size_t l = 0; l < 12; ++l) miss += truth[l] != perm[static_cast<std::size_t>(pred[l])];
      best = std::min(best, miss);
    } while (std::next_permutation(perm.begin(), perm.end()));
    EXPECT_DOUBLE_EQ(clustering_error(pred, truth, 4), best / 12.0);
  }
}

Matrix segment_rows(const std::vector<int>& segs, const Matrix& levels) {
  Matrix w(static_cast<Eigen::Index>(segs.size()), levels.cols());
  for (std::size_t t = 0; t < segs.size(); ++t) w.row(static_cast<Eigen::Index>(t)) = levels.row(segs[t]);
  return w;
}

TEST(ChangePoints, StepRows) {
  Matrix levels(3, 2);
  levels << 1, 0, 0, 1, 1, 1;
  const Matrix w = segment_rows({0, 0, 0, 1, 1, 2, 2, 2}, levels);
  const auto fixed = detect_change_points(w, 0.5);
  EXPECT_EQ(fixed.detected_times, (std::vector<std::size_t>{1, 4, 6}));
  EXPECT_EQ(fixed.gap_profile.size(), 7u);
  const auto autod = detect_change_points(w + 1e-3 * testing::random_matrix(8, 2, *std::make_unique<std::mt19937_64>(95)));
  EXPECT_TRUE(autod.auto_threshold);
  EXPECT_FALSE(autod.degenerate);
  EXPECT_EQ(autod.detected_times, (std::vector<std::size_t>{1, 4, 6}));
}

TEST(ChangePoints, ConstantRowsAndThresholdEdges) {
  const Matrix w = Matrix::Ones(5, 2);
  const auto r = detect_change_points(w);
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.detected_times, (std::vector<std::size_t>{1}));
  EXPECT_EQ(detect_change_points(w, 0.0).detected_times.size(), 5u);
  EXPECT_THROW(detect_change_points(Matrix::Ones(1, 2)), DimensionError);
  EXPECT_THROW(detect_change_points(w, -1.0), DataError);
}

TEST(ChangePoints, RotationInvariant) {
  std::mt19937_64 rng(96);
  const Matrix levels = testing::random_matrix(4, 3, rng);
  const Matrix w = segment_rows({0, 0, 1, 1, 1, 2, 3, 3}, levels) + 1e-3 * testing::random_matrix(8, 3, rng);
  const Matrix o = random_orthogonal(3, rng);
  const auto a = detect_change_points(w);
  const auto b = detect_change_points(w * o);
  EXPECT_EQ(a.detected_times, b.detected_times);
  for (std::size_t t = 0; t < a.gap_profile.size(); ++t) EXPECT_NEAR(a.gap_profile[t], b.gap_profile[t], 1e-12);
}

TEST(Holdout, CountsAndMirrors) {
  std::mt19937_64 rng(97);
  Tensor3 a({10, 10, 3});
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = i + 1; j < 10; ++j)
      for (std::size_t k = 0; k < 3; ++k) {
        const double v = std::bernoulli_distribution(0.3)(rng) ? 1.0 : 0.0;
        a(i, j, k) = v;
        a(j, i, k) = v;
      }
  std::size_t ones = 0, zeros = 0;
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 10; ++j)
      for (std::size_t k = 0; k < 3; ++k)
        if (is_canonical({i, j, k}, Symmetry::sym12)) (a(i, j, k) == 1.0 ? ones : zeros) += 1;

  const Holdout h = holdout_protocol(a, HoldoutSpec::parse("fraction:0.2,0.1"), Symmetry::sym12, 4);
  std::size_t n1 = 0, n0 = 0;
  Tensor3 restored = h.a_test;
  for (const auto& e : h.eval_set) {
    EXPECT_TRUE(is_canonical(e.index, Symmetry::sym12));
    EXPECT_EQ(a(e.index.i, e.index.j, e.index.k), e.label);
    EXPECT_EQ(h.a_test(e.index.i, e.index.j, e.index.k), 0.0);
    EXPECT_EQ(h.a_test(e.index.j, e.index.i, e.index.k), 0.0);
    (e.label == 1.0 ? n1 : n0) += 1;
    for (const auto& y : symmetry_orbit(e.index, Symmetry::sym12)) restored(y.i, y.j, y.k) = e.label;
  }
  EXPECT_EQ(n1, static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(ones))));
  EXPECT_EQ(n0, static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(zeros))));
  EXPECT_EQ(restored, a);
  EXPECT_EQ(holdout_protocol(a, HoldoutSpec::parse("fraction:0.2,0.1"), Symmetry::sym12, 4).eval_set.size(),
            h.eval_set.size());
}

TEST(Holdout, BalancedHalfAndErrors) {
  Tensor3 a({2, 2, 2});
  a(0, 0, 0) = 1.0;
  a(1, 1, 1) = 1.0;
  a(0, 1, 0) = 1.0;
  a(1, 0, 1) = 1.0;
  const Holdout h = holdout_protocol(a, HoldoutSpec::parse("balanced_half"), Symmetry::none, 1);
  EXPECT_EQ(h.eval_set.size(), 4u);
  EXPECT_EQ(HoldoutSpec::parse("balanced_half").to_string(), "balanced_half");
  EXPECT_EQ(HoldoutSpec::parse(HoldoutSpec::parse("fraction:0.25,0.5").to_string()).p_zeros, 0.5);
  EXPECT_THROW(HoldoutSpec::parse("fraction:2,0.1"), DataError);
  EXPECT_THROW(HoldoutSpec::parse("half"), DataError);
  Tensor3 bad = a;
  bad(0, 0, 1) = 0.5;
  EXPECT_THROW(holdout_protocol(bad, {}, Symmetry::none, 1), DataError);
}

double pair_auc(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t p = 0; p < s.size(); ++p)
    for (std::size_t q = 0; q < s.size(); ++q)
      if (y[p] == 1 && y[q] == 0) {
        pairs += 1.0;
        wins += s[p] > s[q] ? 1.0 : (s[p] == s[q] ? 0.5 : 0.0);
      }
  return wins / pairs;
}

TEST(Auc, Examples) {
  EXPECT_EQ(auc_roc({0.9, 0.8, 0.1, 0.2}, {1, 1, 0, 0}).auc, 1.0);
  EXPECT_EQ(auc_roc({0.1, 0.2, 0.9, 0.8}, {1, 1, 0, 0}).auc, 0.0);
  EXPECT_EQ(auc_roc({0.5, 0.5, 0.5}, {1, 0, 1}).auc, 0.5);
  EXPECT_THROW(auc_roc({0.1, 0.2}, {1, 1}), DegenerateInputError);
  EXPECT_THROW(auc_roc({0.1, 0.2}, {1, 2}), DataError);
}

TEST(Auc, PairCountingOracleWithTies) {
  std::mt19937_64 rng(98);
  std::uniform_int_distribution<int> level(0, 5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> s(30);
    std::vector<int> y(30);
    for (std::size_t e = 0; e < 30; ++e) {
      s[e] = 0.1 * level(rng);
      y[e] = static_cast<int>(e % 3 == 0 || level(rng) > 3);
    }
    const RocCurve roc = auc_roc(s, y);
    EXPECT_NEAR(roc.auc, pair_auc(s, y), 1e-12);
    EXPECT_NEAR(trapezoid_area(roc), roc.auc, 1e-12);
    EXPECT_EQ(roc.points.front().fpr, 0.0);
    EXPECT_EQ(roc.points.front().tpr, 0.0);
    EXPECT_EQ(roc.points.back().fpr, 1.0);
    EXPECT_EQ(roc.points.back().tpr, 1.0);
    std::vector<double> t(s.size());
    std::transform(s.begin(), s.end(), t.begin(), [](double v) { return std::exp(3.0 * v) - 7.0; });
    EXPECT_NEAR(auc_roc(t, y).auc, roc.auc, 1e-12);
  }
}

TEST(Mds, RecoversPairwiseDistances) {
  std::mt19937_64 rng(99);
  const Matrix x = testing::random_matrix(9, 2, rng);
  const MdsResult r = classical_mds(x, 2);
  EXPECT_FALSE(r.clipped);
  EXPECT_LE(r.coords.colwise().sum().norm(), 1e-12);
  for (Eigen::Index i = 0; i < 9; ++i)
    for (Eigen::Index j = 0; j < 9; ++j)
      EXPECT_NEAR((r.coords.row(i) - r.coords.row(j)).norm(), (x.row(i) - x.row(j)).norm(), 1e-10);
  EXPECT_GE(r.eigenvalues(0), r.eigenvalues(1));
}

TEST(Mds, CollinearPoints) {
  Matrix x(3, 3);
  x << 0, 0, 0, 1, 1, 1, 3, 3, 3;
  const MdsResult r = classical_mds(x, 1);
  const double s3 = std::sqrt(3.0);
  EXPECT_NEAR(std::abs(r.coords(1, 0) - r.coords(0, 0)), s3, 1e-12);
  EXPECT_NEAR(std::abs(r.coords(2, 0) - r.coords(0, 0)), 3 * s3, 1e-12);
  EXPECT_NEAR(classical_mds(x, 2).eigenvalues(1), 0.0, 1e-10);
  EXPECT_THROW(classical_mds(x, 4), DimensionError);
}

}  // namespace
}  // namespace hlsm
