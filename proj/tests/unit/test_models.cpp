#include "hlsm/errors.hpp"
#include "hlsm/models.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

namespace hlsm {
namespace {

using testing::random_matrix;

Matrix slice(const Tensor3& t, std::size_t l) {
  Matrix s(static_cast<Eigen::Index>(t.dims()[0]), static_cast<Eigen::Index>(t.dims()[1]));
  for (std::size_t i = 0; i < t.dims()[0]; ++i)
    for (std::size_t j = 0; j < t.dims()[1]; ++j) s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = t(i, j, l);
  return s;
}

MmlsmParams random_params(std::size_t n, const std::vector<int>& labels, int m, std::vector<std::size_t> widths,
                          std::mt19937_64& rng) {
  MmlsmParams p;
  p.labels.m = m;
  p.labels.labels = labels;
  for (int j = 0; j < m; ++j) {
    const auto w = static_cast<Eigen::Index>(widths[static_cast<std::size_t>(j)]);
    p.frames.push_back(random_matrix(static_cast<Eigen::Index>(n), w, rng));
    const Matrix e = random_matrix(w, w, rng);
    p.interactions.push_back(e * e.transpose());
  }
  return p;
}

void expect_slicewise(const MmlsmParams& p, const MmlsmAssembly& a) {
  for (std::size_t l = 0; l < p.labels.labels.size(); ++l) {
    const auto s = static_cast<std::size_t>(p.labels.labels[l]);
    const Matrix want = p.frames[s] * p.interactions[s] * p.frames[s].transpose();
    EXPECT_LE((slice(a.theta, l) - want).norm(), 1e-10 * want.norm()) << "layer " << l;
  }
}

TEST(MmlsmAssemble, SlicesMatchPerClassModels) {
  std::mt19937_64 rng(70);
  const MmlsmParams p = random_params(9, {0, 1, 2, 1, 0, 2, 2}, 3, {2, 1, 2}, rng);
  const MmlsmAssembly a = mmlsm_assemble(p);
  EXPECT_EQ(a.rank, 5u);
  expect_slicewise(p, a);
  EXPECT_LE(testing::max_abs_diff(a.theta, tucker_compose(a.factors)), 0.0);
  for (const Matrix& f : a.factors.factors) EXPECT_LE(orthonormality_error(f), 1e-12);
}

TEST(MmlsmAssemble, SingleClassRepeatsOneSlice) {
  std::mt19937_64 rng(71);
  const MmlsmParams p = random_params(6, {0, 0, 0, 0}, 1, {2}, rng);
  const MmlsmAssembly a = mmlsm_assemble(p);
  expect_slicewise(p, a);
  for (std::size_t l = 1; l < 4; ++l) EXPECT_LE((slice(a.theta, l) - slice(a.theta, 0)).norm(), 1e-12);
  EXPECT_EQ(a.factors.ranks(), (Dims{2, 2, 1}));
}

TEST(MmlsmAssemble, OrthogonalFramesGiveBlockDiagonalCore) {
  std::mt19937_64 rng(72);
  MmlsmParams p = random_params(8, {0, 1, 1}, 2, {2, 2}, rng);
  const Matrix basis = testing::random_frame(8, 4, rng);
  p.frames[0] = 3.0 * basis.leftCols(2);
  p.frames[1] = 3.0 * basis.rightCols(2);
  const MmlsmAssembly a = mmlsm_assemble(p);
  expect_slicewise(p, a);
  // each class only touches its own 2-dimensional block of the joint frame
  const Matrix q = a.factors.factors[0];
  for (std::size_t l = 0; l < 3; ++l) {
    const auto s = static_cast<std::size_t>(p.labels.labels[l]);
    const Matrix proj = p.frames[s] * (p.frames[s].transpose() * p.frames[s]).inverse() * p.frames[s].transpose();
    EXPECT_LE((proj * slice(a.theta, l) * proj - slice(a.theta, l)).norm(), 1e-10);
  }
  EXPECT_LE((q * q.transpose() - basis * basis.transpose()).norm(), 1e-10);
}

TEST(MmlsmAssemble, DeclaredRankTooLarge) {
  std::mt19937_64 rng(73);
  MmlsmParams p = random_params(6, {0, 1}, 2, {2, 2}, rng);
  p.frames[1] = p.frames[0];
  EXPECT_EQ(mmlsm_assemble(p).rank, 2u);
  EXPECT_THROW(mmlsm_assemble(p, 4), RankDeficiencyError);
}

TEST(MmlsmAssemble, ShapeErrors) {
  std::mt19937_64 rng(74);
  MmlsmParams p = random_params(6, {0, 1}, 2, {2, 2}, rng);
  p.interactions[1] = Matrix::Identity(3, 3);
  EXPECT_THROW(mmlsm_assemble(p), DimensionError);
  p = random_params(6, {0, 0}, 2, {2, 2}, rng);
  EXPECT_THROW(mmlsm_assemble(p), DataError);
}

TEST(Simulate, MmlsmSymmetricWithEmptyDiagonal) {
  const Simulated s = simulate_mmlsm(12, 5, 2, 2, 75, LinkSpec::logit());
  ASSERT_TRUE(s.truth.labels.has_value());
  EXPECT_EQ(s.truth.labels->labels.size(), 5u);
  for (std::size_t l = 0; l < 5; ++l)
    for (std::size_t i = 0; i < 12; ++i) {
      EXPECT_EQ(s.adjacency(i, i, l), 0.0);
      for (std::size_t j = 0; j < 12; ++j) {
        EXPECT_EQ(s.adjacency(i, j, l), s.adjacency(j, i, l));
        EXPECT_NEAR(s.truth.theta_star(i, j, l), s.truth.theta_star(j, i, l), 1e-10);
      }
    }
}

TEST(Simulate, HypergraphFullySymmetric) {
  const Simulated s = simulate_hypergraph(8, 2, 76, LinkSpec::logit());
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j)
      for (std::size_t k = 0; k < 8; ++k) {
        const double v = s.adjacency(i, j, k);
        if (i == j || j == k || i == k) EXPECT_EQ(v, 0.0);
        for (const auto& y : symmetry_orbit({i, j, k}, Symmetry::symfull)) EXPECT_EQ(s.adjacency(y.i, y.j, y.k), v);
      }
}

TEST(Simulate, SeedDeterminism) {
  const Simulated a = simulate_general(10, 2, 0.5, 77);
  const Simulated b = simulate_general(10, 2, 0.5, 77);
  const Simulated c = simulate_general(10, 2, 0.5, 78);
  EXPECT_EQ(a.adjacency, b.adjacency);
  EXPECT_EQ(a.truth.theta_star, b.truth.theta_star);
  EXPECT_NE(a.adjacency, c.adjacency);
  EXPECT_EQ(simulate_dynamic(10, 8, 3, 2, 5, LinkSpec::logit()).adjacency,
            simulate_dynamic(10, 8, 3, 2, 5, LinkSpec::logit()).adjacency);
}

TEST(Simulate, GeneralTruthHasOrthonormalFrames) {
  const Simulated s = simulate_general(15, 3, 1.0, 79);
  for (const Matrix& f : s.truth.factors_star.factors) EXPECT_LE(orthonormality_error(f), 1e-12);
  EXPECT_EQ(s.truth.factors_star.ranks(), (Dims{3, 3, 3}));
  EXPECT_LE(testing::max_abs_diff(s.truth.theta_star, tucker_compose(s.truth.factors_star)), 1e-10);
}

TEST(SampleAdjacency, FrequenciesMatchLink) {
  const double theta_values[] = {-2.0, 0.0, 1.0};
  Tensor3 theta({30, 30, 3});
  for (std::size_t i = 0; i < 30; ++i)
    for (std::size_t j = 0; j < 30; ++j)
      for (std::size_t k = 0; k < 3; ++k) theta(i, j, k) = theta_values[k];
  std::vector<double> ones(3, 0.0);
  const int draws = 40;
  std::mt19937_64 rng(80);
  for (int d = 0; d < draws; ++d) {
    const Tensor3 a = sample_adjacency(theta, LinkSpec::logit(), Symmetry::none, rng);
    for (std::size_t i = 0; i < 30; ++i)
      for (std::size_t j = 0; j < 30; ++j)
        for (std::size_t k = 0; k < 3; ++k) ones[k] += a(i, j, k);
  }
  const double count = 900.0 * draws;
  for (std::size_t k = 0; k < 3; ++k) {
    const double p = 1.0 / (1.0 + std::exp(-theta_values[k]));
    EXPECT_NEAR(ones[k] / count, p, 4.0 * std::sqrt(p * (1 - p) / count));
  }
}

TEST(SampleAdjacency, ExtremeProbabilitiesAreDeterministic) {
  Tensor3 theta({4, 4, 2});
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      theta(i, j, 0) = -1e4;
      theta(i, j, 1) = 1e4;
    }
  std::mt19937_64 rng(81);
  const Tensor3 a = sample_adjacency(theta, LinkSpec::logit(), Symmetry::none, rng);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_EQ(a(i, j, 0), 0.0);
      EXPECT_EQ(a(i, j, 1), 1.0);
    }
}

TEST(Dynamic, RoutesThroughMmlsmAssembly) {
  std::mt19937_64 rng(82);
  std::vector<std::size_t> cps;
  const MmlsmParams p = dynamic_params(10, 12, 3, 2, rng, &cps);
  ASSERT_EQ(cps.size(), 3u);
  EXPECT_EQ(cps[0], 1u);
  EXPECT_TRUE(std::is_sorted(cps.begin(), cps.end()));
  for (std::size_t t = 1; t <= 12; ++t) {
    const int seg = static_cast<int>(std::upper_bound(cps.begin(), cps.end(), t) - cps.begin()) - 1;
    EXPECT_EQ(p.labels.labels[t - 1], seg);
  }
  expect_slicewise(p, mmlsm_assemble(p));
}

TEST(Dynamic, TruthCarriesChangePoints) {
  const Simulated s = simulate_dynamic(10, 20, 4, 2, 83, LinkSpec::logit());
  EXPECT_EQ(s.truth.change_points.size(), 4u);
  EXPECT_EQ(s.truth.change_points.front(), 1u);
  for (std::size_t cp : s.truth.change_points) EXPECT_LE(cp, 20u);
}

TEST(LayerLabels, Validation) {
  LayerLabels l{{0, 1, 1}, 2};
  EXPECT_NO_THROW(l.validate());
  EXPECT_EQ(l.sizes(), (std::vector<std::size_t>{1, 2}));
  l.labels = {0, 2};
  EXPECT_THROW(l.validate(), DataError);
  l = {{0, 0}, 2};
  EXPECT_THROW(l.validate(), DataError);
}

TEST(Simulate, RejectsBadArguments) {
  EXPECT_THROW(simulate_general(3, 4, 1.0, 1), DimensionError);
  EXPECT_THROW(simulate_general(5, 2, 0.0, 1), DataError);
  EXPECT_THROW(simulate_mmlsm(5, 2, 3, 2, 1, LinkSpec::logit()), DataError);
  EXPECT_THROW(simulate_dynamic(5, 2, 3, 2, 1, LinkSpec::logit()), DataError);
}

}  // namespace
}  // namespace hlsm
