#include "hlsm/errors.hpp"
#include "hlsm/kernels.hpp"
#include "hlsm/link.hpp"
#include "hlsm/loss.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace hlsm {
namespace {

using testing::random_binary;
using testing::random_tensor;

TEST(LinkDerivatives, LogitAtOrigin) {
  const LinkValues v = link_derivatives(LinkSpec::logit(1.0), 0.0);
  EXPECT_DOUBLE_EQ(v.g, 0.5);
  EXPECT_DOUBLE_EQ(v.g1, 0.25);
  EXPECT_NEAR(v.g2, 0.0, 1e-15);
  EXPECT_NEAR(link_derivatives(LinkSpec::logit(1.0), std::log(3.0)).g, 0.75, 1e-15);
}

TEST(LinkDerivatives, ProbitAtOrigin) {
  const LinkValues v = link_derivatives(LinkSpec::probit(), 0.0);
  EXPECT_DOUBLE_EQ(v.g, 0.5);
  EXPECT_NEAR(v.g1, 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-15);
  EXPECT_NEAR(v.g2, 0.0, 1e-15);
}

TEST(LinkDerivatives, FiniteDifferenceConsistency) {
  for (const LinkSpec& link : {LinkSpec::logit(1.0), LinkSpec::logit(0.3), LinkSpec::probit()}) {
    for (double x : {-4.0, -1.3, -0.2, 0.7, 2.5, 5.0}) {
      const double h = 1e-5;
      const LinkValues v = link_derivatives(link, x);
      const LinkValues p = link_derivatives(link, x + h), m = link_derivatives(link, x - h);
      EXPECT_GT(v.g, 0.0);
      EXPECT_LT(v.g, 1.0);
      EXPECT_GT(v.g1, 0.0);
      EXPECT_NEAR((p.g - m.g) / (2 * h), v.g1, 1e-6 * std::max(1.0, std::abs(v.g1)));
      EXPECT_NEAR((p.g1 - m.g1) / (2 * h), v.g2, 1e-6 * std::max(1.0, std::abs(v.g2)));
    }
  }
}

TEST(LinkDerivatives, ProbitTailsStayFinite) {
  for (double x : {-40.0, -35.0, -31.0, -29.0, 29.0, 40.0}) {
    const EntryTerms one = entry_terms(LinkSpec::probit(), 1.0, x);
    const EntryTerms zero = entry_terms(LinkSpec::probit(), 0.0, x);
    EXPECT_TRUE(std::isfinite(one.loss) && std::isfinite(one.d1) && std::isfinite(one.d2));
    EXPECT_TRUE(std::isfinite(zero.loss) && std::isfinite(zero.d1) && std::isfinite(zero.d2));
    EXPECT_GE(one.d2, 0.0);
    EXPECT_GE(zero.d2, 0.0);
  }
  // −log Φ(x) ≈ x²/2 + log(−x) + log √(2π) deep in the lower tail
  const double x = -35.0;
  const double want = 0.5 * x * x + std::log(-x) + 0.5 * std::log(2.0 * std::numbers::pi);
  EXPECT_NEAR(entry_terms(LinkSpec::probit(), 1.0, x).loss, want, 1e-3);
}

TEST(LinkDerivatives, LogTailContinuityAtSwitch) {
  const double lo = detail::log_normal_cdf(-detail::kProbitTail - 1e-9);
  const double hi = detail::log_normal_cdf(-detail::kProbitTail + 1e-9);
  EXPECT_NEAR(lo, hi, 1e-6 * std::abs(lo));
}

TEST(Curvature, LogitClosedForm) {
  const CurvatureSummary c = curvature_and_zeta(LinkSpec::logit(1.0), 1.0);
  const double e = std::exp(1.0);
  EXPECT_NEAR(c.gamma_alpha, e / ((1 + e) * (1 + e)), 1e-10);
  EXPECT_NEAR(c.beta_alpha, 0.25, 1e-10);
  EXPECT_LE(c.gamma_alpha, c.beta_alpha);
  EXPECT_DOUBLE_EQ(curvature_and_zeta(LinkSpec::logit(0.5), 3.0).zeta_alpha, 2.0);
  const CurvatureSummary tiny = curvature_and_zeta(LinkSpec::logit(1.0), 1e-6);
  EXPECT_NEAR(tiny.gamma_alpha, tiny.beta_alpha, 1e-10);
}

TEST(Curvature, ProbitOrdering) {
  const CurvatureSummary c = curvature_and_zeta(LinkSpec::probit(), 2.0);
  EXPECT_GT(c.gamma_alpha, 0.0);
  EXPECT_LE(c.gamma_alpha, c.beta_alpha);
  EXPECT_GT(c.zeta_alpha, 0.0);
  EXPECT_THROW(curvature_and_zeta(LinkSpec::probit(), 0.0), DataError);
  EXPECT_THROW(curvature_and_zeta(LinkSpec::probit(), 1.0, 50), DataError);
}

TEST(Nll, SingleEntryAndSaturation) {
  const Tensor3 a({1, 1, 1}, 1.0);
  EXPECT_NEAR(nll(a, Tensor3({1, 1, 1}, 0.0), LinkSpec::logit(1.0)), std::log(2.0), 1e-15);
  EXPECT_LT(nll(a, Tensor3({1, 1, 1}, 60.0), LinkSpec::logit(1.0)), 1e-12);
  EXPECT_LT(nll(a, Tensor3({1, 1, 1}, 60.0), LinkSpec::probit()), 1e-12);
  // clipping keeps the opposite saturation finite
  EXPECT_NEAR(nll(a, Tensor3({1, 1, 1}, -800.0), LinkSpec::logit(1.0)), -std::log(1e-12), 1e-9);
}

TEST(Nll, MatchesEntryLoop) {
  std::mt19937_64 rng(21);
  const Tensor3 a = random_binary({3, 3, 3}, rng);
  const Tensor3 theta = random_tensor({3, 3, 3}, rng, 2.0);
  for (const LinkSpec& link : {LinkSpec::logit(0.7), LinkSpec::probit()}) {
    double want = 0.0;
    for (std::size_t e = 0; e < a.size(); ++e) {
      const double p = link_derivatives(link, theta.values()[e]).g;
      want -= a.values()[e] * std::log(p) + (1 - a.values()[e]) * std::log(1 - p);
    }
    EXPECT_NEAR(nll(a, theta, link), want, 1e-10 * want);
  }
}

TEST(Nll, RejectsBadInput) {
  std::mt19937_64 rng(22);
  Tensor3 a = random_binary({2, 2, 2}, rng);
  EXPECT_THROW(nll(a, Tensor3({2, 2, 3}), LinkSpec::logit()), DimensionError);
  a(0, 0, 0) = 0.5;
  EXPECT_THROW(nll(a, Tensor3({2, 2, 2}), LinkSpec::logit()), DataError);
}

TEST(NllGrad, LogitClosedForm) {
  const Tensor3 a({1, 1, 1}, 1.0);
  EXPECT_DOUBLE_EQ(nll_grad(a, Tensor3({1, 1, 1}), LinkSpec::logit(1.0))(0, 0, 0), -0.5);
  std::mt19937_64 rng(23);
  const Tensor3 b = random_binary({3, 4, 2}, rng);
  const Tensor3 theta = random_tensor({3, 4, 2}, rng);
  const LinkSpec link = LinkSpec::logit(0.8);
  const Tensor3 g = nll_grad(b, theta, link);
  for (std::size_t e = 0; e < b.size(); ++e) {
    const double want = (link_derivatives(link, theta.values()[e]).g - b.values()[e]) / 0.8;
    EXPECT_NEAR(g.values()[e], want, 1e-14);
  }
}

TEST(NllGrad, FiniteDifferences) {
  std::mt19937_64 rng(24);
  const Tensor3 a = random_binary({4, 3, 2}, rng);
  const Tensor3 theta = random_tensor({4, 3, 2}, rng);
  for (const LinkSpec& link : {LinkSpec::logit(1.0), LinkSpec::probit()}) {
    const Tensor3 g = nll_grad(a, theta, link);
    for (std::size_t e = 0; e < a.size(); ++e) {
      const double h = 1e-5;
      Tensor3 tp = theta, tm = theta;
      tp.values()[e] += h;
      tm.values()[e] -= h;
      const double fd = (nll(a, tp, link) - nll(a, tm, link)) / (2 * h);
      EXPECT_LE(testing::rel_err(fd, g.values()[e]), 1e-5);
    }
  }
}

TEST(NllGrad, ZeroOnExcludedEntries) {
  std::mt19937_64 rng(25);
  const Tensor3 a = random_binary({3, 3, 3}, rng);
  const Tensor3 theta = random_tensor({3, 3, 3}, rng);
  ObservationMask mask = ObservationMask::of(MaskMode::custom);
  mask.excluded = {{0, 1, 2}};
  mask.held_out = {{2, 2, 2}};
  const Tensor3 g = nll_grad(a, theta, LinkSpec::logit(), mask);
  EXPECT_EQ(g(0, 1, 2), 0.0);
  EXPECT_EQ(g(2, 2, 2), 0.0);
  const Tensor3 up = nll_grad(a, theta, LinkSpec::logit(), ObservationMask::of(MaskMode::sym_full_upper));
  EXPECT_EQ(up(1, 0, 2), 0.0);
  EXPECT_NE(up(0, 1, 2), 0.0);
}

TEST(NllGrad, BoundedByZeta) {
  std::mt19937_64 rng(26);
  const double alpha = 2.0;
  for (const LinkSpec& link : {LinkSpec::logit(0.5), LinkSpec::probit()}) {
    const Tensor3 a = random_binary({5, 5, 5}, rng);
    Tensor3 theta = random_tensor({5, 5, 5}, rng, 3.0);
    for (double& v : theta.values()) v = std::clamp(v, -alpha, alpha);
    const double zeta = curvature_and_zeta(link, alpha).zeta_alpha;
    const Tensor3 g = nll_grad(a, theta, link);
    EXPECT_LE(g.max_abs(), zeta + 1e-9);
  }
}

TEST(Nll, ConvexAlongSegments) {
  std::mt19937_64 rng(27);
  for (const LinkSpec& link : {LinkSpec::logit(1.0), LinkSpec::probit()}) {
    for (int trial = 0; trial < 20; ++trial) {
      const Tensor3 a = random_binary({3, 3, 3}, rng);
      Tensor3 x = random_tensor({3, 3, 3}, rng, 2.0), y = random_tensor({3, 3, 3}, rng, 2.0);
      Tensor3 mid(x.dims());
      for (std::size_t e = 0; e < x.size(); ++e) mid.values()[e] = 0.5 * (x.values()[e] + y.values()[e]);
      EXPECT_LE(nll(a, mid, link), 0.5 * (nll(a, x, link) + nll(a, y, link)) + 1e-12);
    }
  }
}

TEST(ObservationMask, PartitionAddsUp) {
  std::mt19937_64 rng(28);
  const Tensor3 a = random_binary({4, 4, 4}, rng);
  const Tensor3 theta = random_tensor({4, 4, 4}, rng);
  ObservationMask part = ObservationMask::of(MaskMode::custom);
  std::vector<Index3> rest;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      for (std::size_t k = 0; k < 4; ++k) ((i + 2 * j + k) % 3 == 0 ? part.excluded : rest).push_back({i, j, k});
  ObservationMask complement = ObservationMask::of(MaskMode::custom);
  complement.excluded = rest;
  const LinkSpec link = LinkSpec::logit();
  EXPECT_NEAR(nll(a, theta, link), nll(a, theta, link, part) + nll(a, theta, link, complement), 1e-10);
}

TEST(ObservationMask, ModesAndValidation) {
  const Dims d{4, 4, 3};
  EXPECT_EQ(ObservationMask::all().included_count(d), 48u);
  EXPECT_EQ(ObservationMask::of(MaskMode::sym12_upper).included_count(d), 6u * 3u);
  EXPECT_EQ(ObservationMask::of(MaskMode::sym_full_upper).included_count({5, 5, 5}), 10u);
  ObservationMask bad = ObservationMask::of(MaskMode::custom);
  bad.excluded = {{0, 0, 0}};
  bad.held_out = {{0, 0, 0}};
  EXPECT_THROW(bad.validate(d), DataError);
  ObservationMask out_of_range = ObservationMask::of(MaskMode::custom);
  out_of_range.excluded = {{4, 0, 0}};
  EXPECT_THROW(out_of_range.validate(d), DimensionError);
  EXPECT_EQ(parse_mask_mode(mask_mode_name(MaskMode::sym12_upper)), MaskMode::sym12_upper);
  EXPECT_THROW(parse_mask_mode("diagonal"), DataError);
}

TEST(Symmetry, OrbitsAndCanonicalForms) {
  EXPECT_EQ(symmetry_orbit({0, 1, 2}, Symmetry::symfull).size(), 6u);
  EXPECT_EQ(symmetry_orbit({0, 0, 2}, Symmetry::symfull).size(), 3u);
  EXPECT_EQ(symmetry_orbit({0, 1, 2}, Symmetry::sym12).size(), 2u);
  EXPECT_EQ(symmetry_orbit({0, 1, 2}, Symmetry::none).size(), 1u);
  EXPECT_TRUE(is_canonical({0, 1, 2}, Symmetry::symfull));
  EXPECT_FALSE(is_canonical({1, 0, 2}, Symmetry::symfull));
  EXPECT_FALSE(is_canonical({1, 1, 0}, Symmetry::sym12));
  EXPECT_EQ(canonical_mask_mode(Symmetry::sym12), MaskMode::sym12_upper);
  EXPECT_EQ(parse_symmetry(symmetry_name(Symmetry::symfull)), Symmetry::symfull);
}

TEST(LinkSpec, Validation) {
  EXPECT_THROW(LinkSpec::logit(0.0).validate(), DataError);
  EXPECT_THROW(LinkSpec::parse("cauchit", 1.0), DataError);
  EXPECT_EQ(LinkSpec::parse("probit", 3.0).kind, LinkKind::probit);
}

}  // namespace
}  // namespace hlsm
