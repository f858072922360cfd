#pragma once

#include <cmath>
#include <numbers>
#include <string>

namespace hlsm {

enum class LinkKind { logit_scaled, probit };

/// Link g: latent score → edge probability. `sigma` scales the logistic link,
/// g(x) = 1 / (1 + exp(−x/σ)); it is ignored for probit, g = Φ.
struct LinkSpec {
  LinkKind kind = LinkKind::logit_scaled;
  double sigma = 1.0;

  static LinkSpec logit(double sigma = 1.0) { return {LinkKind::logit_scaled, sigma}; }
  static LinkSpec probit() { return {LinkKind::probit, 1.0}; }

  void validate() const;
  std::string name() const;
  static LinkSpec parse(const std::string& kind, double sigma);

  friend bool operator==(const LinkSpec&, const LinkSpec&) = default;
};

struct LinkValues {
  double g = 0.0;
  double g1 = 0.0;
  double g2 = 0.0;
};

LinkValues link_derivatives(const LinkSpec& link, double x);

struct CurvatureSummary {
  double gamma_alpha = 0.0;
  double beta_alpha = 0.0;
  double zeta_alpha = 0.0;
};

/// γ_α = min over |x| ≤ α of min(g₊, g₋), β_α the matching max, and
/// ζ_α = sup |g'| / (g(1 − g)); all evaluated on a uniform grid over [−α, α].
CurvatureSummary curvature_and_zeta(const LinkSpec& link, double alpha, int grid_points = 2001);

namespace detail {

inline constexpr double kInvSqrt2Pi = 0.3989422804014327;  // 1/√(2π)
// erfc keeps full relative precision down to here; beyond, the asymptotic series.
inline constexpr double kProbitTail = 30.0;

inline double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

/// Asymptotic series S(x) with Φ(x) = φ(x)/(−x) · S(x) for x ≪ 0.
inline double mills_series(double x) {
  const double z = 1.0 / (x * x);
  return 1.0 - z * (1.0 - 3.0 * z * (1.0 - 5.0 * z * (1.0 - 7.0 * z)));
}

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0);
}

inline double log_normal_cdf(double x) {
  if (x < -kProbitTail) {
    return -0.5 * x * x + std::log(kInvSqrt2Pi) - std::log(-x) + std::log(mills_series(x));
  }
  if (x > 0.0) return std::log1p(-normal_cdf(-x));
  return std::log(normal_cdf(x));
}

/// φ(x)/Φ(x), accurate in the lower tail.
inline double pdf_over_cdf(double x) {
  if (x < -kProbitTail) return -x / mills_series(x);
  return normal_pdf(x) / normal_cdf(x);
}

/// log(1 + e^z) without overflow.
inline double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

inline double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace detail

/// Per-entry negative log-likelihood terms: value, first and second
/// derivative in θ of −[a log g(θ) + (1 − a) log(1 − g(θ))].
struct EntryTerms {
  double loss = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Exact (unclipped) entry terms, evaluated in log space.
inline EntryTerms entry_terms(const LinkSpec& link, double a, double theta) {
  EntryTerms t;
  if (link.kind == LinkKind::logit_scaled) {
    const double s = link.sigma;
    const double z = theta / s;
    const double g = detail::logistic(z);
    t.loss = detail::softplus(z) - a * z;
    t.d1 = (g - a) / s;
    t.d2 = g * (1.0 - g) / (s * s);
    return t;
  }
  // probit: r₊ = φ/Φ, r₋ = φ/(1 − Φ) = r₊(−θ)
  const double rp = detail::pdf_over_cdf(theta);
  const double rm = detail::pdf_over_cdf(-theta);
  t.loss = -a * detail::log_normal_cdf(theta) - (1.0 - a) * detail::log_normal_cdf(-theta);
  t.d1 = -a * rp + (1.0 - a) * rm;
  t.d2 = a * (rp * rp + theta * rp) + (1.0 - a) * (rm * rm - theta * rm);
  return t;
}

/// Entry loss with probabilities clipped to [clip, 1 − clip] before the log.
inline double entry_loss_clipped(const LinkSpec& link, double a, double theta, double clip) {
  double g = 0.0;
  if (link.kind == LinkKind::logit_scaled) {
    g = detail::logistic(theta / link.sigma);
  } else {
    g = detail::normal_cdf(theta);
  }
  const double p = std::fmin(std::fmax(g, clip), 1.0 - clip);
  return -a * std::log(p) - (1.0 - a) * std::log1p(-p);
}

}  // namespace hlsm
