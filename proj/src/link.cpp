#include "hlsm/link.hpp"

#include "hlsm/errors.hpp"

#include <algorithm>
#include <limits>

namespace hlsm {

void LinkSpec::validate() const {
  if (kind == LinkKind::logit_scaled && !(sigma > 0.0 && std::isfinite(sigma))) {
    throw DataError("logit link needs a positive finite sigma");
  }
}

std::string LinkSpec::name() const {
  return kind == LinkKind::logit_scaled ? "logit" : "probit";
}

LinkSpec LinkSpec::parse(const std::string& kind, double sigma) {
  LinkSpec link;
  if (kind == "logit") {
    link = logit(sigma);
  } else if (kind == "probit") {
    link = probit();
  } else {
    throw DataError("unknown link '" + kind + "' (expected logit or probit)");
  }
  link.validate();
  return link;
}

LinkValues link_derivatives(const LinkSpec& link, double x) {
  LinkValues v;
  if (link.kind == LinkKind::logit_scaled) {
    const double s = link.sigma;
    const double g = detail::logistic(x / s);
    v.g = g;
    v.g1 = g * (1.0 - g) / s;
    v.g2 = g * (1.0 - g) * (1.0 - 2.0 * g) / (s * s);
  } else {
    const double phi = detail::normal_pdf(x);
    v.g = detail::normal_cdf(x);
    v.g1 = phi;
    v.g2 = -x * phi;
  }
  return v;
}

CurvatureSummary curvature_and_zeta(const LinkSpec& link, double alpha, int grid_points) {
  if (!(alpha > 0.0)) throw DataError("curvature_and_zeta: alpha must be positive");
  if (grid_points < 101) throw DataError("curvature_and_zeta: need at least 101 grid points");
  link.validate();

  CurvatureSummary out;
  out.gamma_alpha = std::numeric_limits<double>::infinity();
  out.beta_alpha = 0.0;
  out.zeta_alpha = 0.0;
  for (int i = 0; i < grid_points; ++i) {
    const double x = -alpha + 2.0 * alpha * static_cast<double>(i) / (grid_points - 1);
    // second derivatives of −log g and −log(1 − g) are g₊ and g₋
    const double g_plus = entry_terms(link, 1.0, x).d2;
    const double g_minus = entry_terms(link, 0.0, x).d2;
    out.gamma_alpha = std::min({out.gamma_alpha, g_plus, g_minus});
    out.beta_alpha = std::max({out.beta_alpha, g_plus, g_minus});

    double zeta = 0.0;
    if (link.kind == LinkKind::logit_scaled) {
      zeta = 1.0 / link.sigma;
    } else {
      // φ / (Φ(1 − Φ)) = φ/Φ + φ/(1 − Φ)
      zeta = detail::pdf_over_cdf(x) + detail::pdf_over_cdf(-x);
    }
    out.zeta_alpha = std::max(out.zeta_alpha, zeta);
  }
  return out;
}

}  // namespace hlsm
