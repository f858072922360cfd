#include "hlsm/errors.hpp"
#include "hlsm/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hlsm {

Diagnostics model_diagnostics(const TuckerFactors& f, const LinkSpec& link) {
  f.validate();
  Diagnostics d;
  for (std::size_t k = 0; k < 3; ++k) d.incoherence[k] = incoherence(f.factors[k]);

  SpectralBounds b;
  try {
    b = spectral_bounds(f.core, f.ranks());
  } catch (const DegenerateInputError&) {
    b = {};
  }
  d.condition_number = b.lambda_min > 0.0 ? b.lambda_max / b.lambda_min
                                          : std::numeric_limits<double>::infinity();

  d.theta_inf_norm = tucker_compose(f).max_abs();
  const CurvatureSummary c = curvature_and_zeta(link, std::max(d.theta_inf_norm, 1e-12));
  d.gamma_alpha = c.gamma_alpha;
  d.beta_alpha = c.beta_alpha;
  d.zeta_alpha = c.zeta_alpha;

  const Dims n = f.dims();
  const Dims r = f.ranks();
  double dof = static_cast<double>(r[0] * r[1] * r[2]);
  for (std::size_t k = 0; k < 3; ++k) dof += static_cast<double>(n[k] * r[k]);
  d.err_r_bound = d.zeta_alpha * std::sqrt(dof);

  // The core here multiplies orthonormal frames, so Λ̲ already carries the
  // (n1 n2 n3)^{1/2} factor of the √n-scaled parameterization.
  const double r_bar = static_cast<double>(*std::max_element(r.begin(), r.end()));
  d.thm1_rate_expr = b.lambda_min > 0.0
                         ? r_bar * d.err_r_bound * d.err_r_bound / (b.lambda_min * b.lambda_min)
                         : std::numeric_limits<double>::infinity();
  return d;
}

}  // namespace hlsm
