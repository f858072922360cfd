#include "hlsm/errors.hpp"
#include "hlsm/kernels.hpp"

namespace hlsm::kernels::serial {

namespace {

Vector design_row(const std::array<Matrix, 3>& f, std::size_t i, std::size_t j, std::size_t k) {
  const auto r1 = f[0].cols(), r2 = f[1].cols(), r3 = f[2].cols();
  Vector x(r1 * r2 * r3);
  Eigen::Index p = 0;
  for (Eigen::Index a = 0; a < r1; ++a)
    for (Eigen::Index b = 0; b < r2; ++b)
      for (Eigen::Index c = 0; c < r3; ++c)
        x(p++) = f[0](static_cast<Eigen::Index>(i), a) * f[1](static_cast<Eigen::Index>(j), b) *
                 f[2](static_cast<Eigen::Index>(k), c);
  return x;
}

}  // namespace

Tensor3 mode_product(const Tensor3& t, const Matrix& m, int mode, bool transpose_m) {
  const Dims& d = t.dims();
  const std::size_t idx = static_cast<std::size_t>(mode - 1);
  const auto inner = static_cast<std::size_t>(transpose_m ? m.rows() : m.cols());
  const auto outer = static_cast<std::size_t>(transpose_m ? m.cols() : m.rows());
  if (inner != d[idx]) throw DimensionError("mode_product: matrix does not match tensor mode");
  auto coef = [&](std::size_t out_i, std::size_t in_i) {
    const auto o = static_cast<Eigen::Index>(out_i), n = static_cast<Eigen::Index>(in_i);
    return transpose_m ? m(n, o) : m(o, n);
  };

  Dims od = d;
  od[idx] = outer;
  Tensor3 out(od);
  for (std::size_t i = 0; i < od[0]; ++i)
    for (std::size_t j = 0; j < od[1]; ++j)
      for (std::size_t k = 0; k < od[2]; ++k) {
        double s = 0.0;
        for (std::size_t q = 0; q < inner; ++q) {
          if (mode == 1) s += t(q, j, k) * coef(i, q);
          if (mode == 2) s += t(i, q, k) * coef(j, q);
          if (mode == 3) s += t(i, j, q) * coef(k, q);
        }
        out(i, j, k) = s;
      }
  return out;
}

double likelihood(std::span<const double> a, std::span<const double> theta, const LinkSpec& link,
                  std::span<const double> weights, LikelihoodOutputs out) {
  double loss = 0.0;
  for (std::size_t e = 0; e < a.size(); ++e) {
    const double w = weights.empty() ? 1.0 : weights[e];
    if (w == 0.0) {
      if (!out.grad.empty()) out.grad[e] = 0.0;
      if (!out.curvature.empty()) out.curvature[e] = 0.0;
      continue;
    }
    const EntryTerms t = entry_terms(link, a[e], theta[e]);
    loss += w * t.loss;
    if (!out.grad.empty()) out.grad[e] = w * t.d1;
    if (!out.curvature.empty()) out.curvature[e] = w * t.d2;
  }
  return loss;
}

double likelihood_clipped(std::span<const double> a, std::span<const double> theta,
                          const LinkSpec& link, std::span<const double> weights, double clip) {
  double loss = 0.0;
  for (std::size_t e = 0; e < a.size(); ++e) {
    const double w = weights.empty() ? 1.0 : weights[e];
    if (w != 0.0) loss += w * entry_loss_clipped(link, a[e], theta[e], clip);
  }
  return loss;
}

Vector core_gradient(const Tensor3& grad, const std::array<Matrix, 3>& frames) {
  const Dims& d = grad.dims();
  Vector g = Vector::Zero(frames[0].cols() * frames[1].cols() * frames[2].cols());
  for (std::size_t i = 0; i < d[0]; ++i)
    for (std::size_t j = 0; j < d[1]; ++j)
      for (std::size_t k = 0; k < d[2]; ++k) {
        const double v = grad(i, j, k);
        if (v != 0.0) g += v * design_row(frames, i, j, k);
      }
  return g;
}

Matrix core_hessian(const Tensor3& curvature, const std::array<Matrix, 3>& frames) {
  const Dims& d = curvature.dims();
  const auto p = frames[0].cols() * frames[1].cols() * frames[2].cols();
  Matrix h = Matrix::Zero(p, p);
  for (std::size_t i = 0; i < d[0]; ++i)
    for (std::size_t j = 0; j < d[1]; ++j)
      for (std::size_t k = 0; k < d[2]; ++k) {
        const double w = curvature(i, j, k);
        if (w == 0.0) continue;
        const Vector x = design_row(frames, i, j, k);
        h.noalias() += w * x * x.transpose();
      }
  return h;
}

SampledCoreTerms sampled_core_terms(const Tensor3& a, std::span<const std::size_t> entries,
                                    const std::array<Matrix, 3>& frames, const Vector& core,
                                    const LinkSpec& link) {
  const Dims& d = a.dims();
  const auto p = core.size();
  SampledCoreTerms out;
  out.grad = Vector::Zero(p);
  out.hessian = Matrix::Zero(p, p);
  for (const std::size_t e : entries) {
    const std::size_t k = e % d[2];
    const std::size_t j = (e / d[2]) % d[1];
    const std::size_t i = e / (d[1] * d[2]);
    const Vector x = design_row(frames, i, j, k);
    const EntryTerms t = entry_terms(link, a.values()[e], x.dot(core));
    out.loss += t.loss;
    out.grad += t.d1 * x;
    out.hessian.noalias() += t.d2 * x * x.transpose();
  }
  return out;
}

}  // namespace hlsm::kernels::serial
