#include "hlsm/tensor.hpp"

#include "hlsm/errors.hpp"
#include "hlsm/kernels.hpp"
#include "hlsm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hlsm {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::size_t product(const Dims& d) { return d[0] * d[1] * d[2]; }

void check_mode(int mode) {
  if (mode < 1 || mode > 3) throw DimensionError("mode must be 1, 2 or 3, got " + std::to_string(mode));
}

std::string dims_str(const Dims& d) {
  return std::to_string(d[0]) + "x" + std::to_string(d[1]) + "x" + std::to_string(d[2]);
}

void check_ranks(const Dims& dims, const Dims& ranks) {
  for (std::size_t k = 0; k < 3; ++k) {
    if (ranks[k] < 1 || ranks[k] > dims[k]) {
      throw DimensionError("rank " + std::to_string(ranks[k]) + " infeasible for mode " +
                           std::to_string(k + 1) + " of size " + std::to_string(dims[k]));
    }
  }
}

}  // namespace

Tensor3::Tensor3(Dims dims, double fill) : dims_(dims), values_(product(dims), fill) {}

Tensor3::Tensor3(Dims dims, std::vector<double> values) : dims_(dims), values_(std::move(values)) {
  if (values_.size() != product(dims_)) {
    throw DimensionError("Tensor3: " + std::to_string(values_.size()) + " values for dims " +
                         dims_str(dims_));
  }
  for (const double v : values_) {
    if (!std::isfinite(v)) throw DataError("Tensor3: non-finite entry");
  }
}

std::size_t Tensor3::dim(int mode) const {
  check_mode(mode);
  return dims_[static_cast<std::size_t>(mode - 1)];
}

double Tensor3::frobenius_norm() const {
  double s = 0.0;
  for (const double v : values_) s += v * v;
  return std::sqrt(s);
}

double Tensor3::max_abs() const {
  double m = 0.0;
  for (const double v : values_) m = std::max(m, std::abs(v));
  return m;
}

Tensor3& Tensor3::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

double frobenius_distance(const Tensor3& a, const Tensor3& b) {
  if (a.dims() != b.dims()) throw DimensionError("frobenius_distance: dims differ");
  double s = 0.0;
  for (std::size_t e = 0; e < a.size(); ++e) {
    const double d = a.values()[e] - b.values()[e];
    s += d * d;
  }
  return std::sqrt(s);
}

Dims TuckerFactors::dims() const {
  return {static_cast<std::size_t>(factors[0].rows()), static_cast<std::size_t>(factors[1].rows()),
          static_cast<std::size_t>(factors[2].rows())};
}

void TuckerFactors::validate(double ortho_tol) const {
  const Dims r = core.dims();
  for (std::size_t k = 0; k < 3; ++k) {
    if (static_cast<std::size_t>(factors[k].cols()) != r[k]) {
      throw DimensionError("TuckerFactors: factor " + std::to_string(k + 1) + " has " +
                           std::to_string(factors[k].cols()) + " columns, core mode has " +
                           std::to_string(r[k]));
    }
    if (ortho_tol > 0.0 && orthonormality_error(factors[k]) > ortho_tol) {
      throw DataError("TuckerFactors: factor " + std::to_string(k + 1) + " is not orthonormal");
    }
  }
}

Matrix matricize(const Tensor3& t, int mode) {
  check_mode(mode);
  const Dims& d = t.dims();
  const auto n1 = static_cast<Eigen::Index>(d[0]), n2 = static_cast<Eigen::Index>(d[1]),
             n3 = static_cast<Eigen::Index>(d[2]);
  if (mode == 1) return Eigen::Map<const RowMat>(t.data(), n1, n2 * n3);
  if (mode == 3) return Eigen::Map<const RowMat>(t.data(), n1 * n2, n3).transpose();
  Matrix m(n2, n1 * n3);
  for (Eigen::Index i = 0; i < n1; ++i)
    for (Eigen::Index j = 0; j < n2; ++j)
      for (Eigen::Index k = 0; k < n3; ++k)
        m(j, i * n3 + k) = t(static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                             static_cast<std::size_t>(k));
  return m;
}

Tensor3 fold(const Matrix& m, int mode, const Dims& dims) {
  check_mode(mode);
  const auto idx = static_cast<std::size_t>(mode - 1);
  const std::size_t cols = product(dims) / std::max<std::size_t>(dims[idx], 1);
  if (static_cast<std::size_t>(m.rows()) != dims[idx] || static_cast<std::size_t>(m.cols()) != cols) {
    throw DimensionError("fold: matrix " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                         " does not unfold dims " + dims_str(dims) + " at mode " +
                         std::to_string(mode));
  }
  const auto n1 = static_cast<Eigen::Index>(dims[0]), n2 = static_cast<Eigen::Index>(dims[1]),
             n3 = static_cast<Eigen::Index>(dims[2]);
  Tensor3 t(dims);
  if (mode == 1) {
    Eigen::Map<RowMat>(t.data(), n1, n2 * n3) = m;
  } else if (mode == 3) {
    Eigen::Map<RowMat>(t.data(), n1 * n2, n3) = m.transpose();
  } else {
    for (Eigen::Index i = 0; i < n1; ++i)
      for (Eigen::Index j = 0; j < n2; ++j)
        for (Eigen::Index k = 0; k < n3; ++k)
          t(static_cast<std::size_t>(i), static_cast<std::size_t>(j), static_cast<std::size_t>(k)) =
              m(j, i * n3 + k);
  }
  return t;
}

Tensor3 mode_product(const Tensor3& t, const Matrix& m, int mode) {
  check_mode(mode);
  return kernels::omp::mode_product(t, m, mode, false);
}

Tensor3 mode_product_transposed(const Tensor3& t, const Matrix& m, int mode) {
  check_mode(mode);
  return kernels::omp::mode_product(t, m, mode, true);
}

Tensor3 tucker_compose(const TuckerFactors& f) {
  f.validate();
  Tensor3 t = mode_product(f.core, f.factors[0], 1);
  t = mode_product(t, f.factors[1], 2);
  return mode_product(t, f.factors[2], 3);
}

Tensor3 project_to_core(const Tensor3& t, const std::array<Matrix, 3>& frames) {
  Tensor3 c = mode_product_transposed(t, frames[0], 1);
  c = mode_product_transposed(c, frames[1], 2);
  return mode_product_transposed(c, frames[2], 3);
}

TuckerFactors hosvd(const Tensor3& t, const Dims& ranks) {
  check_ranks(t.dims(), ranks);
  TuckerFactors f;
  for (int mode = 1; mode <= 3; ++mode) {
    const auto k = static_cast<std::size_t>(mode - 1);
    f.factors[k] = top_left_singular(matricize(t, mode), ranks[k]).vectors;
  }
  f.core = project_to_core(t, f.factors);
  return f;
}

TuckerFactors hooi(const Tensor3& t, const Dims& ranks, int max_iter,
                   std::vector<double>* error_history) {
  TuckerFactors f = hosvd(t, ranks);
  const double norm2 = std::pow(t.frobenius_norm(), 2);
  auto residual = [&](const Tensor3& core) {
    return std::sqrt(std::max(0.0, norm2 - std::pow(core.frobenius_norm(), 2)));
  };
  if (error_history) error_history->assign(1, residual(f.core));

  for (int it = 0; it < max_iter; ++it) {
    for (int mode = 1; mode <= 3; ++mode) {
      Tensor3 y = t;
      for (int other = 1; other <= 3; ++other) {
        if (other != mode) y = mode_product_transposed(y, f.factors[static_cast<std::size_t>(other - 1)], other);
      }
      const auto k = static_cast<std::size_t>(mode - 1);
      f.factors[k] = top_left_singular(matricize(y, mode), ranks[k]).vectors;
    }
    f.core = project_to_core(t, f.factors);
    if (error_history) error_history->push_back(residual(f.core));
  }
  return f;
}

namespace {

SpectralBounds spectral_bounds_impl(const Tensor3& t, const Dims* declared) {
  if (t.empty() || t.max_abs() == 0.0) {
    throw DegenerateInputError("spectral_bounds: zero tensor");
  }
  SpectralBounds b;
  b.lambda_min = std::numeric_limits<double>::infinity();
  for (int mode = 1; mode <= 3; ++mode) {
    const Vector s = singular_values(matricize(t, mode));
    b.lambda_max = std::max(b.lambda_max, s(0));
    Eigen::Index rank = 0;
    if (declared) {
      rank = static_cast<Eigen::Index>((*declared)[static_cast<std::size_t>(mode - 1)]);
      if (rank < 1 || rank > s.size()) throw DimensionError("spectral_bounds: declared rank out of range");
    } else {
      const double tol = s(0) * 1e-12 * static_cast<double>(std::max(s.size(), Eigen::Index{1}));
      while (rank < s.size() && s(rank) > tol) ++rank;
    }
    b.lambda_min = std::min(b.lambda_min, s(rank - 1));
  }
  return b;
}

}  // namespace

SpectralBounds spectral_bounds(const Tensor3& t) { return spectral_bounds_impl(t, nullptr); }

SpectralBounds spectral_bounds(const Tensor3& t, const Dims& declared_ranks) {
  return spectral_bounds_impl(t, &declared_ranks);
}

}  // namespace hlsm
