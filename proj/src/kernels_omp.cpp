#include "hlsm/errors.hpp"
#include "hlsm/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <numeric>

namespace hlsm::kernels::omp {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstRowMap = Eigen::Map<const RowMat>;
using RowMap = Eigen::Map<RowMat>;

constexpr Eigen::Index kColumnChunk = 1024;
constexpr std::size_t kSampleChunk = 1024;

std::size_t chunk_count(std::size_t n, std::size_t chunk) { return (n + chunk - 1) / chunk; }

/// Rows U_ia U_ia' laid out as a·r + a'.
Matrix squared_khatri_rao(const Matrix& u) {
  const auto r = u.cols();
  Matrix p(u.rows(), r * r);
  for (Eigen::Index a = 0; a < r; ++a)
    for (Eigen::Index b = 0; b < r; ++b) p.col(a * r + b) = u.col(a).cwiseProduct(u.col(b));
  return p;
}

void fill_design_row(const std::array<Matrix, 3>& f, std::size_t i, std::size_t j, std::size_t k,
                     double* x) {
  const auto r1 = f[0].cols(), r2 = f[1].cols(), r3 = f[2].cols();
  const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j),
             kk = static_cast<Eigen::Index>(k);
  for (Eigen::Index a = 0; a < r1; ++a) {
    const double ua = f[0](ii, a);
    for (Eigen::Index b = 0; b < r2; ++b) {
      const double uv = ua * f[1](jj, b);
      for (Eigen::Index c = 0; c < r3; ++c) *x++ = uv * f[2](kk, c);
    }
  }
}

}  // namespace

Tensor3 mode_product(const Tensor3& t, const Matrix& m, int mode, bool transpose_m) {
  const Dims& d = t.dims();
  if (mode < 1 || mode > 3) throw DimensionError("mode_product: mode must be 1, 2 or 3");
  const auto idx = static_cast<std::size_t>(mode - 1);
  const Matrix coef = transpose_m ? Matrix(m.transpose()) : m;  // outer × inner
  if (static_cast<std::size_t>(coef.cols()) != d[idx]) {
    throw DimensionError("mode_product: matrix has " + std::to_string(coef.cols()) +
                         " columns, tensor mode " + std::to_string(mode) + " has size " +
                         std::to_string(d[idx]));
  }
  const auto p = static_cast<std::size_t>(coef.rows());
  Dims od = d;
  od[idx] = p;
  Tensor3 out(od);
  const auto n1 = static_cast<Eigen::Index>(d[0]), n2 = static_cast<Eigen::Index>(d[1]),
             n3 = static_cast<Eigen::Index>(d[2]), pp = static_cast<Eigen::Index>(p);

  if (mode == 1) {
    ConstRowMap in(t.data(), n1, n2 * n3);
    RowMap res(out.data(), pp, n2 * n3);
    const Eigen::Index cols = n2 * n3;
    const Eigen::Index chunks = (cols + kColumnChunk - 1) / kColumnChunk;
#pragma omp parallel for schedule(static)
    for (Eigen::Index c = 0; c < chunks; ++c) {
      const Eigen::Index c0 = c * kColumnChunk;
      const Eigen::Index w = std::min(kColumnChunk, cols - c0);
      res.middleCols(c0, w).noalias() = coef * in.middleCols(c0, w);
    }
  } else if (mode == 2) {
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < n1; ++i) {
      ConstRowMap slice(t.data() + i * n2 * n3, n2, n3);
      RowMap res(out.data() + i * pp * n3, pp, n3);
      res.noalias() = coef * slice;
    }
  } else {
    ConstRowMap in(t.data(), n1 * n2, n3);
    RowMap res(out.data(), n1 * n2, pp);
    const Eigen::Index rows = n1 * n2;
    const Eigen::Index chunks = (rows + kColumnChunk - 1) / kColumnChunk;
#pragma omp parallel for schedule(static)
    for (Eigen::Index c = 0; c < chunks; ++c) {
      const Eigen::Index r0 = c * kColumnChunk;
      const Eigen::Index h = std::min(kColumnChunk, rows - r0);
      res.middleRows(r0, h).noalias() = in.middleRows(r0, h) * coef.transpose();
    }
  }
  return out;
}

double likelihood(std::span<const double> a, std::span<const double> theta, const LinkSpec& link,
                  std::span<const double> weights, LikelihoodOutputs out) {
  const std::size_t n = a.size();
  const std::size_t chunks = chunk_count(n, kReduceChunk);
  std::vector<double> partial(chunks, 0.0);
  const bool want_grad = !out.grad.empty();
  const bool want_curv = !out.curvature.empty();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kReduceChunk;
    const std::size_t hi = std::min(n, lo + kReduceChunk);
    double s = 0.0;
    for (std::size_t e = lo; e < hi; ++e) {
      const double w = weights.empty() ? 1.0 : weights[e];
      if (w == 0.0) {
        if (want_grad) out.grad[e] = 0.0;
        if (want_curv) out.curvature[e] = 0.0;
        continue;
      }
      const EntryTerms t = entry_terms(link, a[e], theta[e]);
      s += w * t.loss;
      if (want_grad) out.grad[e] = w * t.d1;
      if (want_curv) out.curvature[e] = w * t.d2;
    }
    partial[static_cast<std::size_t>(c)] = s;
  }
  return std::accumulate(partial.begin(), partial.end(), 0.0);
}

double likelihood_clipped(std::span<const double> a, std::span<const double> theta,
                          const LinkSpec& link, std::span<const double> weights, double clip) {
  const std::size_t n = a.size();
  const std::size_t chunks = chunk_count(n, kReduceChunk);
  std::vector<double> partial(chunks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kReduceChunk;
    const std::size_t hi = std::min(n, lo + kReduceChunk);
    double s = 0.0;
    for (std::size_t e = lo; e < hi; ++e) {
      const double w = weights.empty() ? 1.0 : weights[e];
      if (w != 0.0) s += w * entry_loss_clipped(link, a[e], theta[e], clip);
    }
    partial[static_cast<std::size_t>(c)] = s;
  }
  return std::accumulate(partial.begin(), partial.end(), 0.0);
}

Vector core_gradient(const Tensor3& grad, const std::array<Matrix, 3>& frames) {
  Tensor3 t = mode_product(grad, frames[0], 1, true);
  t = mode_product(t, frames[1], 2, true);
  t = mode_product(t, frames[2], 3, true);
  return Eigen::Map<const Vector>(t.data(), static_cast<Eigen::Index>(t.size()));
}

Matrix core_hessian(const Tensor3& curvature, const std::array<Matrix, 3>& frames) {
  const auto r1 = frames[0].cols(), r2 = frames[1].cols(), r3 = frames[2].cols();
  Tensor3 t = mode_product(curvature, squared_khatri_rao(frames[0]), 1, true);
  t = mode_product(t, squared_khatri_rao(frames[1]), 2, true);
  t = mode_product(t, squared_khatri_rao(frames[2]), 3, true);

  const auto p = r1 * r2 * r3;
  Matrix h(p, p);
  for (Eigen::Index a = 0; a < r1; ++a)
    for (Eigen::Index b = 0; b < r2; ++b)
      for (Eigen::Index c = 0; c < r3; ++c) {
        const Eigen::Index row = (a * r2 + b) * r3 + c;
        for (Eigen::Index a2 = 0; a2 < r1; ++a2)
          for (Eigen::Index b2 = 0; b2 < r2; ++b2)
            for (Eigen::Index c2 = 0; c2 < r3; ++c2) {
              const Eigen::Index col = (a2 * r2 + b2) * r3 + c2;
              h(row, col) = t(static_cast<std::size_t>(a * r1 + a2),
                              static_cast<std::size_t>(b * r2 + b2),
                              static_cast<std::size_t>(c * r3 + c2));
            }
      }
  return h;
}

SampledCoreTerms sampled_core_terms(const Tensor3& a, std::span<const std::size_t> entries,
                                    const std::array<Matrix, 3>& frames, const Vector& core,
                                    const LinkSpec& link) {
  const Dims& d = a.dims();
  const auto p = core.size();
  const std::size_t chunks = chunk_count(entries.size(), kSampleChunk);
  std::vector<SampledCoreTerms> partial(chunks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kSampleChunk;
    const std::size_t hi = std::min(entries.size(), lo + kSampleChunk);
    const auto rows = static_cast<Eigen::Index>(hi - lo);
    RowMat x(rows, p);
    Vector d1(rows), d2(rows);
    double loss = 0.0;
    for (std::size_t s = lo; s < hi; ++s) {
      const std::size_t e = entries[s];
      const std::size_t k = e % d[2];
      const std::size_t j = (e / d[2]) % d[1];
      const std::size_t i = e / (d[1] * d[2]);
      const auto row = static_cast<Eigen::Index>(s - lo);
      fill_design_row(frames, i, j, k, x.row(row).data());
      const EntryTerms t = entry_terms(link, a.values()[e], x.row(row).dot(core));
      loss += t.loss;
      d1(row) = t.d1;
      d2(row) = t.d2;
    }
    SampledCoreTerms& out = partial[static_cast<std::size_t>(c)];
    out.loss = loss;
    out.grad = x.transpose() * d1;
    out.hessian = x.transpose() * d2.asDiagonal() * x;
  }
  SampledCoreTerms total;
  total.grad = Vector::Zero(p);
  total.hessian = Matrix::Zero(p, p);
  for (const auto& part : partial) {
    total.loss += part.loss;
    total.grad += part.grad;
    total.hessian += part.hessian;
  }
  return total;
}

}  // namespace hlsm::kernels::omp
