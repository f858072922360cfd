#include "hlsm/analysis.hpp"
#include "hlsm/errors.hpp"
#include "hlsm/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace hlsm {

MdsResult classical_mds(const Matrix& rows, int dims) {
  const Eigen::Index n = rows.rows();
  if (dims < 1 || dims > n) {
    throw DimensionError("classical_mds: dims must lie in [1, " + std::to_string(n) + "]");
  }
  Matrix d2(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) d2(i, j) = (rows.row(i) - rows.row(j)).squaredNorm();
  const Matrix j = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
  const Matrix b = -0.5 * j * d2 * j;

  Eigen::SelfAdjointEigenSolver<Matrix> eig(b);
  if (eig.info() != Eigen::Success) throw NumericalError("classical_mds: eigendecomposition failed");
  // eigenvalues come ascending
  const Vector lambda = eig.eigenvalues().tail(dims).reverse();
  Matrix vecs = eig.eigenvectors().rightCols(dims).rowwise().reverse();
  canonicalize_signs(vecs);

  MdsResult res;
  res.eigenvalues = lambda;
  const double scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
  res.coords.resize(n, dims);
  for (int c = 0; c < dims; ++c) {
    double l = lambda(c);
    if (l < 0.0) {
      if (l < -1e-9 * scale) res.clipped = true;
      l = 0.0;
    }
    res.coords.col(c) = vecs.col(c) * std::sqrt(l);
  }
  return res;
}

}  // namespace hlsm
