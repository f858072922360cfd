#include "hlsm/linalg.hpp"

#include "hlsm/errors.hpp"

#include <cmath>

namespace hlsm {

void canonicalize_signs(Matrix& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      const double a = std::abs(m(r, c));
      if (a > best_abs) {
        best_abs = a;
        best = r;
      }
    }
    if (m.rows() > 0 && m(best, c) < 0.0) m.col(c) *= -1.0;
  }
}

LeftSingular top_left_singular(const Matrix& m, std::size_t r) {
  const auto rows = static_cast<std::size_t>(m.rows());
  if (r > rows) {
    throw DimensionError("top_left_singular: rank " + std::to_string(r) +
                         " exceeds row count " + std::to_string(rows));
  }
  const auto rr = static_cast<Eigen::Index>(r);
  LeftSingular out;
  if (m.cols() > 4 * m.rows()) {
    Matrix gram = Matrix::Zero(m.rows(), m.rows());
    gram.selfadjointView<Eigen::Lower>().rankUpdate(m);
    gram = gram.selfadjointView<Eigen::Lower>();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    // eigenvalues ascending
    out.vectors = eig.eigenvectors().rightCols(rr).rowwise().reverse();
    out.values = eig.eigenvalues().tail(rr).reverse().cwiseMax(0.0).cwiseSqrt();
  } else {
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU);
    out.vectors = svd.matrixU().leftCols(rr);
    out.values = svd.singularValues().head(rr);
  }
  canonicalize_signs(out.vectors);
  return out;
}

Vector singular_values(const Matrix& m) {
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues();
}

double orthonormality_error(const Matrix& f) {
  return (f.transpose() * f - Matrix::Identity(f.cols(), f.cols())).norm();
}

Matrix projector(const Matrix& f) { return f * f.transpose(); }

}  // namespace hlsm
