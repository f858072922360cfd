#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace hlsm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Dims = std::array<std::size_t, 3>;

/// Dense third-order tensor, lexicographic layout with the third index fastest.
///
/// Holds adjacency tensors as well as real parameter tensors. Entries are
/// checked for finiteness when the tensor is built from a value array.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(Dims dims, double fill = 0.0);
  Tensor3(Dims dims, std::vector<double> values);

  const Dims& dims() const noexcept { return dims_; }
  /// 1-based mode accessor, matching the matricization modes.
  std::size_t dim(int mode) const;
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  std::size_t offset(std::size_t i, std::size_t j, std::size_t k) const noexcept {
    return (i * dims_[1] + j) * dims_[2] + k;
  }
  double& operator()(std::size_t i, std::size_t j, std::size_t k) noexcept {
    return values_[offset(i, j, k)];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const noexcept {
    return values_[offset(i, j, k)];
  }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  const double* data() const noexcept { return values_.data(); }
  double* data() noexcept { return values_.data(); }

  double frobenius_norm() const;
  double max_abs() const;

  Tensor3& operator*=(double s);
  friend Tensor3 operator*(double s, Tensor3 t) { return t *= s; }
  friend bool operator==(const Tensor3&, const Tensor3&) = default;

 private:
  Dims dims_{0, 0, 0};
  std::vector<double> values_;
};

double frobenius_distance(const Tensor3& a, const Tensor3& b);

/// Core tensor plus three column-orthonormal frames: Θ = C ×₁ U ×₂ V ×₃ W.
struct TuckerFactors {
  Tensor3 core;
  std::array<Matrix, 3> factors;

  Dims ranks() const { return core.dims(); }
  Dims dims() const;
  /// Throws DimensionError on shape mismatch; with ortho_tol > 0 also checks
  /// ‖FᵀF − I‖_F ≤ ortho_tol for every frame.
  void validate(double ortho_tol = 0.0) const;
};

/// Unfolding along `mode` (1, 2 or 3).
///   mode 1: row i1, column i2·n3 + i3
///   mode 2: row i2, column i1·n3 + i3
///   mode 3: row i3, column i1·n2 + i2
Matrix matricize(const Tensor3& t, int mode);
Tensor3 fold(const Matrix& m, int mode, const Dims& dims);

/// [t ×_mode m]: contracts index `mode` of t with the columns of m.
Tensor3 mode_product(const Tensor3& t, const Matrix& m, int mode);
/// Same, with mᵀ (saves materializing the transpose of tall frames).
Tensor3 mode_product_transposed(const Tensor3& t, const Matrix& m, int mode);

Tensor3 tucker_compose(const TuckerFactors& f);
/// t ×₁ Uᵀ ×₂ Vᵀ ×₃ Wᵀ.
Tensor3 project_to_core(const Tensor3& t, const std::array<Matrix, 3>& frames);

TuckerFactors hosvd(const Tensor3& t, const Dims& ranks);
TuckerFactors hooi(const Tensor3& t, const Dims& ranks, int max_iter,
                   std::vector<double>* error_history = nullptr);

struct SpectralBounds {
  double lambda_max = 0.0;
  double lambda_min = 0.0;
};

/// Λ̄ = max_k ‖M_k(t)‖, Λ̲ = min_k σ_{r_k}(M_k(t)). Without declared ranks the
/// numerical rank of each unfolding is used.
SpectralBounds spectral_bounds(const Tensor3& t);
SpectralBounds spectral_bounds(const Tensor3& t, const Dims& declared_ranks);

}  // namespace hlsm
