#pragma once

// Data-parallel inner loops of the fitter.
//
// Every kernel exists twice. `serial::` is the plain loop-nest reference kept
// for testing; `omp::` is what the library calls. The OpenMP versions split
// work into fixed-size chunks and reduce partial sums in chunk order, so the
// result does not depend on the number of threads.

#include "hlsm/link.hpp"
#include "hlsm/tensor.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace hlsm::kernels {

inline constexpr std::size_t kReduceChunk = 4096;

/// Optional per-entry outputs of a likelihood sweep; empty spans are skipped.
/// Both are multiplied by the entry weight.
struct LikelihoodOutputs {
  std::span<double> grad;
  std::span<double> curvature;
};

/// Loss, gradient and Hessian of the core problem restricted to a sample of
/// entries, vectorized in the core's lexicographic layout.
struct SampledCoreTerms {
  double loss = 0.0;
  Vector grad;
  Matrix hessian;
};

namespace serial {

Tensor3 mode_product(const Tensor3& t, const Matrix& m, int mode, bool transpose_m);

/// Σ w·ℓ(a, θ) over all entries. `weights` empty means weight 1 everywhere.
double likelihood(std::span<const double> a, std::span<const double> theta,
                  const LinkSpec& link, std::span<const double> weights,
                  LikelihoodOutputs out = {});

double likelihood_clipped(std::span<const double> a, std::span<const double> theta,
                          const LinkSpec& link, std::span<const double> weights, double clip);

/// Σ_ijk g_ijk · (u_i ⊗ v_j ⊗ w_k), built from explicit design rows.
Vector core_gradient(const Tensor3& grad, const std::array<Matrix, 3>& frames);

/// Σ_ijk c_ijk · x_ijk x_ijkᵀ with x_ijk = u_i ⊗ v_j ⊗ w_k.
Matrix core_hessian(const Tensor3& curvature, const std::array<Matrix, 3>& frames);

SampledCoreTerms sampled_core_terms(const Tensor3& a, std::span<const std::size_t> entries,
                                    const std::array<Matrix, 3>& frames,
                                    const Vector& core, const LinkSpec& link);

}  // namespace serial

namespace omp {

Tensor3 mode_product(const Tensor3& t, const Matrix& m, int mode, bool transpose_m);

double likelihood(std::span<const double> a, std::span<const double> theta,
                  const LinkSpec& link, std::span<const double> weights,
                  LikelihoodOutputs out = {});

double likelihood_clipped(std::span<const double> a, std::span<const double> theta,
                          const LinkSpec& link, std::span<const double> weights, double clip);

/// grad ×₁ Uᵀ ×₂ Vᵀ ×₃ Wᵀ, flattened.
Vector core_gradient(const Tensor3& grad, const std::array<Matrix, 3>& frames);

/// Structured assembly: curvature ×₁ P_Uᵀ ×₂ P_Vᵀ ×₃ P_Wᵀ where
/// P_U[i, a·r + a'] = U_ia U_ia'. Costs O(n³ r²) instead of O(n³ r⁶).
Matrix core_hessian(const Tensor3& curvature, const std::array<Matrix, 3>& frames);

SampledCoreTerms sampled_core_terms(const Tensor3& a, std::span<const std::size_t> entries,
                                    const std::array<Matrix, 3>& frames,
                                    const Vector& core, const LinkSpec& link);

}  // namespace omp

}  // namespace hlsm::kernels
