#pragma once

#include "hlsm/link.hpp"
#include "hlsm/loss.hpp"
#include "hlsm/tensor.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hlsm {

enum class InitKind { hosvd, hooi, provided, random };

struct InitSpec {
  InitKind kind = InitKind::hosvd;
  int hooi_iters = 10;
  std::optional<TuckerFactors> provided;  // frames used when kind == provided; core ignored
  std::uint64_t seed = 0;                 // kind == random
};

enum class CoreSolverKind { newton, subsampled };

struct CoreSolverSpec {
  CoreSolverKind kind = CoreSolverKind::newton;
  int max_it = 50;
  double grad_tol = 1e-8;
  double frac = 0.1;
  std::uint64_t seed = 0;
  int full_final_iters = 2;
};

/// Factors whose gradients are averaged and kept identical during the fit.
enum class TieMode { none, modes12, all };

struct FitConfig {
  Dims ranks{1, 1, 1};
  LinkSpec link;
  // Unset tuning parameters are filled in by default_tuning.
  // The orthonormal frame of mode k moves by eta · n1n2n3 / n_k times its
  // gradient, the step eta takes on √n_k-scaled frames.
  std::optional<double> eta;
  std::optional<std::array<double, 3>> delta;
  std::optional<double> xi;
  double eta_scale = 1.0;  // multiplies the default step size only
  int max_iter = 100;
  double tol = 1e-8;
  InitSpec init;
  CoreSolverSpec core_solver;
  bool step_safeguard = true;
  TieMode tie = TieMode::none;
  ObservationMask mask;
  std::uint64_t seed = 0;

  void validate(const Dims& dims) const;
};

struct Diagnostics {
  std::array<double, 3> incoherence{};
  double condition_number = 0.0;
  double theta_inf_norm = 0.0;
  double gamma_alpha = 0.0;
  double beta_alpha = 0.0;
  double zeta_alpha = 0.0;
  double err_r_bound = 0.0;
  double thm1_rate_expr = 0.0;
};

struct Tuning {
  std::array<double, 3> delta{};
  double xi = 0.0;
  double eta = 0.0;
};

struct FitResult {
  TuckerFactors factors;
  Tensor3 theta_hat;
  std::vector<double> loss_trajectory;        // index 0: after initialization
  std::vector<double> error_trajectory;       // Σ_k d_f², when truth is given
  std::vector<double> projection_trajectory;  // Σ_k ‖UUᵀ − U*U*ᵀ‖_F², when truth is given
  std::vector<double> orthonormality_trajectory;  // max_k ‖FᵀF − I‖_F
  Diagnostics diagnostics;
  Tuning tuning;         // values actually used at the start
  double final_eta = 0.0;  // after any safeguard halvings
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;
  std::vector<std::string> warnings;
};

struct CoreSolveResult {
  Tensor3 core;
  double loss = 0.0;
  int iterations = 0;
  bool converged = false;
  bool on_boundary = false;
};

/// Exact loss of C ×₁ U ×₂ V ×₃ W with its gradient and Hessian in vec(C),
/// the core taken from `f.core`.
struct CoreTerms {
  double loss = 0.0;
  Vector grad;
  Matrix hessian;
};
CoreTerms core_terms(const Tensor3& a, const TuckerFactors& f, const LinkSpec& link,
                     const ObservationMask& mask = {});

/// Exact (unclipped) loss of C ×₁ U ×₂ V ×₃ W.
double tucker_loss(const Tensor3& a, const TuckerFactors& f, const LinkSpec& link,
                   const ObservationMask& mask = {});

/// ∇ of ℓ(C ×₁ U ×₂ V ×₃ W) with respect to the frame of `mode`, given the
/// entrywise gradient tensor g.
Matrix factor_gradient(const Tensor3& g, const TuckerFactors& f, int mode);

/// Top-r left singular frame of m. `mode` only labels the error message.
Matrix svd_retract(const Matrix& m, std::size_t r, int mode = 0);

/// Reg_δ: rows longer than δ are shrunk onto the δ-sphere.
Matrix regularize_rows(const Matrix& u, double delta);

/// argmin over ‖C‖_F ≤ ξ of the likelihood with frames fixed. `frames.core`
/// is the warm start; `entries`, when non-empty, restricts the objective to
/// those flat offsets.
CoreSolveResult solve_core(const Tensor3& a, const TuckerFactors& frames, const LinkSpec& link,
                           const ObservationMask& mask, double xi, const CoreSolverSpec& opts,
                           const std::vector<std::size_t>& entries = {});

/// Tuning from the initial frames and the unconstrained initial core.
Tuning default_tuning(const Tensor3& a, const Dims& ranks, const TuckerFactors& init);

/// Incoherence √n · max_i ‖e_iᵀU‖ / ‖U‖_F.
double incoherence(const Matrix& u);

Diagnostics model_diagnostics(const TuckerFactors& f, const LinkSpec& link);

/// Initial frames per the config (no core solve).
std::array<Matrix, 3> initial_frames(const Tensor3& a, const FitConfig& cfg);

FitResult fit(const Tensor3& a, const FitConfig& cfg,
              const std::optional<TuckerFactors>& truth = std::nullopt);

std::string init_kind_name(InitKind k);
InitKind parse_init_kind(const std::string& s);

}  // namespace hlsm
