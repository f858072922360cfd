#pragma once

#include "hlsm/link.hpp"
#include "hlsm/loss.hpp"
#include "hlsm/tensor.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace hlsm {

/// Class label per layer, 0-based, with m classes.
struct LayerLabels {
  std::vector<int> labels;
  int m = 1;

  std::vector<std::size_t> sizes() const;
  /// Labels in [0, m) and every class nonempty.
  void validate() const;
};

/// One latent-space model per class: slice l of Θ is U_s C_s U_sᵀ with s = s_l.
/// Frames follow the n^{-1}UᵀU = I normalization.
struct MmlsmParams {
  std::vector<Matrix> frames;
  std::vector<Matrix> interactions;
  LayerLabels labels;
};

struct MmlsmAssembly {
  TuckerFactors factors;  // orthonormal frames (Q, Q, W), core absorbs the scalings
  Tensor3 theta;
  std::size_t rank = 0;  // numerical rank of the concatenated frames
};

/// Block-diagonal core with the label factor, re-expressed in orthonormal
/// frames. Throws RankDeficiencyError if the concatenated frames have
/// numerical rank below `declared_rank`.
MmlsmAssembly mmlsm_assemble(const MmlsmParams& p, std::optional<std::size_t> declared_rank = {});

struct SyntheticTruth {
  std::string model;
  Tensor3 theta_star;
  TuckerFactors factors_star;  // orthonormal frames
  LinkSpec link;
  Symmetry symmetry = Symmetry::none;
  std::optional<LayerLabels> labels;
  std::vector<std::size_t> change_points;  // 1-based, starts with 1
};

struct Simulated {
  Tensor3 adjacency;
  SyntheticTruth truth;
};

/// Bernoulli(g(Θ)) draws on the canonical entries of `sym`, mirrored to the
/// rest of each orbit; entries with repeated indices in a symmetric pattern
/// stay 0.
Tensor3 sample_adjacency(const Tensor3& theta, const LinkSpec& link, Symmetry sym, std::mt19937_64& rng);

/// √n times the left singular vectors of an n×r matrix with N(0.5, 1) entries.
Matrix latent_positions(std::size_t n, std::size_t r, std::mt19937_64& rng);

Simulated simulate_general(std::size_t n, std::size_t r, double sigma, std::uint64_t seed);

struct MmlsmOptions {
  bool distinct_frames = false;  // one frame per class instead of a shared one
  double core_sign = 1.0;        // C_j = core_sign · E_j E_jᵀ
};

Simulated simulate_mmlsm(std::size_t n, std::size_t layers, int m, std::size_t r, std::uint64_t seed,
                         const LinkSpec& link, const MmlsmOptions& opts = {});

Simulated simulate_hypergraph(std::size_t n, std::size_t r, std::uint64_t seed, const LinkSpec& link);

/// m segments: t = 1 plus m − 1 distinct change points drawn from {2, …, T}.
Simulated simulate_dynamic(std::size_t n, std::size_t t_len, int m, std::size_t q, std::uint64_t seed,
                           const LinkSpec& link);

/// Per-segment parameters of a dynamic network, for routing through mmlsm_assemble.
MmlsmParams dynamic_params(std::size_t n, std::size_t t_len, int m, std::size_t q, std::mt19937_64& rng,
                           std::vector<std::size_t>* change_points);

}  // namespace hlsm
