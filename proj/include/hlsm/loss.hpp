#pragma once

#include "hlsm/link.hpp"
#include "hlsm/tensor.hpp"

#include <compare>
#include <vector>

namespace hlsm {

struct Index3 {
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t k = 0;

  friend auto operator<=>(const Index3&, const Index3&) = default;
};

enum class MaskMode {
  all,             // every entry
  sym12_upper,     // i1 < i2, any i3
  sym_full_upper,  // i1 < i2 < i3
  custom,          // every entry except the listed ones (excluded / held_out)
};

/// Which entries enter the likelihood. `excluded` and `held_out` are removed
/// from whatever the base mode includes.
struct ObservationMask {
  MaskMode mode = MaskMode::all;
  std::vector<Index3> excluded;
  std::vector<Index3> held_out;

  static ObservationMask all() { return {}; }
  static ObservationMask of(MaskMode m) { return {m, {}, {}}; }

  /// Range checks and excluded ∩ held_out = ∅.
  void validate(const Dims& dims) const;
  bool includes_everything() const;
  /// 0/1 weight per entry in tensor layout.
  std::vector<double> weights(const Dims& dims) const;
  std::size_t included_count(const Dims& dims) const;
};

/// Index symmetry of an adjacency tensor: sym12 means A_ijk = A_jik,
/// symfull means invariance under all permutations of (i, j, k).
enum class Symmetry { none, sym12, symfull };

std::string symmetry_name(Symmetry s);
Symmetry parse_symmetry(const std::string& s);
/// Mask mode that keeps one representative per symmetry orbit.
MaskMode canonical_mask_mode(Symmetry s);
/// Representative test: i < j for sym12, i < j < k for symfull, always for none.
bool is_canonical(const Index3& x, Symmetry s);
/// Distinct indices in the symmetry orbit of x (x itself first).
std::vector<Index3> symmetry_orbit(const Index3& x, Symmetry s);

std::string mask_mode_name(MaskMode m);
MaskMode parse_mask_mode(const std::string& s);

/// Throws DataError unless every included entry of `a` is 0 or 1.
void check_binary(const Tensor3& a, const ObservationMask& mask);

inline constexpr double kDefaultProbabilityClip = 1e-12;

/// −Σ [A log g(Θ) + (1−A) log(1−g(Θ))] over the included entries, with
/// probabilities clipped to [clip, 1 − clip].
double nll(const Tensor3& a, const Tensor3& theta, const LinkSpec& link,
           const ObservationMask& mask = {}, double clip = kDefaultProbabilityClip);

/// Entrywise derivative of nll in Θ; zero on excluded entries.
Tensor3 nll_grad(const Tensor3& a, const Tensor3& theta, const LinkSpec& link,
                 const ObservationMask& mask = {});

}  // namespace hlsm
