#include "hlsm/loss.hpp"

#include "hlsm/errors.hpp"
#include "hlsm/kernels.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace hlsm {

namespace {

bool base_includes(MaskMode m, std::size_t i, std::size_t j, std::size_t k) {
  switch (m) {
    case MaskMode::sym12_upper:
      return i < j;
    case MaskMode::sym_full_upper:
      return i < j && j < k;
    case MaskMode::all:
    case MaskMode::custom:
      return true;
  }
  return true;
}

void check_range(const Index3& x, const Dims& d, const char* what) {
  if (x.i >= d[0] || x.j >= d[1] || x.k >= d[2]) {
    throw DimensionError(std::string("mask: ") + what + " index out of range");
  }
}

void check_same_dims(const Tensor3& a, const Tensor3& theta) {
  if (a.dims() != theta.dims()) throw DimensionError("adjacency and theta dims differ");
}

}  // namespace

void ObservationMask::validate(const Dims& dims) const {
  for (const auto& x : excluded) check_range(x, dims, "excluded");
  for (const auto& x : held_out) check_range(x, dims, "held_out");
  const std::set<Index3> ex(excluded.begin(), excluded.end());
  for (const auto& x : held_out) {
    if (ex.count(x)) throw DataError("mask: an index is both excluded and held out");
  }
}

bool ObservationMask::includes_everything() const {
  return (mode == MaskMode::all || mode == MaskMode::custom) && excluded.empty() && held_out.empty();
}

std::vector<double> ObservationMask::weights(const Dims& dims) const {
  validate(dims);
  std::vector<double> w(dims[0] * dims[1] * dims[2], 0.0);
  std::size_t e = 0;
  for (std::size_t i = 0; i < dims[0]; ++i)
    for (std::size_t j = 0; j < dims[1]; ++j)
      for (std::size_t k = 0; k < dims[2]; ++k, ++e) w[e] = base_includes(mode, i, j, k) ? 1.0 : 0.0;
  auto drop = [&](const Index3& x) { w[(x.i * dims[1] + x.j) * dims[2] + x.k] = 0.0; };
  std::for_each(excluded.begin(), excluded.end(), drop);
  std::for_each(held_out.begin(), held_out.end(), drop);
  return w;
}

std::size_t ObservationMask::included_count(const Dims& dims) const {
  const auto w = weights(dims);
  return static_cast<std::size_t>(std::count(w.begin(), w.end(), 1.0));
}

std::string symmetry_name(Symmetry s) {
  switch (s) {
    case Symmetry::none:
      return "none";
    case Symmetry::sym12:
      return "sym12";
    case Symmetry::symfull:
      return "symfull";
  }
  return "none";
}

Symmetry parse_symmetry(const std::string& s) {
  if (s == "none") return Symmetry::none;
  if (s == "sym12") return Symmetry::sym12;
  if (s == "symfull") return Symmetry::symfull;
  throw DataError("unknown symmetry tag '" + s + "' (expected none, sym12 or symfull)");
}

MaskMode canonical_mask_mode(Symmetry s) {
  switch (s) {
    case Symmetry::sym12:
      return MaskMode::sym12_upper;
    case Symmetry::symfull:
      return MaskMode::sym_full_upper;
    case Symmetry::none:
      return MaskMode::all;
  }
  return MaskMode::all;
}

bool is_canonical(const Index3& x, Symmetry s) {
  switch (s) {
    case Symmetry::sym12:
      return x.i < x.j;
    case Symmetry::symfull:
      return x.i < x.j && x.j < x.k;
    case Symmetry::none:
      return true;
  }
  return true;
}

std::vector<Index3> symmetry_orbit(const Index3& x, Symmetry s) {
  std::vector<Index3> out{x};
  auto add = [&](Index3 y) {
    if (std::find(out.begin(), out.end(), y) == out.end()) out.push_back(y);
  };
  if (s == Symmetry::sym12) {
    add({x.j, x.i, x.k});
  } else if (s == Symmetry::symfull) {
    std::array<std::size_t, 3> p{x.i, x.j, x.k};
    std::sort(p.begin(), p.end());
    do {
      add({p[0], p[1], p[2]});
    } while (std::next_permutation(p.begin(), p.end()));
  }
  return out;
}

std::string mask_mode_name(MaskMode m) {
  switch (m) {
    case MaskMode::all:
      return "all";
    case MaskMode::sym12_upper:
      return "sym12_upper";
    case MaskMode::sym_full_upper:
      return "sym_full_upper";
    case MaskMode::custom:
      return "custom";
  }
  return "all";
}

MaskMode parse_mask_mode(const std::string& s) {
  if (s == "all") return MaskMode::all;
  if (s == "sym12_upper") return MaskMode::sym12_upper;
  if (s == "sym_full_upper") return MaskMode::sym_full_upper;
  if (s == "custom") return MaskMode::custom;
  throw DataError("unknown mask mode '" + s + "'");
}

void check_binary(const Tensor3& a, const ObservationMask& mask) {
  const auto w = mask.weights(a.dims());
  for (std::size_t e = 0; e < a.size(); ++e) {
    const double v = a.values()[e];
    if (w[e] != 0.0 && v != 0.0 && v != 1.0) {
      throw DataError("adjacency entry " + std::to_string(e) + " is " + std::to_string(v) +
                      ", expected 0 or 1");
    }
  }
}

double nll(const Tensor3& a, const Tensor3& theta, const LinkSpec& link,
           const ObservationMask& mask, double clip) {
  check_same_dims(a, theta);
  link.validate();
  check_binary(a, mask);
  const auto w = mask.weights(a.dims());
  return kernels::omp::likelihood_clipped(a.values(), theta.values(), link, w, clip);
}

Tensor3 nll_grad(const Tensor3& a, const Tensor3& theta, const LinkSpec& link,
                 const ObservationMask& mask) {
  check_same_dims(a, theta);
  link.validate();
  check_binary(a, mask);
  const auto w = mask.weights(a.dims());
  Tensor3 g(a.dims());
  kernels::omp::likelihood(a.values(), theta.values(), link, w, {g.values(), {}});
  return g;
}

}  // namespace hlsm
