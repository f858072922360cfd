#include "hlsm/analysis.hpp"
#include "hlsm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <random>
#include <sstream>

namespace hlsm {

HoldoutSpec HoldoutSpec::parse(const std::string& s) {
  HoldoutSpec h;
  if (s == "balanced_half") {
    h.kind = HoldoutKind::balanced_half;
    return h;
  }
  const std::string prefix = "fraction:";
  if (s.rfind(prefix, 0) != 0) {
    throw DataError("holdout spec '" + s + "' (expected fraction:P1,P0 or balanced_half)");
  }
  std::istringstream in(s.substr(prefix.size()));
  char comma = 0;
  if (!(in >> h.p_ones >> comma >> h.p_zeros) || comma != ',' || !in.eof()) {
    throw DataError("holdout spec '" + s + "' (expected fraction:P1,P0)");
  }
  if (!(h.p_ones >= 0.0 && h.p_ones <= 1.0 && h.p_zeros >= 0.0 && h.p_zeros <= 1.0)) {
    throw DataError("holdout fractions must lie in [0, 1]");
  }
  h.kind = HoldoutKind::fraction;
  return h;
}

std::string HoldoutSpec::to_string() const {
  if (kind == HoldoutKind::balanced_half) return "balanced_half";
  std::ostringstream out;
  out.precision(17);
  out << "fraction:" << p_ones << "," << p_zeros;
  return out.str();
}

Holdout holdout_protocol(const Tensor3& a, const HoldoutSpec& spec, Symmetry sym, std::uint64_t seed) {
  const Dims& d = a.dims();
  if (sym != Symmetry::none && d[0] != d[1]) throw DimensionError("holdout: symmetric input needs n1 == n2");
  if (sym == Symmetry::symfull && d[1] != d[2]) throw DimensionError("holdout: symfull input needs a cubic tensor");

  std::vector<Index3> ones, zeros;
  for (std::size_t i = 0; i < d[0]; ++i)
    for (std::size_t j = 0; j < d[1]; ++j)
      for (std::size_t k = 0; k < d[2]; ++k) {
        const Index3 x{i, j, k};
        if (!is_canonical(x, sym)) continue;
        const double v = a(i, j, k);
        if (v == 1.0) ones.push_back(x);
        else if (v == 0.0) zeros.push_back(x);
        else throw DataError("holdout: adjacency must be binary");
      }

  std::size_t n1 = 0, n0 = 0;
  if (spec.kind == HoldoutKind::balanced_half) {
    n1 = ones.size() / 2;
    n0 = n1;
  } else {
    n1 = static_cast<std::size_t>(std::llround(spec.p_ones * static_cast<double>(ones.size())));
    n0 = static_cast<std::size_t>(std::llround(spec.p_zeros * static_cast<double>(zeros.size())));
  }
  if (n1 > ones.size() || n0 > zeros.size()) {
    throw DataError("holdout: requested " + std::to_string(n1) + " ones / " + std::to_string(n0) +
                    " zeros but only " + std::to_string(ones.size()) + " / " + std::to_string(zeros.size()) +
                    " are available");
  }

  std::mt19937_64 rng(seed);
  std::vector<Index3> pick1, pick0;
  std::sample(ones.begin(), ones.end(), std::back_inserter(pick1), n1, rng);
  std::sample(zeros.begin(), zeros.end(), std::back_inserter(pick0), n0, rng);

  Holdout h{a, {}};
  for (const auto& x : pick1) h.eval_set.push_back({x, 1.0});
  for (const auto& x : pick0) h.eval_set.push_back({x, 0.0});
  std::sort(h.eval_set.begin(), h.eval_set.end(),
            [](const EvalEntry& p, const EvalEntry& q) { return p.index < q.index; });
  for (const auto& e : h.eval_set) {
    for (const auto& y : symmetry_orbit(e.index, sym)) h.a_test(y.i, y.j, y.k) = 0.0;
  }
  return h;
}

}  // namespace hlsm
