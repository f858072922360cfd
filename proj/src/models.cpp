#include "hlsm/models.hpp"

#include "hlsm/errors.hpp"
#include "hlsm/linalg.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numeric>

namespace hlsm {

namespace {

constexpr int kLabelRetries = 1000;

double truncated_normal(std::mt19937_64& rng, double bound) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (;;) {
    const double x = normal(rng);
    if (std::abs(x) <= bound) return x;
  }
}

Matrix uniform_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Matrix e(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) e(i, j) = unif(rng);
  return e;
}

LayerLabels uniform_labels(std::size_t layers, int m, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, m - 1);
  LayerLabels out{std::vector<int>(layers), m};
  for (int attempt = 0; attempt < kLabelRetries; ++attempt) {
    for (auto& s : out.labels) s = pick(rng);
    const auto sizes = out.sizes();
    if (std::all_of(sizes.begin(), sizes.end(), [](std::size_t c) { return c > 0; })) return out;
  }
  throw DataError("could not draw labels with every class nonempty");
}

}  // namespace

std::vector<std::size_t> LayerLabels::sizes() const {
  std::vector<std::size_t> c(static_cast<std::size_t>(std::max(m, 0)), 0);
  for (int s : labels) {
    if (s >= 0 && s < m) ++c[static_cast<std::size_t>(s)];
  }
  return c;
}

void LayerLabels::validate() const {
  if (m < 1) throw DataError("labels: m must be positive");
  for (int s : labels) {
    if (s < 0 || s >= m) throw DataError("labels: value " + std::to_string(s) + " outside [0, m)");
  }
  for (std::size_t c : sizes()) {
    if (c == 0) throw DataError("labels: a class has no layers");
  }
}

MmlsmAssembly mmlsm_assemble(const MmlsmParams& p, std::optional<std::size_t> declared_rank) {
  p.labels.validate();
  const auto m = static_cast<std::size_t>(p.labels.m);
  if (p.frames.size() != m || p.interactions.size() != m) {
    throw DimensionError("mmlsm: need one frame and one interaction matrix per class");
  }
  const Eigen::Index n = p.frames[0].rows();
  std::vector<Eigen::Index> offset(m + 1, 0);
  for (std::size_t j = 0; j < m; ++j) {
    const Matrix& u = p.frames[j];
    const Matrix& c = p.interactions[j];
    if (u.rows() != n) throw DimensionError("mmlsm: frames differ in row count");
    if (c.rows() != u.cols() || c.cols() != u.cols()) {
      throw DimensionError("mmlsm: interaction " + std::to_string(j) + " does not match its frame width");
    }
    offset[j + 1] = offset[j] + u.cols();
  }
  const Eigen::Index q_bar = offset[m];

  Matrix u_bar(n, q_bar);
  for (std::size_t j = 0; j < m; ++j) u_bar.middleCols(offset[j], p.frames[j].cols()) = p.frames[j];
  Eigen::JacobiSVD<Matrix> svd(u_bar, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double tol = s(0) * 1e-10 * static_cast<double>(std::max(n, q_bar));
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > tol) ++r;
  if (declared_rank && static_cast<std::size_t>(r) < *declared_rank) {
    throw RankDeficiencyError("mmlsm: concatenated frames have rank " + std::to_string(r) +
                              ", declared " + std::to_string(*declared_rank));
  }
  if (declared_rank) r = static_cast<Eigen::Index>(*declared_rank);

  // Ū = Q·(ΣRᵀ) with Q orthonormal and canonical column signs.
  Matrix q = svd.matrixU().leftCols(r);
  Matrix sr = s.head(r).asDiagonal() * svd.matrixV().leftCols(r).transpose();
  Matrix q_canon = q;
  canonicalize_signs(q_canon);
  for (Eigen::Index c = 0; c < r; ++c) {
    if (q_canon.col(c).dot(q.col(c)) < 0.0) sr.row(c) *= -1.0;
  }

  const auto layers = p.labels.labels.size();
  const auto sizes = p.labels.sizes();
  Tensor3 block({static_cast<std::size_t>(q_bar), static_cast<std::size_t>(q_bar), m});
  for (std::size_t j = 0; j < m; ++j)
    for (Eigen::Index a = 0; a < p.frames[j].cols(); ++a)
      for (Eigen::Index b = 0; b < p.frames[j].cols(); ++b)
        block(static_cast<std::size_t>(offset[j] + a), static_cast<std::size_t>(offset[j] + b), j) =
            p.interactions[j](a, b);

  Matrix w = Matrix::Zero(static_cast<Eigen::Index>(layers), static_cast<Eigen::Index>(m));
  Matrix size_root = Matrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t j = 0; j < m; ++j) size_root(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = std::sqrt(static_cast<double>(sizes[j]));
  for (std::size_t l = 0; l < layers; ++l) {
    const auto j = static_cast<std::size_t>(p.labels.labels[l]);
    w(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j)) = 1.0 / std::sqrt(static_cast<double>(sizes[j]));
  }

  MmlsmAssembly out;
  out.rank = static_cast<std::size_t>(r);
  Tensor3 core = mode_product(block, sr, 1);
  core = mode_product(core, sr, 2);
  out.factors.core = mode_product(core, size_root, 3);
  out.factors.factors = {q_canon, q_canon, w};
  out.theta = tucker_compose(out.factors);
  return out;
}

Tensor3 sample_adjacency(const Tensor3& theta, const LinkSpec& link, Symmetry sym, std::mt19937_64& rng) {
  const Dims& d = theta.dims();
  if (sym != Symmetry::none && d[0] != d[1]) throw DimensionError("sample_adjacency: symmetric pattern needs n1 == n2");
  if (sym == Symmetry::symfull && d[1] != d[2]) throw DimensionError("sample_adjacency: symfull needs a cubic tensor");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Tensor3 a(d);
  for (std::size_t i = 0; i < d[0]; ++i)
    for (std::size_t j = 0; j < d[1]; ++j)
      for (std::size_t k = 0; k < d[2]; ++k) {
        const Index3 x{i, j, k};
        if (!is_canonical(x, sym)) continue;
        const double prob = link_derivatives(link, theta(i, j, k)).g;
        // u ∈ [0, 1) makes p = 0 and p = 1 deterministic
        const double v = unif(rng) < prob ? 1.0 : 0.0;
        if (v == 0.0) continue;
        for (const auto& y : symmetry_orbit(x, sym)) a(y.i, y.j, y.k) = v;
      }
  return a;
}

Matrix latent_positions(std::size_t n, std::size_t r, std::mt19937_64& rng) {
  if (r < 1 || r > n) throw DimensionError("latent positions need 1 <= r <= n");
  std::normal_distribution<double> normal(0.5, 1.0);
  Matrix raw(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(r));
  for (Eigen::Index i = 0; i < raw.rows(); ++i)
    for (Eigen::Index j = 0; j < raw.cols(); ++j) raw(i, j) = normal(rng);
  return std::sqrt(static_cast<double>(n)) * top_left_singular(raw, r).vectors;
}

Simulated simulate_general(std::size_t n, std::size_t r, double sigma, std::uint64_t seed) {
  if (r < 1 || r > n) throw DimensionError("simulate_general: need n >= r >= 1");
  if (!(sigma > 0.0)) throw DataError("simulate_general: sigma must be positive");
  std::mt19937_64 rng(seed);
  Tensor3 raw({n, n, n});
  for (double& v : raw.values()) v = 10.0 * truncated_normal(rng, 3.0);

  Simulated out;
  out.truth.model = "general";
  out.truth.factors_star = hosvd(raw, {r, r, r});
  out.truth.theta_star = tucker_compose(out.truth.factors_star);
  out.truth.link = LinkSpec::logit(sigma);
  out.truth.symmetry = Symmetry::none;
  out.adjacency = sample_adjacency(out.truth.theta_star, out.truth.link, Symmetry::none, rng);
  return out;
}

Simulated simulate_mmlsm(std::size_t n, std::size_t layers, int m, std::size_t r, std::uint64_t seed,
                         const LinkSpec& link, const MmlsmOptions& opts) {
  if (m < 1 || layers < static_cast<std::size_t>(m)) throw DataError("simulate_mmlsm: need L >= m >= 1");
  if (r < 1 || r > n) throw DimensionError("simulate_mmlsm: need n >= r >= 1");
  link.validate();
  std::mt19937_64 rng(seed);

  MmlsmParams p;
  const Matrix shared = latent_positions(n, r, rng);
  p.labels = uniform_labels(layers, m, rng);
  for (int j = 0; j < m; ++j) {
    p.frames.push_back(opts.distinct_frames && j > 0 ? latent_positions(n, r, rng) : shared);
    const Matrix e = uniform_matrix(r, r, rng);
    p.interactions.push_back(opts.core_sign * e * e.transpose());
  }
  const std::size_t declared = opts.distinct_frames ? std::min(n, r * static_cast<std::size_t>(m)) : r;
  MmlsmAssembly asmb = mmlsm_assemble(p, declared);

  Simulated out;
  out.truth.model = "mmlsm";
  out.truth.theta_star = std::move(asmb.theta);
  out.truth.factors_star = std::move(asmb.factors);
  out.truth.link = link;
  out.truth.symmetry = Symmetry::sym12;
  out.truth.labels = p.labels;
  out.adjacency = sample_adjacency(out.truth.theta_star, link, Symmetry::sym12, rng);
  return out;
}

Simulated simulate_hypergraph(std::size_t n, std::size_t r, std::uint64_t seed, const LinkSpec& link) {
  if (r < 1 || r > n) throw DimensionError("simulate_hypergraph: need n >= r >= 1");
  link.validate();
  std::mt19937_64 rng(seed);
  const Matrix u = latent_positions(n, r, rng);
  const Matrix e = uniform_matrix(r, r, rng);

  // Symmetric core Σ_k e_k ⊗ e_k ⊗ e_k over the columns of E, rescaled so the
  // frames can be orthonormal: C ×₁ U* ×₂ U* ×₃ U* = (n^{3/2} C) ×₁ Q ×₂ Q ×₃ Q.
  const double scale = std::pow(static_cast<double>(n), 1.5);
  Tensor3 core({r, r, r});
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t b = 0; b < r; ++b)
      for (std::size_t c = 0; c < r; ++c) {
        double v = 0.0;
        for (std::size_t k = 0; k < r; ++k) {
          const auto kk = static_cast<Eigen::Index>(k);
          v += e(static_cast<Eigen::Index>(a), kk) * e(static_cast<Eigen::Index>(b), kk) * e(static_cast<Eigen::Index>(c), kk);
        }
        core(a, b, c) = scale * v;
      }
  const Matrix q = u / std::sqrt(static_cast<double>(n));

  Simulated out;
  out.truth.model = "hypergraph";
  out.truth.factors_star = TuckerFactors{core, {q, q, q}};
  out.truth.theta_star = tucker_compose(out.truth.factors_star);
  out.truth.link = link;
  out.truth.symmetry = Symmetry::symfull;
  out.adjacency = sample_adjacency(out.truth.theta_star, link, Symmetry::symfull, rng);
  return out;
}

MmlsmParams dynamic_params(std::size_t n, std::size_t t_len, int m, std::size_t q, std::mt19937_64& rng,
                           std::vector<std::size_t>* change_points) {
  if (m < 1 || t_len < static_cast<std::size_t>(m)) throw DataError("dynamic: need T >= m >= 1");
  if (q < 1 || q > n) throw DimensionError("dynamic: need n >= q >= 1");
  std::vector<std::size_t> candidates(t_len - 1);
  std::iota(candidates.begin(), candidates.end(), std::size_t{2});
  std::vector<std::size_t> cps{1};
  std::sample(candidates.begin(), candidates.end(), std::back_inserter(cps), static_cast<std::size_t>(m - 1), rng);
  std::sort(cps.begin(), cps.end());

  MmlsmParams p;
  p.labels.m = m;
  p.labels.labels.resize(t_len);
  for (std::size_t t = 1; t <= t_len; ++t) {
    const auto seg = std::upper_bound(cps.begin(), cps.end(), t) - cps.begin() - 1;
    p.labels.labels[t - 1] = static_cast<int>(seg);
  }
  for (int j = 0; j < m; ++j) {
    p.frames.push_back(latent_positions(n, q, rng));
    const Matrix e = uniform_matrix(q, q, rng);
    p.interactions.push_back(e * e.transpose());
  }
  if (change_points) *change_points = cps;
  return p;
}

Simulated simulate_dynamic(std::size_t n, std::size_t t_len, int m, std::size_t q, std::uint64_t seed,
                           const LinkSpec& link) {
  link.validate();
  std::mt19937_64 rng(seed);
  Simulated out;
  const MmlsmParams p = dynamic_params(n, t_len, m, q, rng, &out.truth.change_points);
  MmlsmAssembly asmb = mmlsm_assemble(p);

  out.truth.model = "dynamic";
  out.truth.theta_star = std::move(asmb.theta);
  out.truth.factors_star = std::move(asmb.factors);
  out.truth.link = link;
  out.truth.symmetry = Symmetry::sym12;
  out.truth.labels = p.labels;
  out.adjacency = sample_adjacency(out.truth.theta_star, link, Symmetry::sym12, rng);
  return out;
}

}  // namespace hlsm
