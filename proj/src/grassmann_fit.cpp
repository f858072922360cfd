#include "hlsm/analysis.hpp"
#include "hlsm/errors.hpp"
#include "hlsm/fit.hpp"
#include "hlsm/kernels.hpp"
#include "hlsm/linalg.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace hlsm {

namespace {

constexpr int kMaxStepHalvings = 40;

double clip_tuning(double v) { return std::clamp(v, 1e-8, 1e8); }

Matrix random_frame(std::size_t n, std::size_t r, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(r));
  for (Eigen::Index j = 0; j < g.cols(); ++j)
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(g.rows(), g.cols());
  canonicalize_signs(q);
  return q;
}

double max_orthonormality_error(const std::array<Matrix, 3>& frames) {
  double e = 0.0;
  for (const auto& f : frames) e = std::max(e, orthonormality_error(f));
  return e;
}

std::vector<std::size_t> tied_modes(TieMode t) {
  switch (t) {
    case TieMode::modes12:
      return {0, 1};
    case TieMode::all:
      return {0, 1, 2};
    case TieMode::none:
      break;
  }
  return {};
}

/// C ×₁ (U'ᵀU) ×₂ (V'ᵀV) ×₃ (W'ᵀW): the old core expressed in the new frames.
Tensor3 rotate_core(const Tensor3& core, const std::array<Matrix, 3>& old_f,
                    const std::array<Matrix, 3>& new_f) {
  Tensor3 c = core;
  for (int mode = 1; mode <= 3; ++mode) {
    const auto k = static_cast<std::size_t>(mode - 1);
    c = mode_product(c, Matrix(new_f[k].transpose() * old_f[k]), mode);
  }
  return c;
}

std::vector<std::size_t> sample_entries(const std::vector<double>& weights, std::size_t total,
                                        double frac, std::uint64_t seed) {
  std::vector<std::size_t> pool;
  if (weights.empty()) {
    pool.resize(total);
    for (std::size_t e = 0; e < total; ++e) pool[e] = e;
  } else {
    for (std::size_t e = 0; e < total; ++e)
      if (weights[e] != 0.0) pool.push_back(e);
  }
  const auto want = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(frac * static_cast<double>(pool.size()))));
  std::vector<std::size_t> out;
  out.reserve(want);
  std::mt19937_64 rng(seed);
  std::sample(pool.begin(), pool.end(), std::back_inserter(out), want, rng);
  return out;
}

}  // namespace

void FitConfig::validate(const Dims& dims) const {
  for (std::size_t k = 0; k < 3; ++k) {
    if (ranks[k] < 1 || ranks[k] > dims[k]) {
      throw DimensionError("rank " + std::to_string(ranks[k]) + " infeasible for mode " +
                           std::to_string(k + 1) + " of size " + std::to_string(dims[k]));
    }
  }
  link.validate();
  if (eta && !(*eta > 0.0)) throw DataError("eta must be positive");
  if (delta) {
    for (double d : *delta)
      if (!(d > 0.0)) throw DataError("delta must be positive");
  }
  if (xi && !(*xi > 0.0)) throw DataError("xi must be positive");
  if (!(eta_scale > 0.0)) throw DataError("eta_scale must be positive");
  if (!(tol > 0.0)) throw DataError("tol must be positive");
  if (max_iter < 0) throw DataError("max_iter must be nonnegative");
  if (core_solver.kind == CoreSolverKind::subsampled &&
      !(core_solver.frac > 0.0 && core_solver.frac <= 1.0)) {
    throw DataError("subsample fraction must lie in (0, 1]");
  }
  if (core_solver.max_it < 1) throw DataError("core solver needs max_it >= 1");
  const auto tied = tied_modes(tie);
  for (std::size_t k : tied) {
    if (dims[k] != dims[tied[0]] || ranks[k] != ranks[tied[0]]) {
      throw DimensionError("tied modes need equal sizes and ranks");
    }
  }
  mask.validate(dims);
}

Matrix factor_gradient(const Tensor3& g, const TuckerFactors& f, int mode) {
  f.validate();
  if (g.dims() != f.dims()) throw DimensionError("factor_gradient: gradient dims do not match factors");
  Tensor3 y = g;
  for (int other = 1; other <= 3; ++other) {
    if (other != mode) y = mode_product_transposed(y, f.factors[static_cast<std::size_t>(other - 1)], other);
  }
  return matricize(y, mode) * matricize(f.core, mode).transpose();
}

Matrix svd_retract(const Matrix& m, std::size_t r, int mode) {
  const std::string where = mode > 0 ? " in mode " + std::to_string(mode) : std::string();
  if (r > static_cast<std::size_t>(m.rows()) || r > static_cast<std::size_t>(m.cols())) {
    throw RankDeficiencyError("svd_retract: rank " + std::to_string(r) + " exceeds matrix shape" + where);
  }
  if (!m.allFinite()) throw NumericalError("svd_retract: non-finite entries" + where);
  LeftSingular s = top_left_singular(m, r);
  const double top = s.values.size() ? s.values(0) : 0.0;
  const double floor = top * 1e-12 * static_cast<double>(std::max(m.rows(), m.cols()));
  if (top == 0.0 || s.values(static_cast<Eigen::Index>(r) - 1) <= floor) {
    throw RankDeficiencyError("svd_retract: numerical rank below " + std::to_string(r) + where);
  }
  return std::move(s.vectors);
}

Matrix regularize_rows(const Matrix& u, double delta) {
  if (!(delta > 0.0)) throw DataError("regularize_rows: delta must be positive");
  Matrix out = u;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double norm = out.row(i).norm();
    if (norm > delta) out.row(i) *= delta / norm;
  }
  return out;
}

double incoherence(const Matrix& u) {
  const double fro = u.norm();
  if (fro == 0.0) return 0.0;
  return std::sqrt(static_cast<double>(u.rows())) * u.rowwise().norm().maxCoeff() / fro;
}

Tuning default_tuning(const Tensor3& a, const Dims& ranks, const TuckerFactors& init) {
  init.validate();
  if (init.dims() != a.dims() || init.ranks() != ranks) {
    throw DimensionError("default_tuning: init does not match data dims and ranks");
  }
  if (init.core.max_abs() == 0.0) throw DegenerateInputError("default_tuning: initial core is zero");

  double mu = 0.0;
  for (const auto& f : init.factors) mu = std::max(mu, incoherence(f));
  Tuning t;
  for (std::size_t k = 0; k < 3; ++k) {
    t.delta[k] = clip_tuning(2.0 * mu * std::sqrt(static_cast<double>(ranks[k]) / static_cast<double>(a.dims()[k])));
  }
  t.xi = clip_tuning(2.0 * init.core.frobenius_norm());
  const SpectralBounds b = spectral_bounds(init.core, ranks);
  const double kappa = b.lambda_min > 0.0 ? b.lambda_max / b.lambda_min : std::numeric_limits<double>::infinity();
  const double r_bar = static_cast<double>(*std::max_element(ranks.begin(), ranks.end()));
  t.eta = clip_tuning(1.0 / (std::pow(kappa, 4) * b.lambda_min * b.lambda_min * r_bar));
  return t;
}

std::array<Matrix, 3> initial_frames(const Tensor3& a, const FitConfig& cfg) {
  std::array<Matrix, 3> frames;
  switch (cfg.init.kind) {
    case InitKind::hosvd:
      frames = hosvd(a, cfg.ranks).factors;
      break;
    case InitKind::hooi:
      frames = hooi(a, cfg.ranks, cfg.init.hooi_iters).factors;
      break;
    case InitKind::random: {
      std::mt19937_64 rng(cfg.init.seed);
      for (std::size_t k = 0; k < 3; ++k) frames[k] = random_frame(a.dims()[k], cfg.ranks[k], rng);
      break;
    }
    case InitKind::provided: {
      if (!cfg.init.provided) throw DataError("init 'provided' needs factors");
      frames = cfg.init.provided->factors;
      for (std::size_t k = 0; k < 3; ++k) {
        if (static_cast<std::size_t>(frames[k].rows()) != a.dims()[k] ||
            static_cast<std::size_t>(frames[k].cols()) != cfg.ranks[k]) {
          throw DimensionError("provided init frame " + std::to_string(k + 1) + " has the wrong shape");
        }
        if (orthonormality_error(frames[k]) > 1e-8) {
          throw DataError("provided init frame " + std::to_string(k + 1) + " is not orthonormal");
        }
      }
      break;
    }
  }
  const auto tied = tied_modes(cfg.tie);
  for (std::size_t k : tied) frames[k] = frames[tied[0]];
  return frames;
}

FitResult fit(const Tensor3& a, const FitConfig& cfg, const std::optional<TuckerFactors>& truth) {
  cfg.validate(a.dims());
  check_binary(a, cfg.mask);
  if (truth) {
    truth->validate();
    if (truth->dims() != a.dims()) throw DimensionError("truth dims do not match the data");
  }
  const std::vector<double> weights =
      cfg.mask.includes_everything() ? std::vector<double>{} : cfg.mask.weights(a.dims());
  const auto tied = tied_modes(cfg.tie);
  CoreSolverSpec full_solver = cfg.core_solver;
  full_solver.kind = CoreSolverKind::newton;

  FitResult res;
  TuckerFactors cur;
  cur.factors = initial_frames(a, cfg);
  cur.core = Tensor3(cfg.ranks);
  const CoreSolveResult c0 =
      solve_core(a, cur, cfg.link, cfg.mask, std::numeric_limits<double>::infinity(), full_solver);
  cur.core = c0.core;

  Tuning tun;
  const bool need_defaults = !cfg.eta || !cfg.delta || !cfg.xi;
  if (need_defaults) tun = default_tuning(a, cfg.ranks, cur);
  if (cfg.eta) tun.eta = *cfg.eta;
  else tun.eta *= cfg.eta_scale;
  if (cfg.delta) tun.delta = *cfg.delta;
  if (cfg.xi) tun.xi = *cfg.xi;
  res.tuning = tun;
  double eta = tun.eta;
  std::array<double, 3> step_unit{};
  for (std::size_t k = 0; k < 3; ++k) step_unit[k] = static_cast<double>(a.size()) / static_cast<double>(a.dims()[k]);

  double loss = c0.loss;
  if (cur.core.frobenius_norm() > tun.xi) {
    const CoreSolveResult c = solve_core(a, cur, cfg.link, cfg.mask, tun.xi, full_solver);
    cur.core = c.core;
    loss = c.loss;
  }
  if (!std::isfinite(loss)) throw NumericalError("fit: non-finite loss at initialization");

  auto record = [&](double l) {
    res.loss_trajectory.push_back(l);
    res.orthonormality_trajectory.push_back(max_orthonormality_error(cur.factors));
    if (truth) {
      double d2 = 0.0, p2 = 0.0;
      for (std::size_t k = 0; k < 3; ++k) {
        const double d = chordal_distance(cur.factors[k], truth->factors[k]);
        d2 += d * d;
        p2 += projection_distance(cur.factors[k], truth->factors[k]);
      }
      res.error_trajectory.push_back(d2);
      res.projection_trajectory.push_back(p2);
    }
  };
  record(loss);

  const bool subsampling = cfg.core_solver.kind == CoreSolverKind::subsampled;
  const int final_full = std::max(0, cfg.core_solver.full_final_iters);
  int forced_full_until = -1;  // set when the subsampled phase ends early
  res.stop_reason = "max_iter";

  for (int t = 1; t <= cfg.max_iter; ++t) {
    const bool sub_phase = subsampling && forced_full_until < 0 && t <= cfg.max_iter - final_full;

    const Tensor3 theta = tucker_compose(cur);
    Tensor3 grad(a.dims());
    kernels::omp::likelihood(a.values(), theta.values(), cfg.link, weights, {grad.values(), {}});
    std::array<Matrix, 3> grads;
    for (int mode = 1; mode <= 3; ++mode) grads[static_cast<std::size_t>(mode - 1)] = factor_gradient(grad, cur, mode);
    if (!tied.empty()) {
      Matrix avg = Matrix::Zero(grads[tied[0]].rows(), grads[tied[0]].cols());
      for (std::size_t k : tied) avg += grads[k];
      avg /= static_cast<double>(tied.size());
      for (std::size_t k : tied) grads[k] = avg;
    }

    std::vector<std::size_t> sample;
    if (sub_phase) {
      sample = sample_entries(weights, a.size(), cfg.core_solver.frac,
                              cfg.core_solver.seed + static_cast<std::uint64_t>(t));
    }

    TuckerFactors next;
    double next_loss = 0.0;
    bool stepped = false;
    int halvings = 0;
    while (!stepped) {
      next.factors = cur.factors;
      for (int mode = 1; mode <= 3; ++mode) {
        const auto k = static_cast<std::size_t>(mode - 1);
        if (!tied.empty() && k != tied[0] && std::find(tied.begin(), tied.end(), k) != tied.end()) {
          next.factors[k] = next.factors[tied[0]];
          continue;
        }
        const Matrix moved = cur.factors[k] - (eta * step_unit[k]) * grads[k];
        const Matrix retracted = svd_retract(moved, cfg.ranks[k], mode);
        next.factors[k] = svd_retract(regularize_rows(retracted, tun.delta[k]), cfg.ranks[k], mode);
      }
      next.core = rotate_core(cur.core, cur.factors, next.factors);
      const CoreSolveResult c =
          solve_core(a, next, cfg.link, cfg.mask, tun.xi, sub_phase ? cfg.core_solver : full_solver, sample);
      next.core = c.core;
      if (!c.converged) res.warnings.push_back("core solve did not converge at iteration " + std::to_string(t));
      next_loss = sub_phase ? tucker_loss(a, next, cfg.link, cfg.mask) : c.loss;
      if (!std::isfinite(next_loss)) throw NumericalError("fit: non-finite loss at iteration " + std::to_string(t));

      if (cfg.step_safeguard && next_loss > loss) {
        if (++halvings > kMaxStepHalvings) break;
        eta *= 0.5;
        continue;
      }
      stepped = true;
    }
    if (!stepped && sub_phase) {
      // Sampled cores stopped lowering the full loss: finish on full data.
      eta = tun.eta;
      forced_full_until = std::min(cfg.max_iter, t + final_full);
      res.warnings.push_back("subsampled phase ended early at iteration " + std::to_string(t));
      res.iterations = t;
      record(loss);
      continue;
    }
    if (!stepped) {
      res.stop_reason = "step_underflow";
      res.warnings.push_back("step size halved " + std::to_string(kMaxStepHalvings) +
                             " times without decreasing the loss");
      break;
    }

    // An accepted step lets η recover toward its starting value.
    if (cfg.step_safeguard && halvings == 0) eta = std::min(2.0 * eta, tun.eta);
    const double rel = std::abs(loss - next_loss) / std::max(1.0, std::abs(loss));
    cur = std::move(next);
    loss = next_loss;
    res.iterations = t;
    record(loss);

    if (sub_phase) {
      if (rel < cfg.tol) forced_full_until = std::min(cfg.max_iter, t + final_full);
      if (forced_full_until == t) {
        res.converged = true;
        res.stop_reason = "tol";
        break;
      }
    } else if (rel < cfg.tol || (forced_full_until >= 0 && t >= forced_full_until)) {
      res.converged = true;
      res.stop_reason = "tol";
      break;
    }
  }

  res.final_eta = eta;
  res.theta_hat = tucker_compose(cur);
  res.factors = std::move(cur);
  res.diagnostics = model_diagnostics(res.factors, cfg.link);
  return res;
}

std::string init_kind_name(InitKind k) {
  switch (k) {
    case InitKind::hosvd:
      return "hosvd";
    case InitKind::hooi:
      return "hooi";
    case InitKind::provided:
      return "provided";
    case InitKind::random:
      return "random";
  }
  return "hosvd";
}

InitKind parse_init_kind(const std::string& s) {
  if (s == "hosvd") return InitKind::hosvd;
  if (s == "hooi") return InitKind::hooi;
  if (s == "provided") return InitKind::provided;
  if (s == "random") return InitKind::random;
  throw DataError("unknown init '" + s + "' (expected hosvd, hooi, provided or random)");
}

}  // namespace hlsm
