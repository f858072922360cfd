#include "hlsm/errors.hpp"
#include "hlsm/fit.hpp"
#include "hlsm/kernels.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>

namespace hlsm {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 60;
constexpr int kMaxLambdaSteps = 80;

Tensor3 as_core(const Vector& c, const Dims& r) {
  return Tensor3(r, std::vector<double>(c.data(), c.data() + c.size()));
}

Vector as_vector(const Tensor3& t) {
  return Eigen::Map<const Vector>(t.data(), static_cast<Eigen::Index>(t.size()));
}

/// The core problem seen through a penalty λ/2·‖c‖².
class Objective {
 public:
  virtual ~Objective() = default;
  virtual double value(const Vector& c) = 0;
  virtual void terms(const Vector& c, double& f, Vector& g, Matrix& h) = 0;
};

class FullObjective final : public Objective {
 public:
  FullObjective(const Tensor3& a, const TuckerFactors& frames, const LinkSpec& link,
                const ObservationMask& mask)
      : a_(a), f_(frames), link_(link), w_(mask.includes_everything() ? std::vector<double>{}
                                                                      : mask.weights(a.dims())) {}

  double value(const Vector& c) override {
    const Tensor3 theta = compose(c);
    return kernels::omp::likelihood(a_.values(), theta.values(), link_, w_);
  }

  void terms(const Vector& c, double& f, Vector& g, Matrix& h) override {
    const Tensor3 theta = compose(c);
    Tensor3 grad(a_.dims()), curv(a_.dims());
    f = kernels::omp::likelihood(a_.values(), theta.values(), link_, w_,
                                 {grad.values(), curv.values()});
    g = kernels::omp::core_gradient(grad, f_.factors);
    h = kernels::omp::core_hessian(curv, f_.factors);
  }

 private:
  Tensor3 compose(const Vector& c) {
    f_.core = as_core(c, f_.core.dims());
    return tucker_compose(f_);
  }

  const Tensor3& a_;
  TuckerFactors f_;
  LinkSpec link_;
  std::vector<double> w_;
};

class SampledObjective final : public Objective {
 public:
  SampledObjective(const Tensor3& a, const TuckerFactors& frames, const LinkSpec& link,
                   const std::vector<std::size_t>& entries)
      : a_(a), f_(frames), link_(link), entries_(entries) {}

  double value(const Vector& c) override {
    return kernels::omp::sampled_core_terms(a_, entries_, f_.factors, c, link_).loss;
  }

  void terms(const Vector& c, double& f, Vector& g, Matrix& h) override {
    auto t = kernels::omp::sampled_core_terms(a_, entries_, f_.factors, c, link_);
    f = t.loss;
    g = std::move(t.grad);
    h = std::move(t.hessian);
  }

 private:
  const Tensor3& a_;
  const TuckerFactors& f_;
  LinkSpec link_;
  const std::vector<std::size_t>& entries_;
};

struct NewtonOutcome {
  Vector c;
  int iterations = 0;
  bool converged = false;
};

NewtonOutcome newton(Objective& obj, Vector c, double lambda, const CoreSolverSpec& opts) {
  NewtonOutcome out;
  const auto p = c.size();
  for (int it = 0; it < opts.max_it; ++it) {
    out.iterations = it + 1;
    double f = 0.0;
    Vector g;
    Matrix h;
    obj.terms(c, f, g, h);
    if (!std::isfinite(f)) throw NumericalError("core solve: non-finite loss");
    f += 0.5 * lambda * c.squaredNorm();
    g += lambda * c;
    h.diagonal().array() += lambda;
    if (g.norm() <= opts.grad_tol) {
      out.converged = true;
      break;
    }

    Eigen::LDLT<Matrix> ldlt(h);
    Vector step = ldlt.solve(-g);
    if (ldlt.info() != Eigen::Success || !step.allFinite() || g.dot(step) >= 0.0) {
      const double ridge = 1e-8 * std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
      step = (h + ridge * Matrix::Identity(p, p)).ldlt().solve(-g);
      if (!step.allFinite() || g.dot(step) >= 0.0) step = -g;
    }

    const double slope = g.dot(step);
    double t = 1.0;
    bool accepted = false;
    for (int k = 0; k < kMaxHalvings; ++k, t *= 0.5) {
      const Vector trial = c + t * step;
      const double ft = obj.value(trial) + 0.5 * lambda * trial.squaredNorm();
      if (std::isfinite(ft) && ft <= f + kArmijo * t * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // no representable decrease left along a descent direction
      out.converged = true;
      break;
    }
    c += t * step;
    if (t * step.norm() <= 1e-10 * (1.0 + c.norm())) {
      out.converged = true;
      break;
    }
  }
  out.c = std::move(c);
  return out;
}

CoreSolveResult solve_with(Objective& obj, const Dims& ranks, Vector c0, double xi,
                           const CoreSolverSpec& opts) {
  if (!(xi > 0.0)) throw DataError("solve_core: xi must be positive");
  CoreSolveResult res;
  NewtonOutcome free = newton(obj, std::move(c0), 0.0, opts);
  res.iterations = free.iterations;
  res.converged = free.converged;
  Vector c = std::move(free.c);

  if (c.norm() > xi) {
    // The constrained optimum solves the λ-penalized problem for the λ ≥ 0 at
    // which ‖c(λ)‖ = ξ; 1/‖c(λ)‖ is increasing and close to linear in λ.
    res.on_boundary = true;
    auto phi = [&](const Vector& v) { return 1.0 / v.norm() - 1.0 / xi; };
    double lo = 0.0, phi_lo = phi(c);
    Vector c_lo = c;
    double hi = 0.0, phi_hi = 0.0;
    Vector c_hi;
    {
      double f = 0.0;
      Vector g;
      Matrix h;
      const Vector scaled = c * (xi / c.norm());
      obj.terms(scaled, f, g, h);
      double lambda = std::max(g.norm() / xi, 1e-12);
      for (int k = 0; k < kMaxLambdaSteps; ++k, lambda *= 4.0) {
        NewtonOutcome o = newton(obj, c_lo, lambda, opts);
        res.iterations += o.iterations;
        const double ph = phi(o.c);
        if (ph >= 0.0) {
          hi = lambda, phi_hi = ph, c_hi = std::move(o.c);
          break;
        }
        lo = lambda, phi_lo = ph, c_lo = std::move(o.c);
      }
      if (c_hi.size() == 0) throw NumericalError("solve_core: could not bracket the boundary multiplier");
    }
    // Illinois regula falsi on φ(λ).
    int side = 0;
    for (int k = 0; k < kMaxLambdaSteps; ++k) {
      if (std::abs(c_hi.norm() - xi) <= 1e-10 * xi) break;
      const double lambda = (lo * phi_hi - hi * phi_lo) / (phi_hi - phi_lo);
      NewtonOutcome o = newton(obj, c_hi, lambda, opts);
      res.iterations += o.iterations;
      const double ph = phi(o.c);
      if (ph >= 0.0) {
        hi = lambda, phi_hi = ph, c_hi = std::move(o.c);
        if (side == 1) phi_lo *= 0.5;
        side = 1;
      } else {
        lo = lambda, phi_lo = ph, c_lo = std::move(o.c);
        if (side == -1) phi_hi *= 0.5;
        side = -1;
      }
      if (hi - lo <= 1e-14 * hi) break;
    }
    c = c_hi * (xi / c_hi.norm());
  }

  res.loss = obj.value(c);
  res.core = as_core(c, ranks);
  return res;
}

}  // namespace

CoreTerms core_terms(const Tensor3& a, const TuckerFactors& f, const LinkSpec& link,
                     const ObservationMask& mask) {
  f.validate();
  FullObjective obj(a, f, link, mask);
  CoreTerms t;
  obj.terms(as_vector(f.core), t.loss, t.grad, t.hessian);
  return t;
}

double tucker_loss(const Tensor3& a, const TuckerFactors& f, const LinkSpec& link,
                   const ObservationMask& mask) {
  f.validate();
  FullObjective obj(a, f, link, mask);
  return obj.value(as_vector(f.core));
}

CoreSolveResult solve_core(const Tensor3& a, const TuckerFactors& frames, const LinkSpec& link,
                           const ObservationMask& mask, double xi, const CoreSolverSpec& opts,
                           const std::vector<std::size_t>& entries) {
  TuckerFactors f = frames;
  if (f.core.empty()) {
    f.core = Tensor3({static_cast<std::size_t>(f.factors[0].cols()),
                      static_cast<std::size_t>(f.factors[1].cols()),
                      static_cast<std::size_t>(f.factors[2].cols())});
  }
  f.validate();
  if (f.dims() != a.dims()) throw DimensionError("solve_core: frames do not match the tensor");
  link.validate();
  const Vector c0 = as_vector(f.core);
  if (entries.empty()) {
    FullObjective obj(a, f, link, mask);
    return solve_with(obj, f.ranks(), c0, xi, opts);
  }
  SampledObjective obj(a, f, link, entries);
  return solve_with(obj, f.ranks(), c0, xi, opts);
}

}  // namespace hlsm
