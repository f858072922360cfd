#include "hlsm/kernels.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace hlsm;

Tensor3 random_tensor(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  Tensor3 t({n, n, n});
  for (auto& v : t.values()) v = z(rng);
  return t;
}

Matrix random_frame(std::size_t n, std::size_t r, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(r));
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = z(rng);
  return m;
}

template <bool Omp>
void BM_ModeProduct(benchmark::State& s) {
  const auto n = static_cast<std::size_t>(s.range(0));
  const Tensor3 t = random_tensor(n, 1);
  const Matrix u = random_frame(n, 4, 2);
  for (auto _ : s) {
    Tensor3 r = Omp ? kernels::omp::mode_product(t, u, 2, true) : kernels::serial::mode_product(t, u, 2, true);
    benchmark::DoNotOptimize(r.values().data());
  }
}

template <bool Omp>
void BM_Likelihood(benchmark::State& s) {
  const auto n = static_cast<std::size_t>(s.range(0));
  const Tensor3 theta = random_tensor(n, 3);
  Tensor3 a({n, n, n});
  for (std::size_t e = 0; e < a.size(); ++e) a.values()[e] = (e % 7) < 2 ? 1.0 : 0.0;
  std::vector<double> grad(a.size());
  const LinkSpec link = LinkSpec::parse("logit", 1.0);
  for (auto _ : s) {
    const double v = Omp ? kernels::omp::likelihood(a.values(), theta.values(), link, {}, {grad, {}})
                         : kernels::serial::likelihood(a.values(), theta.values(), link, {}, {grad, {}});
    benchmark::DoNotOptimize(v);
  }
}

template <bool Omp>
void BM_CoreHessian(benchmark::State& s) {
  const auto n = static_cast<std::size_t>(s.range(0));
  Tensor3 c = random_tensor(n, 4);
  for (auto& v : c.values()) v = std::abs(v);
  const std::array<Matrix, 3> f{random_frame(n, 3, 5), random_frame(n, 3, 6), random_frame(n, 3, 7)};
  for (auto _ : s) {
    Matrix h = Omp ? kernels::omp::core_hessian(c, f) : kernels::serial::core_hessian(c, f);
    benchmark::DoNotOptimize(h.data());
  }
}

}  // namespace

BENCHMARK(BM_ModeProduct<false>)->Name("mode_product/serial")->Arg(40)->Arg(80);
BENCHMARK(BM_ModeProduct<true>)->Name("mode_product/omp")->Arg(40)->Arg(80);
BENCHMARK(BM_Likelihood<false>)->Name("likelihood/serial")->Arg(40)->Arg(80);
BENCHMARK(BM_Likelihood<true>)->Name("likelihood/omp")->Arg(40)->Arg(80);
BENCHMARK(BM_CoreHessian<false>)->Name("core_hessian/serial")->Arg(20)->Arg(40);
BENCHMARK(BM_CoreHessian<true>)->Name("core_hessian/omp")->Arg(20)->Arg(40);

BENCHMARK_MAIN();
