#include <benchmark/benchmark.h>

#include <cmath>

#include "qfb/ensemble.hpp"
#include "qfb/feedback.hpp"
#include "qfb/metrics.hpp"
#include "qfb/povm.hpp"
#include "qfb/sde.hpp"

using namespace qfb;

namespace {

PureState plus_state() {
  ComplexVector v(2);
  v << 1.0, 1.0;
  return PureState::normalized(v);
}

DensityMatrix qubit_state() {
  ComplexMatrix m(2, 2);
  m << 0.6, Complex(0.1, -0.2), Complex(0.1, 0.2), 0.4;
  return DensityMatrix(m);
}

HermitianObservable random_observable(int n) {
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = Complex(std::sin(1.0 + i + 3 * j), std::cos(2.0 * i - j));
  return HermitianObservable::hermitian_part(m);
}

}  // namespace

static void BM_SmeStep(benchmark::State& state) {
  const DensityMatrix rho = qubit_state();
  const HermitianObservable h(pauli_z().matrix() * M_PI);
  double dw = 0.01;
  for (auto _ : state) {
    SmeStepResult r = sme_step(rho, pauli_x(), 2.0, h, 1e-4, dw, 0.4);
    benchmark::DoNotOptimize(r);
    dw = -dw;
  }
}
BENCHMARK(BM_SmeStep);

static void BM_EigHermitian(benchmark::State& state) {
  const HermitianObservable a = random_observable(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(eig_hermitian(a));
}
BENCHMARK(BM_EigHermitian)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

static void BM_OptimalFeedback(benchmark::State& state) {
  const DensityMatrix rho = qubit_state();
  const PureState psi = plus_state();
  for (auto _ : state) {
    benchmark::DoNotOptimize(optimal_feedback(rho, psi, FeedbackStrength(10.0)));
  }
}
BENCHMARK(BM_OptimalFeedback);

static void BM_KappaDisturbance(benchmark::State& state) {
  const double p[] = {0.1, 0.9};
  const DensityMatrix rho = DensityMatrix::diagonal(p);
  for (auto _ : state) {
    benchmark::DoNotOptimize(disturbance(kappa_povm({0.75, 1.0, 0.0}), rho));
  }
}
BENCHMARK(BM_KappaDisturbance);

// One closed-loop step of the fig2 setup, amortized over a short trajectory.
static void BM_ControlStep(benchmark::State& state) {
  const HermitianObservable h0(pauli_z().matrix() * M_PI);
  const SmeConfig cfg{DensityMatrix::pure(plus_state()), ObservableFn{}, 2.0, h0, 0.4, 1e-4, 0.1};
  const TargetFn target = precessing_target(plus_state(), h0);
  std::uint64_t key = 0;
  for (auto _ : state) {
    RngStream stream(derive_stream_key(1, key++));
    simulate_control(cfg, MeasurementPolicy::relative_angle(M_PI / 2), target,
                     FeedbackStrength(10.0), stream, 10, nullptr);
  }
  state.SetItemsProcessed(state.iterations() * cfg.steps());
}
BENCHMARK(BM_ControlStep)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
