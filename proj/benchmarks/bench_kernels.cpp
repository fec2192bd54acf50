#include <benchmark/benchmark.h>

#include <cmath>

#include "mfld/fluctuation.hpp"
#include "mfld/hartree.hpp"
#include "mfld/manybody.hpp"

namespace {

constexpr double kPi = 3.141592653589793;

mfld::ComplexField bump(const mfld::GridSpec& g, double center, double width) {
  mfld::ComplexField f(g);
  for (int i = 0; i < g.points; ++i) {
    double d = std::fmod(std::abs(g.coordinate(i) - center), g.length);
    d = std::min(d, g.length - d);
    f[static_cast<std::size_t>(i)] = std::exp(-d * d / (2 * width * width));
  }
  mfld::normalize(f);
  return f;
}

void bm_convolve(benchmark::State& state) {
  mfld::GridSpec g(1, static_cast<int>(state.range(0)), 2 * kPi);
  mfld::Potential v = mfld::Potential::gaussian(g, 0.25, 1.0);
  mfld::ComplexField phi = bump(g, kPi, 0.9);
  mfld::RealField density(g);
  for (std::size_t i = 0; i < phi.size(); ++i) density[i] = std::norm(phi[i]);
  for (auto _ : state) benchmark::DoNotOptimize(mfld::convolve(v.table, density));
}

void bm_hartree_step(benchmark::State& state) {
  mfld::GridSpec g(1, static_cast<int>(state.range(0)), 2 * kPi);
  mfld::Potential v = mfld::Potential::gaussian(g, 0.25, 1.0);
  mfld::ComplexField phi = bump(g, kPi, 0.9);
  for (auto _ : state) {
    phi = mfld::hartree_step(phi, v, 1e-3);
    benchmark::ClobberMemory();
  }
}

void bm_rhs_backward_fast(benchmark::State& state) {
  mfld::GridSpec g(1, static_cast<int>(state.range(0)), 2 * kPi);
  mfld::Potential v = mfld::Potential::gaussian(g, 0.25, 1.0);
  mfld::ComplexField phi = bump(g, kPi, 0.9);
  mfld::ComplexField f = mfld::project_out(phi, bump(g, 2.0, 0.7));
  for (auto _ : state) benchmark::DoNotOptimize(mfld::rhs_backward_fast(f, phi, v));
}

void bm_backward_solve(benchmark::State& state) {
  mfld::GridSpec g(1, 64, 2 * kPi);
  mfld::Potential v = mfld::Potential::gaussian(g, 0.25, 1.0);
  mfld::HartreeTrajectory traj = mfld::evolve_hartree(bump(g, kPi, 0.9), v, 0.1, 1e-3);
  mfld::RealField profile(g);
  for (int i = 0; i < g.points; ++i)
    profile[static_cast<std::size_t>(i)] = std::cos(2 * kPi * g.coordinate(i) / g.length);
  mfld::Observable o = mfld::Observable::multiplication(profile);
  for (auto _ : state) benchmark::DoNotOptimize(mfld::solve_backward(traj, o, 0.1));
}

void bm_oracle_apply(benchmark::State& state) {
  mfld::GridSpec g(1, 6, 2 * kPi);
  mfld::Potential v = mfld::Potential::gaussian(g, 0.25, 1.0);
  mfld::SecondQuantizedHamiltonian h =
      mfld::build_hamiltonian(g, v, static_cast<int>(state.range(0)));
  mfld::ManyBodyState psi = mfld::product_state(bump(g, kPi, 0.9), h.basis());
  for (auto _ : state) benchmark::DoNotOptimize(h.apply(psi.amplitudes));
}

void bm_oracle_step(benchmark::State& state) {
  mfld::GridSpec g(1, 6, 2 * kPi);
  mfld::Potential v = mfld::Potential::gaussian(g, 0.25, 1.0);
  mfld::SecondQuantizedHamiltonian h = mfld::build_hamiltonian(g, v, 6);
  mfld::ManyBodyState psi = mfld::product_state(bump(g, kPi, 0.9), h.basis());
  for (auto _ : state) {
    psi = mfld::evolve_exact(psi, h, 1e-3, 1e-3);
    benchmark::ClobberMemory();
  }
}

BENCHMARK(bm_convolve)->Arg(64)->Arg(256);
BENCHMARK(bm_hartree_step)->Arg(64)->Arg(256);
BENCHMARK(bm_rhs_backward_fast)->Arg(32)->Arg(128);
BENCHMARK(bm_backward_solve);
BENCHMARK(bm_oracle_apply)->Arg(4)->Arg(6);
BENCHMARK(bm_oracle_step);

}  // namespace

BENCHMARK_MAIN();
