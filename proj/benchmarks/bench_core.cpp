#include <benchmark/benchmark.h>

#include "bhmf/diagnostics.hpp"
#include "bhmf/manybody.hpp"
#include "bhmf/meanfield.hpp"
#include "bhmf/reduced.hpp"
#include "bhmf/rng.hpp"

namespace {

using namespace bhmf;

// d = (range) hypercube at L = 2, M = 1: dimension 2^(2^d)
SparseHamiltonian make_hamiltonian(int d) {
  Lattice lattice(2, d);
  return build_hamiltonian({1.0, 0.5, 1.0}, lattice, FockCutoff{1});
}

void HamiltonianAssembly(benchmark::State& state) {
  for (auto _ : state) {
    SparseHamiltonian h = make_hamiltonian(static_cast<int>(state.range(0)));
    benchmark::DoNotOptimize(h.dimension());
  }
}
BENCHMARK(HamiltonianAssembly)->DenseRange(2, 4);

void SparseMatvec(benchmark::State& state) {
  SparseHamiltonian h = make_hamiltonian(static_cast<int>(state.range(0)));
  Rng rng(7);
  Eigen::VectorXcd x = random_unit_vector(h.dimension(), rng);
  Eigen::VectorXcd y(h.dimension());
  for (auto _ : state) {
    h.apply(x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * h.val().size());
}
BENCHMARK(SparseMatvec)->DenseRange(2, 4);

void KrylovStep(benchmark::State& state) {
  SparseHamiltonian h = make_hamiltonian(static_cast<int>(state.range(0)));
  Lattice lattice(2, static_cast<int>(state.range(0)));
  Rng rng(11);
  ManyBodyState psi0 = product_state(random_unit_vector(2, rng), lattice, FockCutoff{1});
  for (auto _ : state) {
    auto out = evolve_exact(h, psi0, {0.1});
    benchmark::DoNotOptimize(out.front().amplitudes.data());
  }
}
BENCHMARK(KrylovStep)->DenseRange(2, 4);

void OneSiteReduction(benchmark::State& state) {
  int d = static_cast<int>(state.range(0));
  Lattice lattice(2, d);
  FockBasis basis(FockCutoff{1}, lattice.num_sites());
  Rng rng(13);
  ManyBodyState psi{random_unit_vector(basis.dimension(), rng), FockCutoff{1},
                    lattice.num_sites()};
  for (auto _ : state) {
    OneSiteDensity g = reduce_one_site(psi, lattice);
    benchmark::DoNotOptimize(g.mat.data());
  }
}
BENCHMARK(OneSiteReduction)->DenseRange(2, 4);

void MeanFieldTrajectory(benchmark::State& state) {
  FockCutoff cutoff{static_cast<int>(state.range(0))};
  Rng rng(17);
  Eigen::VectorXcd phi0 = random_unit_vector(cutoff.dim(), rng);
  for (auto _ : state) {
    MfTrajectory traj = evolve_mf(phi0, {1.0, 0.5, 1.0}, cutoff, {1.0}, 1e-3);
    benchmark::DoNotOptimize(traj.states.back().phi.data());
  }
}
BENCHMARK(MeanFieldTrajectory)->Arg(8)->Arg(16)->Arg(32);

}  // namespace

BENCHMARK_MAIN();
