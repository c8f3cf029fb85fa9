#include "bhmf/check.hpp"

#include <cmath>
#include <complex>
#include <map>

#include "bhmf/diagnostics.hpp"
#include "bhmf/errors.hpp"
#include "bhmf/fock.hpp"
#include "bhmf/io.hpp"
#include "bhmf/lattice.hpp"
#include "bhmf/manybody.hpp"
#include "bhmf/meanfield.hpp"
#include "bhmf/reduced.hpp"
#include "bhmf/rng.hpp"

namespace bhmf {

namespace {

std::vector<double> linspace(double t_final, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = t_final * static_cast<double>(i) / (n - 1);
  return g;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CheckItem ladder_algebra() {
  double worst = 0.0;
  bool adjoint_exact = true;
  for (int m : {1, 2, 4, 8, 16}) {
    LadderOperators ops = build_ladder(FockCutoff{m});
    Eigen::MatrixXcd comm = ops.annihilator.mat * ops.creation.mat -
                            ops.creation.mat * ops.annihilator.mat;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        worst = std::max(worst, std::abs(comm(i, j) - (i == j ? 1.0 : 0.0)));
    if (ops.creation.mat != ops.annihilator.mat.adjoint().eval()) adjoint_exact = false;
  }
  return {"ladder_ccr_below_cutoff", worst <= 1e-13 && adjoint_exact, 1e-13 - worst,
          "max |[a,a*] - 1| on n < M over M in {1,2,4,8,16}"};
}

CheckItem lattice_counting() {
  double margin = 1.0;
  bool pass = true;
  for (int L : {2, 3, 4}) {
    for (int d : {1, 2, 3}) {
      Lattice lat(L, d);
      long expected = d;
      for (int i = 0; i < d; ++i) expected *= L;
      if (static_cast<long>(lat.bonds().size()) != expected) pass = false;
      std::vector<int> touch(lat.num_sites(), 0);
      for (const Bond& b : lat.bonds()) {
        ++touch[b.source];
        ++touch[b.target];
      }
      for (int t : touch)
        if (t != 2 * d) pass = false;
      // unordered-pair multiplicity: 2 at L = 2, 1 otherwise
      std::map<std::pair<int, int>, int> mult;
      for (const Bond& b : lat.bonds())
        ++mult[{std::min(b.source, b.target), std::max(b.source, b.target)}];
      for (const auto& [pair, count] : mult)
        if (count != (L == 2 ? 2 : 1)) pass = false;
    }
  }
  return {"lattice_bond_counting", pass, pass ? margin : -1.0,
          "|bonds| = d L^d, coordination 2d, pair multiplicity on {2,3,4}x{1,2,3}"};
}

CheckItem sandwich_inequality(std::uint64_t seed) {
  Rng rng(Rng::derive(seed, 11));
  double min_slack = 1.0;
  for (int m : {1, 2, 4, 8}) {
    for (int trial = 0; trial < 100; ++trial) {
      OneSiteDensity gamma = random_density(m + 1, rng);
      Projectors proj = make_projectors(random_unit_vector(m + 1, rng));
      double trq = q_moment(gamma, proj, 0);
      double tn = trace_norm_distance(gamma, proj);
      min_slack = std::min(min_slack, tn - 2.0 * trq);
      min_slack = std::min(min_slack, 2.0 * std::sqrt(2.0 * std::max(0.0, trq)) - tn);
    }
  }
  return {"trace_norm_sandwich", min_slack >= -1e-10, min_slack + 1e-10,
          "2 Tr(gq) <= ||g - p||_1 <= 2 sqrt(2 Tr(gq)) on 100 Ginibre pairs per M"};
}

CheckItem iterated_cauchy_schwarz(std::uint64_t seed) {
  Rng rng(Rng::derive(seed, 12));
  double min_slack = 1.0;
  for (int trial = 0; trial < 100; ++trial) {
    int m = 2 + static_cast<int>(rng.next_u64() % 7);
    OneSiteDensity gamma = random_density(m + 1, rng);
    Projectors proj = make_projectors(random_unit_vector(m + 1, rng));
    for (int k : {1, 2}) {
      double lhs = q_moment(gamma, proj, k);
      double rhs = 2.0 * density_moment(gamma, k) +
                   2.0 * mf_moment(proj.phi, static_cast<double>(k));
      min_slack = std::min(min_slack, rhs - lhs);
    }
  }
  return {"iterated_cauchy_schwarz", min_slack >= -1e-10, min_slack + 1e-10,
          "Tr(g q N^k q) <= 2 Tr(g N^k) + 2 Tr(p N^k), k in {1,2}"};
}

CheckItem energy_identity(std::uint64_t seed) {
  Rng rng(Rng::derive(seed, 13));
  Lattice lat(2, 2);
  FockCutoff cutoff{2};
  ModelParams params{1.0, 0.5, 1.0};
  SparseHamiltonian h = build_hamiltonian(params, lat, cutoff);
  LadderOperators ops = build_ladder(cutoff);
  Eigen::MatrixXcd a_dag_a = kron(ops.creation.mat, ops.annihilator.mat);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    ManyBodyState psi{random_unit_vector(h.dimension(), rng), cutoff, lat.num_sites()};
    OneSiteDensity g1 = reduce_one_site(psi, lat);
    TwoSiteDensity g2 = reduce_two_site(psi, lat);
    double onsite = (params.hopping - params.chemical) * density_moment(g1, 1.0) +
                    0.5 * params.coupling *
                        (density_moment(g1, 2.0) - density_moment(g1, 1.0));
    double hop = std::real((g2.mat * a_dag_a).trace());
    double from_rdm = onsite - params.hopping * hop;
    double direct = expectation_energy(psi, h) / lat.num_sites();
    worst = std::max(worst, std::abs(from_rdm - direct));
  }
  return {"rdm_energy_identity", worst <= 1e-9, 1e-9 - worst,
          "energy per site from (g1, g2) vs <H>/|L| on 10 random states"};
}

CheckItem hamiltonian_hermiticity(std::uint64_t seed) {
  Rng rng(Rng::derive(seed, 14));
  Lattice lat(2, 2);
  FockCutoff cutoff{2};
  SparseHamiltonian h = build_hamiltonian({0.7, -0.3, 1.3}, lat, cutoff);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXcd u = random_unit_vector(h.dimension(), rng);
    Eigen::VectorXcd v = random_unit_vector(h.dimension(), rng);
    Eigen::VectorXcd hu, hv;
    h.apply(u, hu);
    h.apply(v, hv);
    worst = std::max(worst, std::abs(u.dot(hv) - std::conj(v.dot(hu))));
  }
  return {"hamiltonian_hermiticity", worst <= 1e-10, 1e-10 - worst,
          "|<u,Hv> - conj(<v,Hu>)| on random vectors"};
}

CheckItem exact_conservation(std::uint64_t seed) {
  Rng rng(Rng::derive(seed, 15));
  Lattice lat(2, 1);
  FockCutoff cutoff{3};
  ModelParams params{1.0, 0.5, 1.0};
  SparseHamiltonian h = build_hamiltonian(params, lat, cutoff);
  ManyBodyState psi0 = product_state(random_unit_vector(cutoff.dim(), rng), lat, cutoff);
  auto traj = evolve_exact(h, psi0, linspace(1.0, 6), {1e-10, 30, 1});
  double n0 = expectation_total_number(traj.front());
  double e0 = expectation_energy(traj.front(), h);
  double worst = 0.0;
  for (const auto& psi : traj) {
    worst = std::max(worst, std::abs(psi.norm() - 1.0));
    worst = std::max(worst, std::abs(expectation_total_number(psi) - n0));
    worst = std::max(worst, std::abs(expectation_energy(psi, h) - e0));
  }
  return {"exact_conservation", worst <= 1e-8, 1e-8 - worst,
          "norm, number, energy drift on a random Gutzwiller run"};
}

CheckItem krylov_vs_dense(std::uint64_t seed) {
  Rng rng(Rng::derive(seed, 16));
  double worst = 0.0;
  struct Config { int L, d, M; };
  for (Config c : {Config{2, 1, 3}, Config{3, 1, 2}, Config{2, 2, 1}}) {
    Lattice lat(c.L, c.d);
    FockCutoff cutoff{c.M};
    SparseHamiltonian h = build_hamiltonian({1.0, 0.5, 1.0}, lat, cutoff);
    ManyBodyState psi0{random_unit_vector(h.dimension(), rng), cutoff, lat.num_sites()};
    auto krylov = evolve_exact(h, psi0, {1.0}, {1e-10, 30, 1});
    auto dense = evolve_dense(h, psi0, {1.0});
    worst = std::max(worst,
                     (krylov.front().amplitudes - dense.front().amplitudes).norm());
  }
  return {"krylov_vs_dense_oracle", worst <= 1e-8, 1e-8 - worst,
          "Krylov vs dense diagonalization at t = 1 on small configs"};
}

CheckItem mf_conservation() {
  FockCutoff cutoff{24};
  ModelParams params{1.0, 0.5, 1.0};
  std::vector<Eigen::VectorXcd> states;
  Eigen::VectorXcd fock = Eigen::VectorXcd::Zero(cutoff.dim());
  fock[1] = 1.0;
  states.push_back(fock);
  Eigen::VectorXcd half = Eigen::VectorXcd::Zero(cutoff.dim());
  half[0] = half[1] = 1.0 / std::sqrt(2.0);
  states.push_back(half);
  Eigen::VectorXcd witness = Eigen::VectorXcd::Zero(cutoff.dim());
  witness[0] = -std::sqrt(2.0) / 2.0;
  witness[1] = 0.5;
  witness[2] = 0.5;
  states.push_back(witness);

  double worst = 0.0;
  for (const auto& phi0 : states) {
    MfTrajectory traj = evolve_mf(phi0, params, cutoff, linspace(1.0, 6), 1e-3);
    double n0 = mf_moment(traj.states.front().phi, 1.0);
    double e0 = mf_energy(traj.states.front().phi, params);
    for (const MfState& st : traj.states) {
      worst = std::max(worst, std::abs(st.phi.norm() - 1.0));
      worst = std::max(worst, std::abs(mf_moment(st.phi, 1.0) - n0));
      worst = std::max(worst, std::abs(mf_energy(st.phi, params) - e0));
    }
  }
  return {"mf_conservation", worst <= 1e-8, 1e-8 - worst,
          "norm, <N>, energy drift for the three reference initial states"};
}

CheckItem mott_onset_slope() {
  FockCutoff cutoff{8};
  Eigen::VectorXcd witness = Eigen::VectorXcd::Zero(cutoff.dim());
  witness[0] = -std::sqrt(2.0) / 2.0;
  witness[1] = 0.5;
  witness[2] = 0.5;
  MfTrajectory traj = evolve_mf(witness, {0.0, 0.0, 1.0}, cutoff, {1e-3}, 1e-4);
  double slope = std::abs(traj.states.front().alpha) / 1e-3;
  double expected = std::sqrt(2.0) / 4.0;
  double rel = std::abs(slope - expected) / expected;
  return {"mott_onset_slope", rel <= 0.01, 0.01 - rel,
          "d|alpha|/dt at t = 0 for the Mott-velocity witness vs sqrt(2)/4"};
}

CheckItem fock_stationarity() {
  FockCutoff cutoff{6};
  Eigen::VectorXcd fock = Eigen::VectorXcd::Zero(cutoff.dim());
  fock[1] = 1.0;
  Eigen::MatrixXcd p0 = fock * fock.adjoint();
  double worst = 0.0;
  for (ModelParams params : {ModelParams{1.0, 0.0, 0.0}, ModelParams{0.5, 1.0, 1.0},
                             ModelParams{2.0, -0.5, 0.7}}) {
    MfTrajectory traj = evolve_mf(fock, params, cutoff, linspace(2.0, 9), 1e-3);
    for (const MfState& st : traj.states) {
      Eigen::MatrixXcd p = st.phi * st.phi.adjoint();
      worst = std::max(worst, trace_norm(p - p0));
    }
  }
  return {"fock_stationarity", worst <= 1e-8, 1e-8 - worst,
          "||p(t) - p(0)||_1 for Fock initial data over a parameter grid"};
}

CheckItem gauge_invariance(std::uint64_t seed) {
  Rng rng(Rng::derive(seed, 17));
  FockCutoff cutoff{6};
  Eigen::VectorXcd phi0 = random_unit_vector(cutoff.dim(), rng);
  std::complex<double> phase = std::exp(std::complex<double>(0.0, 0.73));
  ModelParams params{1.0, 0.5, 1.0};
  auto grid = linspace(1.0, 5);
  MfTrajectory a = evolve_mf(phi0, params, cutoff, grid, 1e-3);
  MfTrajectory b = evolve_mf((phase * phi0).eval(), params, cutoff, grid, 1e-3);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Eigen::MatrixXcd pa = a.states[i].phi * a.states[i].phi.adjoint();
    Eigen::MatrixXcd pb = b.states[i].phi * b.states[i].phi.adjoint();
    worst = std::max(worst, (pa - pb).cwiseAbs().maxCoeff());
    worst = std::max(worst,
                     std::abs(std::abs(a.states[i].alpha) - std::abs(b.states[i].alpha)));
  }
  return {"gauge_invariance", worst <= 1e-10, 1e-10 - worst,
          "projector trajectory and |alpha| under a global phase on phi0"};
}

CheckItem reduction_consistency(std::uint64_t seed) {
  Rng rng(Rng::derive(seed, 18));
  Lattice lat(2, 2);
  FockCutoff cutoff{2};
  FockBasis basis(cutoff, lat.num_sites());
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    ManyBodyState psi{random_unit_vector(basis.dimension(), rng), cutoff,
                      lat.num_sites()};
    OneSiteDensity g1 = reduce_one_site(psi, lat);
    TwoSiteDensity g2 = reduce_two_site(psi, lat);
    worst = std::max(worst, (partial_trace_first(g2) - g1.mat).cwiseAbs().maxCoeff());
    worst = std::max(worst, (partial_trace_second(g2) - g1.mat).cwiseAbs().maxCoeff());
    worst = std::max(worst, std::abs(g2.mat.trace().real() - 1.0));
    // swap symmetry
    const int s = cutoff.dim();
    for (int a = 0; a < s; ++a)
      for (int b = 0; b < s; ++b)
        for (int c = 0; c < s; ++c)
          for (int e = 0; e < s; ++e)
            worst = std::max(worst, std::abs(g2.mat(a * s + b, c * s + e) -
                                             g2.mat(b * s + a, e * s + c)));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g2.mat);
    worst = std::max(worst, std::max(0.0, -es.eigenvalues().minCoeff()));
  }
  return {"two_site_reduction_consistency", worst <= 1e-10, 1e-10 - worst,
          "partial traces equal g1, swap symmetry, PSD, trace 1"};
}

CheckItem product_reduction(std::uint64_t seed) {
  Rng rng(Rng::derive(seed, 19));
  Lattice lat(2, 2);
  FockCutoff cutoff{2};
  Eigen::VectorXcd phi = random_unit_vector(cutoff.dim(), rng);
  ManyBodyState psi = product_state(phi, lat, cutoff);
  OneSiteDensity g1 = reduce_one_site(psi, lat);
  double worst = (g1.mat - phi * phi.adjoint()).cwiseAbs().maxCoeff();
  return {"gutzwiller_reduction_exact", worst <= 1e-12, 1e-12 - worst,
          "one-site reduction of a product state equals |phi><phi|"};
}

CheckItem gutzwiller_g_zero(std::uint64_t seed) {
  Rng rng(Rng::derive(seed, 20));
  Lattice lat(2, 1);
  FockCutoff cutoff{2};
  ModelParams params{1.0, 0.5, 1.0};
  SparseHamiltonian h = build_hamiltonian(params, lat, cutoff);
  Eigen::VectorXcd phi = random_unit_vector(cutoff.dim(), rng);
  ManyBodyState psi = product_state(phi, lat, cutoff);
  double c = default_c_constant(params, phi, 1.0);
  ExcitationFunctionals fg = excitation_functionals(psi, h, phi, c);
  double worst = std::abs(fg.g);
  return {"gutzwiller_g_zero", worst <= 1e-12, 1e-12 - worst,
          "g(0) = 0 for Gutzwiller initial data"};
}

CheckItem mf_moment_bounds() {
  FockCutoff cutoff{16};
  Eigen::VectorXcd phi0 = Eigen::VectorXcd::Zero(cutoff.dim());
  phi0[0] = phi0[1] = 1.0 / std::sqrt(2.0);
  MfTrajectory traj = evolve_mf(phi0, {1.0, 0.5, 1.0}, cutoff, linspace(1.0, 6), 1e-3);
  MomentBoundReport b1 = moment_bound_mf(traj, {1.0, 2.0, 4.0});
  MomentBoundReport b2 = moment_bound_mf_finite_sum(traj, {2.0});
  double min_margin = 1.0;
  for (const auto& r : b1.rows) min_margin = std::min(min_margin, r.margin);
  for (const auto& r : b2.rows) min_margin = std::min(min_margin, r.margin);
  return {"mf_moment_bounds", b1.pass && b2.pass, min_margin,
          "exponential and finite-sum moment bounds on a mean-field run"};
}

CheckItem refinement_stationary() {
  Eigen::VectorXcd fock = Eigen::VectorXcd::Zero(3);
  fock[1] = 1.0;
  RefinementReport rep = truncation_refine(fock, {1.0, 0.0, 1.0}, 1.0, {2, 4, 8}, 1e-3, 5);
  double worst = 0.0;
  for (const auto& s : rep.steps)
    worst = std::max({worst, s.sup_state_delta, s.sup_projector_delta});
  return {"refinement_fock_stationary", worst <= 1e-10, 1e-10 - worst,
          "refinement deltas vanish for stationary Fock initial data"};
}

}  // namespace

CheckReport run_check_suite(std::uint64_t seed, int threads) {
  (void)threads;
  CheckReport report;
  report.items.push_back(ladder_algebra());
  report.items.push_back(lattice_counting());
  report.items.push_back(sandwich_inequality(seed));
  report.items.push_back(iterated_cauchy_schwarz(seed));
  report.items.push_back(energy_identity(seed));
  report.items.push_back(hamiltonian_hermiticity(seed));
  report.items.push_back(exact_conservation(seed));
  report.items.push_back(krylov_vs_dense(seed));
  report.items.push_back(mf_conservation());
  report.items.push_back(mott_onset_slope());
  report.items.push_back(fock_stationarity());
  report.items.push_back(gauge_invariance(seed));
  report.items.push_back(reduction_consistency(seed));
  report.items.push_back(product_reduction(seed));
  report.items.push_back(gutzwiller_g_zero(seed));
  report.items.push_back(mf_moment_bounds());
  report.items.push_back(refinement_stationary());
  report.all_pass = true;
  for (const auto& item : report.items) report.all_pass = report.all_pass && item.pass;
  return report;
}

}  // namespace bhmf
