#include <doctest.h>

#include <cmath>
#include <complex>

#include "bhmf/diagnostics.hpp"
#include "bhmf/errors.hpp"
#include "bhmf/rng.hpp"

using namespace bhmf;
using cplx = std::complex<double>;

namespace {

std::vector<double> linspace(double t_final, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = t_final * static_cast<double>(i) / (n - 1);
  return g;
}

struct CompareFixture {
  Lattice lattice{2, 1};
  FockCutoff cutoff{2};
  ModelParams params{1.0, 0.5, 1.0};
  SparseHamiltonian h = build_hamiltonian(params, lattice, cutoff);
  Eigen::VectorXcd phi0 = [] {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(3);
    v[0] = v[1] = 1.0 / std::sqrt(2.0);
    return v;
  }();

  ComparisonSeries track(double t_final, int n, bool with_probe = false) {
    ManyBodyState psi0 = product_state(phi0, lattice, cutoff);
    auto grid = linspace(t_final, n);
    auto exact = evolve_exact(h, psi0, grid);
    MfTrajectory mf = evolve_mf(phi0, params, cutoff, grid, 1e-3);
    double c = default_c_constant(params, phi0, 1.0);
    if (!with_probe) return gronwall_track(exact, mf, h, c);
    DerivativeProbe probe;
    probe.h = 1e-3;
    probe.psi_plus = evolve_exact(h, psi0, {probe.h}).front();
    probe.psi_minus = evolve_exact(h, psi0, {-probe.h}).front();
    probe.phi_plus = evolve_mf(phi0, params, cutoff, {probe.h}, 1e-3).states.front();
    probe.phi_minus = evolve_mf(phi0, params, cutoff, {-probe.h}, 1e-3).states.front();
    return gronwall_track(exact, mf, h, c, &probe);
  }
};

}  // namespace

TEST_CASE("alpha_micro vanishes on number eigenstates and the vacuum") {
  Lattice lat(2, 1);
  FockCutoff cutoff{2};
  CHECK(std::abs(alpha_micro(fock_basis_state({1, 2}, lat, cutoff), lat)) < 1e-14);
  Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(3);
  vac[0] = 1.0;
  CHECK(std::abs(alpha_micro(product_state(vac, lat, cutoff), lat)) < 1e-14);
}

TEST_CASE("alpha_micro on a Gutzwiller product equals the one-site order parameter") {
  Rng rng(91);
  Lattice lat(2, 2);
  FockCutoff cutoff{2};
  Eigen::VectorXcd phi = random_unit_vector(3, rng);
  ManyBodyState psi = product_state(phi, lat, cutoff);
  CHECK(std::abs(alpha_micro(psi, lat) - order_parameter(phi)) < 1e-12);
}

TEST_CASE("excitation functionals on Gutzwiller data: g = 0, f consistent") {
  Rng rng(93);
  Lattice lat(2, 1);
  FockCutoff cutoff{2};
  ModelParams params{1.0, 0.5, 1.0};
  SparseHamiltonian h = build_hamiltonian(params, lat, cutoff);
  Eigen::VectorXcd phi = random_unit_vector(3, rng);
  ManyBodyState psi = product_state(phi, lat, cutoff);
  double c = default_c_constant(params, phi, 1.0);
  ExcitationFunctionals fg = excitation_functionals(psi, h, phi, c);
  CHECK(std::abs(fg.g) < 1e-12);
  // with gamma = p the c q and q h q terms vanish: f = <H>/|L| - <phi, h phi>
  double expected = expectation_energy(psi, h) / lat.num_sites() -
                    std::real(phi.dot(mf_generator(phi, params, cutoff).mat * phi));
  CHECK(fg.f == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("one orthogonally perturbed site: g = (<perp, N^2 perp> + 1)/|Lambda|") {
  Lattice lat(2, 2);
  FockCutoff cutoff{2};
  ModelParams params{1.0, 0.5, 1.0};
  SparseHamiltonian h = build_hamiltonian(params, lat, cutoff);
  Eigen::VectorXcd phi = Eigen::VectorXcd::Zero(3);
  phi[0] = phi[1] = 1.0 / std::sqrt(2.0);
  Eigen::VectorXcd perp = Eigen::VectorXcd::Zero(3);
  perp[2] = 1.0;  // zero occupation overlap with phi
  ManyBodyState psi = perturbed_product_state(phi, perp, 1, lat, cutoff);
  double c = default_c_constant(params, phi, 1.0);
  ExcitationFunctionals fg = excitation_functionals(psi, h, phi, c);
  double expected = (4.0 + 1.0) / lat.num_sites();
  CHECK(fg.g == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("default c assembles the structural constant") {
  Eigen::VectorXcd phi = Eigen::VectorXcd::Zero(3);
  phi[0] = phi[1] = 1.0 / std::sqrt(2.0);
  // J=1, mu=1/2, U=1: (1 + 1 + 0) * (1 + 4 + 1/4) + 1/4 = 10.75
  CHECK(default_c_constant({1.0, 0.5, 1.0}, phi, 1.0) ==
        doctest::Approx(10.75).epsilon(1e-14));
}

TEST_CASE("J = 0: the product ansatz is exact, Tr(gamma q) stays zero") {
  Lattice lat(2, 1);
  FockCutoff cutoff{2};
  ModelParams params{0.0, 0.5, 1.0};
  SparseHamiltonian h = build_hamiltonian(params, lat, cutoff);
  Eigen::VectorXcd phi0 = Eigen::VectorXcd::Zero(3);
  phi0[0] = phi0[1] = 1.0 / std::sqrt(2.0);
  ManyBodyState psi0 = product_state(phi0, lat, cutoff);
  auto grid = linspace(1.5, 7);
  auto exact = evolve_exact(h, psi0, grid);
  MfTrajectory mf = evolve_mf(phi0, params, cutoff, grid, 1e-3);
  ComparisonSeries series =
      gronwall_track(exact, mf, h, default_c_constant(params, phi0, 1.0));
  for (const auto& row : series.rows) {
    CHECK(std::abs(row.tr_gamma_q) < 1e-10);
    CHECK(row.trace_norm < 1e-9);
  }
}

TEST_CASE("comparison series: start at zero, sandwich and f/g hold throughout") {
  CompareFixture fx;
  ComparisonSeries series = fx.track(1.0, 11, true);
  CHECK(std::abs(series.rows.front().tr_gamma_q) < 1e-12);
  CHECK(series.min_sandwich_slack_lower >= -1e-10);
  CHECK(series.min_sandwich_slack_upper >= -1e-10);
  CHECK(series.fg_equivalence_pass);
  CHECK(series.min_fg_slack >= -1e-10);
  REQUIRE(series.derivative_check.has_value());
  CHECK(series.derivative_check->pass);
  // conservation columns stay flat
  for (const auto& row : series.rows) {
    CHECK(std::abs(row.exact_norm - 1.0) < 1e-9);
    CHECK(std::abs(row.mf_norm - 1.0) < 1e-9);
    CHECK(std::abs(row.exact_total_n - series.rows.front().exact_total_n) < 1e-9);
    CHECK(std::abs(row.energy_exact_per_site - series.rows.front().energy_exact_per_site) <
          1e-9);
  }
}

TEST_CASE("reported scalars are invariant under global phases on both sides") {
  CompareFixture fx;
  ManyBodyState psi0 = product_state(fx.phi0, fx.lattice, fx.cutoff);
  auto grid = linspace(0.5, 4);
  cplx phase_many = std::exp(cplx(0.0, 0.91));
  cplx phase_mf = std::exp(cplx(0.0, -1.37));

  auto exact_a = evolve_exact(fx.h, psi0, grid);
  ManyBodyState psi0_rot{(phase_many * psi0.amplitudes).eval(), fx.cutoff, 2};
  auto exact_b = evolve_exact(fx.h, psi0_rot, grid);
  MfTrajectory mf_a = evolve_mf(fx.phi0, fx.params, fx.cutoff, grid, 1e-3);
  MfTrajectory mf_b =
      evolve_mf((phase_mf * fx.phi0).eval(), fx.params, fx.cutoff, grid, 1e-3);

  double c = default_c_constant(fx.params, fx.phi0, 1.0);
  ComparisonSeries a = gronwall_track(exact_a, mf_a, fx.h, c);
  ComparisonSeries b = gronwall_track(exact_b, mf_b, fx.h, c);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(std::abs(a.rows[i].tr_gamma_q - b.rows[i].tr_gamma_q) < 1e-10);
    CHECK(std::abs(a.rows[i].trace_norm - b.rows[i].trace_norm) < 1e-10);
    CHECK(std::abs(a.rows[i].f - b.rows[i].f) < 1e-9);
    CHECK(std::abs(a.rows[i].g - b.rows[i].g) < 1e-10);
    CHECK(std::abs(std::abs(a.rows[i].alpha_micro) - std::abs(b.rows[i].alpha_micro)) <
          1e-10);
    CHECK(std::abs(a.rows[i].offdiag_hs_avg - b.rows[i].offdiag_hs_avg) < 1e-10);
    CHECK(std::abs(a.rows[i].bond_kinetic_avg - b.rows[i].bond_kinetic_avg) < 1e-10);
  }
}

TEST_CASE("grid mismatch is rejected") {
  CompareFixture fx;
  ManyBodyState psi0 = product_state(fx.phi0, fx.lattice, fx.cutoff);
  auto exact = evolve_exact(fx.h, psi0, linspace(1.0, 5));
  MfTrajectory mf = evolve_mf(fx.phi0, fx.params, fx.cutoff, linspace(1.0, 7), 1e-3);
  CHECK_THROWS_AS(gronwall_track(exact, mf, fx.h, 1.0), ConfigError);
}

TEST_CASE("mean-field moment report: conserved k = 1 moment against a growing bound") {
  Eigen::VectorXcd phi0 = Eigen::VectorXcd::Zero(9);
  phi0[0] = phi0[1] = 1.0 / std::sqrt(2.0);
  MfTrajectory traj = evolve_mf(phi0, {1.0, 0.5, 1.0}, FockCutoff{8}, linspace(1.0, 5), 1e-3);
  MomentBoundReport rep = moment_bound_mf(traj, {1.0});
  CHECK(rep.pass);
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    CHECK(rep.rows[i].measured == doctest::Approx(rep.rows.front().measured).epsilon(1e-9));
    CHECK(rep.rows[i].bound > rep.rows[i - 1].bound);
    CHECK(rep.rows[i].margin > rep.rows[i - 1].margin);
  }
}

TEST_CASE("exact moment bound holds on a small trajectory") {
  Lattice lat(2, 1);
  FockCutoff cutoff{2};
  ModelParams p{1.0, 0.5, 1.0};
  SparseHamiltonian h = build_hamiltonian(p, lat, cutoff);
  Eigen::VectorXcd phi0 = Eigen::VectorXcd::Zero(3);
  phi0[0] = phi0[1] = 1.0 / std::sqrt(2.0);
  ManyBodyState psi0 = product_state(phi0, lat, cutoff);
  auto grid = linspace(1.0, 6);
  auto traj = evolve_exact(h, psi0, grid);
  MomentBoundReport rep = moment_bound_exact(traj, grid, lat, p.hopping, {1.0, 2.0});
  CHECK(rep.pass);
}

TEST_CASE("occupation decay constant witnesses geometric decay") {
  Eigen::VectorXd u(4);
  u << 0.5, 0.25, 0.125, 0.0625;
  double c = occupation_decay_constant(u);
  for (int n = 0; n < 4; ++n) CHECK(u[n] <= c * std::exp(-n) + 1e-15);
}

TEST_CASE("d-sweep: monotone trend, rejected oversize points, intact rows") {
  CompareSpec spec;
  spec.params = {1.0, 0.5, 1.0};
  spec.L = 2;
  spec.M = 1;
  spec.phi0 = Eigen::VectorXcd(2);
  spec.phi0 << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  spec.t_final = 0.3;
  spec.n_samples = 4;
  spec.memory_cap_bytes = 64ull << 20;  // 64 MiB: d = 4 at M = 1 does not fit

  SweepResult result = d_sweep(spec, {1, 2, 3, 4}, {7}, 2);
  REQUIRE(result.rows.size() == 4);
  CHECK_FALSE(result.rows[0].resource_rejected);
  CHECK_FALSE(result.rows[1].resource_rejected);
  CHECK_FALSE(result.rows[2].resource_rejected);
  CHECK(result.rows[3].resource_rejected);
  CHECK(result.rows[3].required_bytes > result.rows[3].available_bytes);
  CHECK(result.rows[0].sup_tr_gamma_q > result.rows[1].sup_tr_gamma_q);
  CHECK(result.rows[1].sup_tr_gamma_q > result.rows[2].sup_tr_gamma_q);
  CHECK(result.rows[0].sup_trace_norm > result.rows[1].sup_trace_norm);
  CHECK(result.rows[1].sup_trace_norm > result.rows[2].sup_trace_norm);
  CHECK(result.rows[0].alpha_diff_final > result.rows[2].alpha_diff_final);
  for (int i = 0; i < 3; ++i) {
    CHECK(result.rows[i].seed == 7);
    CHECK(result.rows[i].ratio_tr_gamma_q_to_inv_d ==
          doctest::Approx(result.rows[i].sup_tr_gamma_q * result.rows[i].d));
  }
}

TEST_CASE("d = 4 at M = 2 is rejected under the default 2 GiB cap") {
  CompareSpec spec;
  spec.params = {1.0, 0.5, 1.0};
  spec.L = 2;
  spec.M = 2;
  spec.phi0 = Eigen::VectorXcd(2);
  spec.phi0 << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  REQUIRE(spec.memory_cap_bytes == 2ull << 30);
  SweepResult result = d_sweep(spec, {4}, {1}, 1);
  REQUIRE(result.rows.size() == 1);
  CHECK(result.rows[0].resource_rejected);
  CHECK(result.rows[0].required_bytes > result.rows[0].available_bytes);

  // at M = 1 the same point fits (dimension 65536)
  Lattice lat(2, 4);
  CHECK(estimate_run_bytes(lat, FockCutoff{1}, 30) <
        static_cast<double>(spec.memory_cap_bytes));
}

TEST_CASE("negative hopping: moment bounds are evaluated with |J|") {
  Lattice lat(2, 1);
  FockCutoff cutoff{2};
  ModelParams p{-1.0, 0.5, 1.0};
  SparseHamiltonian h = build_hamiltonian(p, lat, cutoff);
  Eigen::VectorXcd phi = Eigen::VectorXcd::Zero(3);
  phi[0] = phi[1] = 1.0 / std::sqrt(2.0);
  ManyBodyState psi0 = product_state(phi, lat, cutoff);
  std::vector<double> grid{0.0, 0.5, 1.0};
  auto exact = evolve_exact(h, psi0, grid);
  MfTrajectory mf = evolve_mf(phi, p, cutoff, grid, 1e-3);
  CHECK(moment_bound_mf(mf, {1.0, 2.0}).pass);
  CHECK(moment_bound_exact(exact, grid, lat, p.hopping, {1.0, 2.0}).pass);
}

TEST_CASE("attractive coupling: comparison runs, equivalence is not asserted") {
  Lattice lat(2, 1);
  FockCutoff cutoff{2};
  ModelParams p{1.0, 0.5, -1.0};
  SparseHamiltonian h = build_hamiltonian(p, lat, cutoff);
  Eigen::VectorXcd phi = Eigen::VectorXcd::Zero(3);
  phi[0] = phi[1] = 1.0 / std::sqrt(2.0);
  ManyBodyState psi0 = product_state(phi, lat, cutoff);
  std::vector<double> grid{0.0, 0.5};
  auto exact = evolve_exact(h, psi0, grid);
  MfTrajectory mf = evolve_mf(phi, p, cutoff, grid, 1e-3);
  double c = default_c_constant(p, phi, 1.0);
  CHECK(c > 0.0);
  ComparisonSeries s = gronwall_track(exact, mf, h, c);
  CHECK(s.rows.size() == 2);
  CHECK_FALSE(s.fg_equivalence_pass);
  CHECK(s.min_sandwich_slack_lower >= -1e-10);
}

TEST_CASE("perturbed initial data drives the series off zero by exactly 1/|Lambda|") {
  Lattice lat(2, 2);
  FockCutoff cutoff{2};
  ModelParams p{1.0, 0.5, 1.0};
  SparseHamiltonian h = build_hamiltonian(p, lat, cutoff);
  Eigen::VectorXcd phi = Eigen::VectorXcd::Zero(3);
  phi[0] = phi[1] = 1.0 / std::sqrt(2.0);
  Eigen::VectorXcd perp = Eigen::VectorXcd::Zero(3);
  perp[2] = 1.0;
  ManyBodyState psi0 = perturbed_product_state(phi, perp, 1, lat, cutoff);
  std::vector<double> grid{0.0, 0.2};
  auto exact = evolve_exact(h, psi0, grid);
  MfTrajectory mf = evolve_mf(phi, p, cutoff, grid, 1e-3);
  ComparisonSeries s = gronwall_track(exact, mf, h, default_c_constant(p, phi, 1.0));
  CHECK(s.rows.front().tr_gamma_q == doctest::Approx(0.25).epsilon(1e-10));
  // g(0) = (<perp, N^2 perp> + 1)/|Lambda| = 5/4
  CHECK(s.rows.front().g == doctest::Approx(1.25).epsilon(1e-10));
}
