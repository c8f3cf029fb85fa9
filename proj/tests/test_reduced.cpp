#include <doctest.h>

#include <cmath>

#include "bhmf/errors.hpp"
#include "bhmf/meanfield.hpp"
#include "bhmf/manybody.hpp"
#include "bhmf/reduced.hpp"
#include "bhmf/rng.hpp"

using namespace bhmf;

TEST_CASE("one-site reduction of a product state is the pure projector") {
  Rng rng(51);
  Lattice lat(2, 2);
  FockCutoff cutoff{2};
  Eigen::VectorXcd phi = random_unit_vector(3, rng);
  ManyBodyState psi = product_state(phi, lat, cutoff);
  OneSiteDensity gamma = reduce_one_site(psi, lat);
  CHECK((gamma.mat - phi * phi.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("entangled pair: gamma is the maximally mixed two-level state") {
  Lattice lat(2, 1);
  FockCutoff cutoff{1};
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(4);
  amps[1] = amps[2] = 1.0 / std::sqrt(2.0);  // (|10> + |01>)/sqrt(2)
  ManyBodyState psi{amps, cutoff, 2};
  OneSiteDensity gamma = reduce_one_site(psi, lat);
  CHECK(std::abs(gamma.mat(0, 0).real() - 0.5) < 1e-12);
  CHECK(std::abs(gamma.mat(1, 1).real() - 0.5) < 1e-12);
  CHECK(std::abs(gamma.mat(0, 1)) < 1e-12);
}

TEST_CASE("one perturbed site: Tr(gamma q) = 1/|Lambda|") {
  Lattice lat(2, 2);
  FockCutoff cutoff{1};
  Eigen::VectorXcd phi(2), perp(2);
  phi << 1.0, 0.0;
  perp << 0.0, 1.0;
  ManyBodyState psi = perturbed_product_state(phi, perp, 1, lat, cutoff);
  OneSiteDensity gamma = reduce_one_site(psi, lat);
  Projectors proj = make_projectors(phi);
  CHECK(q_moment(gamma, proj, 0) ==
        doctest::Approx(1.0 / lat.num_sites()).epsilon(1e-12));
}

TEST_CASE("two-site reduction of a product state is the pure pair projector") {
  Rng rng(53);
  Lattice lat(2, 1);
  FockCutoff cutoff{2};
  Eigen::VectorXcd phi = random_unit_vector(3, rng);
  ManyBodyState psi = product_state(phi, lat, cutoff);
  TwoSiteDensity g2 = reduce_two_site(psi, lat);
  Eigen::VectorXcd pair(9);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) pair[a * 3 + b] = phi[a] * phi[b];
  CHECK((g2.mat - pair * pair.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("two-site density on the entangled pair") {
  Lattice lat(2, 1);
  FockCutoff cutoff{1};
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(4);
  amps[1] = amps[2] = 1.0 / std::sqrt(2.0);
  ManyBodyState psi{amps, cutoff, 2};
  TwoSiteDensity g2 = reduce_two_site(psi, lat);
  // support on {|10>, |01>} with off-diagonal 1/2 (slot index a*2+b)
  CHECK(std::abs(g2.mat(2, 2).real() - 0.5) < 1e-12);
  CHECK(std::abs(g2.mat(1, 1).real() - 0.5) < 1e-12);
  CHECK(std::abs(g2.mat(2, 1).real() - 0.5) < 1e-12);
  CHECK(std::abs(g2.mat(0, 0)) < 1e-12);
  CHECK(std::abs(g2.mat(3, 3)) < 1e-12);
}

TEST_CASE("two-site invariants on evolved states") {
  Lattice lat(2, 2);
  FockCutoff cutoff{2};
  SparseHamiltonian h = build_hamiltonian({1.0, 0.5, 1.0}, lat, cutoff);
  Rng rng(57);
  ManyBodyState psi0 = product_state(random_unit_vector(3, rng), lat, cutoff);
  auto traj = evolve_exact(h, psi0, {0.4, 1.1});
  const int s = cutoff.dim();
  for (const auto& psi : traj) {
    OneSiteDensity g1 = reduce_one_site(psi, lat);
    TwoSiteDensity g2 = reduce_two_site(psi, lat);

    CHECK(std::abs(g2.mat.trace().real() - 1.0) < 1e-10);
    CHECK((g2.mat - g2.mat.adjoint().eval()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((partial_trace_first(g2) - g1.mat).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((partial_trace_second(g2) - g1.mat).cwiseAbs().maxCoeff() < 1e-10);

    double swap_dev = 0.0;
    for (int a = 0; a < s; ++a)
      for (int b = 0; b < s; ++b)
        for (int c = 0; c < s; ++c)
          for (int e = 0; e < s; ++e)
            swap_dev = std::max(swap_dev, std::abs(g2.mat(a * s + b, c * s + e) -
                                                   g2.mat(b * s + a, e * s + c)));
    CHECK(swap_dev < 1e-10);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es1(g1.mat), es2(g2.mat);
    CHECK(es1.eigenvalues().minCoeff() >= -1e-10);
    CHECK(es2.eigenvalues().minCoeff() >= -1e-10);
    CHECK(std::abs(g1.mat.trace().real() - 1.0) < 1e-10);

    // energy per site from (g1, g2) matches <H>/|Lambda| on the evolved state
    const ModelParams& p = h.params();
    Eigen::MatrixXcd hop = Eigen::MatrixXcd::Zero(s * s, s * s);
    LadderOperators ops = build_ladder(cutoff);
    for (int a = 0; a < s; ++a)
      for (int b = 0; b < s; ++b)
        for (int c = 0; c < s; ++c)
          for (int e = 0; e < s; ++e)
            hop(a * s + b, c * s + e) =
                ops.creation.mat(a, c) * ops.annihilator.mat(b, e);
    double from_rdm =
        (p.hopping - p.chemical) * density_moment(g1, 1.0) +
        0.5 * p.coupling * (density_moment(g1, 2.0) - density_moment(g1, 1.0)) -
        p.hopping * std::real((g2.mat * hop).trace());
    CHECK(std::abs(from_rdm - expectation_energy(psi, h) / lat.num_sites()) <= 1e-9);
  }
}

TEST_CASE("trace-norm distance on aligned and orthogonal states") {
  Rng rng(59);
  Eigen::VectorXcd phi = random_unit_vector(4, rng);
  Projectors proj = make_projectors(phi);
  OneSiteDensity aligned{proj.p};
  CHECK(trace_norm_distance(aligned, proj) < 1e-12);

  // explicit orthogonal vector: difference has eigenvalues +1 and -1
  Eigen::VectorXcd perp = random_unit_vector(4, rng);
  perp -= phi.dot(perp) * phi;
  perp /= perp.norm();
  OneSiteDensity orth{perp * perp.adjoint()};
  CHECK(trace_norm_distance(orth, proj) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("trace-norm sandwich on seeded Ginibre ensembles") {
  Rng rng(61);
  for (int m : {1, 2, 4, 8}) {
    CAPTURE(m);
    for (int trial = 0; trial < 100; ++trial) {
      OneSiteDensity gamma = random_density(m + 1, rng);
      Projectors proj = make_projectors(random_unit_vector(m + 1, rng));
      double trq = q_moment(gamma, proj, 0);
      double tn = trace_norm_distance(gamma, proj);
      CHECK(tn - 2.0 * trq >= -1e-10);
      CHECK(2.0 * std::sqrt(2.0) * std::sqrt(std::max(0.0, trq)) - tn >= -1e-10);
    }
  }
}

TEST_CASE("q moments: aligned density gives zero, orthogonal gives one") {
  Rng rng(67);
  Eigen::VectorXcd phi = random_unit_vector(5, rng);
  Projectors proj = make_projectors(phi);
  OneSiteDensity aligned{proj.p};
  for (int k : {0, 1, 2}) CHECK(std::abs(q_moment(aligned, proj, k)) < 1e-12);

  Eigen::VectorXcd perp = random_unit_vector(5, rng);
  perp -= phi.dot(perp) * phi;
  perp /= perp.norm();
  OneSiteDensity orth{perp * perp.adjoint()};
  CHECK(q_moment(orth, proj, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("iterated Cauchy-Schwarz on seeded random triples") {
  Rng rng(71);
  for (int trial = 0; trial < 100; ++trial) {
    int m = 2 + static_cast<int>(rng.next_u64() % 7);
    OneSiteDensity gamma = random_density(m + 1, rng);
    Projectors proj = make_projectors(random_unit_vector(m + 1, rng));
    for (int k : {1, 2}) {
      double lhs = q_moment(gamma, proj, k);
      double rhs = 2.0 * density_moment(gamma, static_cast<double>(k)) +
                   2.0 * mf_moment(proj.phi, static_cast<double>(k));
      CHECK(rhs - lhs >= -1e-10);
      CHECK(lhs >= -1e-12);
    }
  }
}

TEST_CASE("projector algebra invariants") {
  Rng rng(73);
  Projectors proj = make_projectors(random_unit_vector(6, rng));
  CHECK((proj.p * proj.p - proj.p).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((proj.q * proj.q - proj.q).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((proj.p * proj.q).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Ginibre densities are valid states") {
  Rng rng(79);
  for (int trial = 0; trial < 20; ++trial) {
    OneSiteDensity rho = random_density(5, rng);
    CHECK(std::abs(rho.mat.trace().real() - 1.0) < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.mat);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
  }
}

TEST_CASE("dimension mismatches are rejected") {
  Lattice lat(2, 1);
  FockCutoff cutoff{1};
  ManyBodyState psi = fock_basis_state({1, 0}, lat, cutoff);
  Lattice other(3, 1);
  CHECK_THROWS_AS(reduce_one_site(psi, other), ConfigError);
  Rng rng(83);
  OneSiteDensity gamma = random_density(3, rng);
  Projectors proj = make_projectors(random_unit_vector(2, rng));
  CHECK_THROWS_AS(trace_norm_distance(gamma, proj), ConfigError);
}
