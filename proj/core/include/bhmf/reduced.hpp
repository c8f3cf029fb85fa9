#pragma once

#include <complex>

#include <Eigen/Dense>

#include "bhmf/manybody.hpp"
#include "bhmf/rng.hpp"

namespace bhmf {

/// Site-averaged one-lattice-site reduced density matrix (Hermitian, PSD,
/// trace 1).
struct OneSiteDensity {
  Eigen::MatrixXcd mat;
};

/// Bond-averaged two-lattice-site reduced density matrix; slot ordering is
/// (first site, second site), normalization 2 d |Lambda|.
struct TwoSiteDensity {
  Eigen::MatrixXcd mat;
  int site_dim = 0;
};

/// p = |phi><phi|, q = 1 - p.
struct Projectors {
  Eigen::VectorXcd phi;
  Eigen::MatrixXcd p;
  Eigen::MatrixXcd q;
};

Projectors make_projectors(const Eigen::VectorXcd& phi);

OneSiteDensity reduce_one_site(const ManyBodyState& psi, const Lattice& lattice);

/// Reduction onto the ordered pair (site_x, site_y) only (no averaging).
Eigen::MatrixXcd reduce_pair(const ManyBodyState& psi, int site_x, int site_y);

/// (1/(2d|Lambda|)) sum over directed bonds of both slot orders.
TwoSiteDensity reduce_two_site(const ManyBodyState& psi, const Lattice& lattice);

Eigen::MatrixXcd partial_trace_first(const TwoSiteDensity& rho);
Eigen::MatrixXcd partial_trace_second(const TwoSiteDensity& rho);

/// Sum of absolute eigenvalues of a Hermitian matrix.
double trace_norm(const Eigen::MatrixXcd& hermitian);

/// ||gamma - p||_1 via symmetric eigendecomposition of the difference.
double trace_norm_distance(const OneSiteDensity& gamma, const Projectors& proj);

/// Tr(gamma q N^k q) for k >= 1, Tr(gamma q) for k = 0.
double q_moment(const OneSiteDensity& gamma, const Projectors& proj, int k);

/// Tr(gamma N^k), k may be half-integer.
double density_moment(const OneSiteDensity& gamma, double k);

/// Full-rank random density via the Ginibre construction G G^* / Tr(G G^*).
OneSiteDensity random_density(int dim, Rng& rng);

Eigen::VectorXcd random_unit_vector(int dim, Rng& rng);

}  // namespace bhmf
