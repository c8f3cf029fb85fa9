#include "bhmf/reduced.hpp"

#include <cmath>

#include "bhmf/errors.hpp"
#include "bhmf/fock.hpp"

namespace bhmf {

Projectors make_projectors(const Eigen::VectorXcd& phi) {
  Projectors proj;
  proj.phi = phi;
  proj.p = phi * phi.adjoint();
  proj.q = Eigen::MatrixXcd::Identity(phi.size(), phi.size()) - proj.p;
  return proj;
}

OneSiteDensity reduce_one_site(const ManyBodyState& psi, const Lattice& lattice) {
  FockBasis basis = psi.basis();
  if (lattice.num_sites() != psi.num_sites)
    throw ConfigError("state/lattice site count mismatch");
  const int s = basis.site_dim();
  const std::int64_t dim = basis.dimension();
  Eigen::MatrixXcd gamma = Eigen::MatrixXcd::Zero(s, s);

  for (int site = 0; site < psi.num_sites; ++site) {
    const std::int64_t stride = basis.stride(site);
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(s, s);
    for (std::int64_t index = 0; index < dim; ++index) {
      if (basis.occupation(index, site) != 0) continue;  // enumerate environment once
      for (int m = 0; m < s; ++m) {
        std::complex<double> am = psi.amplitudes[index + m * stride];
        if (am == 0.0) continue;
        for (int n = 0; n < s; ++n) {
          g(m, n) += am * std::conj(psi.amplitudes[index + n * stride]);
        }
      }
    }
    gamma += g;
  }
  gamma /= static_cast<double>(psi.num_sites);
  return {gamma};
}

Eigen::MatrixXcd reduce_pair(const ManyBodyState& psi, int site_x, int site_y) {
  if (site_x == site_y) throw ConfigError("pair reduction needs two distinct sites");
  FockBasis basis = psi.basis();
  const int s = basis.site_dim();
  const std::int64_t sx = basis.stride(site_x);
  const std::int64_t sy = basis.stride(site_y);
  const std::int64_t dim = basis.dimension();
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(s * s, s * s);
  for (std::int64_t index = 0; index < dim; ++index) {
    if (basis.occupation(index, site_x) != 0) continue;
    if (basis.occupation(index, site_y) != 0) continue;
    for (int a = 0; a < s; ++a) {
      for (int b = 0; b < s; ++b) {
        std::complex<double> amp = psi.amplitudes[index + a * sx + b * sy];
        if (amp == 0.0) continue;
        for (int c = 0; c < s; ++c) {
          for (int e = 0; e < s; ++e) {
            rho(a * s + b, c * s + e) +=
                amp * std::conj(psi.amplitudes[index + c * sx + e * sy]);
          }
        }
      }
    }
  }
  return rho;
}

namespace {

Eigen::MatrixXcd swap_slots(const Eigen::MatrixXcd& rho, int s) {
  Eigen::MatrixXcd out(rho.rows(), rho.cols());
  for (int a = 0; a < s; ++a)
    for (int b = 0; b < s; ++b)
      for (int c = 0; c < s; ++c)
        for (int e = 0; e < s; ++e)
          out(b * s + a, e * s + c) = rho(a * s + b, c * s + e);
  return out;
}

}  // namespace

TwoSiteDensity reduce_two_site(const ManyBodyState& psi, const Lattice& lattice) {
  if (lattice.num_sites() != psi.num_sites)
    throw ConfigError("state/lattice site count mismatch");
  const int s = psi.cutoff.dim();
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(s * s, s * s);
  // each directed bond enters in both slot orders; together with the bond
  // list this realizes the sum over ordered neighbor pairs (2d|Lambda| terms)
  for (const Bond& b : lattice.bonds()) {
    Eigen::MatrixXcd rho = reduce_pair(psi, b.source, b.target);
    acc += rho;
    acc += swap_slots(rho, s);
  }
  acc /= static_cast<double>(2 * lattice.bonds().size());
  return {acc, s};
}

Eigen::MatrixXcd partial_trace_first(const TwoSiteDensity& rho) {
  const int s = rho.site_dim;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(s, s);
  for (int b = 0; b < s; ++b)
    for (int e = 0; e < s; ++e)
      for (int a = 0; a < s; ++a) out(b, e) += rho.mat(a * s + b, a * s + e);
  return out;
}

Eigen::MatrixXcd partial_trace_second(const TwoSiteDensity& rho) {
  const int s = rho.site_dim;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(s, s);
  for (int a = 0; a < s; ++a)
    for (int c = 0; c < s; ++c)
      for (int b = 0; b < s; ++b) out(a, c) += rho.mat(a * s + b, c * s + b);
  return out;
}

double trace_norm(const Eigen::MatrixXcd& hermitian) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hermitian);
  if (solver.info() != Eigen::Success)
    throw NumericalError("eigensolver failed in trace norm");
  return solver.eigenvalues().cwiseAbs().sum();
}

double trace_norm_distance(const OneSiteDensity& gamma, const Projectors& proj) {
  if (gamma.mat.rows() != proj.p.rows())
    throw ConfigError("density/projector dimension mismatch");
  return trace_norm(gamma.mat - proj.p);
}

double q_moment(const OneSiteDensity& gamma, const Projectors& proj, int k) {
  if (k == 0) return std::real((gamma.mat * proj.q).trace());
  FockCutoff cutoff{static_cast<int>(gamma.mat.rows()) - 1};
  Eigen::MatrixXcd qnq =
      proj.q * number_power(cutoff, static_cast<double>(k)) * proj.q;
  return std::real((gamma.mat * qnq).trace());
}

double density_moment(const OneSiteDensity& gamma, double k) {
  double acc = 0.0;
  for (Eigen::Index n = 0; n < gamma.mat.rows(); ++n) {
    double w = std::real(gamma.mat(n, n));
    if (n == 0 && k == 0.0)
      acc += w;
    else
      acc += w * std::pow(static_cast<double>(n), k);
  }
  return acc;
}

OneSiteDensity random_density(int dim, Rng& rng) {
  Eigen::MatrixXcd g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = rng.next_complex_normal();
  Eigen::MatrixXcd rho = g * g.adjoint();
  rho /= rho.trace().real();
  return {rho};
}

Eigen::VectorXcd random_unit_vector(int dim, Rng& rng) {
  Eigen::VectorXcd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = rng.next_complex_normal();
  return v / v.norm();
}

}  // namespace bhmf
