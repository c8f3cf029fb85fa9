#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "bhmf/errors.hpp"
#include "bhmf/io.hpp"
#include "bhmf/manybody.hpp"

namespace bhmf {

namespace {

constexpr std::complex<double> kImagUnit{0.0, 1.0};

struct LanczosDecomposition {
  std::vector<Eigen::VectorXcd> basis;  // orthonormal Krylov vectors
  Eigen::VectorXd diag;                 // alpha_j (real, H Hermitian)
  Eigen::VectorXd offdiag;              // beta_j, offdiag[j] couples j and j+1
  double residual_beta = 0.0;           // norm that would start vector m+1
  bool happy = false;                   // invariant subspace reached
};

/// Lanczos with full reorthogonalization inside the (small) basis.
LanczosDecomposition lanczos(const SparseHamiltonian& h, const Eigen::VectorXcd& v0,
                             int m, int threads) {
  LanczosDecomposition dec;
  dec.basis.reserve(m);
  dec.diag.resize(m);
  dec.offdiag.resize(m);

  Eigen::VectorXcd v = v0 / v0.norm();
  Eigen::VectorXcd w(v.size());
  double scale = 1.0;
  for (int j = 0; j < m; ++j) {
    dec.basis.push_back(v);
    h.apply(dec.basis[j], w, threads);
    double alpha = std::real(dec.basis[j].dot(w));
    w -= alpha * dec.basis[j];
    if (j > 0) w -= dec.offdiag[j - 1] * dec.basis[j - 1];
    for (int k = 0; k <= j; ++k) w -= dec.basis[k].dot(w) * dec.basis[k];
    dec.diag[j] = alpha;
    double beta = w.norm();
    scale = std::max({scale, std::abs(alpha), beta});
    if (beta <= 1e-13 * scale) {
      dec.diag.conservativeResize(j + 1);
      dec.offdiag.conservativeResize(j);
      dec.residual_beta = 0.0;
      dec.happy = true;
      return dec;
    }
    if (j + 1 < m) {
      dec.offdiag[j] = beta;
      v = w / beta;
    } else {
      dec.residual_beta = beta;
    }
  }
  dec.offdiag.conservativeResize(m - 1);
  return dec;
}

struct KrylovExp {
  Eigen::MatrixXd vectors;  // eigenvectors of the tridiagonal T
  Eigen::VectorXd values;

  /// exp(-i tau T) e_1
  Eigen::VectorXcd propagate(double tau) const {
    Eigen::VectorXcd phase(values.size());
    for (Eigen::Index i = 0; i < values.size(); ++i)
      phase[i] = std::exp(-kImagUnit * tau * values[i]);
    Eigen::VectorXcd tmp = vectors.row(0).transpose().cast<std::complex<double>>();
    tmp.array() *= phase.array();
    return vectors.cast<std::complex<double>>() * tmp;
  }
};

KrylovExp diagonalize_tridiag(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, offdiag);
  if (solver.info() != Eigen::Success)
    throw NumericalError("tridiagonal eigensolver failed in Krylov propagation");
  return {solver.eigenvectors(), solver.eigenvalues()};
}

/// Defect-integral estimate of the local Krylov error over a substep of
/// length tau: || residual || integrates beta_m |u_m(s)|, approximated with
/// Simpson (u_m(0) = 0 for m > 1).
double local_error(const KrylovExp& exp_t, double residual_beta, double tau, int m) {
  if (residual_beta == 0.0) return 0.0;
  double um_half = std::abs(exp_t.propagate(tau / 2)[m - 1]);
  double um_full = std::abs(exp_t.propagate(tau)[m - 1]);
  double integral = std::abs(tau) / 6.0 * (4.0 * um_half + um_full);
  return residual_beta * integral;
}

}  // namespace

std::vector<ManyBodyState> evolve_exact(const SparseHamiltonian& h,
                                        const ManyBodyState& psi0,
                                        const std::vector<double>& t_grid,
                                        const EvolveOptions& opts) {
  if (opts.tol < 1e-14 || opts.tol > 1e-6)
    throw ConfigError("krylov_tol must lie in [1e-14, 1e-6]");
  if (std::abs(psi0.norm() - 1.0) > 1e-8)
    throw ConfigError("initial many-body state is not normalized");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1]))
      throw ConfigError("time grid must be strictly increasing");

  const std::int64_t dim = h.dimension();
  if (psi0.amplitudes.size() != dim) throw ConfigError("state/Hamiltonian mismatch");
  const int m_max = std::max(2, std::min<int>(opts.krylov_dim, static_cast<int>(dim)));

  std::vector<ManyBodyState> out;
  out.reserve(t_grid.size());
  Eigen::VectorXcd psi = psi0.amplitudes;
  double t_now = 0.0;

  for (double t_target : t_grid) {
    double remaining = t_target - t_now;
    double tau_suggest = remaining;
    while (std::abs(remaining) > 1e-15 * std::max(1.0, std::abs(t_target))) {
      double beta0 = psi.norm();
      LanczosDecomposition dec = lanczos(h, psi, m_max, opts.threads);
      const int m = static_cast<int>(dec.diag.size());
      KrylovExp exp_t = diagonalize_tridiag(dec.diag, dec.offdiag);

      double tau;
      if (dec.happy) {
        tau = remaining;  // exact on the invariant subspace
      } else {
        tau = std::min(std::max(std::abs(tau_suggest), 1e-14), std::abs(remaining));
        tau = std::copysign(tau, remaining);
        int shrink_iterations = 0;
        while (true) {
          double err = local_error(exp_t, dec.residual_beta, tau, m) * beta0;
          if (err <= opts.tol) {
            tau_suggest = tau * std::min(2.0, 0.9 * std::pow(opts.tol / std::max(err, 1e-300),
                                                             1.0 / m));
            break;
          }
          tau *= 0.9 * std::pow(opts.tol / err, 1.0 / m);
          if (++shrink_iterations > 60)
            throw NumericalError("Krylov substep control failed to meet tolerance");
        }
      }

      Eigen::VectorXcd u = exp_t.propagate(tau);
      psi.setZero();
      for (int k = 0; k < m; ++k) psi += (beta0 * u[k]) * dec.basis[k];
      remaining -= tau;
    }
    t_now = t_target;
    if (!psi.allFinite())
      throw NumericalError("non-finite amplitudes at t = " + format_double(t_now));
    out.push_back(ManyBodyState{psi, psi0.cutoff, psi0.num_sites});
  }
  return out;
}

std::vector<ManyBodyState> evolve_dense(const SparseHamiltonian& h,
                                        const ManyBodyState& psi0,
                                        const std::vector<double>& t_grid) {
  Eigen::MatrixXcd hd = h.dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hd);
  if (solver.info() != Eigen::Success)
    throw NumericalError("dense eigensolver failed");
  const Eigen::MatrixXcd& vecs = solver.eigenvectors();
  const Eigen::VectorXd& vals = solver.eigenvalues();
  Eigen::VectorXcd coeffs = vecs.adjoint() * psi0.amplitudes;

  std::vector<ManyBodyState> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    Eigen::VectorXcd rotated(coeffs.size());
    for (Eigen::Index i = 0; i < coeffs.size(); ++i)
      rotated[i] = coeffs[i] * std::exp(-kImagUnit * t * vals[i]);
    out.push_back(ManyBodyState{vecs * rotated, psi0.cutoff, psi0.num_sites});
  }
  return out;
}

}  // namespace bhmf
