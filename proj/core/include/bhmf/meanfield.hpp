#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "bhmf/fock.hpp"
#include "bhmf/manybody.hpp"

namespace bhmf {

/// One-site mean-field state with its cached order parameter.
struct MfState {
  Eigen::VectorXcd phi;
  std::complex<double> alpha;
  double t = 0.0;
};

struct MfIntegratorSettings {
  double dt = 1e-3;
};

struct MfTrajectory {
  std::vector<MfState> states;
  ModelParams params;
  FockCutoff cutoff;
  MfIntegratorSettings settings;
  double max_norm_drift = 0.0;        // max |  ||phi(t)|| - 1  | over the grid
  double richardson_max_delta = 0.0;  // dt vs dt/2 disagreement, reported only
};

/// alpha_phi = <phi, a phi> = sum_n sqrt(n+1) conj(phi[n]) phi[n+1].
std::complex<double> order_parameter(const Eigen::VectorXcd& phi);

/// h^phi = -J (alpha a* + conj(alpha) a - |alpha|^2) + (J - mu) N
///         + (U/2) N (N - 1), on the truncated site.
SiteOperator mf_generator(const Eigen::VectorXcd& phi, const ModelParams& params,
                          FockCutoff cutoff);

/// Integrates i d/dt phi = A phi + F(phi) in the interaction picture of the
/// diagonal part A = (J - mu) N + (U/2) N (N - 1): the diagonal phase is
/// applied exactly, the hopping dressing F is advanced with classical RK4 at
/// fixed dt. Norm drift is measured and reported, never corrected; drift
/// beyond 1e-6 throws NumericalError. The grid must be strictly monotone
/// (increasing or decreasing) starting from t = 0 data.
MfTrajectory evolve_mf(const Eigen::VectorXcd& phi0, const ModelParams& params,
                       FockCutoff cutoff, const std::vector<double>& t_grid,
                       double dt);

/// J(<N> - |alpha|^2) - mu <N> + (U/2) <N(N-1)>.
double mf_energy(const Eigen::VectorXcd& phi, const ModelParams& params);

/// <phi, N^k phi> for k in N/2 (diagonal, so evaluated spectrally).
double mf_moment(const Eigen::VectorXcd& phi, double k);

/// sum_n (n + shift)^k |phi[n]|^2.
double mf_moment_shifted(const Eigen::VectorXcd& phi, int shift, double k);

struct RefinementStep {
  int cutoff_low = 0;
  int cutoff_high = 0;
  double sup_state_delta = 0.0;      // sup_t || phi_M - phi_M' || (zero-padded)
  double sup_projector_delta = 0.0;  // sup_t Tr | p_M - p_M' |
};

struct RefinementReport {
  std::vector<RefinementStep> steps;
  bool deltas_non_increasing = false;
};

/// Integrates the same initial data at every cutoff in the (strictly
/// increasing) schedule and reports sup-over-grid deltas between consecutive
/// cutoffs.
RefinementReport truncation_refine(const Eigen::VectorXcd& phi0,
                                   const ModelParams& params, double t_final,
                                   const std::vector<int>& schedule, double dt,
                                   int n_samples);

}  // namespace bhmf
