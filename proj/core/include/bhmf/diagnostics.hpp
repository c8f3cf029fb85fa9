#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "bhmf/manybody.hpp"
#include "bhmf/meanfield.hpp"
#include "bhmf/reduced.hpp"

namespace bhmf {

/// (1/|Lambda|) sum_x <Psi, a_x Psi> = Tr(gamma1 a).
std::complex<double> alpha_micro(const ManyBodyState& psi, const Lattice& lattice);
std::complex<double> alpha_from_density(const OneSiteDensity& gamma);

struct ExcitationFunctionals {
  double f = 0.0;  // shifted energy of deviations from the product structure
  double g = 0.0;  // Tr(gamma1 (q N^2 q + q))
};

/// f = <Psi,H Psi>/|Lambda| + Tr(gamma1 (q h^phi q - h^phi + c q)),
/// g = Tr(gamma1 (q N^2 q + q)). Both use the current mean-field generator.
ExcitationFunctionals excitation_functionals(const ManyBodyState& psi,
                                             const SparseHamiltonian& h,
                                             const Eigen::VectorXcd& phi, double c,
                                             int threads = 1);

/// Default shift constant for f: the structural expression
///   C (1 + J^2 + (J - mu - U/2)^2) (1 + 1/eps + <N>_0^2) + U/4,  eps = U/4,
/// with the free absolute constant C configurable (default 1). For U <= 0 the
/// 1/eps term is dropped; the f/g equivalence is only asserted for U > 0.
double default_c_constant(const ModelParams& params, const Eigen::VectorXcd& phi0,
                          double constant_C);

struct ComparisonRecord {
  double t = 0.0;
  double tr_gamma_q = 0.0;
  double trace_norm = 0.0;
  std::complex<double> alpha_micro;
  std::complex<double> alpha_mf;
  double energy_exact_per_site = 0.0;
  double energy_mf = 0.0;
  double f = 0.0;
  double g = 0.0;
  double exact_norm = 0.0;
  double exact_total_n = 0.0;
  double mf_norm = 0.0;
  double mf_n = 0.0;
  // one-particle-density scalars (reported, not part of the CSV contract)
  double offdiag_hs_avg = 0.0;   // (1/|L|^2) sum_xy |<a*_y a_x> - |alpha|^2|^2
  double bond_kinetic_avg = 0.0; // Tr(gamma2 a* x a), compared against |alpha|^2
};

/// States at +/- h around t = 0 for the centered finite-difference check of
/// the Gronwall derivative bound.
struct DerivativeProbe {
  ManyBodyState psi_minus, psi_plus;
  MfState phi_minus, phi_plus;
  double h = 1e-3;
};

struct GronwallDerivativeCheck {
  double fd_derivative = 0.0;  // centered difference of Tr(gamma1 q) at t = 0
  double rhs_bound = 0.0;      // measured right-hand side of the bound
  double h = 0.0;
  bool pass = false;           // |fd| <= 1.1 * rhs + 1e-9
};

struct ComparisonSeries {
  std::vector<ComparisonRecord> rows;
  std::optional<GronwallDerivativeCheck> derivative_check;
  double min_sandwich_slack_lower = 0.0;  // min over t of (trace_norm - 2 tr_gamma_q)
  double min_sandwich_slack_upper = 0.0;  // min over t of (2 sqrt(2 tr_gamma_q) - trace_norm)
  double min_fg_slack = 0.0;              // min over t of (f - (U/4) g + 1/d)
  double minimal_passing_C = 0.0;         // smallest C making the f/g bound hold everywhere
  bool fg_equivalence_pass = false;       // only meaningful for U > 0
  double c_used = 0.0;
};

/// Per-time comparison record between an exact trajectory and a mean-field
/// trajectory on the same grid, plus the t = 0 derivative-bound check when a
/// probe is supplied.
ComparisonSeries gronwall_track(const std::vector<ManyBodyState>& exact_traj,
                                const MfTrajectory& mf_traj,
                                const SparseHamiltonian& h, double c,
                                const DerivativeProbe* probe = nullptr,
                                int threads = 1);

struct MomentBoundRow {
  double k = 0.0;
  double t = 0.0;
  double measured = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // bound - measured
};

struct MomentBoundReport {
  std::vector<MomentBoundRow> rows;
  bool pass = false;
};

/// Tr(p(t) N^k) against (Tr(p0 N^k) + e^{-1} k^k) e^{2 e |J| k sqrt(Tr p0 N) t}.
MomentBoundReport moment_bound_mf(const MfTrajectory& traj,
                                  const std::vector<double>& k_list);

/// The finite-sum propagation bound, evaluated from initial moments.
MomentBoundReport moment_bound_mf_finite_sum(const MfTrajectory& traj,
                                             const std::vector<double>& k_list);

/// Tr(gamma1(t) N^k) against (Tr(gamma1(0) N^k) + e^{-1} k^k) e^{2 e |J| k t}.
MomentBoundReport moment_bound_exact(const std::vector<ManyBodyState>& traj,
                                     const std::vector<double>& t_grid,
                                     const Lattice& lattice, double hopping,
                                     const std::vector<double>& k_list);

/// Geometric-decay fit of the initial occupation distribution: smallest c
/// with u_n <= c e^{-n/a} for a = 1 (always finite on a truncated site).
double occupation_decay_constant(const Eigen::VectorXd& occupation_probabilities);

struct SweepRow {
  int d = 0;
  int L = 0;
  int M = 0;
  std::uint64_t seed = 0;
  bool resource_rejected = false;
  double required_bytes = 0.0;
  double available_bytes = 0.0;
  double sup_tr_gamma_q = 0.0;
  double sup_trace_norm = 0.0;
  double alpha_diff_final = 0.0;
  double ratio_tr_gamma_q_to_inv_d = 0.0;      // sup * d
  double ratio_trace_norm_to_inv_sqrt_d = 0.0; // sup * sqrt(d)
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

struct CompareSpec {
  ModelParams params;
  int L = 2;
  int M = 1;
  Eigen::VectorXcd phi0;
  double t_final = 0.5;
  int n_samples = 11;
  double dt = 1e-3;
  double krylov_tol = 1e-10;
  double c_constant_C = 1.0;
  std::uint64_t memory_cap_bytes = 2ull << 30;
  int krylov_dim = 30;
};

/// Exact-vs-mean-field comparison for fixed (J, mu, U, t_final, phi0) across
/// dimensions. Oversize points are recorded as resource-rejected and the
/// sweep continues. Workers run one point per (d, seed).
SweepResult d_sweep(const CompareSpec& base, const std::vector<int>& d_list,
                    const std::vector<std::uint64_t>& seeds, int threads = 1);

}  // namespace bhmf
