#include "bhmf/diagnostics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "bhmf/errors.hpp"
#include "bhmf/fock.hpp"

namespace bhmf {

namespace {

constexpr double kEuler = 2.718281828459045235360287;

double linspace_at(double t_final, int n, int i) {
  return t_final * static_cast<double>(i) / (n - 1);
}

}  // namespace

std::complex<double> alpha_from_density(const OneSiteDensity& gamma) {
  std::complex<double> acc = 0.0;
  for (Eigen::Index m = 1; m < gamma.mat.rows(); ++m)
    acc += std::sqrt(static_cast<double>(m)) * gamma.mat(m, m - 1);
  return acc;
}

std::complex<double> alpha_micro(const ManyBodyState& psi, const Lattice& lattice) {
  return alpha_from_density(reduce_one_site(psi, lattice));
}

ExcitationFunctionals excitation_functionals(const ManyBodyState& psi,
                                             const SparseHamiltonian& h,
                                             const Eigen::VectorXcd& phi, double c,
                                             int threads) {
  OneSiteDensity gamma = reduce_one_site(psi, h.lattice());
  Projectors proj = make_projectors(phi);
  double energy_per_site =
      expectation_energy(psi, h, threads) / h.lattice().num_sites();

  ExcitationFunctionals out;
  out.g = q_moment(gamma, proj, 2) + q_moment(gamma, proj, 0);
  Eigen::MatrixXcd hphi = mf_generator(phi, h.params(), h.cutoff()).mat;
  Eigen::MatrixXcd op = proj.q * hphi * proj.q - hphi + c * proj.q;
  out.f = energy_per_site + std::real((gamma.mat * op).trace());
  return out;
}

double default_c_constant(const ModelParams& params, const Eigen::VectorXcd& phi0,
                          double constant_C) {
  double n0 = mf_moment(phi0, 1.0);
  double structural = 1.0 + params.hopping * params.hopping +
                      std::pow(params.hopping - params.chemical - 0.5 * params.coupling, 2);
  if (params.coupling > 0.0) {
    double inv_eps = 4.0 / params.coupling;
    return constant_C * structural * (1.0 + inv_eps + n0 * n0) + 0.25 * params.coupling;
  }
  return constant_C * structural * (1.0 + n0 * n0) + 1.0;
}

namespace {

/// Right-hand side of the Gronwall derivative bound, assembled from measured
/// quantities at one time.
double gronwall_rhs(double hopping, double tr_p_n, double tr_gamma_q,
                    double tr_gamma_qn1q, int d) {
  double c3 = std::sqrt(tr_p_n + 1.0);
  return std::abs(hopping) * c3 *
         (8.0 * std::sqrt(tr_p_n) * tr_gamma_q +
          4.0 * std::sqrt(std::max(0.0, tr_gamma_q)) *
              std::sqrt(std::max(0.0, tr_gamma_qn1q)) +
          std::sqrt(tr_p_n) / d);
}

double tr_gamma_q_of(const ManyBodyState& psi, const Lattice& lattice,
                     const Eigen::VectorXcd& phi) {
  OneSiteDensity gamma = reduce_one_site(psi, lattice);
  return q_moment(gamma, make_projectors(phi), 0);
}

}  // namespace

ComparisonSeries gronwall_track(const std::vector<ManyBodyState>& exact_traj,
                                const MfTrajectory& mf_traj,
                                const SparseHamiltonian& h, double c,
                                const DerivativeProbe* probe, int threads) {
  if (exact_traj.size() != mf_traj.states.size())
    throw ConfigError("exact and mean-field trajectories have different grids");
  const Lattice& lattice = h.lattice();
  const int num_sites = lattice.num_sites();
  const int d = lattice.dim();
  const ModelParams& params = h.params();

  ComparisonSeries series;
  series.c_used = c;
  series.min_sandwich_slack_lower = std::numeric_limits<double>::infinity();
  series.min_sandwich_slack_upper = std::numeric_limits<double>::infinity();
  series.min_fg_slack = std::numeric_limits<double>::infinity();
  series.minimal_passing_C = 0.0;

  const double structural_B =
      (params.coupling > 0.0)
          ? (1.0 + params.hopping * params.hopping +
             std::pow(params.hopping - params.chemical - 0.5 * params.coupling, 2)) *
                (1.0 + 4.0 / params.coupling +
                 std::pow(mf_moment(mf_traj.states.front().phi, 1.0), 2))
          : 1.0;

  for (std::size_t i = 0; i < exact_traj.size(); ++i) {
    const ManyBodyState& psi = exact_traj[i];
    const MfState& mf = mf_traj.states[i];
    ComparisonRecord row;
    row.t = mf.t;

    OneSiteDensity gamma = reduce_one_site(psi, lattice);
    Projectors proj = make_projectors(mf.phi);
    row.tr_gamma_q = q_moment(gamma, proj, 0);
    row.trace_norm = trace_norm_distance(gamma, proj);
    row.alpha_micro = alpha_from_density(gamma);
    row.alpha_mf = mf.alpha;
    row.energy_exact_per_site = expectation_energy(psi, h, threads) / num_sites;
    row.energy_mf = mf_energy(mf.phi, params);
    row.exact_norm = psi.norm();
    row.exact_total_n = expectation_total_number(psi);
    row.mf_norm = mf.phi.norm();
    row.mf_n = mf_moment(mf.phi, 1.0);

    Eigen::MatrixXcd hphi = mf_generator(mf.phi, params, h.cutoff()).mat;
    Eigen::MatrixXcd op = proj.q * hphi * proj.q - hphi + c * proj.q;
    row.f = row.energy_exact_per_site + std::real((gamma.mat * op).trace());
    row.g = q_moment(gamma, proj, 2) + row.tr_gamma_q;

    // one-particle-density scalars: w_x = a_x psi, <a*_y a_x> = <w_y, w_x>
    {
      std::vector<Eigen::VectorXcd> w(num_sites);
      for (int x = 0; x < num_sites; ++x) w[x] = apply_site_annihilator(psi, x);
      double alpha2 = std::norm(mf.alpha);
      double hs = 0.0;
      for (int y = 0; y < num_sites; ++y)
        for (int x = 0; x < num_sites; ++x)
          hs += std::norm(w[y].dot(w[x]) - alpha2);
      row.offdiag_hs_avg = hs / (static_cast<double>(num_sites) * num_sites);
      double kin = 0.0;
      for (const Bond& b : lattice.bonds())
        kin += std::real(w[b.source].dot(w[b.target]));
      row.bond_kinetic_avg = kin / static_cast<double>(lattice.bonds().size());
    }

    series.min_sandwich_slack_lower =
        std::min(series.min_sandwich_slack_lower, row.trace_norm - 2.0 * row.tr_gamma_q);
    series.min_sandwich_slack_upper = std::min(
        series.min_sandwich_slack_upper,
        2.0 * std::sqrt(2.0 * std::max(0.0, row.tr_gamma_q)) - row.trace_norm);

    if (params.coupling > 0.0) {
      double slack = row.f - (0.25 * params.coupling * row.g - 1.0 / d);
      series.min_fg_slack = std::min(series.min_fg_slack, slack);
      // smallest C in the structural c making the lower bound hold at this time
      if (row.tr_gamma_q > 1e-14) {
        double f_base = row.f - c * row.tr_gamma_q;
        double needed = (0.25 * params.coupling * row.g - 1.0 / d - f_base -
                         0.25 * params.coupling * row.tr_gamma_q) /
                        (structural_B * row.tr_gamma_q);
        series.minimal_passing_C = std::max(series.minimal_passing_C, needed);
      }
    }
    series.rows.push_back(row);
  }
  series.fg_equivalence_pass =
      params.coupling > 0.0 && series.min_fg_slack >= -1e-10;

  if (probe != nullptr) {
    GronwallDerivativeCheck check;
    check.h = probe->h;
    double t_plus = tr_gamma_q_of(probe->psi_plus, lattice, probe->phi_plus.phi);
    double t_minus = tr_gamma_q_of(probe->psi_minus, lattice, probe->phi_minus.phi);
    check.fd_derivative = (t_plus - t_minus) / (2.0 * probe->h);

    const MfState& mf0 = mf_traj.states.front();
    OneSiteDensity gamma0 = reduce_one_site(exact_traj.front(), lattice);
    Projectors proj0 = make_projectors(mf0.phi);
    double tr_p_n = mf_moment(mf0.phi, 1.0);
    double trq = q_moment(gamma0, proj0, 0);
    double trqn1q = q_moment(gamma0, proj0, 1) + trq;
    check.rhs_bound = gronwall_rhs(params.hopping, tr_p_n, trq, trqn1q, d);
    check.pass = std::abs(check.fd_derivative) <= 1.1 * check.rhs_bound + 1e-9;
    series.derivative_check = check;
  }
  return series;
}

MomentBoundReport moment_bound_mf(const MfTrajectory& traj,
                                  const std::vector<double>& k_list) {
  MomentBoundReport report;
  report.pass = true;
  const Eigen::VectorXcd& phi0 = traj.states.front().phi;
  double sqrt_n0 = std::sqrt(mf_moment(phi0, 1.0));
  double j_abs = std::abs(traj.params.hopping);
  for (double k : k_list) {
    double m0 = mf_moment(phi0, k);
    for (const MfState& st : traj.states) {
      MomentBoundRow row;
      row.k = k;
      row.t = st.t;
      row.measured = mf_moment(st.phi, k);
      row.bound = (m0 + std::exp(-1.0) * std::pow(k, k)) *
                  std::exp(2.0 * kEuler * j_abs * k * sqrt_n0 * std::abs(st.t));
      row.margin = row.bound - row.measured;
      if (row.margin < -1e-10 * std::max(1.0, row.bound)) report.pass = false;
      report.rows.push_back(row);
    }
  }
  return report;
}

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

MomentBoundReport moment_bound_mf_finite_sum(const MfTrajectory& traj,
                                             const std::vector<double>& k_list) {
  MomentBoundReport report;
  report.pass = true;
  const Eigen::VectorXcd& phi0 = traj.states.front().phi;
  double sqrt_n0 = std::sqrt(mf_moment(phi0, 1.0));
  double j_abs = std::abs(traj.params.hopping);
  for (double k : k_list) {
    int two_k = static_cast<int>(std::lround(2.0 * k));
    int l_max = two_k - 2;
    for (const MfState& st : traj.states) {
      MomentBoundRow row;
      row.k = k;
      row.t = st.t;
      row.measured = mf_moment(st.phi, k);
      double bound = 0.0;
      for (int l = 0; l <= l_max; ++l) {
        bound += binomial(two_k, l) * std::pow(j_abs * sqrt_n0 * std::abs(st.t), l) *
                 mf_moment_shifted(phi0, l, k - 0.5 * l);
      }
      row.bound = bound;
      row.margin = row.bound - row.measured;
      if (row.margin < -1e-10 * std::max(1.0, row.bound)) report.pass = false;
      report.rows.push_back(row);
    }
  }
  return report;
}

MomentBoundReport moment_bound_exact(const std::vector<ManyBodyState>& traj,
                                     const std::vector<double>& t_grid,
                                     const Lattice& lattice, double hopping,
                                     const std::vector<double>& k_list) {
  if (traj.size() != t_grid.size()) throw ConfigError("trajectory/grid size mismatch");
  MomentBoundReport report;
  report.pass = true;
  double j_abs = std::abs(hopping);
  std::vector<OneSiteDensity> densities;
  densities.reserve(traj.size());
  for (const auto& psi : traj) densities.push_back(reduce_one_site(psi, lattice));
  for (double k : k_list) {
    double m0 = density_moment(densities.front(), k);
    for (std::size_t i = 0; i < traj.size(); ++i) {
      MomentBoundRow row;
      row.k = k;
      row.t = t_grid[i];
      row.measured = density_moment(densities[i], k);
      row.bound = (m0 + std::exp(-1.0) * std::pow(k, k)) *
                  std::exp(2.0 * kEuler * j_abs * k * std::abs(t_grid[i]));
      row.margin = row.bound - row.measured;
      if (row.margin < -1e-10 * std::max(1.0, row.bound)) report.pass = false;
      report.rows.push_back(row);
    }
  }
  return report;
}

double occupation_decay_constant(const Eigen::VectorXd& occupation_probabilities) {
  double c = 0.0;
  for (Eigen::Index n = 0; n < occupation_probabilities.size(); ++n)
    c = std::max(c, occupation_probabilities[n] * std::exp(static_cast<double>(n)));
  return c;
}

namespace {

SweepRow run_sweep_point(const CompareSpec& spec, int d, std::uint64_t seed,
                         int threads) {
  SweepRow row;
  row.d = d;
  row.L = spec.L;
  row.M = spec.M;
  row.seed = seed;
  row.available_bytes = static_cast<double>(spec.memory_cap_bytes);

  Lattice lattice(spec.L, d);
  FockCutoff cutoff{spec.M};
  row.required_bytes = estimate_run_bytes(lattice, cutoff, spec.krylov_dim);
  if (spec.memory_cap_bytes != 0 && row.required_bytes > row.available_bytes) {
    row.resource_rejected = true;
    return row;
  }

  Eigen::VectorXcd phi0 = Eigen::VectorXcd::Zero(cutoff.dim());
  phi0.head(spec.phi0.size()) = spec.phi0;
  phi0 /= phi0.norm();

  std::vector<double> grid(spec.n_samples);
  for (int i = 0; i < spec.n_samples; ++i)
    grid[i] = linspace_at(spec.t_final, spec.n_samples, i);

  SparseHamiltonian h =
      build_hamiltonian(spec.params, lattice, cutoff, spec.memory_cap_bytes);
  ManyBodyState psi0 = product_state(phi0, lattice, cutoff);
  EvolveOptions opts;
  opts.tol = spec.krylov_tol;
  opts.krylov_dim = spec.krylov_dim;
  opts.threads = threads;
  std::vector<ManyBodyState> exact = evolve_exact(h, psi0, grid, opts);
  MfTrajectory mf = evolve_mf(phi0, spec.params, cutoff, grid, spec.dt);

  double c = default_c_constant(spec.params, phi0, spec.c_constant_C);
  ComparisonSeries series = gronwall_track(exact, mf, h, c, nullptr, threads);
  for (const auto& r : series.rows) {
    row.sup_tr_gamma_q = std::max(row.sup_tr_gamma_q, r.tr_gamma_q);
    row.sup_trace_norm = std::max(row.sup_trace_norm, r.trace_norm);
  }
  row.alpha_diff_final =
      std::abs(series.rows.back().alpha_micro - series.rows.back().alpha_mf);
  row.ratio_tr_gamma_q_to_inv_d = row.sup_tr_gamma_q * d;
  row.ratio_trace_norm_to_inv_sqrt_d = row.sup_trace_norm * std::sqrt(double(d));
  return row;
}

}  // namespace

SweepResult d_sweep(const CompareSpec& base, const std::vector<int>& d_list,
                    const std::vector<std::uint64_t>& seeds, int threads) {
  if (d_list.empty()) throw ConfigError("sweep.d_list must not be empty");
  if (base.n_samples < 2) throw ConfigError("sweep needs >= 2 grid samples");
  if (seeds.empty()) throw ConfigError("sweep needs at least one seed");
  std::vector<std::pair<int, std::uint64_t>> points;
  points.reserve(d_list.size() * seeds.size());
  for (int d : d_list)
    for (std::uint64_t s : seeds) points.emplace_back(d, s);

  SweepResult result;
  result.rows.resize(points.size());
  std::vector<std::exception_ptr> errors(points.size());

  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(points.size())));
  const int inner_threads = (workers > 1) ? 1 : threads;
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= points.size()) return;
      try {
        result.rows[i] =
            run_sweep_point(base, points[i].first, points[i].second, inner_threads);
      } catch (const ResourceError& e) {
        SweepRow row;
        row.d = points[i].first;
        row.L = base.L;
        row.M = base.M;
        row.seed = points[i].second;
        row.resource_rejected = true;
        row.required_bytes = e.required_bytes;
        row.available_bytes = e.available_bytes;
        result.rows[i] = row;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return result;
}

}  // namespace bhmf
