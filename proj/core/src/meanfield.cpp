#include "bhmf/meanfield.hpp"

#include <cmath>

#include "bhmf/errors.hpp"
#include "bhmf/io.hpp"
#include "bhmf/reduced.hpp"

namespace bhmf {

namespace {

constexpr std::complex<double> kImagUnit{0.0, 1.0};

/// Diagonal part A_n = (J - mu) n + (U/2) n (n - 1) of the generator.
Eigen::VectorXd diagonal_part(const ModelParams& p, int dim) {
  Eigen::VectorXd a(dim);
  for (int n = 0; n < dim; ++n)
    a[n] = (p.hopping - p.chemical) * n + 0.5 * p.coupling * n * (n - 1);
  return a;
}

Eigen::VectorXcd apply_phase(const Eigen::VectorXd& a, double t,
                             const Eigen::VectorXcd& v) {
  Eigen::VectorXcd out(v.size());
  for (Eigen::Index n = 0; n < v.size(); ++n)
    out[n] = std::exp(-kImagUnit * t * a[n]) * v[n];
  return out;
}

Eigen::VectorXcd ladder_down(const Eigen::VectorXcd& phi) {  // a phi
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(phi.size());
  for (Eigen::Index n = 0; n + 1 < phi.size(); ++n)
    out[n] = std::sqrt(static_cast<double>(n + 1)) * phi[n + 1];
  return out;
}

Eigen::VectorXcd ladder_up(const Eigen::VectorXcd& phi) {  // a* phi
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(phi.size());
  for (Eigen::Index n = 1; n < phi.size(); ++n)
    out[n] = std::sqrt(static_cast<double>(n)) * phi[n - 1];
  return out;
}

/// Interaction-picture right-hand side: psi' = -i e^{itA} F(e^{-itA} psi),
/// with F(phi) = -J (alpha a* + conj(alpha) a - |alpha|^2) phi.
Eigen::VectorXcd rhs(const Eigen::VectorXd& a, double hopping, double t,
                     const Eigen::VectorXcd& psi) {
  Eigen::VectorXcd phi = apply_phase(a, t, psi);
  std::complex<double> alpha = order_parameter(phi);
  Eigen::VectorXcd f = -hopping * (alpha * ladder_up(phi) +
                                   std::conj(alpha) * ladder_down(phi) -
                                   std::norm(alpha) * phi);
  return -kImagUnit * apply_phase(a, -t, f);
}

struct IntegrationResult {
  std::vector<Eigen::VectorXcd> states;  // at the grid times
  double max_norm_drift = 0.0;
};

IntegrationResult integrate(const Eigen::VectorXcd& phi0, const ModelParams& params,
                            const std::vector<double>& t_grid, double dt) {
  const Eigen::VectorXd a = diagonal_part(params, static_cast<int>(phi0.size()));
  IntegrationResult result;
  result.states.reserve(t_grid.size());

  Eigen::VectorXcd psi = phi0;  // interaction picture, psi(0) = phi(0)
  double t = 0.0;
  for (double target : t_grid) {
    double span = target - t;
    int steps = std::max(1, static_cast<int>(std::ceil(std::abs(span) / dt)));
    if (span == 0.0) steps = 0;
    double h = (steps > 0) ? span / steps : 0.0;
    for (int s = 0; s < steps; ++s) {
      Eigen::VectorXcd k1 = rhs(a, params.hopping, t, psi);
      Eigen::VectorXcd k2 = rhs(a, params.hopping, t + h / 2, psi + (h / 2) * k1);
      Eigen::VectorXcd k3 = rhs(a, params.hopping, t + h / 2, psi + (h / 2) * k2);
      Eigen::VectorXcd k4 = rhs(a, params.hopping, t + h, psi + h * k3);
      psi += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
      t += h;
    }
    t = target;
    Eigen::VectorXcd phi = apply_phase(a, t, psi);
    if (!phi.allFinite())
      throw NumericalError("non-finite mean-field amplitudes at t = " +
                           format_double(t));
    result.max_norm_drift =
        std::max(result.max_norm_drift, std::abs(phi.norm() - 1.0));
    result.states.push_back(std::move(phi));
  }
  return result;
}

}  // namespace

std::complex<double> order_parameter(const Eigen::VectorXcd& phi) {
  std::complex<double> alpha = 0.0;
  for (Eigen::Index n = 0; n + 1 < phi.size(); ++n)
    alpha += std::sqrt(static_cast<double>(n + 1)) * std::conj(phi[n]) * phi[n + 1];
  return alpha;
}

SiteOperator mf_generator(const Eigen::VectorXcd& phi, const ModelParams& params,
                          FockCutoff cutoff) {
  if (phi.size() != cutoff.dim())
    throw ConfigError("mean-field state length does not match cutoff");
  LadderOperators ops = build_ladder(cutoff);
  std::complex<double> alpha = order_parameter(phi);
  const int dim = cutoff.dim();
  Eigen::MatrixXcd h =
      -params.hopping * (alpha * ops.creation.mat + std::conj(alpha) * ops.annihilator.mat -
                         std::norm(alpha) * Eigen::MatrixXcd::Identity(dim, dim));
  for (int n = 0; n < dim; ++n)
    h(n, n) += (params.hopping - params.chemical) * n +
               0.5 * params.coupling * n * (n - 1);
  return {h, cutoff};
}

MfTrajectory evolve_mf(const Eigen::VectorXcd& phi0, const ModelParams& params,
                       FockCutoff cutoff, const std::vector<double>& t_grid,
                       double dt) {
  if (phi0.size() != cutoff.dim())
    throw ConfigError("initial mean-field state length does not match cutoff");
  if (std::abs(phi0.norm() - 1.0) > 1e-10)
    throw ConfigError("initial mean-field state is not normalized");
  if (!(dt > 0.0) || dt > 1e-2)
    throw ConfigError("mean-field dt must lie in (0, 1e-2]");
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    bool inc = t_grid[i] > t_grid[i - 1];
    bool dec = t_grid[i] < t_grid[i - 1];
    if (!(inc || dec) || (i > 1 && inc != (t_grid[1] > t_grid[0])))
      throw ConfigError("mean-field time grid must be strictly monotone");
  }

  IntegrationResult coarse = integrate(phi0, params, t_grid, dt);
  IntegrationResult fine = integrate(phi0, params, t_grid, dt / 2);

  MfTrajectory traj;
  traj.params = params;
  traj.cutoff = cutoff;
  traj.settings.dt = dt;
  traj.max_norm_drift = coarse.max_norm_drift;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    traj.richardson_max_delta = std::max(
        traj.richardson_max_delta, (coarse.states[i] - fine.states[i]).norm());
    traj.states.push_back(
        MfState{coarse.states[i], order_parameter(coarse.states[i]), t_grid[i]});
  }
  if (traj.max_norm_drift > 1e-6)
    throw NumericalError("mean-field norm drift " +
                         format_double(traj.max_norm_drift) +
                         " exceeds 1e-6; reduce dt");
  return traj;
}

double mf_energy(const Eigen::VectorXcd& phi, const ModelParams& params) {
  double n1 = mf_moment(phi, 1.0);
  double n2 = mf_moment(phi, 2.0);
  double interaction = n2 - n1;  // <N(N-1)>
  double alpha2 = std::norm(order_parameter(phi));
  return params.hopping * (n1 - alpha2) - params.chemical * n1 +
         0.5 * params.coupling * interaction;
}

double mf_moment(const Eigen::VectorXcd& phi, double k) {
  return mf_moment_shifted(phi, 0, k);
}

double mf_moment_shifted(const Eigen::VectorXcd& phi, int shift, double k) {
  double acc = 0.0;
  for (Eigen::Index n = 0; n < phi.size(); ++n) {
    double w = std::norm(phi[n]);
    if (w == 0.0) continue;
    double base = static_cast<double>(n + shift);
    acc += (base == 0.0 && k == 0.0) ? w : w * std::pow(base, k);
  }
  return acc;
}

RefinementReport truncation_refine(const Eigen::VectorXcd& phi0,
                                   const ModelParams& params, double t_final,
                                   const std::vector<int>& schedule, double dt,
                                   int n_samples) {
  if (schedule.size() < 2) throw ConfigError("refinement schedule needs >= 2 cutoffs");
  if (n_samples < 2) throw ConfigError("refinement needs >= 2 grid samples");
  for (std::size_t i = 1; i < schedule.size(); ++i)
    if (schedule[i] <= schedule[i - 1])
      throw ConfigError("refinement schedule must be strictly increasing");
  if (phi0.size() > schedule.front() + 1)
    throw ConfigError("initial state not representable at the smallest cutoff");

  std::vector<double> grid(n_samples);
  for (int i = 0; i < n_samples; ++i)
    grid[i] = t_final * static_cast<double>(i) / (n_samples - 1);

  std::vector<MfTrajectory> trajs;
  for (int m : schedule) {
    FockCutoff cutoff{m};
    Eigen::VectorXcd padded = Eigen::VectorXcd::Zero(cutoff.dim());
    padded.head(phi0.size()) = phi0;
    trajs.push_back(evolve_mf(padded, params, cutoff, grid, dt));
  }

  RefinementReport report;
  report.deltas_non_increasing = true;
  for (std::size_t i = 0; i + 1 < trajs.size(); ++i) {
    RefinementStep step;
    step.cutoff_low = schedule[i];
    step.cutoff_high = schedule[i + 1];
    const int dim_high = schedule[i + 1] + 1;
    for (int k = 0; k < n_samples; ++k) {
      Eigen::VectorXcd lo = Eigen::VectorXcd::Zero(dim_high);
      lo.head(schedule[i] + 1) = trajs[i].states[k].phi;
      const Eigen::VectorXcd& hi = trajs[i + 1].states[k].phi;
      step.sup_state_delta = std::max(step.sup_state_delta, (lo - hi).norm());
      Eigen::MatrixXcd proj_delta = lo * lo.adjoint() - hi * hi.adjoint();
      step.sup_projector_delta =
          std::max(step.sup_projector_delta, trace_norm(proj_delta));
    }
    if (!report.steps.empty() &&
        step.sup_state_delta > report.steps.back().sup_state_delta)
      report.deltas_non_increasing = false;
    report.steps.push_back(step);
  }
  return report;
}

}  // namespace bhmf
