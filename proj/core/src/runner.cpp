#include "bhmf/runner.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "bhmf/check.hpp"
#include "bhmf/diagnostics.hpp"
#include "bhmf/errors.hpp"
#include "bhmf/io.hpp"
#include "bhmf/manybody.hpp"
#include "bhmf/meanfield.hpp"
#include "bhmf/reduced.hpp"

namespace bhmf {

namespace {

using nlohmann::json;

std::vector<double> make_grid(double t_final, int n_samples) {
  std::vector<double> g(n_samples);
  for (int i = 0; i < n_samples; ++i)
    g[i] = t_final * static_cast<double>(i) / (n_samples - 1);
  return g;
}

Eigen::VectorXcd padded_amplitudes(const Eigen::VectorXcd& amps, int dim) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim);
  out.head(amps.size()) = amps;
  return out;
}

/// Mean-field initial state for the configured initial data. A fock_tuple
/// maps to |n> only when the tuple is constant.
Eigen::VectorXcd mf_initial(const RunConfig& cfg) {
  const int dim = cfg.M + 1;
  if (cfg.initial.kind == InitialKind::FockTuple) {
    const auto& occ = cfg.initial.occupations;
    for (int n : occ)
      if (n != occ.front())
        throw ConfigError(
            "initial.occupations: mean-field comparison needs a constant tuple");
    Eigen::VectorXcd phi = Eigen::VectorXcd::Zero(dim);
    phi[occ.front()] = 1.0;
    return phi;
  }
  return padded_amplitudes(cfg.initial.amplitudes, dim);
}

ManyBodyState exact_initial(const RunConfig& cfg, const Lattice& lattice) {
  FockCutoff cutoff{cfg.M};
  switch (cfg.initial.kind) {
    case InitialKind::Gutzwiller:
      return product_state(padded_amplitudes(cfg.initial.amplitudes, cutoff.dim()),
                           lattice, cutoff);
    case InitialKind::PerturbedGutzwiller:
      return perturbed_product_state(
          padded_amplitudes(cfg.initial.amplitudes, cutoff.dim()),
          padded_amplitudes(cfg.initial.perp_amplitudes, cutoff.dim()),
          cfg.initial.num_perturbed_sites, lattice, cutoff);
    case InitialKind::FockTuple: {
      if (static_cast<int>(cfg.initial.occupations.size()) != lattice.num_sites())
        throw ConfigError("initial.occupations: length must equal L^d = " +
                          std::to_string(lattice.num_sites()));
      return fock_basis_state(cfg.initial.occupations, lattice, cutoff);
    }
  }
  throw ConfigError("unreachable initial kind");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
}

void write_json(const std::filesystem::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

json config_echo(const RunConfig& cfg) {
  json j;
  j["model"] = {{"J", cfg.J}, {"mu", cfg.mu}, {"U", cfg.U}};
  j["lattice"] = {{"L", cfg.L}, {"d", cfg.d}};
  j["cutoff"] = {{"M", cfg.M}};
  j["time"] = {{"t_final", cfg.t_final},
               {"dt", cfg.dt},
               {"n_samples", cfg.n_samples},
               {"krylov_tol", cfg.krylov_tol}};
  j["seed"] = cfg.seed;
  j["memory_cap_bytes"] = cfg.memory_cap_bytes;
  return j;
}

json moment_report_json(const MomentBoundReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"k", r.k},
                    {"t", r.t},
                    {"measured", r.measured},
                    {"bound", r.bound},
                    {"margin", r.margin}});
  }
  return {{"pass", report.pass}, {"rows", rows}};
}

ModelParams params_of(const RunConfig& cfg) { return {cfg.J, cfg.mu, cfg.U}; }

std::uint64_t resolve_cap(const RunConfig& cfg) {
  if (const char* env = std::getenv(kMemoryCapEnvVar)) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return v;
    throw ConfigError(std::string(kMemoryCapEnvVar) + ": not a nonnegative integer");
  }
  return cfg.memory_cap_bytes;
}

struct RunContext {
  RunConfig cfg;
  std::filesystem::path out_dir;
  int threads = 1;
};

void check_resources(const RunContext& ctx, const Lattice& lattice) {
  double required = estimate_run_bytes(lattice, FockCutoff{ctx.cfg.M}, 30);
  double cap = static_cast<double>(ctx.cfg.memory_cap_bytes);
  if (ctx.cfg.memory_cap_bytes != 0 && required > cap)
    throw ResourceError(required, cap,
                        "run needs about " + format_double(required) +
                            " bytes, cap is " + format_double(cap));
}

int run_exact(const RunContext& ctx) {
  const RunConfig& cfg = ctx.cfg;
  Lattice lattice(cfg.L, cfg.d);
  check_resources(ctx, lattice);
  FockCutoff cutoff{cfg.M};
  SparseHamiltonian h =
      build_hamiltonian(params_of(cfg), lattice, cutoff, cfg.memory_cap_bytes);
  ManyBodyState psi0 = exact_initial(cfg, lattice);
  std::vector<double> grid = make_grid(cfg.t_final, cfg.n_samples);
  EvolveOptions opts{cfg.krylov_tol, 30, ctx.threads};
  std::vector<ManyBodyState> traj = evolve_exact(h, psi0, grid, opts);

  CsvWriter csv({"t", "norm", "total_n", "energy_per_site", "alpha_micro_re",
                 "alpha_micro_im", "gamma_n1", "gamma_n2"});
  double n0 = expectation_total_number(traj.front());
  double e0 = expectation_energy(traj.front(), h, ctx.threads);
  double max_norm_drift = 0.0, max_n_drift = 0.0, max_e_drift = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    OneSiteDensity gamma = reduce_one_site(traj[i], lattice);
    double norm = traj[i].norm();
    double n = expectation_total_number(traj[i]);
    double e = expectation_energy(traj[i], h, ctx.threads);
    std::complex<double> alpha = alpha_from_density(gamma);
    csv.add_row({grid[i], norm, n, e / lattice.num_sites(), alpha.real(), alpha.imag(),
                 density_moment(gamma, 1.0), density_moment(gamma, 2.0)});
    max_norm_drift = std::max(max_norm_drift, std::abs(norm - 1.0));
    max_n_drift = std::max(max_n_drift, std::abs(n - n0));
    max_e_drift = std::max(max_e_drift, std::abs(e - e0));
  }
  csv.write_file((ctx.out_dir / "exact_series.csv").string());

  json summary;
  summary["config"] = config_echo(cfg);
  summary["subcommand"] = "exact";
  summary["dimension"] = h.dimension();
  summary["drift"] = {{"norm", max_norm_drift},
                      {"total_n", max_n_drift},
                      {"energy", max_e_drift}};
  {
    MomentBoundReport report =
        moment_bound_exact(traj, grid, lattice, cfg.J, {1.0, 2.0});
    summary["bh_moment_bound"] = moment_report_json(report);
  }
  write_json(ctx.out_dir / "exact_summary.json", summary);
  return kExitOk;
}

int run_meanfield(const RunContext& ctx) {
  const RunConfig& cfg = ctx.cfg;
  FockCutoff cutoff{cfg.M};
  Eigen::VectorXcd phi0 = mf_initial(cfg);
  std::vector<double> grid = make_grid(cfg.t_final, cfg.n_samples);
  MfTrajectory traj = evolve_mf(phi0, params_of(cfg), cutoff, grid, cfg.dt);

  CsvWriter csv({"t", "norm", "n", "energy", "alpha_re", "alpha_im", "n2"});
  for (const MfState& st : traj.states) {
    csv.add_row({st.t, st.phi.norm(), mf_moment(st.phi, 1.0),
                 mf_energy(st.phi, traj.params), st.alpha.real(), st.alpha.imag(),
                 mf_moment(st.phi, 2.0)});
  }
  csv.write_file((ctx.out_dir / "meanfield_series.csv").string());

  json summary;
  summary["config"] = config_echo(cfg);
  summary["subcommand"] = "meanfield";
  summary["max_norm_drift"] = traj.max_norm_drift;
  summary["richardson_max_delta"] = traj.richardson_max_delta;
  summary["mf_moment_bound_1"] = moment_report_json(moment_bound_mf(traj, cfg.k_moments));
  {
    std::vector<double> integer_ks;
    for (double k : cfg.k_moments)
      if (k >= 1.0 && std::abs(k - std::lround(k)) < 1e-12) integer_ks.push_back(k);
    summary["mf_moment_bound_2"] =
        moment_report_json(moment_bound_mf_finite_sum(traj, integer_ks));
  }
  write_json(ctx.out_dir / "meanfield_summary.json", summary);
  return kExitOk;
}

int run_compare(const RunContext& ctx) {
  const RunConfig& cfg = ctx.cfg;
  Lattice lattice(cfg.L, cfg.d);
  check_resources(ctx, lattice);
  FockCutoff cutoff{cfg.M};
  ModelParams params = params_of(cfg);
  SparseHamiltonian h = build_hamiltonian(params, lattice, cutoff, cfg.memory_cap_bytes);
  ManyBodyState psi0 = exact_initial(cfg, lattice);
  Eigen::VectorXcd phi0 = mf_initial(cfg);
  std::vector<double> grid = make_grid(cfg.t_final, cfg.n_samples);
  EvolveOptions opts{cfg.krylov_tol, 30, ctx.threads};

  std::vector<ManyBodyState> exact = evolve_exact(h, psi0, grid, opts);
  MfTrajectory mf = evolve_mf(phi0, params, cutoff, grid, cfg.dt);

  // centered probe at +/- h around t = 0 for the derivative-bound check
  DerivativeProbe probe;
  probe.h = 1e-3;
  probe.psi_plus = evolve_exact(h, psi0, {probe.h}, opts).front();
  probe.psi_minus = evolve_exact(h, psi0, {-probe.h}, opts).front();
  probe.phi_plus = evolve_mf(phi0, params, cutoff, {probe.h}, cfg.dt).states.front();
  probe.phi_minus = evolve_mf(phi0, params, cutoff, {-probe.h}, cfg.dt).states.front();

  double c = default_c_constant(params, phi0, cfg.c_constant_C);
  ComparisonSeries series = gronwall_track(exact, mf, h, c, &probe, ctx.threads);

  CsvWriter csv({"t", "tr_gamma_q", "trace_norm", "alpha_micro_re", "alpha_micro_im",
                 "alpha_mf_re", "alpha_mf_im", "energy_exact_per_site", "energy_mf",
                 "f", "g", "exact_norm", "exact_total_n", "mf_norm", "mf_n"});
  for (const ComparisonRecord& r : series.rows) {
    csv.add_row({r.t, r.tr_gamma_q, r.trace_norm, r.alpha_micro.real(),
                 r.alpha_micro.imag(), r.alpha_mf.real(), r.alpha_mf.imag(),
                 r.energy_exact_per_site, r.energy_mf, r.f, r.g, r.exact_norm,
                 r.exact_total_n, r.mf_norm, r.mf_n});
  }
  csv.write_file((ctx.out_dir / "compare_series.csv").string());

  json summary;
  summary["config"] = config_echo(cfg);
  summary["subcommand"] = "compare";
  summary["dimension"] = h.dimension();
  summary["c_used"] = series.c_used;
  summary["min_sandwich_slack_lower"] = series.min_sandwich_slack_lower;
  summary["min_sandwich_slack_upper"] = series.min_sandwich_slack_upper;
  if (cfg.U > 0.0) {
    summary["fg_equivalence"] = {{"pass", series.fg_equivalence_pass},
                                 {"min_slack", series.min_fg_slack},
                                 {"minimal_passing_C", series.minimal_passing_C}};
  }
  if (series.derivative_check) {
    const auto& d = *series.derivative_check;
    summary["gronwall_derivative_check"] = {{"fd_derivative", d.fd_derivative},
                                            {"rhs_bound", d.rhs_bound},
                                            {"h", d.h},
                                            {"pass", d.pass}};
  }
  summary["mf_richardson_max_delta"] = mf.richardson_max_delta;
  summary["mf_max_norm_drift"] = mf.max_norm_drift;
  summary["mf_moment_bound_1"] = moment_report_json(moment_bound_mf(mf, cfg.k_moments));
  summary["bh_moment_bound"] = moment_report_json(
      moment_bound_exact(exact, grid, lattice, cfg.J, {1.0, 2.0}));
  {
    // geometric-decay witness of the initial occupation distributions
    OneSiteDensity gamma0 = reduce_one_site(exact.front(), lattice);
    Eigen::VectorXd diag_gamma(gamma0.mat.rows());
    Eigen::VectorXd diag_p(phi0.size());
    for (Eigen::Index n = 0; n < gamma0.mat.rows(); ++n)
      diag_gamma[n] = std::real(gamma0.mat(n, n));
    for (Eigen::Index n = 0; n < phi0.size(); ++n) diag_p[n] = std::norm(phi0[n]);
    summary["decay_hypothesis"] = {
        {"a", 1.0},
        {"c_gamma", occupation_decay_constant(diag_gamma)},
        {"c_p", occupation_decay_constant(diag_p)}};
  }
  {
    json scalars = json::array();
    for (const ComparisonRecord& r : series.rows) {
      scalars.push_back({{"t", r.t},
                         {"offdiag_hs_avg", r.offdiag_hs_avg},
                         {"bond_kinetic_avg", r.bond_kinetic_avg},
                         {"alpha_mf_sq", std::norm(r.alpha_mf)}});
    }
    summary["one_particle_density_scalars"] = scalars;
  }
  write_json(ctx.out_dir / "compare_summary.json", summary);
  return kExitOk;
}

int run_sweep(const RunContext& ctx) {
  const RunConfig& cfg = ctx.cfg;
  if (cfg.d_list.empty())
    throw ConfigError("sweep.d_list: required for the sweep subcommand");
  if (cfg.initial.kind == InitialKind::FockTuple)
    throw ConfigError("sweep requires a Gutzwiller initial state");

  CompareSpec spec;
  spec.params = params_of(cfg);
  spec.L = cfg.L;
  spec.M = cfg.M;
  spec.phi0 = padded_amplitudes(cfg.initial.amplitudes, cfg.M + 1);
  spec.t_final = cfg.t_final;
  spec.n_samples = cfg.n_samples;
  spec.dt = cfg.dt;
  spec.krylov_tol = cfg.krylov_tol;
  spec.c_constant_C = cfg.c_constant_C;
  spec.memory_cap_bytes = cfg.memory_cap_bytes;

  std::vector<std::uint64_t> seeds = cfg.seeds;
  if (seeds.empty()) seeds.push_back(cfg.seed);

  SweepResult result = d_sweep(spec, cfg.d_list, seeds, ctx.threads);

  json rows = json::array();
  for (const SweepRow& r : result.rows) {
    json row = {{"d", r.d},           {"L", r.L},
                {"M", r.M},           {"seed", r.seed},
                {"resource_rejected", r.resource_rejected}};
    if (r.resource_rejected) {
      row["required_bytes"] = r.required_bytes;
      row["available_bytes"] = r.available_bytes;
    } else {
      row["sup_tr_gamma_q"] = r.sup_tr_gamma_q;
      row["sup_trace_norm"] = r.sup_trace_norm;
      row["alpha_diff_final"] = r.alpha_diff_final;
      row["ratio_tr_gamma_q_to_inv_d"] = r.ratio_tr_gamma_q_to_inv_d;
      row["ratio_trace_norm_to_inv_sqrt_d"] = r.ratio_trace_norm_to_inv_sqrt_d;
    }
    rows.push_back(row);
  }
  json summary;
  summary["config"] = config_echo(cfg);
  summary["subcommand"] = "sweep";
  summary["d_list"] = cfg.d_list;
  summary["seeds"] = seeds;
  summary["rows"] = rows;
  write_json(ctx.out_dir / "sweep.json", summary);
  return kExitOk;
}

int run_check(const RunContext& ctx) {
  CheckReport report = run_check_suite(ctx.cfg.seed, ctx.threads);
  json items = json::array();
  for (const CheckItem& item : report.items) {
    items.push_back({{"name", item.name},
                     {"pass", item.pass},
                     {"margin", item.margin},
                     {"detail", item.detail}});
    std::cout << (item.pass ? "[PASS] " : "[FAIL] ") << item.name
              << " (margin " << format_double(item.margin) << ")\n";
  }
  json summary;
  summary["subcommand"] = "check";
  summary["seed"] = ctx.cfg.seed;
  summary["all_pass"] = report.all_pass;
  summary["invariants"] = items;
  write_json(ctx.out_dir / "check_summary.json", summary);
  return report.all_pass ? kExitOk : kExitNumericalFailure;
}

}  // namespace

int run_subcommand(const std::string& subcommand, const RunConfig& config,
                   const CliOverrides& overrides) {
  try {
    RunContext ctx;
    ctx.cfg = config;
    if (overrides.seed) ctx.cfg.seed = *overrides.seed;
    ctx.cfg.memory_cap_bytes = resolve_cap(ctx.cfg);
    ctx.threads = std::max(1, overrides.threads);
    ctx.out_dir = overrides.out_dir ? *overrides.out_dir : ctx.cfg.directory;
    std::filesystem::create_directories(ctx.out_dir);
    for (const std::string& w : ctx.cfg.warnings)
      std::cerr << "warning: " << w << "\n";

    if (subcommand == "exact") return run_exact(ctx);
    if (subcommand == "meanfield") return run_meanfield(ctx);
    if (subcommand == "compare") return run_compare(ctx);
    if (subcommand == "sweep") return run_sweep(ctx);
    if (subcommand == "check") return run_check(ctx);
    std::cerr << "error: unknown subcommand '" << subcommand << "'\n";
    return kExitConfigError;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const ResourceError& e) {
    std::cerr << "resource rejection: " << e.what() << "\n";
    return kExitResourceRejected;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return kExitNumericalFailure;
  }
}

int run_cli(const std::string& subcommand, const std::optional<std::string>& config_path,
            const CliOverrides& overrides) {
  RunConfig cfg;
  if (config_path) {
    try {
      cfg = parse_config_file(*config_path);
    } catch (const ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return kExitConfigError;
    }
  } else if (subcommand != "check") {
    std::cerr << "config error: --config is required for '" << subcommand << "'\n";
    return kExitConfigError;
  }
  return run_subcommand(subcommand, cfg, overrides);
}

}  // namespace bhmf
