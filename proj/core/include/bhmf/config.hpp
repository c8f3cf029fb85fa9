#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bhmf {

enum class InitialKind { Gutzwiller, PerturbedGutzwiller, FockTuple };

struct InitialState {
  InitialKind kind = InitialKind::Gutzwiller;
  Eigen::VectorXcd amplitudes;       // gutzwiller / perturbed_gutzwiller
  Eigen::VectorXcd perp_amplitudes;  // perturbed_gutzwiller only
  int num_perturbed_sites = 0;
  std::vector<int> occupations;      // fock_tuple only
};

/// Parsed and validated run configuration. Key names in the config file match
/// these field names; see README for the format.
struct RunConfig {
  // [model]
  double J = 0.0;
  double mu = 0.0;
  double U = 0.0;
  // [lattice]
  int L = 2;
  int d = 1;
  // [cutoff]
  int M = 1;
  // [time]
  double t_final = 1.0;
  double dt = 1e-3;
  int n_samples = 21;
  double krylov_tol = 1e-10;
  // [initial]
  InitialState initial;
  // [diagnostics]
  double c_constant_C = 1.0;
  std::vector<double> k_moments = {1, 2, 4};
  // [sweep]
  std::vector<int> d_list;
  std::vector<std::uint64_t> seeds;
  // [output]
  std::string directory = ".";
  // top level
  std::uint64_t seed = 1;
  std::uint64_t memory_cap_bytes = 2ull << 30;  // 2 GiB

  std::vector<std::string> warnings;  // e.g. renormalized amplitude lists
};

/// Parses the flat sectioned key-value format. Unknown sections or keys and
/// malformed values raise ConfigError with a field-level message.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

/// Token list "a b+ci ..." -> complex vector (used by amplitude lists).
Eigen::VectorXcd parse_complex_list(const std::string& text, const std::string& field);

}  // namespace bhmf
