#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "bhmf/config.hpp"

namespace bhmf {

struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  int threads = 1;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitResourceRejected = 3;
inline constexpr int kExitNumericalFailure = 4;

/// Environment override for the memory cap (bytes).
inline constexpr const char* kMemoryCapEnvVar = "HUBBARD_MF_LAB_MEMORY_CAP_BYTES";

/// Dispatches one subcommand (exact | meanfield | compare | sweep | check),
/// writes its artifacts under the output directory, and returns the process
/// exit code. `check` ignores the config except for the seed.
int run_subcommand(const std::string& subcommand, const RunConfig& config,
                   const CliOverrides& overrides);

/// Loads the config (when required), applies overrides and the environment
/// memory cap, and runs. This is the whole CLI behind argument parsing.
int run_cli(const std::string& subcommand, const std::optional<std::string>& config_path,
            const CliOverrides& overrides);

}  // namespace bhmf
