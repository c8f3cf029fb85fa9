#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bhmf/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Bose-Hubbard lattice dynamics and its Gutzwiller mean-field limit"};
  app.require_subcommand(1);

  struct SubArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    int threads = 1;
  };

  std::map<std::string, SubArgs> args;
  for (const std::string name : {"exact", "meanfield", "compare", "sweep", "check"}) {
    CLI::App* sub = app.add_subcommand(name);
    SubArgs& a = args[name];
    CLI::Option* cfg = sub->add_option("--config", a.config, "run configuration file");
    if (name != "check") cfg->required();
    sub->add_option("--seed", a.seed, "override the config seed");
    sub->add_option("--out", a.out, "output directory (default from the config)");
    sub->add_option("--threads", a.threads, "worker/matvec threads")
        ->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : bhmf::kExitConfigError;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  const SubArgs& a = args[name];
  bhmf::CliOverrides overrides;
  overrides.seed = a.seed;
  overrides.out_dir = a.out;
  overrides.threads = a.threads;
  std::optional<std::string> config_path;
  if (!a.config.empty()) config_path = a.config;
  return bhmf::run_cli(name, config_path, overrides);
}
