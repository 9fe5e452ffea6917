#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "commands.hpp"
#include "config.hpp"
#include "dynprobit/errors.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string data_path;
  std::string out_dir;
  std::string method;
  long draws = 0;
  std::int64_t seed = -1;
};

void add_common_flags(CLI::App* cmd, CommonArgs& args, bool wants_data) {
  cmd->add_option("--config", args.config_path, "JSON config file")->required();
  if (wants_data) cmd->add_option("--data", args.data_path, "input data CSV (overrides config)");
  cmd->add_option("--out", args.out_dir, "output directory (overrides config)");
  cmd->add_option("--method", args.method, "iid|pfm|mf|all (overrides config)");
  cmd->add_option("--draws", args.draws, "posterior draws for the i.i.d. sampler");
  cmd->add_option("--seed", args.seed, "RNG seed (overrides config)");
}

int run(const std::string& command, const CommonArgs& args) {
  dynprobit::cli::RunConfig config;
  try {
    config = dynprobit::cli::load_config(args.config_path);
    dynprobit::cli::ConfigOverrides overrides;
    if (!args.data_path.empty()) overrides.data_path = args.data_path;
    if (!args.out_dir.empty()) overrides.out_dir = args.out_dir;
    if (!args.method.empty()) overrides.method = args.method;
    if (args.draws > 0) overrides.draws = args.draws;
    if (args.seed >= 0) overrides.seed = static_cast<std::uint64_t>(args.seed);
    dynprobit::cli::apply_overrides(config, overrides);
  } catch (const dynprobit::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return dynprobit::cli::kExitConfigError;
  }
  return dynprobit::cli::dispatch(command, config);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian smoothing for univariate dynamic probit models"};
  app.require_subcommand(1);

  CommonArgs sim_args, fit_args, cmp_args;
  CLI::App* sim = app.add_subcommand("simulate", "draw synthetic data from the model");
  add_common_flags(sim, sim_args, /*wants_data=*/false);
  CLI::App* fit = app.add_subcommand("fit", "smooth a binary series");
  add_common_flags(fit, fit_args, /*wants_data=*/true);
  CLI::App* cmp = app.add_subcommand("compare", "fit all methods and score them");
  add_common_flags(cmp, cmp_args, /*wants_data=*/true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : dynprobit::cli::kExitConfigError;
  }

  if (sim->parsed()) return run("simulate", sim_args);
  if (fit->parsed()) return run("fit", fit_args);
  return run("compare", cmp_args);
}
