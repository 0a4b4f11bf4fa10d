#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ipl/cli/commands.hpp"
#include "ipl/errors.hpp"

namespace {

using namespace ipl::cli;

std::string joined(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i != 0) s += ' ';
    s += argv[i];
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recombination, mutation and selection dynamics on finite type spaces"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::optional<double> dt;
  std::optional<double> threshold;
  std::optional<std::uint64_t> seed;

  using Runner = std::function<CommandResult(const CommandContext&)>;
  const std::map<std::string, std::pair<std::string, Runner>> commands{
      {"solve", {"closed-form trajectory and coefficient functions", run_solve}},
      {"integrate", {"RK4 reference trajectory", run_integrate}},
      {"compare", {"closed form against RK4; exits 1 above the threshold", run_compare}},
      {"ld", {"linkage disequilibria along the closed-form trajectory", run_ld}},
      {"equilibrium", {"product equilibrium of the mutation-selection operators", run_equilibrium}},
      {"discrete", {"discrete-generation model with complete interference", run_discrete}},
  };
  for (const auto& [name, entry] : commands) {
    auto* sub = app.add_subcommand(name, entry.first);
    sub->add_option("-c,--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--out", out_dir, "output directory (created if missing)");
    sub->add_option("--dt", dt, "RK4 step; overrides the config");
    sub->add_option("--threshold", threshold, "compare threshold; overrides the config");
    sub->add_option("--seed", seed, "seed for random initial measures; overrides the config");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalidInput;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    CommandContext ctx;
    ctx.config = load_config(config_path);
    if (dt) ctx.config.dt = *dt;
    if (threshold) ctx.config.threshold = *threshold;
    if (seed) ctx.config.seed = *seed;
    if (!(ctx.config.dt > 0.0)) throw ConfigError("dt: must be positive");
    if (!(ctx.config.threshold > 0.0)) throw ConfigError("threshold: must be positive");
    ctx.out_dir = out_dir;
    ctx.command_line = joined(argc, argv);

    const auto result = commands.at(name).second(ctx);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
    for (const auto& f : result.files) std::cout << f.string() << '\n';
    std::cerr << name << ": " << result.summary << '\n';
    return result.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const ipl::ValidationError& e) {
    std::cerr << "invalid model: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const ipl::IntegrationError& e) {
    std::cerr << "integration failed at t = " << e.time() << ": " << e.what() << '\n';
    return kRuntimeFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
}
