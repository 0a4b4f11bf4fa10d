#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ipl/cli/config.hpp"

namespace ipl::cli {

enum ExitCode : int {
  kOk = 0,
  kCompareFailed = 1,
  kInvalidInput = 2,   // config, validation or JSON errors
  kRuntimeFailure = 3, // numerical or I/O failures
};

struct CommandContext {
  RunConfig config;
  std::filesystem::path out_dir = ".";
  std::string command_line;
};

struct CommandResult {
  int exit_code = kOk;
  std::vector<std::filesystem::path> files;
  std::vector<std::string> warnings;
  std::string summary;
};

CommandResult run_solve(const CommandContext& ctx);
CommandResult run_integrate(const CommandContext& ctx);
CommandResult run_compare(const CommandContext& ctx);
CommandResult run_ld(const CommandContext& ctx);
CommandResult run_equilibrium(const CommandContext& ctx);
CommandResult run_discrete(const CommandContext& ctx);

// shared output helpers

/// Round-trippable decimal form (%.17g).
std::string format_number(double x);

/// Writes through a sibling temp file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& text);

/// '#'-prefixed provenance lines: schema, seed, model hash, command line, then `notes`.
std::string header_lines(const CommandContext& ctx, const std::vector<std::string>& notes = {});

/// "(i;j;...)" for every state in flat-index order.
std::vector<std::string> state_labels(const TypeSpace& space);

/// True if ω equals the product of its one-site marginals (scaled to ‖ω‖) within tol.
bool is_product_measure(const Measure& w, double tol = 1e-12);

}  // namespace ipl::cli
