#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ipl/dynamics.hpp"

namespace ipl::cli {

inline constexpr int kSchemaVersion = 1;

// Malformed or inconsistent config document; the message names the offending path.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct TimeGrid {
  enum class Kind { list, linear, log };

  Kind kind = Kind::linear;
  std::vector<double> values;  // list
  double start = 0.0;          // log: first positive point
  double end = 1.0;
  std::size_t count = 11;

  /// The grid points: strictly increasing, starting at 0 (log grids get a leading 0).
  std::vector<double> points() const;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

struct InitialSpec {
  enum class Kind { weights, uniform, product, random };

  Kind kind = Kind::uniform;
  std::vector<double> weights;               // weights
  std::vector<std::vector<double>> factors;  // product: one vector per site
  double mass = 1.0;                         // uniform, product, random

  friend bool operator==(const InitialSpec&, const InitialSpec&) = default;
};

struct RunConfig {
  std::vector<std::size_t> sites;
  std::vector<double> rho;
  std::optional<std::vector<SquareMatrix>> mutation;
  std::vector<double> mu;  // per-site mutation scales; empty means all 1
  std::optional<std::vector<std::vector<double>>> fitness;
  std::optional<std::vector<double>> crossover;
  InitialSpec initial;
  TimeGrid times;
  double dt = 1e-3;
  double threshold = 1e-6;
  std::size_t generations = 10;
  std::uint64_t seed = 0;

  /// Validated model; random initial measures are drawn from `seed`.
  ModelSpec model() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
/// Canonical JSON text; parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& config);

/// 64-bit FNV-1a of the canonical config text, as 16 hex digits.
std::string model_hash(const RunConfig& config);

/// Deterministic strictly positive measure of the given mass (platform-independent stream).
Measure random_initial(const TypeSpace& space, std::uint64_t seed, double mass = 1.0);

}  // namespace ipl::cli
