#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ipl/matrix.hpp"
#include "ipl/measure.hpp"
#include "ipl/mutation.hpp"
#include "ipl/recombination.hpp"
#include "ipl/selection.hpp"

namespace ipl {

/// Per-generation crossover probabilities of the discrete-time model with
/// complete interference. Kept apart from the continuous rates on purpose.
class CrossoverProbabilities {
 public:
  CrossoverProbabilities() = default;
  explicit CrossoverProbabilities(std::vector<double> probs);

  std::size_t n_links() const { return probs_.size(); }
  double operator[](std::size_t link) const { return probs_[link]; }
  const std::vector<double>& values() const { return probs_; }
  double total() const;

  friend bool operator==(const CrossoverProbabilities&, const CrossoverProbabilities&) = default;

 private:
  std::vector<double> probs_;
};

/// Full model: recombination rates, optional site-wise mutation and additive
/// fitness, and the initial measure, all on one type space.
struct ModelSpec {
  TypeSpace space;
  RecombinationRates rates;
  std::optional<MutationModel> mutation;
  std::optional<FitnessModel> fitness;
  std::optional<CrossoverProbabilities> crossover;
  Measure initial;

  /// Throws ValidationError if the components disagree on the space or ω_0 = 0.
  void validate() const;

  bool has_mutation() const;
  bool has_selection() const;
  /// s_i = μ_i q_i + diag(r_i)
  SquareMatrix site_operator(std::size_t site) const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Measure> states;
  std::vector<CoefficientTable> coefficients;  // empty unless requested
  std::optional<MeanFitnessTrace> mean_fitness;
  std::vector<double> eta_norms;  // ‖η_t‖ of the linearized flow, closed-form solver only

  std::size_t size() const { return times.size(); }
  /// max_k |‖ω_k‖ - ‖ω_0‖|
  double max_mass_drift() const;
  double min_entry() const;
};

/// Φ_mut(ω) + Φ_rec(ω) + Φ_sel(ω).
SignedMeasure full_rhs(const ModelSpec& model, const SignedMeasure& w);

/// Classical fixed-step RK4 on full_rhs. With no sample times every step is
/// recorded; otherwise the step is shortened so the samples are hit exactly
/// and only those are recorded. Never renormalizes.
Trajectory integrate_rk4(const ModelSpec& model, double t_end, double dt,
                         std::span<const double> sample_times = {});

/// Closed-form solution η_t = exp(tS) Σ_G a_G(t) R_G(ω_0), ω_t = ‖ω_0‖ η_t/‖η_t‖.
/// The composite recombinators of ω_0 are computed once per solver.
class CombinedSolver {
 public:
  explicit CombinedSolver(const ModelSpec& model);

  SignedMeasure eta_at(double t) const;
  Measure at(double t) const;

 private:
  RecombinationSolver recombination_;
  std::vector<std::optional<SquareMatrix>> site_operators_;
  double initial_mass_;
};

struct SolveOptions {
  bool with_coefficients = false;
};

Trajectory solve_combined(const ModelSpec& model, std::span<const double> times,
                          SolveOptions options = {});

struct DecayRateReport {
  std::vector<double> times;      // interior sample times
  std::vector<double> residuals;  // max-entry residual per time
  double max_residual = 0.0;
};

/// Compares a finite-difference derivative of T_G(ω_t) with
/// (S - L(t) - Σ_{α∉G} ρ_α) T_G(ω_t) at every interior sample.
DecayRateReport t_decay_rate(const ModelSpec& model, LinkSet g, const Trajectory& trajectory);

struct EquilibriumResult {
  Measure measure;                               // ⊗ ν_i, scaled to ‖ω_0‖
  std::vector<std::vector<double>> site_factors;  // ν_i
  std::vector<double> growth_rates;              // Perron eigenvalue of s_i
  bool irreducible = true;
  std::vector<std::string> warnings;
};

/// Product of the per-site Perron vectors of s_i, by power iteration on exp(s_i).
EquilibriumResult equilibrium(const ModelSpec& model);

Measure discrete_interference_step(const CrossoverProbabilities& probs, const Measure& w);
/// Uses model.crossover; throws if it is absent.
Measure discrete_interference_step(const ModelSpec& model, const Measure& w);

}  // namespace ipl
