#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ipl/matrix.hpp"
#include "ipl/measure.hpp"

namespace ipl {

/// Additive fitness: the reproduction rate of type x is Σ_i r_i(x_i). P is the
/// diagonal operator with these rates, P = Σ_i P_i with p_i = diag(r_i).
class FitnessModel {
 public:
  FitnessModel() = default;
  FitnessModel(const TypeSpace& space, std::vector<std::vector<double>> site_fitness);

  static FitnessModel none(const TypeSpace& space);

  std::size_t n_sites() const { return site_fitness_.size(); }
  const std::vector<double>& site(std::size_t i) const { return site_fitness_.at(i); }
  const std::vector<std::vector<double>>& site_fitness() const { return site_fitness_; }
  SquareMatrix site_operator(std::size_t i) const { return SquareMatrix::diagonal(site_fitness_.at(i)); }

  /// Every r_i strictly positive; required for the Lyapunov guarantee.
  bool strictly_positive() const { return strictly_positive_; }
  bool is_zero() const;

  /// Σ_i r_i(x_i) for the state with flat index `x`.
  double fitness_of(const TypeSpace& space, std::size_t x) const;

  friend bool operator==(const FitnessModel& a, const FitnessModel& b) {
    return a.site_fitness_ == b.site_fitness_;
  }

 private:
  std::vector<std::vector<double>> site_fitness_;
  bool strictly_positive_ = false;
};

/// L(t_k) = Pω_k(X)/‖ω_k‖ along a sampled trajectory.
struct MeanFitnessTrace {
  std::vector<double> times;
  std::vector<double> values;
};

/// P ω
SignedMeasure apply_fitness(const FitnessModel& model, const SignedMeasure& w);

/// Pω - (Pω(X)/‖ω‖) ω, with ‖·‖ the variation norm; zero for ω = 0.
SignedMeasure selection_rhs(const FitnessModel& model, const SignedMeasure& w);

/// Diploid selection without dominance, evaluated through the marginalization
/// M(μ ⊗ ν) = ν(X) μ. Throws for ω = 0.
SignedMeasure diploid_rhs(const FitnessModel& model, const Measure& w);

/// Pω(X)/‖ω‖. Throws for ω = 0.
double mean_fitness(const FitnessModel& model, const Measure& w);

/// P²(ω/‖ω‖)(X) - (P(ω/‖ω‖)(X))², the rate of change of the mean fitness.
double fitness_variance(const FitnessModel& model, const Measure& w);

MeanFitnessTrace mean_fitness_trace(const FitnessModel& model, std::span<const double> times,
                                    std::span<const Measure> states);

/// ϑ(t_end) = exp((1/‖ω_0‖) ∫ Pω_τ(X) dτ), trapezoid rule on the sample grid.
double thompson_factor(const FitnessModel& model, std::span<const double> times,
                       std::span<const Measure> states);

}  // namespace ipl
