#include "ipl/selection.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ipl/errors.hpp"

namespace ipl {

FitnessModel::FitnessModel(const TypeSpace& space, std::vector<std::vector<double>> site_fitness)
    : site_fitness_(std::move(site_fitness)) {
  if (site_fitness_.size() != space.n_sites()) {
    throw ValidationError("fitness model needs one vector per site (" +
                          std::to_string(space.n_sites()) + "), got " +
                          std::to_string(site_fitness_.size()));
  }
  strictly_positive_ = true;
  for (std::size_t i = 0; i < site_fitness_.size(); ++i) {
    if (site_fitness_[i].size() != space.cardinality(i)) {
      throw ValidationError("fitness vector for site " + std::to_string(i) + " has length " +
                            std::to_string(site_fitness_[i].size()) + ", expected " +
                            std::to_string(space.cardinality(i)));
    }
    for (double r : site_fitness_[i]) {
      if (!std::isfinite(r)) {
        throw ValidationError("fitness vector for site " + std::to_string(i) + " is not finite");
      }
      if (!(r > 0.0)) strictly_positive_ = false;
    }
  }
}

FitnessModel FitnessModel::none(const TypeSpace& space) {
  std::vector<std::vector<double>> zeros;
  for (std::size_t i = 0; i < space.n_sites(); ++i) zeros.emplace_back(space.cardinality(i), 0.0);
  return FitnessModel(space, std::move(zeros));
}

bool FitnessModel::is_zero() const {
  for (const auto& r : site_fitness_) {
    for (double x : r) {
      if (x != 0.0) return false;
    }
  }
  return true;
}

double FitnessModel::fitness_of(const TypeSpace& space, std::size_t x) const {
  double f = 0.0;
  for (std::size_t i = 0; i < site_fitness_.size(); ++i) f += site_fitness_[i][space.digit(x, i)];
  return f;
}

SignedMeasure apply_fitness(const FitnessModel& model, const SignedMeasure& w) {
  const auto& space = w.space();
  if (model.n_sites() != space.n_sites()) {
    throw std::invalid_argument("fitness model does not match the measure's space");
  }
  SignedMeasure out(space);
  for (std::size_t x = 0; x < w.size(); ++x) out[x] = model.fitness_of(space, x) * w[x];
  return out;
}

SignedMeasure selection_rhs(const FitnessModel& model, const SignedMeasure& w) {
  const double norm = w.variation_norm();
  if (norm == 0.0) return SignedMeasure(w.space());
  auto pw = apply_fitness(model, w);
  const double mean = pw.mass() / norm;
  pw.add_scaled(-mean, w);
  return pw;
}

SignedMeasure diploid_rhs(const FitnessModel& model, const Measure& w) {
  const double norm = w.mass();
  if (norm == 0.0) throw std::invalid_argument("diploid selection is undefined for the zero measure");
  const SignedMeasure& omega = w;
  const auto pw = apply_fitness(model, omega);
  // M(ω ⊗ Pω + Pω ⊗ ω) = Pω(X) ω + ω(X) Pω
  auto marginalized = pw.mass() * omega;
  marginalized.add_scaled(omega.mass(), pw);
  auto out = marginalized * (1.0 / norm);
  out.add_scaled(-marginalized.mass() / (norm * norm), omega);
  return out;
}

double mean_fitness(const FitnessModel& model, const Measure& w) {
  const double norm = w.mass();
  if (norm == 0.0) throw std::invalid_argument("mean fitness is undefined for the zero measure");
  return apply_fitness(model, w).mass() / norm;
}

double fitness_variance(const FitnessModel& model, const Measure& w) {
  const double norm = w.mass();
  if (norm == 0.0) throw std::invalid_argument("fitness variance is undefined for the zero measure");
  const auto& space = w.space();
  double first = 0.0;
  double second = 0.0;
  for (std::size_t x = 0; x < w.size(); ++x) {
    const double f = model.fitness_of(space, x);
    const double p = w[x] / norm;
    first += f * p;
    second += f * f * p;
  }
  return second - first * first;
}

MeanFitnessTrace mean_fitness_trace(const FitnessModel& model, std::span<const double> times,
                                    std::span<const Measure> states) {
  if (times.size() != states.size()) throw std::invalid_argument("times and states differ in length");
  MeanFitnessTrace trace;
  trace.times.assign(times.begin(), times.end());
  trace.values.reserve(states.size());
  for (const auto& s : states) trace.values.push_back(mean_fitness(model, s));
  return trace;
}

double thompson_factor(const FitnessModel& model, std::span<const double> times,
                       std::span<const Measure> states) {
  if (states.empty() || times.size() != states.size()) {
    throw std::invalid_argument("thompson factor needs a nonempty trajectory");
  }
  const double norm0 = states.front().mass();
  if (norm0 == 0.0) throw std::invalid_argument("thompson factor is undefined for the zero measure");
  double integral = 0.0;
  double prev = apply_fitness(model, states.front()).mass();
  for (std::size_t k = 1; k < states.size(); ++k) {
    const double cur = apply_fitness(model, states[k]).mass();
    integral += 0.5 * (times[k] - times[k - 1]) * (prev + cur);
    prev = cur;
  }
  return std::exp(integral / norm0);
}

}  // namespace ipl
