#include "ipl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ipl/errors.hpp"

namespace ipl {

CrossoverProbabilities::CrossoverProbabilities(std::vector<double> probs) : probs_(std::move(probs)) {
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (!(probs_[i] >= 0.0 && probs_[i] <= 1.0)) {
      throw std::invalid_argument("crossover probability at link " + std::to_string(i) +
                                  " must lie in [0, 1]");
    }
  }
  if (total() > 1.0 + 1e-12) {
    throw std::invalid_argument("crossover probabilities sum to " + std::to_string(total()) +
                                " > 1; at most one crossover happens per generation");
  }
}

double CrossoverProbabilities::total() const {
  double s = 0.0;
  for (double p : probs_) s += p;
  return s;
}

void ModelSpec::validate() const {
  if (!(initial.space() == space)) throw ValidationError("initial measure lives on a different space");
  if (rates.n_links() != space.n_links()) {
    throw ValidationError("expected " + std::to_string(space.n_links()) +
                          " recombination rates, got " + std::to_string(rates.n_links()));
  }
  if (mutation) {
    bool fits = mutation->n_sites() == space.n_sites();
    for (std::size_t i = 0; fits && i < space.n_sites(); ++i) {
      fits = mutation->generator(i).matrix().size() == space.cardinality(i);
    }
    if (!fits) throw ValidationError("mutation model does not match the type space");
  }
  if (fitness) {
    bool fits = fitness->n_sites() == space.n_sites();
    for (std::size_t i = 0; fits && i < space.n_sites(); ++i) fits = fitness->site(i).size() == space.cardinality(i);
    if (!fits) throw ValidationError("fitness model does not match the type space");
  }
  if (crossover && crossover->n_links() != space.n_links()) {
    throw ValidationError("expected " + std::to_string(space.n_links()) +
                          " crossover probabilities, got " + std::to_string(crossover->n_links()));
  }
  if (!(initial.mass() > 0.0)) throw ValidationError("initial measure must have positive mass");
}

bool ModelSpec::has_mutation() const {
  if (!mutation) return false;
  return std::any_of(mutation->generators().begin(), mutation->generators().end(),
                     [](const SiteGenerator& g) { return g.scale() != 0.0 && g.matrix().norm1() != 0.0; });
}

bool ModelSpec::has_selection() const { return fitness && !fitness->is_zero(); }

SquareMatrix ModelSpec::site_operator(std::size_t site) const {
  SquareMatrix s(space.cardinality(site));
  if (mutation) s += mutation->generator(site).scaled();
  if (fitness) s += fitness->site_operator(site);
  return s;
}

double Trajectory::max_mass_drift() const {
  if (states.empty()) return 0.0;
  const double m0 = states.front().mass();
  double drift = 0.0;
  for (const auto& s : states) drift = std::max(drift, std::abs(s.mass() - m0));
  return drift;
}

double Trajectory::min_entry() const {
  double m = 0.0;
  for (const auto& s : states) m = std::min(m, s.as_signed().min_entry());
  return m;
}

SignedMeasure full_rhs(const ModelSpec& model, const SignedMeasure& w) {
  SignedMeasure out(w.space());
  if (model.mutation) out += mutation_rhs(*model.mutation, w);
  for (std::size_t link = 0; link < model.rates.n_links(); ++link) {
    const double rho = model.rates[link];
    out.add_scaled(rho, recombine_link(w, link));
    out.add_scaled(-rho, w);
  }
  if (model.fitness) out += selection_rhs(*model.fitness, w);
  return out;
}

namespace {

constexpr double kRk4NegativeTolerance = 1e-10;

SignedMeasure rk4_step(const ModelSpec& model, const SignedMeasure& y, double h) {
  const auto k1 = full_rhs(model, y);
  auto y2 = y;
  y2.add_scaled(0.5 * h, k1);
  const auto k2 = full_rhs(model, y2);
  auto y3 = y;
  y3.add_scaled(0.5 * h, k2);
  const auto k3 = full_rhs(model, y3);
  auto y4 = y;
  y4.add_scaled(h, k3);
  const auto k4 = full_rhs(model, y4);

  auto next = y;
  next.add_scaled(h / 6.0, k1);
  next.add_scaled(h / 3.0, k2);
  next.add_scaled(h / 3.0, k3);
  next.add_scaled(h / 6.0, k4);
  return next;
}

Measure checked_state(const SignedMeasure& y, double t) {
  for (double x : y.weights()) {
    if (!std::isfinite(x)) throw IntegrationError("non-finite state entry", t);
  }
  if (y.min_entry() < -kRk4NegativeTolerance) {
    throw IntegrationError("state entry " + std::to_string(y.min_entry()) + " left the positive cone", t);
  }
  return Measure(y, kRk4NegativeTolerance);
}

}  // namespace

Trajectory integrate_rk4(const ModelSpec& model, double t_end, double dt,
                         std::span<const double> sample_times) {
  model.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be nonnegative");

  std::vector<double> samples(sample_times.begin(), sample_times.end());
  const bool record_all = samples.empty();
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (samples[k] < 0.0 || samples[k] > t_end || (k > 0 && samples[k] <= samples[k - 1])) {
      throw std::invalid_argument("sample times must be increasing and lie in [0, t_end]");
    }
  }

  Trajectory traj;
  SignedMeasure y = model.initial;
  double t = 0.0;
  auto record = [&](double time) {
    traj.times.push_back(time);
    traj.states.push_back(checked_state(y, time));
  };

  if (record_all) {
    const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
    const double h = steps == 0 ? 0.0 : t_end / static_cast<double>(steps);
    record(0.0);
    for (std::size_t k = 1; k <= steps; ++k) {
      y = rk4_step(model, y, h);
      t = h * static_cast<double>(k);
      record(t);
    }
    return traj;
  }

  for (double target : samples) {
    const double span = target - t;
    if (span > 0.0) {
      const auto steps = static_cast<std::size_t>(std::ceil(span / dt - 1e-9));
      const double h = span / static_cast<double>(steps);
      for (std::size_t k = 0; k < steps; ++k) {
        y = rk4_step(model, y, h);
        for (double x : y.weights()) {
          if (!std::isfinite(x)) throw IntegrationError("non-finite state entry", t + h * (k + 1));
        }
      }
      t = target;
    }
    record(target);
  }
  return traj;
}

CombinedSolver::CombinedSolver(const ModelSpec& model)
    : recombination_((model.validate(), model.initial), model.rates),
      initial_mass_(model.initial.mass()) {
  site_operators_.resize(model.space.n_sites());
  for (std::size_t i = 0; i < model.space.n_sites(); ++i) {
    auto s = model.site_operator(i);
    if (s.norm1() != 0.0) site_operators_[i] = std::move(s);
  }
}

SignedMeasure CombinedSolver::eta_at(double t) const {
  SignedMeasure eta = recombination_.at(t);
  for (std::size_t i = 0; i < site_operators_.size(); ++i) {
    if (site_operators_[i]) apply_axis(eta, i, matrix_exp(*site_operators_[i] * t));
  }
  return eta;
}

Measure CombinedSolver::at(double t) const {
  auto eta = eta_at(t);
  const double norm = eta.variation_norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw NumericalError("linearized flow lost all mass at t = " + std::to_string(t));
  }
  eta *= initial_mass_ / norm;
  return Measure(std::move(eta));
}

Trajectory solve_combined(const ModelSpec& model, std::span<const double> times,
                          SolveOptions options) {
  CombinedSolver solver(model);
  Trajectory traj;
  traj.times.assign(times.begin(), times.end());
  traj.states.reserve(times.size());
  const double m0 = model.initial.mass();
  for (double t : times) {
    auto eta = solver.eta_at(t);
    const double norm = eta.variation_norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw NumericalError("linearized flow lost all mass at t = " + std::to_string(t));
    }
    traj.eta_norms.push_back(norm);
    eta *= m0 / norm;
    traj.states.emplace_back(std::move(eta));
    if (options.with_coefficients) traj.coefficients.push_back(coefficient_table(t, model.rates));
  }
  if (model.fitness) traj.mean_fitness = mean_fitness_trace(*model.fitness, traj.times, traj.states);
  return traj;
}

DecayRateReport t_decay_rate(const ModelSpec& model, LinkSet g, const Trajectory& trajectory) {
  const std::size_t n = trajectory.size();
  if (n < 3) throw std::invalid_argument("decay-rate check needs at least 3 time points");
  const double rate = model.rates.total(g.complement(model.space.n_links()));

  std::vector<SignedMeasure> t_values;
  t_values.reserve(n);
  for (const auto& s : trajectory.states) t_values.push_back(t_operator(s, g));

  DecayRateReport report;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double h1 = trajectory.times[k] - trajectory.times[k - 1];
    const double h2 = trajectory.times[k + 1] - trajectory.times[k];
    // second-order three-point derivative on a possibly uneven grid
    SignedMeasure derivative = t_values[k - 1] * (-h2 / (h1 * (h1 + h2)));
    derivative.add_scaled((h2 - h1) / (h1 * h2), t_values[k]);
    derivative.add_scaled(h1 / (h2 * (h1 + h2)), t_values[k + 1]);

    const auto& tg = t_values[k];
    SignedMeasure predicted(tg.space());
    if (model.mutation) predicted += mutation_rhs(*model.mutation, tg);
    double mean = 0.0;
    if (model.fitness) {
      predicted += apply_fitness(*model.fitness, tg);
      mean = mean_fitness(*model.fitness, trajectory.states[k]);
    }
    predicted.add_scaled(-(mean + rate), tg);

    const double residual = max_abs_difference(derivative, predicted);
    report.times.push_back(trajectory.times[k]);
    report.residuals.push_back(residual);
    report.max_residual = std::max(report.max_residual, residual);
  }
  return report;
}

EquilibriumResult equilibrium(const ModelSpec& model) {
  model.validate();
  constexpr double kTolerance = 1e-12;
  constexpr std::size_t kMaxIterations = 100000;

  EquilibriumResult result;
  std::vector<SignedMeasure> factors;
  const auto partition = partition_of(model.space, model.space.all_links());
  for (std::size_t i = 0; i < model.space.n_sites(); ++i) {
    const auto s = model.site_operator(i);
    if (!off_diagonal_irreducible(s)) {
      result.irreducible = false;
      result.warnings.push_back("site " + std::to_string(i) +
                                " operator is reducible; the equilibrium may depend on the initial measure");
    }
    const auto step = matrix_exp(s);
    const std::size_t site[] = {i};
    auto v_measure = marginal(model.initial.as_signed(), site);
    std::vector<double> v(v_measure.weights().begin(), v_measure.weights().end());
    const double m = std::accumulate(v.begin(), v.end(), 0.0);
    for (auto& x : v) x /= m;

    double growth = 0.0;
    bool converged = false;
    for (std::size_t iter = 0; iter < kMaxIterations; ++iter) {
      auto next = step.apply(v);
      const double sum = std::accumulate(next.begin(), next.end(), 0.0);
      if (!(sum > 0.0) || !std::isfinite(sum)) {
        throw NumericalError("power iteration lost positivity at site " + std::to_string(i));
      }
      double change = 0.0;
      for (std::size_t k = 0; k < next.size(); ++k) {
        next[k] /= sum;
        change += std::abs(next[k] - v[k]);
      }
      v = std::move(next);
      growth = std::log(sum);
      if (change < kTolerance) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw NumericalError("power iteration for site " + std::to_string(i) + " did not converge");
    }
    result.growth_rates.push_back(growth);
    factors.emplace_back(model.space.subspace(std::span<const std::size_t>(site)), v);
    result.site_factors.push_back(std::move(v));
  }
  auto product_measure = product(model.space, partition, factors);
  product_measure *= model.initial.mass();
  result.measure = Measure(std::move(product_measure));
  return result;
}

Measure discrete_interference_step(const CrossoverProbabilities& probs, const Measure& w) {
  if (probs.n_links() != w.space().n_links()) {
    throw std::invalid_argument("crossover probabilities do not match the number of links");
  }
  if (probs.total() > 1.0 + 1e-12) throw std::invalid_argument("crossover probabilities sum to more than 1");
  SignedMeasure out = w.as_signed() * std::max(0.0, 1.0 - probs.total());
  for (std::size_t link = 0; link < probs.n_links(); ++link) {
    if (probs[link] != 0.0) out.add_scaled(probs[link], recombine_link(w, link));
  }
  return Measure(std::move(out));
}

Measure discrete_interference_step(const ModelSpec& model, const Measure& w) {
  if (!model.crossover) {
    throw std::invalid_argument("model has no per-generation crossover probabilities");
  }
  return discrete_interference_step(*model.crossover, w);
}

}  // namespace ipl
