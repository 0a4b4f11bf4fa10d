#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>

#include "ipl/dynamics.hpp"
#include "ipl/errors.hpp"
#include "random_models.hpp"

namespace ipl {
namespace {

using Sites = std::vector<std::size_t>;

ModelSpec full_random_model(testing::Rng& rng, const TypeSpace& space) {
  auto m = testing::recombination_model(testing::random_measure(rng, space), testing::random_rates(rng, space.n_links()));
  m.mutation = testing::random_mutation(rng, space);
  m.fitness = testing::random_fitness(rng, space);
  return m;
}

double max_deviation(const Trajectory& a, const Trajectory& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, max_abs_difference(a.states[k], b.states[k]));
  return d;
}

// Perron vector of a small matrix with Eigen's general eigensolver.
std::vector<double> perron_oracle(const SquareMatrix& s, double* eigenvalue) {
  Eigen::MatrixXd e(s.size(), s.size());
  for (std::size_t r = 0; r < s.size(); ++r) {
    for (std::size_t c = 0; c < s.size(); ++c) e(r, c) = s(r, c);
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(e);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < solver.eigenvalues().size(); ++i) {
    if (solver.eigenvalues()(i).real() > solver.eigenvalues()(best).real()) best = i;
  }
  *eigenvalue = solver.eigenvalues()(best).real();
  Eigen::VectorXd v = solver.eigenvectors().col(best).real();
  v /= v.sum();
  return {v.data(), v.data() + v.size()};
}

TEST(ModelSpecTest, ValidatesComponents) {
  const TypeSpace space({2, 2});
  auto m = testing::recombination_model(Measure::uniform(space), RecombinationRates({1.0}));
  EXPECT_NO_THROW(m.validate());
  m.initial = Measure::zero(space);
  EXPECT_THROW(m.validate(), ValidationError);
  m.initial = Measure::uniform(space);
  m.rates = RecombinationRates({1.0, 1.0});
  EXPECT_THROW(m.validate(), ValidationError);
  m.rates = RecombinationRates({1.0});
  m.fitness = FitnessModel(TypeSpace({2, 3}), {{0, 1}, {0, 1, 2}});
  EXPECT_THROW(m.validate(), ValidationError);
}

TEST(CrossoverProbabilitiesTest, RejectsInvalid) {
  EXPECT_THROW(CrossoverProbabilities({0.6, 0.6}), std::invalid_argument);
  EXPECT_THROW(CrossoverProbabilities({-0.1}), std::invalid_argument);
  EXPECT_DOUBLE_EQ(CrossoverProbabilities({0.25, 0.5}).total(), 0.75);
}

TEST(FullRhsTest, Examples) {
  testing::Rng rng(1);
  const TypeSpace space({2, 3, 2});
  const auto prod = testing::random_product_measure(rng, space);
  auto m = testing::recombination_model(prod, testing::random_rates(rng, 2));
  EXPECT_LT(full_rhs(m, prod).variation_norm(), 1e-15);

  for (int trial = 0; trial < 20; ++trial) {
    const auto s = testing::random_space(rng, 1, 4);
    const auto model = full_random_model(rng, s);
    EXPECT_NEAR(full_rhs(model, testing::random_measure(rng, s, 2.0)).mass(), 0.0, 1e-12);
  }
}

TEST(Rk4Test, ConstantWithoutDynamics) {
  testing::Rng rng(2);
  const TypeSpace space({2, 2});
  // recombination is idle on product measures; no mutation or selection
  const auto prod = testing::random_product_measure(rng, space);
  const auto traj = integrate_rk4(testing::recombination_model(prod, RecombinationRates({1.0})), 1.0, 0.1);
  EXPECT_EQ(traj.size(), 11u);
  EXPECT_NEAR(traj.times.back(), 1.0, 1e-15);
  for (const auto& s : traj.states) EXPECT_LT(max_abs_difference(s, prod), 1e-15);
  EXPECT_THROW(integrate_rk4(testing::recombination_model(prod, RecombinationRates({1.0})), 1.0, 0.0),
               std::invalid_argument);
}

TEST(Rk4Test, HitsSampleTimesExactly) {
  const TypeSpace space({2, 2});
  const Measure diag(space, {0.5, 0, 0, 0.5});
  const std::vector<double> samples{0.0, 0.123, 0.5, 1.0};
  const auto traj = integrate_rk4(testing::recombination_model(diag, RecombinationRates({1.0})), 1.0, 0.01, samples);
  EXPECT_EQ(traj.times, samples);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double t = samples[k];
    EXPECT_NEAR(traj.states[k][0], std::exp(-t) / 2 + (1 - std::exp(-t)) / 4, 1e-10);
  }
}

TEST(Rk4Test, FourthOrderConvergence) {
  testing::Rng rng(3);
  const TypeSpace space({2, 3});
  const auto w = testing::random_measure(rng, space);
  const RecombinationRates rates({1.5});
  const auto model = testing::recombination_model(w, rates);
  const std::vector<double> samples{0.0, 2.0};
  double err[2];
  int k = 0;
  for (double dt : {0.2, 0.1}) {
    const auto traj = integrate_rk4(model, 2.0, dt, samples);
    err[k++] = max_abs_difference(traj.states.back(), solve_recombination(w, 2.0, rates));
  }
  const double ratio = err[0] / err[1];
  EXPECT_GT(ratio, 12.0);
  EXPECT_LT(ratio, 20.0);
}

TEST(Rk4Test, ReportsBlowUp) {
  const TypeSpace space({2});
  auto m = testing::recombination_model(Measure::uniform(space), RecombinationRates());
  // fitness this large makes explicit RK4 unstable at a coarse step
  m.fitness = FitnessModel(space, {{0.0, 1e6}});
  try {
    integrate_rk4(m, 10.0, 0.5);
    FAIL() << "expected an integration error";
  } catch (const IntegrationError& e) {
    EXPECT_GE(e.time(), 0.0);
  }
}

TEST(SolveCombinedTest, ReducesToRecombinationSolver) {
  testing::Rng rng(4);
  const TypeSpace space({3, 2, 2});
  const auto w = testing::random_measure(rng, space, 1.3);
  const auto rates = testing::random_rates(rng, 2);
  const std::vector<double> times{0.0, 0.4, 2.0};
  const auto traj = solve_combined(testing::recombination_model(w, rates), times, {.with_coefficients = true});
  ASSERT_EQ(traj.coefficients.size(), 3u);
  EXPECT_FALSE(traj.mean_fitness.has_value());
  for (std::size_t k = 0; k < times.size(); ++k) {
    EXPECT_LT(max_abs_difference(traj.states[k], solve_recombination(w, times[k], rates)), 1e-14);
  }
}

TEST(SolveCombinedTest, MatchesRk4WithMutation) {
  testing::Rng rng(5);
  std::vector<double> times;
  for (int k = 0; k <= 10; ++k) times.push_back(0.5 * k);
  for (int trial = 0; trial < 5; ++trial) {
    const auto space = testing::random_space(rng, 2, 3);
    auto model = full_random_model(rng, space);
    model.fitness.reset();
    const auto closed = solve_combined(model, times);
    const auto oracle = integrate_rk4(model, 5.0, 1e-3, times);
    EXPECT_LT(max_deviation(closed, oracle), 1e-6);
    EXPECT_LT(closed.max_mass_drift(), 1e-9);
    EXPECT_LT(oracle.max_mass_drift(), 1e-9);
    EXPECT_GE(closed.min_entry(), -1e-9);
  }
}

TEST(SolveCombinedTest, MatchesRk4WithSelectionFromProductStates) {
  testing::Rng rng(15);
  std::vector<double> times;
  for (int k = 0; k <= 10; ++k) times.push_back(0.5 * k);
  for (int trial = 0; trial < 5; ++trial) {
    const auto space = testing::random_space(rng, 2, 3);
    auto model = full_random_model(rng, space);
    model.initial = testing::random_product_measure(rng, space);
    const auto closed = solve_combined(model, times);
    const auto oracle = integrate_rk4(model, 5.0, 1e-3, times);
    EXPECT_LT(max_deviation(closed, oracle), 1e-6);
    ASSERT_TRUE(closed.mean_fitness.has_value());
    EXPECT_EQ(closed.mean_fitness->values.size(), times.size());
  }
}

// Site-wise selection reweights the marginals, so exp(tP) does not commute with
// R_α once the state carries linkage disequilibrium. Hand example: two binary
// sites, selection e^{ct} on value 1 of site 1, ν = (½,0,0,½).
TEST(SolveCombinedTest, SelectionDoesNotCommuteWithRecombinators) {
  const TypeSpace space({2, 2});
  const Measure nu(space, {0.5, 0, 0, 0.5});
  const double k = std::exp(1.0);
  const SquareMatrix w = SquareMatrix::diagonal(std::vector<double>{1.0, k});
  SignedMeasure weighted = nu;
  apply_axis(weighted, 1, w);
  const auto recombined_after = recombine_link(Measure(weighted), 0);
  SignedMeasure recombined_first = recombine_link(nu, 0);
  apply_axis(recombined_first, 1, w);
  // shapes ∝ (1, k, k, k²) and ∝ (1, k, 1, k)
  EXPECT_NEAR(recombined_after[3] / recombined_after[0], k * k, 1e-12);
  EXPECT_NEAR(recombined_first[3] / recombined_first[0], k, 1e-12);

  // consequently the closed form departs from the integrated flow
  testing::Rng rng(16);
  auto model = testing::recombination_model(testing::random_measure(rng, space), RecombinationRates({1.0}));
  model.fitness = FitnessModel(space, {{0.0, 0.0}, {0.0, 1.0}});
  const std::vector<double> times{0.0, 1.0};
  EXPECT_GT(max_deviation(solve_combined(model, times), integrate_rk4(model, 1.0, 1e-3, times)), 1e-6);
}

TEST(SolveCombinedTest, ProductAtALinkStaysProduct) {
  testing::Rng rng(6);
  const TypeSpace space({2, 3, 2});
  // ω_0 = ν_{≤0} ⊗ ν_{>0}
  const auto left = testing::random_measure(rng, TypeSpace({2}));
  const auto right = testing::random_measure(rng, TypeSpace({3, 2}));
  const Measure w0(tensor_product(left, right));
  auto model = full_random_model(rng, space);
  model.initial = w0;
  for (double t : {0.3, 1.7}) {
    const auto wt = solve_combined(model, std::vector<double>{t}).states[0];
    EXPECT_LT(max_abs_difference(recombine_link(wt, 0), wt), 1e-12);
  }
}

TEST(SolveCombinedTest, FlowPropertyForRecombination) {
  testing::Rng rng(7);
  const TypeSpace space({2, 2, 3});
  const auto w = testing::random_measure(rng, space);
  const auto rates = testing::random_rates(rng, 2);
  auto model = testing::recombination_model(w, rates);
  model.mutation = testing::random_mutation(rng, space);
  const auto at_s = CombinedSolver(model).at(0.6);
  auto restarted = model;
  restarted.initial = at_s;
  EXPECT_LT(max_abs_difference(CombinedSolver(restarted).at(0.9), CombinedSolver(model).at(1.5)), 1e-9);

  // with selection the restart applies to the normalized ω (product states stay product)
  model.fitness = testing::random_fitness(rng, space);
  model.initial = testing::random_product_measure(rng, space);
  restarted.fitness = model.fitness;
  restarted.initial = CombinedSolver(model).at(0.6);
  EXPECT_LT(max_abs_difference(CombinedSolver(restarted).at(0.9), CombinedSolver(model).at(1.5)), 1e-9);
}

TEST(DecayRateTest, Examples) {
  testing::Rng rng(8);
  const TypeSpace space({2, 3});
  std::vector<double> times;
  for (int k = 0; k <= 40; ++k) times.push_back(0.3 + 1e-4 * k);

  // mutation only (rates still positive by construction)
  auto mut = testing::recombination_model(testing::random_measure(rng, space), testing::random_rates(rng, 1));
  mut.mutation = testing::random_mutation(rng, space);
  const auto mt = solve_combined(mut, times);
  for (auto g : subsets_of(space.all_links())) EXPECT_LT(t_decay_rate(mut, g, mt).max_residual, 1e-6);

  auto rec = testing::recombination_model(testing::random_measure(rng, space), testing::random_rates(rng, 1));
  const auto rt = solve_combined(rec, times);
  const auto report = t_decay_rate(rec, LinkSet(), rt);
  EXPECT_EQ(report.residuals.size(), times.size() - 2);
  EXPECT_LT(report.max_residual, 1e-6);
  // T_L is constant
  for (const auto& s : rt.states) {
    EXPECT_LT(max_abs_difference(t_operator(s, space.all_links()), t_operator(rec.initial, space.all_links())), 1e-12);
  }

  EXPECT_THROW(t_decay_rate(rec, LinkSet(), solve_combined(rec, std::vector<double>{0.0, 1.0})),
               std::invalid_argument);
}

TEST(EquilibriumTest, SymmetricFlipGivesUniform) {
  const TypeSpace space({2, 2});
  auto m = testing::recombination_model(Measure::point(space, Sites{0, 1}, 2.0), RecombinationRates({1.0}));
  const auto flip = SquareMatrix{{-1, 1}, {1, -1}};
  m.mutation = MutationModel(space, {validate_generator(flip, 0), validate_generator(flip, 1)});
  const auto eq = equilibrium(m);
  for (std::size_t x = 0; x < 4; ++x) EXPECT_NEAR(eq.measure[x], 0.5, 1e-12);
  EXPECT_TRUE(eq.irreducible);
  EXPECT_TRUE(eq.warnings.empty());
}

TEST(EquilibriumTest, MutationWithSelectionPerronVector) {
  const TypeSpace space({2});
  auto m = testing::recombination_model(Measure::uniform(space), RecombinationRates());
  m.mutation = MutationModel(space, {validate_generator(SquareMatrix{{-1, 1}, {1, -1}})});
  m.fitness = FitnessModel(space, {{0.0, 1.0}});
  const auto eq = equilibrium(m);
  double lambda = 0.0;
  const auto oracle = perron_oracle(SquareMatrix{{-1, 1}, {1, 0}}, &lambda);
  EXPECT_NEAR(lambda, (-1 + std::sqrt(5.0)) / 2, 1e-12);
  EXPECT_NEAR(eq.growth_rates[0], lambda, 1e-10);
  EXPECT_NEAR(eq.site_factors[0][0], oracle[0], 1e-10);
  EXPECT_NEAR(eq.site_factors[0][1], oracle[1], 1e-10);
  EXPECT_NEAR(oracle[0], 0.3819660112501051, 1e-12);
}

TEST(EquilibriumTest, RandomModelsAreStationaryAndReached) {
  testing::Rng rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    const auto space = testing::random_space(rng, 2, 3);
    auto model = testing::recombination_model(testing::random_measure(rng, space, 1.5),
                                              testing::random_rates(rng, space.n_links(), 0.5, 2.0));
    model.mutation = testing::random_mutation(rng, space, 0.5, 1.5);
    model.fitness = testing::random_fitness(rng, space);
    const auto eq = equilibrium(model);
    EXPECT_NEAR(eq.measure.mass(), 1.5, 1e-12);
    for (std::size_t i = 0; i < space.n_sites(); ++i) {
      double lambda = 0.0;
      const auto oracle = perron_oracle(model.site_operator(i), &lambda);
      for (std::size_t v = 0; v < oracle.size(); ++v) EXPECT_NEAR(eq.site_factors[i][v], oracle[v], 1e-9);
    }
    EXPECT_LT(full_rhs(model, eq.measure).variation_norm(), 1e-8);
    EXPECT_LT((CombinedSolver(model).at(50.0).as_signed() - eq.measure.as_signed()).variation_norm(), 1e-6);
  }
}

TEST(EquilibriumTest, WarnsForReducibleSites) {
  const TypeSpace space({2});
  auto m = testing::recombination_model(Measure::uniform(space), RecombinationRates());
  m.mutation = MutationModel(space, {validate_generator(SquareMatrix{{0, 1}, {0, -1}})});
  const auto eq = equilibrium(m);
  EXPECT_FALSE(eq.irreducible);
  EXPECT_FALSE(eq.warnings.empty());
}

TEST(DiscreteStepTest, Examples) {
  const TypeSpace space({2, 2});
  const Measure diag(space, {0.5, 0, 0, 0.5});
  EXPECT_EQ(discrete_interference_step(CrossoverProbabilities({0.0}), diag), diag);
  const auto next = discrete_interference_step(CrossoverProbabilities({0.5}), diag);
  EXPECT_NEAR(next[0], 0.375, 1e-15);
  const Sites both{0, 1};
  EXPECT_NEAR(linkage_disequilibria(next, both).at({1, 1}), 0.125, 1e-15);

  testing::Rng rng(10);
  const TypeSpace s3({2, 3, 2});
  const auto prod = testing::random_product_measure(rng, s3);
  EXPECT_LT(max_abs_difference(discrete_interference_step(CrossoverProbabilities({0.3, 0.4}), prod), prod), 1e-15);

  auto m = testing::recombination_model(diag, RecombinationRates({1.0}));
  EXPECT_THROW(discrete_interference_step(m, diag), std::invalid_argument);
  m.crossover = CrossoverProbabilities({0.5});
  EXPECT_NEAR(discrete_interference_step(m, diag)[0], 0.375, 1e-15);
}

TEST(DiscreteStepTest, PreservesMassAndApproximatesSmallContinuousSteps) {
  testing::Rng rng(11);
  const TypeSpace space({2, 3, 2});
  const auto w = testing::random_measure(rng, space, 2.0);
  const auto rates = testing::random_rates(rng, 2);
  const auto once = discrete_interference_step(CrossoverProbabilities({0.2, 0.3}), w);
  EXPECT_NEAR(once.mass(), 2.0, 1e-12);
  // one generation with probabilities ρ·dt is a forward-Euler step: error O(dt²)
  double err[2];
  int k = 0;
  for (double dt : {1e-2, 5e-3}) {
    const auto step = discrete_interference_step(CrossoverProbabilities({rates[0] * dt, rates[1] * dt}), w);
    err[k++] = max_abs_difference(step, solve_recombination(w, dt, rates));
  }
  EXPECT_NEAR(err[0] / err[1], 4.0, 0.5);
}

}  // namespace
}  // namespace ipl
