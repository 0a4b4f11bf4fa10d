#pragma once

#include <cstddef>
#include <vector>

#include "ipl/matrix.hpp"
#include "ipl/measure.hpp"

namespace ipl {

/// Markov generator of one site: q(k, l) is the rate l -> k, columns sum to zero.
/// The effective generator is scale * q.
class SiteGenerator {
 public:
  static constexpr double kNegativeTolerance = 1e-12;
  static constexpr double kColumnSumTolerance = 1e-10;

  SiteGenerator() = default;

  std::size_t site() const { return site_; }
  const SquareMatrix& matrix() const { return q_; }
  double scale() const { return scale_; }
  bool irreducible() const { return irreducible_; }
  /// scale * q
  SquareMatrix scaled() const { return q_ * scale_; }

  friend bool operator==(const SiteGenerator&, const SiteGenerator&) = default;

 private:
  friend SiteGenerator validate_generator(SquareMatrix matrix, std::size_t site, double scale);

  std::size_t site_ = 0;
  SquareMatrix q_;
  double scale_ = 1.0;
  bool irreducible_ = false;
};

/// Checks the generator conditions (nonnegative off-diagonals, vanishing column
/// sums). Off-diagonals down to -1e-12 are clamped to zero and the diagonal is
/// rebalanced so that every column sums to exactly zero.
SiteGenerator validate_generator(SquareMatrix matrix, std::size_t site = 0, double scale = 1.0);

/// exp(t · scale · q); columns sum to one.
SquareMatrix site_semigroup(const SiteGenerator& g, double t);

/// One generator per site; Q = Σ_i μ_i Q_i with Q_i acting on site i only.
class MutationModel {
 public:
  MutationModel() = default;
  MutationModel(const TypeSpace& space, std::vector<SiteGenerator> generators);

  /// No mutation anywhere.
  static MutationModel none(const TypeSpace& space);

  std::size_t n_sites() const { return generators_.size(); }
  const SiteGenerator& generator(std::size_t site) const { return generators_.at(site); }
  const std::vector<SiteGenerator>& generators() const { return generators_; }

  friend bool operator==(const MutationModel&, const MutationModel&) = default;

 private:
  std::vector<SiteGenerator> generators_;
};

/// exp(tQ) ω, applied site by site.
SignedMeasure apply_semigroup(const MutationModel& model, double t, const SignedMeasure& w);
Measure apply_semigroup(const MutationModel& model, double t, const Measure& w);

/// Q ω = Σ_i μ_i Q_i ω.
SignedMeasure mutation_rhs(const MutationModel& model, const SignedMeasure& w);

}  // namespace ipl
