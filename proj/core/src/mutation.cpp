#include "ipl/mutation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ipl/errors.hpp"

namespace ipl {

SiteGenerator validate_generator(SquareMatrix matrix, std::size_t site, double scale) {
  const std::size_t m = matrix.size();
  if (m == 0) throw ValidationError("generator for site " + std::to_string(site) + " is empty");
  if (!(scale >= 0.0) || !std::isfinite(scale)) {
    throw ValidationError("mutation scale for site " + std::to_string(site) +
                          " must be finite and nonnegative");
  }
  for (std::size_t col = 0; col < m; ++col) {
    for (std::size_t row = 0; row < m; ++row) {
      double& q = matrix(row, col);
      if (!std::isfinite(q)) {
        throw ValidationError("generator for site " + std::to_string(site) +
                              " has a non-finite entry in column " + std::to_string(col));
      }
      if (row == col || q >= 0.0) continue;
      if (q < -SiteGenerator::kNegativeTolerance) {
        throw ValidationError("generator for site " + std::to_string(site) + ": column " +
                              std::to_string(col) + " has negative off-diagonal rate " +
                              std::to_string(q) + " in row " + std::to_string(row));
      }
      q = 0.0;
    }
    const double sum = matrix.column_sum(col);
    if (std::abs(sum) > SiteGenerator::kColumnSumTolerance) {
      throw ValidationError("generator for site " + std::to_string(site) + ": column " +
                            std::to_string(col) + " sums to " + std::to_string(sum) +
                            " instead of 0");
    }
    double off = 0.0;
    for (std::size_t row = 0; row < m; ++row) {
      if (row != col) off += matrix(row, col);
    }
    matrix(col, col) = -off;
  }

  SiteGenerator g;
  g.site_ = site;
  g.irreducible_ = off_diagonal_irreducible(matrix);
  g.q_ = std::move(matrix);
  g.scale_ = scale;
  return g;
}

SquareMatrix site_semigroup(const SiteGenerator& g, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("time must be nonnegative, got " + std::to_string(t));
  auto p = matrix_exp(g.scaled() * t);
  for (std::size_t r = 0; r < p.size(); ++r) {
    for (std::size_t c = 0; c < p.size(); ++c) {
      if (p(r, c) < 0.0 && p(r, c) >= -1e-12) p(r, c) = 0.0;
    }
  }
  return p;
}

MutationModel::MutationModel(const TypeSpace& space, std::vector<SiteGenerator> generators)
    : generators_(std::move(generators)) {
  if (generators_.size() != space.n_sites()) {
    throw ValidationError("mutation model needs one generator per site (" +
                          std::to_string(space.n_sites()) + "), got " +
                          std::to_string(generators_.size()));
  }
  for (std::size_t i = 0; i < generators_.size(); ++i) {
    if (generators_[i].matrix().size() != space.cardinality(i)) {
      throw ValidationError("generator for site " + std::to_string(i) + " has dimension " +
                            std::to_string(generators_[i].matrix().size()) + ", expected " +
                            std::to_string(space.cardinality(i)));
    }
    if (generators_[i].site() != i) {
      throw ValidationError("generator " + std::to_string(i) + " is labelled for site " +
                            std::to_string(generators_[i].site()));
    }
  }
}

MutationModel MutationModel::none(const TypeSpace& space) {
  std::vector<SiteGenerator> gens;
  for (std::size_t i = 0; i < space.n_sites(); ++i) {
    gens.push_back(validate_generator(SquareMatrix(space.cardinality(i)), i, 1.0));
  }
  return MutationModel(space, std::move(gens));
}

SignedMeasure apply_semigroup(const MutationModel& model, double t, const SignedMeasure& w) {
  if (!(t >= 0.0)) throw std::invalid_argument("time must be nonnegative, got " + std::to_string(t));
  SignedMeasure out = w;
  if (t == 0.0) return out;
  for (const auto& g : model.generators()) {
    if (g.scale() == 0.0 || g.matrix().norm1() == 0.0) continue;
    apply_axis(out, g.site(), site_semigroup(g, t));
  }
  return out;
}

Measure apply_semigroup(const MutationModel& model, double t, const Measure& w) {
  return Measure(apply_semigroup(model, t, w.as_signed()));
}

SignedMeasure mutation_rhs(const MutationModel& model, const SignedMeasure& w) {
  SignedMeasure out(w.space());
  for (const auto& g : model.generators()) {
    if (g.scale() == 0.0 || g.matrix().norm1() == 0.0) continue;
    SignedMeasure term = w;
    apply_axis(term, g.site(), g.scaled());
    out += term;
  }
  return out;
}

}  // namespace ipl
