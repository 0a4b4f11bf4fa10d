#include "ipl/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ipl {

SignedMeasure::SignedMeasure(TypeSpace space)
    : space_(std::move(space)), weights_(space_.total_size(), 0.0) {}

SignedMeasure::SignedMeasure(TypeSpace space, std::vector<double> weights)
    : space_(std::move(space)), weights_(std::move(weights)) {
  if (weights_.size() != space_.total_size()) {
    throw std::invalid_argument("measure has " + std::to_string(weights_.size()) +
                                " weights but the space has " +
                                std::to_string(space_.total_size()) + " states");
  }
}

double SignedMeasure::mass() const { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }

double SignedMeasure::variation_norm() const {
  double s = 0.0;
  for (double w : weights_) s += std::abs(w);
  return s;
}

double SignedMeasure::min_entry() const {
  return weights_.empty() ? 0.0 : *std::min_element(weights_.begin(), weights_.end());
}

void SignedMeasure::check_compatible(const SignedMeasure& other) const {
  if (!(space_ == other.space_)) throw std::invalid_argument("measures live on different spaces");
}

SignedMeasure& SignedMeasure::operator+=(const SignedMeasure& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < weights_.size(); ++i) weights_[i] += other.weights_[i];
  return *this;
}

SignedMeasure& SignedMeasure::operator-=(const SignedMeasure& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < weights_.size(); ++i) weights_[i] -= other.weights_[i];
  return *this;
}

SignedMeasure& SignedMeasure::operator*=(double s) {
  for (auto& w : weights_) w *= s;
  return *this;
}

SignedMeasure& SignedMeasure::add_scaled(double s, const SignedMeasure& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < weights_.size(); ++i) weights_[i] += s * other.weights_[i];
  return *this;
}

Measure::Measure(SignedMeasure weights, double tolerance) : w_(std::move(weights)) {
  for (std::size_t i = 0; i < w_.size(); ++i) {
    double& x = w_[i];
    if (!std::isfinite(x)) {
      throw std::invalid_argument("measure weight at index " + std::to_string(i) + " is not finite");
    }
    if (x < 0.0) {
      if (x < -tolerance) {
        throw std::invalid_argument("measure weight " + std::to_string(x) + " at index " +
                                    std::to_string(i) + " is negative");
      }
      x = 0.0;
    }
  }
}

Measure::Measure(TypeSpace space, std::vector<double> weights, double tolerance)
    : Measure(SignedMeasure(std::move(space), std::move(weights)), tolerance) {}

Measure Measure::zero(TypeSpace space) { return Measure(SignedMeasure(std::move(space))); }

Measure Measure::uniform(TypeSpace space, double mass) {
  const auto n = space.total_size();
  return Measure(std::move(space), std::vector<double>(n, mass / static_cast<double>(n)));
}

Measure Measure::point(TypeSpace space, std::span<const std::size_t> coords, double mass) {
  SignedMeasure w(std::move(space));
  w[w.space().flat_index(coords)] = mass;
  return Measure(std::move(w));
}

bool Measure::is_zero() const {
  return std::all_of(w_.weights().begin(), w_.weights().end(), [](double x) { return x == 0.0; });
}

Measure Measure::scaled(double s) const {
  if (s < 0.0) throw std::invalid_argument("positive measures can only be scaled by s >= 0");
  return Measure(w_ * s);
}

std::vector<std::size_t> Cylinder::sites() const {
  std::vector<std::size_t> out;
  out.reserve(assignments_.size());
  for (const auto& [site, value] : assignments_) out.push_back(site);
  return out;
}

void Cylinder::validate(const TypeSpace& space) const {
  for (const auto& [site, value] : assignments_) {
    if (site >= space.n_sites()) {
      throw std::out_of_range("cylinder site " + std::to_string(site) + " out of range");
    }
    if (value >= space.cardinality(site)) {
      throw std::out_of_range("cylinder value " + std::to_string(value) + " at site " +
                              std::to_string(site) + " out of range");
    }
  }
}

bool Cylinder::matches(const TypeSpace& space, std::size_t flat_index) const {
  for (const auto& [site, value] : assignments_) {
    if (space.digit(flat_index, site) != value) return false;
  }
  return true;
}

SignedMeasure marginal(const SignedMeasure& w, std::span<const std::size_t> sites) {
  if (sites.empty()) throw std::invalid_argument("marginal needs a nonempty site set");
  std::vector<std::size_t> sorted(sites.begin(), sites.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("marginal site set has duplicates");
  }
  const auto& space = w.space();
  SignedMeasure out(space.subspace(sorted));
  const auto& sub = out.space();
  for (std::size_t x = 0; x < w.size(); ++x) {
    std::size_t y = 0;
    for (std::size_t k = 0; k < sorted.size(); ++k) y += space.digit(x, sorted[k]) * sub.stride(k);
    out[y] += w[x];
  }
  return out;
}

SignedMeasure marginal(const SignedMeasure& w, SiteBlock block) {
  const auto& space = w.space();
  SignedMeasure out(space.subspace(block));
  // view the flat array as (prefix, block, suffix)
  const std::size_t inner = space.stride(block.last - 1);
  const std::size_t block_size = out.size();
  const std::size_t outer = w.size() / (inner * block_size);
  for (std::size_t p = 0; p < outer; ++p) {
    for (std::size_t b = 0; b < block_size; ++b) {
      const std::size_t base = (p * block_size + b) * inner;
      double s = 0.0;
      for (std::size_t q = 0; q < inner; ++q) s += w[base + q];
      out[b] += s;
    }
  }
  return out;
}

SignedMeasure product(const TypeSpace& space, const OrderedPartition& partition,
                      std::span<const SignedMeasure> factors) {
  if (partition.n_sites() != space.n_sites() || factors.size() != partition.size()) {
    throw std::invalid_argument("product factors do not match the partition of the space");
  }
  for (std::size_t b = 0; b < factors.size(); ++b) {
    if (!(factors[b].space() == space.subspace(partition.blocks()[b]))) {
      throw std::invalid_argument("product factor " + std::to_string(b) +
                                  " does not live on its block");
    }
  }
  // Contiguous blocks with site 0 most significant: the flat index is the
  // concatenation of the block indices, so this is a Kronecker product.
  std::vector<double> acc(factors.front().weights().begin(), factors.front().weights().end());
  for (std::size_t b = 1; b < factors.size(); ++b) {
    const auto f = factors[b].weights();
    std::vector<double> next(acc.size() * f.size());
    for (std::size_t i = 0; i < acc.size(); ++i) {
      for (std::size_t j = 0; j < f.size(); ++j) next[i * f.size() + j] = acc[i] * f[j];
    }
    acc = std::move(next);
  }
  return SignedMeasure(space, std::move(acc));
}

SignedMeasure tensor_product(const SignedMeasure& a, const SignedMeasure& b) {
  std::vector<std::size_t> cards = a.space().cardinalities();
  cards.insert(cards.end(), b.space().cardinalities().begin(), b.space().cardinalities().end());
  TypeSpace space(std::move(cards));
  const std::size_t na = a.space().n_sites();
  OrderedPartition partition({{0, na}, {na, space.n_sites()}});
  const SignedMeasure factors[] = {a, b};
  return product(space, partition, factors);
}

double cylinder_value(const SignedMeasure& w, const Cylinder& c) {
  c.validate(w.space());
  if (c.empty()) return w.mass();
  double s = 0.0;
  for (std::size_t x = 0; x < w.size(); ++x) {
    if (c.matches(w.space(), x)) s += w[x];
  }
  return s;
}

void apply_axis(SignedMeasure& w, std::size_t site, const SquareMatrix& op) {
  const auto& space = w.space();
  const std::size_t m = space.cardinality(site);
  if (op.size() != m) throw std::invalid_argument("site operator has the wrong dimension");
  const std::size_t inner = space.stride(site);
  const std::size_t outer = w.size() / (inner * m);
  std::vector<double> column(m);
  for (std::size_t p = 0; p < outer; ++p) {
    for (std::size_t q = 0; q < inner; ++q) {
      const std::size_t base = p * m * inner + q;
      for (std::size_t l = 0; l < m; ++l) column[l] = w[base + l * inner];
      for (std::size_t k = 0; k < m; ++k) {
        double s = 0.0;
        for (std::size_t l = 0; l < m; ++l) s += op(k, l) * column[l];
        w[base + k * inner] = s;
      }
    }
  }
}

double max_abs_difference(const SignedMeasure& a, const SignedMeasure& b) {
  if (!(a.space() == b.space())) throw std::invalid_argument("measures live on different spaces");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace ipl
