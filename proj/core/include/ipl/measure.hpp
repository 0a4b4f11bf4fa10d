#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "ipl/matrix.hpp"
#include "ipl/type_space.hpp"

namespace ipl {

/// Finite signed measure on a finite product space, stored densely in flat-index order.
class SignedMeasure {
 public:
  SignedMeasure() = default;
  explicit SignedMeasure(TypeSpace space);
  SignedMeasure(TypeSpace space, std::vector<double> weights);

  const TypeSpace& space() const { return space_; }
  std::size_t size() const { return weights_.size(); }
  std::span<const double> weights() const { return weights_; }
  std::span<double> weights() { return weights_; }

  double operator[](std::size_t index) const { return weights_[index]; }
  double& operator[](std::size_t index) { return weights_[index]; }
  double at(std::span<const std::size_t> coords) const { return weights_[space_.flat_index(coords)]; }

  /// ω(X).
  double mass() const;
  /// |ω|(X).
  double variation_norm() const;
  double min_entry() const;

  SignedMeasure& operator+=(const SignedMeasure& other);
  SignedMeasure& operator-=(const SignedMeasure& other);
  SignedMeasure& operator*=(double s);
  /// this += s * other
  SignedMeasure& add_scaled(double s, const SignedMeasure& other);

  friend SignedMeasure operator+(SignedMeasure a, const SignedMeasure& b) { return a += b; }
  friend SignedMeasure operator-(SignedMeasure a, const SignedMeasure& b) { return a -= b; }
  friend SignedMeasure operator*(double s, SignedMeasure a) { return a *= s; }
  friend SignedMeasure operator*(SignedMeasure a, double s) { return a *= s; }

  friend bool operator==(const SignedMeasure&, const SignedMeasure&) = default;

 private:
  void check_compatible(const SignedMeasure& other) const;

  TypeSpace space_;
  std::vector<double> weights_;
};

/// Positive finite measure. Entries in [-kNegativeTolerance, 0) are clamped to
/// zero on construction; anything more negative is rejected.
class Measure {
 public:
  static constexpr double kNegativeTolerance = 1e-12;

  Measure() = default;
  explicit Measure(SignedMeasure weights, double tolerance = kNegativeTolerance);
  Measure(TypeSpace space, std::vector<double> weights, double tolerance = kNegativeTolerance);

  static Measure zero(TypeSpace space);
  static Measure uniform(TypeSpace space, double mass = 1.0);
  static Measure point(TypeSpace space, std::span<const std::size_t> coords, double mass = 1.0);

  const TypeSpace& space() const { return w_.space(); }
  std::size_t size() const { return w_.size(); }
  std::span<const double> weights() const { return w_.weights(); }
  double operator[](std::size_t index) const { return w_[index]; }
  double at(std::span<const std::size_t> coords) const { return w_.at(coords); }

  /// For positive measures ‖ω‖ = ω(X).
  double mass() const { return w_.mass(); }
  bool is_zero() const;

  const SignedMeasure& as_signed() const { return w_; }
  operator const SignedMeasure&() const { return w_; }  // NOLINT(google-explicit-constructor)

  /// Multiplication by a nonnegative scalar.
  Measure scaled(double s) const;

  friend bool operator==(const Measure&, const Measure&) = default;

 private:
  SignedMeasure w_;
};

/// Cylinder set ⟨j_1,...,j_k⟩: prescribed values at some sites, all others free.
/// The empty cylinder is the whole space.
class Cylinder {
 public:
  Cylinder() = default;
  explicit Cylinder(std::map<std::size_t, std::size_t> assignments)
      : assignments_(std::move(assignments)) {}

  const std::map<std::size_t, std::size_t>& assignments() const { return assignments_; }
  bool empty() const { return assignments_.empty(); }
  std::size_t size() const { return assignments_.size(); }
  std::vector<std::size_t> sites() const;

  void validate(const TypeSpace& space) const;
  bool matches(const TypeSpace& space, std::size_t flat_index) const;

  friend bool operator==(const Cylinder&, const Cylinder&) = default;

 private:
  std::map<std::size_t, std::size_t> assignments_;
};

/// Projection onto the given sites (kept in ascending order).
SignedMeasure marginal(const SignedMeasure& w, std::span<const std::size_t> sites);
/// Projection onto a contiguous block of sites.
SignedMeasure marginal(const SignedMeasure& w, SiteBlock block);

/// Tensor product of factors living on the consecutive blocks of `partition`.
SignedMeasure product(const TypeSpace& space, const OrderedPartition& partition,
                      std::span<const SignedMeasure> factors);
/// a ⊗ b with a's sites first.
SignedMeasure tensor_product(const SignedMeasure& a, const SignedMeasure& b);

double cylinder_value(const SignedMeasure& w, const Cylinder& c);

/// Applies `op` along the tensor axis of `site`: (op ⊗ 1 ⊗ ...) acting on the site's coordinate.
void apply_axis(SignedMeasure& w, std::size_t site, const SquareMatrix& op);

/// max_x |a(x) - b(x)|
double max_abs_difference(const SignedMeasure& a, const SignedMeasure& b);

}  // namespace ipl
