#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace ipl {

/// Small dense square matrix, row-major. Sized for per-site operators (a handful of states).
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), a_(n * n, fill) {}
  SquareMatrix(std::initializer_list<std::initializer_list<double>> rows);
  SquareMatrix(std::size_t n, std::vector<double> row_major);

  static SquareMatrix identity(std::size_t n);
  static SquareMatrix diagonal(std::span<const double> diag);

  std::size_t size() const { return n_; }
  double& operator()(std::size_t row, std::size_t col) { return a_[row * n_ + col]; }
  double operator()(std::size_t row, std::size_t col) const { return a_[row * n_ + col]; }
  std::span<const double> data() const { return a_; }

  double column_sum(std::size_t col) const;
  /// Maximum absolute column sum.
  double norm1() const;

  SquareMatrix& operator+=(const SquareMatrix& other);
  SquareMatrix& operator-=(const SquareMatrix& other);
  SquareMatrix& operator*=(double s);
  friend SquareMatrix operator+(SquareMatrix a, const SquareMatrix& b) { return a += b; }
  friend SquareMatrix operator-(SquareMatrix a, const SquareMatrix& b) { return a -= b; }
  friend SquareMatrix operator*(SquareMatrix a, double s) { return a *= s; }
  friend SquareMatrix operator*(double s, SquareMatrix a) { return a *= s; }
  friend SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b);

  std::vector<double> apply(std::span<const double> v) const;

  friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

/// exp(A) by scaling and squaring: A is scaled by 2^-s so that its 1-norm is
/// at most 0.5, the Taylor series is summed until terms drop below machine
/// precision, and the result is squared s times.
SquareMatrix matrix_exp(const SquareMatrix& a);

/// Directed graph on states with an edge l -> k whenever a(k, l) > 0 (k != l)
/// is strongly connected.
bool off_diagonal_irreducible(const SquareMatrix& a);

}  // namespace ipl
