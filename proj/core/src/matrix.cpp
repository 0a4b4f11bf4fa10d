#include "ipl/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ipl {

SquareMatrix::SquareMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : n_(rows.size()) {
  a_.reserve(n_ * n_);
  for (const auto& row : rows) {
    if (row.size() != n_) throw std::invalid_argument("matrix rows must all have length n");
    a_.insert(a_.end(), row.begin(), row.end());
  }
}

SquareMatrix::SquareMatrix(std::size_t n, std::vector<double> row_major)
    : n_(n), a_(std::move(row_major)) {
  if (a_.size() != n_ * n_) throw std::invalid_argument("matrix data must have n*n entries");
}

SquareMatrix SquareMatrix::identity(std::size_t n) {
  SquareMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

SquareMatrix SquareMatrix::diagonal(std::span<const double> diag) {
  SquareMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

double SquareMatrix::column_sum(std::size_t col) const {
  double s = 0.0;
  for (std::size_t r = 0; r < n_; ++r) s += (*this)(r, col);
  return s;
}

double SquareMatrix::norm1() const {
  double best = 0.0;
  for (std::size_t c = 0; c < n_; ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < n_; ++r) s += std::abs((*this)(r, c));
    best = std::max(best, s);
  }
  return best;
}

SquareMatrix& SquareMatrix::operator+=(const SquareMatrix& other) {
  if (other.n_ != n_) throw std::invalid_argument("matrix size mismatch");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += other.a_[i];
  return *this;
}

SquareMatrix& SquareMatrix::operator-=(const SquareMatrix& other) {
  if (other.n_ != n_) throw std::invalid_argument("matrix size mismatch");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= other.a_[i];
  return *this;
}

SquareMatrix& SquareMatrix::operator*=(double s) {
  for (auto& x : a_) x *= s;
  return *this;
}

SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b) {
  if (a.n_ != b.n_) throw std::invalid_argument("matrix size mismatch");
  const std::size_t n = a.n_;
  SquareMatrix c(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

std::vector<double> SquareMatrix::apply(std::span<const double> v) const {
  if (v.size() != n_) throw std::invalid_argument("vector length does not match matrix size");
  std::vector<double> out(n_, 0.0);
  for (std::size_t r = 0; r < n_; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < n_; ++c) s += (*this)(r, c) * v[c];
    out[r] = s;
  }
  return out;
}

SquareMatrix matrix_exp(const SquareMatrix& a) {
  const std::size_t n = a.size();
  const double norm = a.norm1();
  if (!std::isfinite(norm)) throw std::invalid_argument("matrix_exp of a non-finite matrix");

  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const SquareMatrix scaled = a * std::ldexp(1.0, -squarings);

  SquareMatrix result = SquareMatrix::identity(n);
  SquareMatrix term = SquareMatrix::identity(n);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int k = 1; k < 64; ++k) {
    term = term * scaled;
    term *= 1.0 / k;
    result += term;
    if (term.norm1() <= eps * result.norm1()) break;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

bool off_diagonal_irreducible(const SquareMatrix& a) {
  const std::size_t n = a.size();
  if (n <= 1) return true;
  auto reaches_all = [&](bool forward) {
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
      const auto from = stack.back();
      stack.pop_back();
      for (std::size_t to = 0; to < n; ++to) {
        if (to == from || seen[to]) continue;
        // edge from -> to exists when the rate into `to` from `from` is positive
        const double rate = forward ? a(to, from) : a(from, to);
        if (rate > 0.0) {
          seen[to] = true;
          ++count;
          stack.push_back(to);
        }
      }
    }
    return count == n;
  };
  return reaches_all(true) && reaches_all(false);
}

}  // namespace ipl
