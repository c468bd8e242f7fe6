#pragma once

#include <cstddef>

#include "core/common.hpp"

namespace bdbm {

// Dense row-major matrix for the small problems here (couplings up to 2d x 2d,
// finite-state chains up to ~16 states).  Not a performance structure.
struct Mat {
  size_t rows = 0, cols = 0;
  vec a;

  Mat() = default;
  Mat(size_t r, size_t c, double fill = 0.0) : rows(r), cols(c), a(r * c, fill) {}

  double& operator()(size_t i, size_t j) { return a[i * cols + j]; }
  double operator()(size_t i, size_t j) const { return a[i * cols + j]; }

  static Mat identity(size_t n) {
    Mat m(n, n);
    for (size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
};

inline vec matvec(const Mat& m, const vec& x) {
  require(m.cols == x.size(), "matvec: dimension mismatch");
  vec y(m.rows, 0.0);
  for (size_t i = 0; i < m.rows; ++i) {
    double s = 0.0;
    for (size_t j = 0; j < m.cols; ++j) s += m(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

// y = x^T M (row vector through the matrix); used for chain marginals.
inline vec vecmat(const vec& x, const Mat& m) {
  require(m.rows == x.size(), "vecmat: dimension mismatch");
  vec y(m.cols, 0.0);
  for (size_t i = 0; i < m.rows; ++i) {
    double xi = x[i];
    if (xi == 0.0) continue;
    for (size_t j = 0; j < m.cols; ++j) y[j] += xi * m(i, j);
  }
  return y;
}

inline Mat matmul(const Mat& a, const Mat& b) {
  require(a.cols == b.rows, "matmul: dimension mismatch");
  Mat c(a.rows, b.cols);
  for (size_t i = 0; i < a.rows; ++i)
    for (size_t k = 0; k < a.cols; ++k) {
      double aik = a(i, k);
      if (aik == 0.0) continue;
      for (size_t j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

// Cholesky factor L (lower) with A = L L^T; throws if A is not SPD.
inline Mat cholesky(const Mat& a) {
  require(a.rows == a.cols, "cholesky: matrix not square");
  size_t n = a.rows;
  Mat l(n, n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j <= i; ++j) {
      double s = a(i, j);
      for (size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (!(s > 0.0)) throw DomainError(cat("cholesky: matrix not SPD at pivot ", i));
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return l;
}

// Solve A x = b via an existing Cholesky factor.
inline vec chol_solve(const Mat& l, const vec& b) {
  size_t n = l.rows;
  require(b.size() == n, "chol_solve: dimension mismatch");
  vec y(n);
  for (size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
    y[i] = s / l(i, i);
  }
  vec x(n);
  for (size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
    x[ii] = s / l(ii, ii);
  }
  return x;
}

}  // namespace bdbm
