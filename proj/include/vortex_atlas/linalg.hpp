/**
 * @file linalg.hpp
 * @brief Small fixed-capacity dense matrices (up to 4x4): Jacobi SVD,
 * symmetric eigen decomposition and pivoted solves.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <vector>

#include "vortex_atlas/errors.hpp"

namespace vortex_atlas::linalg {

struct Mat {
  int rows = 0;
  int cols = 0;
  std::array<double, 16> a{};

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c) {
    if (r < 0 || c < 0 || r > 4 || c > 4) throw ShapeError("linalg matrix larger than 4x4");
  }
  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(int i, int j) { return a[i * 4 + j]; }
  double operator()(int i, int j) const { return a[i * 4 + j]; }

  Mat transpose() const {
    Mat t(cols, rows);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
    return t;
  }
};

using Vec = std::vector<double>;

inline Mat operator*(const Mat& x, const Mat& y) {
  if (x.cols != y.rows) throw ShapeError("matrix product shape mismatch");
  Mat out(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < y.cols; ++j) {
      double s = 0.0;
      for (int k = 0; k < x.cols; ++k) s += x(i, k) * y(k, j);
      out(i, j) = s;
    }
  return out;
}

inline Vec operator*(const Mat& m, const Vec& v) {
  Vec out(m.rows, 0.0);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) out[i] += m(i, j) * v[j];
  return out;
}

inline double dot(const Vec& a, const Vec& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}
inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Mat column_matrix(const Vec& v) {
  Mat m(static_cast<int>(v.size()), 1);
  for (int i = 0; i < m.rows; ++i) m(i, 0) = v[i];
  return m;
}

inline Vec column(const Mat& m, int j) {
  Vec v(m.rows);
  for (int i = 0; i < m.rows; ++i) v[i] = m(i, j);
  return v;
}

struct Svd {
  Vec singular;  ///< descending, length cols
  Mat u;         ///< rows x cols, columns are left vectors (zero where singular == 0)
  Mat v;         ///< cols x cols, orthogonal
};

/// One-sided Jacobi SVD. Accurate small singular values, which the rank
/// tests depend on.
inline Svd svd(const Mat& m) {
  Mat w = m;
  Mat v = Mat::identity(m.cols);
  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < m.cols; ++p) {
      for (int q = p + 1; q < m.cols; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (int i = 0; i < m.rows; ++i) {
          alpha += w(i, p) * w(i, p);
          beta += w(i, q) * w(i, q);
          gamma += w(i, p) * w(i, q);
        }
        if (gamma == 0.0) continue;
        off = std::max(off, std::abs(gamma) / std::sqrt(alpha * beta));
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t), s = c * t;
        for (int i = 0; i < m.rows; ++i) {
          const double a = w(i, p), b = w(i, q);
          w(i, p) = c * a - s * b;
          w(i, q) = s * a + c * b;
        }
        for (int i = 0; i < m.cols; ++i) {
          const double a = v(i, p), b = v(i, q);
          v(i, p) = c * a - s * b;
          v(i, q) = s * a + c * b;
        }
      }
    }
    if (off < 1e-15) break;
  }
  std::vector<int> idx(m.cols);
  std::iota(idx.begin(), idx.end(), 0);
  Vec norms(m.cols);
  for (int j = 0; j < m.cols; ++j) norms[j] = norm(column(w, j));
  std::stable_sort(idx.begin(), idx.end(), [&](int x, int y) { return norms[x] > norms[y]; });
  Svd out{Vec(m.cols), Mat(m.rows, m.cols), Mat(m.cols, m.cols)};
  for (int k = 0; k < m.cols; ++k) {
    const int j = idx[k];
    out.singular[k] = norms[j];
    for (int i = 0; i < m.cols; ++i) out.v(i, k) = v(i, j);
    if (norms[j] > 0.0)
      for (int i = 0; i < m.rows; ++i) out.u(i, k) = w(i, j) / norms[j];
  }
  return out;
}

struct SymEigen {
  Vec values;  ///< ascending
  Mat vectors; ///< columns
};

/// Cyclic Jacobi for symmetric matrices.
inline SymEigen sym_eigen(const Mat& sym) {
  const int n = sym.rows;
  if (sym.cols != n) throw ShapeError("sym_eigen needs a square matrix");
  Mat a = sym;
  Mat v = Mat::identity(n);
  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0.0, scale = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) (i == j ? scale : off) += a(i, j) * a(i, j);
    if (off <= 1e-30 * std::max(scale, 1e-300)) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t =
            std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int x, int y) { return a(x, x) < a(y, y); });
  SymEigen out{Vec(n), Mat(n, n)};
  for (int k = 0; k < n; ++k) {
    out.values[k] = a(idx[k], idx[k]);
    for (int i = 0; i < n; ++i) out.vectors(i, k) = v(i, idx[k]);
  }
  return out;
}

/// Gaussian elimination with partial pivoting. Throws NearSingularMatrix
/// when a pivot falls below rel_tol times the largest entry.
inline Vec solve(Mat m, Vec b, double rel_tol = 1e-13) {
  const int n = m.rows;
  if (m.cols != n || static_cast<int>(b.size()) != n) throw ShapeError("solve shape mismatch");
  double scale = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(m(i, j)));
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
    if (!(std::abs(m(piv, col)) > rel_tol * scale)) throw NearSingularMatrix("singular linear system");
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(m(piv, j), m(col, j));
      std::swap(b[piv], b[col]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double f = m(r, col) / m(col, col);
      for (int j = col; j < n; ++j) m(r, j) -= f * m(col, j);
      b[r] -= f * b[col];
    }
  }
  Vec x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= m(i, j) * x[j];
    x[i] = s / m(i, i);
  }
  return x;
}

inline double det(const Mat& m) {
  if (m.rows != m.cols) throw ShapeError("determinant of a non-square matrix");
  switch (m.rows) {
    case 1: return m(0, 0);
    case 2: return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    case 3:
      return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
             m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
             m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    default: {
      double d = 0.0;
      for (int j = 0; j < m.cols; ++j) {
        Mat minor(m.rows - 1, m.cols - 1);
        for (int i = 1; i < m.rows; ++i)
          for (int k = 0, c = 0; k < m.cols; ++k)
            if (k != j) minor(i - 1, c++) = m(i, k);
        d += (j % 2 ? -1.0 : 1.0) * m(0, j) * det(minor);
      }
      return d;
    }
  }
}

}  // namespace vortex_atlas::linalg
