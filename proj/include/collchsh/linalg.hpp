#pragma once

// Small dense linear algebra used throughout the library. Matrices are
// row-major. Two-qubit composite rows/columns use index 2m+n with the first
// party's bit most significant.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace collchsh {

using cplx = std::complex<double>;

struct Matrix2c {
  std::array<cplx, 4> e{};

  cplx& operator()(int r, int c) { return e[2 * r + c]; }
  const cplx& operator()(int r, int c) const { return e[2 * r + c]; }
};

struct Matrix4c {
  std::array<cplx, 16> e{};

  cplx& operator()(int r, int c) { return e[4 * r + c]; }
  const cplx& operator()(int r, int c) const { return e[4 * r + c]; }
};

using Vec3 = std::array<double, 3>;

struct Mat3 {
  std::array<double, 9> e{};

  double& operator()(int r, int c) { return e[3 * r + c]; }
  const double& operator()(int r, int c) const { return e[3 * r + c]; }
};

// Pauli matrices, axis 0 = x, 1 = y, 2 = z.
inline Matrix2c pauli(int axis) {
  Matrix2c s;
  switch (axis) {
    case 0:
      s(0, 1) = 1.0;
      s(1, 0) = 1.0;
      break;
    case 1:
      s(0, 1) = cplx(0.0, -1.0);
      s(1, 0) = cplx(0.0, 1.0);
      break;
    case 2:
      s(0, 0) = 1.0;
      s(1, 1) = -1.0;
      break;
    default:
      throw std::invalid_argument("pauli: axis must be 0, 1 or 2");
  }
  return s;
}

inline Matrix4c kron(const Matrix2c& a, const Matrix2c& b) {
  Matrix4c out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) out(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
  return out;
}

inline cplx trace(const Matrix4c& m) { return m(0, 0) + m(1, 1) + m(2, 2) + m(3, 3); }

inline double hermiticity_defect(const Matrix4c& m) {
  double worst = 0.0;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) worst = std::max(worst, std::abs(m(r, c) - std::conj(m(c, r))));
  return worst;
}

inline double max_abs_imag(const Matrix4c& m) {
  double worst = 0.0;
  for (const cplx& v : m.e) worst = std::max(worst, std::abs(v.imag()));
  return worst;
}

inline double max_abs_entry_diff(const Matrix4c& a, const Matrix4c& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.e.size(); ++i) worst = std::max(worst, std::abs(a.e[i] - b.e[i]));
  return worst;
}

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline Vec3 mul(const Mat3& m, const Vec3& v) {
  return {m(0, 0) * v[0] + m(0, 1) * v[1] + m(0, 2) * v[2],
          m(1, 0) * v[0] + m(1, 1) * v[1] + m(1, 2) * v[2],
          m(2, 0) * v[0] + m(2, 1) * v[1] + m(2, 2) * v[2]};
}

inline Mat3 transpose_times_self(const Mat3& t) {
  Mat3 g;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += t(k, i) * t(k, j);
      g(i, j) = s;
    }
  return g;
}

namespace detail {

// One Jacobi rotation zeroing a(p,q) of a symmetric matrix stored row-major.
inline void jacobi_rotate(double* a, int dim, int p, int q) {
  const double apq = a[p * dim + q];
  if (apq == 0.0) return;
  const double app = a[p * dim + p];
  const double aqq = a[q * dim + q];
  const double theta = (aqq - app) / (2.0 * apq);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  for (int k = 0; k < dim; ++k) {
    const double akp = a[k * dim + p];
    const double akq = a[k * dim + q];
    a[k * dim + p] = c * akp - s * akq;
    a[k * dim + q] = s * akp + c * akq;
  }
  for (int k = 0; k < dim; ++k) {
    const double apk = a[p * dim + k];
    const double aqk = a[q * dim + k];
    a[p * dim + k] = c * apk - s * aqk;
    a[q * dim + k] = s * apk + c * aqk;
  }
}

inline double off_diagonal_norm(const double* a, int dim) {
  double s = 0.0;
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c)
      if (r != c) s += a[r * dim + c] * a[r * dim + c];
  return std::sqrt(s);
}

}  // namespace detail

// Eigenvalues of a small symmetric matrix by cyclic Jacobi sweeps, descending
// order. Converges to off-diagonal norm 1e-14 relative to the matrix scale.
inline std::vector<double> symmetric_eigenvalues(std::vector<double> a, int dim) {
  if (dim < 1 || static_cast<std::size_t>(dim) * dim != a.size())
    throw std::invalid_argument("symmetric_eigenvalues: bad dimension");
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  const double tol = 1e-14 * std::max(1.0, scale);
  for (int sweep = 0; sweep < 100; ++sweep) {
    if (detail::off_diagonal_norm(a.data(), dim) <= tol) break;
    for (int p = 0; p < dim - 1; ++p)
      for (int q = p + 1; q < dim; ++q) detail::jacobi_rotate(a.data(), dim, p, q);
  }
  std::vector<double> eig(dim);
  for (int i = 0; i < dim; ++i) eig[i] = a[i * dim + i];
  std::sort(eig.begin(), eig.end(), std::greater<>());
  return eig;
}

// Fixed-size variant for the 3x3 Gram matrices on the hot path.
inline std::array<double, 3> symmetric_eigenvalues_3x3(Mat3 m) {
  double scale = 0.0;
  for (double v : m.e) scale = std::max(scale, std::abs(v));
  const double tol = 1e-14 * std::max(1.0, scale);
  for (int sweep = 0; sweep < 30; ++sweep) {
    const double off = std::sqrt(m(0, 1) * m(0, 1) + m(0, 2) * m(0, 2) + m(1, 2) * m(1, 2));
    if (off <= tol) break;
    detail::jacobi_rotate(m.e.data(), 3, 0, 1);
    detail::jacobi_rotate(m.e.data(), 3, 0, 2);
    detail::jacobi_rotate(m.e.data(), 3, 1, 2);
  }
  std::array<double, 3> eig{m(0, 0), m(1, 1), m(2, 2)};
  std::sort(eig.begin(), eig.end(), std::greater<>());
  return eig;
}

// Smallest eigenvalue of an n x n Hermitian matrix (row-major, contiguous)
// via the real symmetric embedding [[Re, -Im], [Im, Re]], whose spectrum is
// the Hermitian spectrum doubled.
inline double hermitian_min_eigenvalue(const cplx* a, int dim) {
  const int d2 = 2 * dim;
  std::vector<double> m(static_cast<std::size_t>(d2) * d2);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) {
      const cplx v = a[r * dim + c];
      m[r * d2 + c] = v.real();
      m[r * d2 + (c + dim)] = -v.imag();
      m[(r + dim) * d2 + c] = v.imag();
      m[(r + dim) * d2 + (c + dim)] = v.real();
    }
  const std::vector<double> eig = symmetric_eigenvalues(std::move(m), d2);
  return eig.back();
}

}  // namespace collchsh
