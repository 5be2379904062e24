#pragma once

// Correlation matrix T_pq = Tr[(sigma_p x sigma_q) rho], the maximal CHSH
// value 2*sqrt(M) where M is the sum of the two largest eigenvalues of T^T T,
// explicit CHSH values for given measurement directions, and the XOR closed
// form. Bounds quantify only over unit spin directions, so the trivial
// unit-operator loophole is excluded structurally.

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "collchsh/linalg.hpp"
#include "collchsh/states.hpp"

namespace collchsh {

inline constexpr double kTsirelson = 2.8284271247461903;  // 2*sqrt(2)

struct CorrelationMatrix {
  Mat3 t;

  explicit CorrelationMatrix(const Mat3& m) : t(m) {
    for (double v : t.e)
      if (!(std::abs(v) <= 1.0 + 1e-10)) {
        std::ostringstream msg;
        msg << "CorrelationMatrix: entry " << v << " outside [-1, 1]";
        throw std::invalid_argument(msg.str());
      }
  }
};

struct BellBound {
  double m_value;
  double bound;

  BellBound(double m, double b) : m_value(m), bound(b) {
    if (!(m >= 0.0) || !(b <= kTsirelson + 1e-9)) {
      std::ostringstream msg;
      msg << "BellBound: value " << b << " outside [0, 2*sqrt(2)]";
      throw std::domain_error(msg.str());
    }
  }
};

namespace detail {

inline const std::array<Matrix4c, 9>& pauli_kron_table() {
  static const std::array<Matrix4c, 9> table = [] {
    std::array<Matrix4c, 9> t;
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q) t[3 * p + q] = kron(pauli(p), pauli(q));
    return t;
  }();
  return table;
}

// General trace formula on raw entries; returns T and the worst imaginary
// residue across the nine traces.
inline double correlation_from_entries(const Matrix4c& rho, Mat3& t) {
  const std::array<Matrix4c, 9>& ops = pauli_kron_table();
  double residue = 0.0;
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) {
      const Matrix4c& op = ops[3 * p + q];
      cplx s = 0.0;
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) s += op(r, c) * rho(c, r);
      residue = std::max(residue, std::abs(s.imag()));
      t(p, q) = s.real();
    }
  return residue;
}

// Sum of the two largest eigenvalues of T^T T, clamped at zero.
inline double m_from_correlation(const Mat3& t) {
  const std::array<double, 3> eig = symmetric_eigenvalues_3x3(transpose_times_self(t));
  return std::max(eig[0] + eig[1], 0.0);
}

}  // namespace detail

inline CorrelationMatrix correlation_matrix(const TwoQubitDensity& rho) {
  Mat3 t;
  const double residue = detail::correlation_from_entries(rho.entries(), t);
  if (residue > 1e-9) {
    std::ostringstream msg;
    msg << "correlation_matrix: imaginary residue " << residue << " exceeds 1e-9";
    throw std::runtime_error(msg.str());
  }
  return CorrelationMatrix(t);
}

// Verification surface for real symmetric densities: the five explicit
// component formulas (all other entries vanish).
inline CorrelationMatrix correlation_matrix_symmetric(const TwoQubitDensity& rho) {
  const Matrix4c& m = rho.entries();
  if (max_abs_imag(m) > 1e-12)
    throw std::invalid_argument("correlation_matrix_symmetric: input must be real within 1e-12");
  for (int r = 0; r < 4; ++r)
    for (int c = r + 1; c < 4; ++c)
      if (std::abs(m(r, c) - m(c, r)) > 1e-12)
        throw std::invalid_argument(
            "correlation_matrix_symmetric: input must be symmetric within 1e-12");
  auto re = [&m](int r, int c) { return m(r, c).real(); };
  Mat3 t;
  t(0, 0) = re(0, 3) + re(1, 2) + re(2, 1) + re(3, 0);
  t(1, 1) = -re(0, 3) + re(1, 2) + re(2, 1) - re(3, 0);
  t(2, 2) = re(0, 0) - re(1, 1) - re(2, 2) + re(3, 3);
  t(0, 2) = re(0, 2) - re(1, 3) + re(2, 0) - re(3, 1);
  t(2, 0) = re(0, 1) + re(1, 0) - re(2, 3) - re(3, 2);
  return CorrelationMatrix(t);
}

inline BellBound horodecki_bound(const CorrelationMatrix& t) {
  const double m = detail::m_from_correlation(t.t);
  return BellBound(m, 2.0 * std::sqrt(m));
}

// CHSH expectation a.Tb + a.Tb2 + a2.Tb - a2.Tb2 for unit directions.
inline double chsh_value(const CorrelationMatrix& t, const Vec3& a, const Vec3& a2, const Vec3& b,
                         const Vec3& b2) {
  for (const Vec3* v : {&a, &a2, &b, &b2})
    if (std::abs(norm(*v) - 1.0) > 1e-10)
      throw std::invalid_argument("chsh_value: direction vectors must be unit norm within 1e-10");
  const Vec3 tb = mul(t.t, b);
  const Vec3 tb2 = mul(t.t, b2);
  return dot(a, tb) + dot(a, tb2) + dot(a2, tb) - dot(a2, tb2);
}

// Maximal CHSH value of the XOR reduction of n Werner pairs:
// with D = (1-x)^n + (1+x)^n, T_xx = T_yy = -(2x)^n/D,
// T_zz = [(1-x)^n - (1+x)^n]/D, bound = 2*sqrt(T_yy^2 + max(T_xx^2, T_zz^2)).
inline double xor_bound_closed_form(int n, SingletFraction x) {
  if (n < 1) throw std::invalid_argument("xor_bound_closed_form: n must be >= 1");
  const double v = x.value();
  const double lo = std::pow(1.0 - v, n);
  const double hi = std::pow(1.0 + v, n);
  const double d = lo + hi;
  const double txx = -std::pow(2.0 * v, n) / d;
  const double tzz = (lo - hi) / d;
  return 2.0 * std::sqrt(txx * txx + std::max(txx * txx, tzz * tzz));
}

}  // namespace collchsh
