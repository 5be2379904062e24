#pragma once

// Werner mixtures of the two-qubit singlet with the maximally mixed state,
// plus density-matrix validation shared by every reduction path.

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "collchsh/linalg.hpp"

namespace collchsh {

// Singlet weight x in [0, 1].
class SingletFraction {
 public:
  explicit SingletFraction(double x) : value_(x) {
    if (!(x >= 0.0 && x <= 1.0)) {
      std::ostringstream msg;
      msg << "SingletFraction: x = " << x << " outside [0, 1]";
      throw std::domain_error(msg.str());
    }
  }

  double value() const { return value_; }

 private:
  double value_;
};

struct DensityDiagnostics {
  double hermiticity_defect = 0.0;
  double trace_defect = 0.0;
  double min_eigenvalue = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

// Checks Hermiticity, unit trace and positive semidefiniteness of a 4x4
// matrix against a single tolerance. Never throws; callers decide.
inline DensityDiagnostics validate_density(const Matrix4c& rho, double tol) {
  DensityDiagnostics d;
  d.tolerance = tol;
  d.hermiticity_defect = hermiticity_defect(rho);
  d.trace_defect = std::abs(trace(rho) - 1.0);
  d.min_eigenvalue = hermitian_min_eigenvalue(rho.e.data(), 4);
  d.passed = d.hermiticity_defect <= tol && d.trace_defect <= tol && d.min_eigenvalue >= -tol;
  return d;
}

// A validated two-qubit density matrix. Entries are row-major with composite
// index 2m+n (first party's bit most significant).
class TwoQubitDensity {
 public:
  static constexpr double kHermitianTol = 1e-12;
  static constexpr double kTraceTol = 1e-12;
  static constexpr double kPsdTol = 1e-10;

  explicit TwoQubitDensity(const Matrix4c& entries) : m_(entries) {
    const double herm = hermiticity_defect(m_);
    if (herm > kHermitianTol) {
      std::ostringstream msg;
      msg << "TwoQubitDensity: hermiticity defect " << herm << " exceeds " << kHermitianTol;
      throw std::invalid_argument(msg.str());
    }
    const double tr = std::abs(trace(m_) - 1.0);
    if (tr > kTraceTol) {
      std::ostringstream msg;
      msg << "TwoQubitDensity: trace defect " << tr << " exceeds " << kTraceTol;
      throw std::invalid_argument(msg.str());
    }
    const double lo = hermitian_min_eigenvalue(m_.e.data(), 4);
    if (lo < -kPsdTol) {
      std::ostringstream msg;
      msg << "TwoQubitDensity: eigenvalue " << lo << " below -" << kPsdTol;
      throw std::invalid_argument(msg.str());
    }
  }

  const Matrix4c& entries() const { return m_; }
  const cplx& operator()(int r, int c) const { return m_(r, c); }

 private:
  Matrix4c m_;
};

// Singlet density: 1/2 on the {01, 10} diagonal block, -1/2 off it.
inline TwoQubitDensity make_singlet() {
  Matrix4c s;
  s(1, 1) = 0.5;
  s(2, 2) = 0.5;
  s(1, 2) = -0.5;
  s(2, 1) = -0.5;
  return TwoQubitDensity(s);
}

// rho = x * singlet + (1 - x) * I/4.
inline TwoQubitDensity make_werner(SingletFraction x) {
  const double v = x.value();
  Matrix4c s;
  s(0, 0) = v * 0.0 + (1.0 - v) * 0.25;
  s(1, 1) = v * 0.5 + (1.0 - v) * 0.25;
  s(2, 2) = v * 0.5 + (1.0 - v) * 0.25;
  s(3, 3) = v * 0.0 + (1.0 - v) * 0.25;
  s(1, 2) = v * -0.5;
  s(2, 1) = v * -0.5;
  return TwoQubitDensity(s);
}

// Overlap with the singlet, F = (3x + 1) / 4.
inline double fidelity(SingletFraction x) { return (3.0 * x.value() + 1.0) / 4.0; }

}  // namespace collchsh
