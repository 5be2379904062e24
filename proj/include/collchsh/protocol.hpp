#pragma once

// Collective test protocol: assemble n two-qubit pairs, apply the retained
// rows of the local transformations, post-select every tested particle on
// spin-up, and extract the reduced two-qubit state with its success
// probability.
//
// Index conventions, fixed project-wide:
//  * RowPair component index a = (m, m', m'', ...), first pair's bit most
//    significant: a = m*2^(n-1) + m'*2^(n-2) + ...
//  * CompositeDensity rows/columns interleave the parties pair-major:
//    (m, n, m', n', ...), most significant first.
//  * The party-major order used by the reduction groups all of Alice's bits
//    ahead of all of Bob's: index = a * 2^n + b.

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "collchsh/common.hpp"
#include "collchsh/linalg.hpp"
#include "collchsh/states.hpp"

namespace collchsh {

inline constexpr int kMaxCompositePairs = 6;

// The two retained orthonormal rows of a local 2^n-dimensional transformation.
class RowPair {
 public:
  static constexpr double kNormTol = 1e-10;

  RowPair(int n, std::vector<double> u0, std::vector<double> u1)
      : n_(n), u0_(std::move(u0)), u1_(std::move(u1)) {
    if (n_ < 1) throw std::invalid_argument("RowPair: n must be >= 1");
    const std::size_t dim = std::size_t{1} << n_;
    if (u0_.size() != dim || u1_.size() != dim)
      throw std::invalid_argument("RowPair: vectors must have dimension 2^n");
    double n0 = 0.0, n1 = 0.0, d = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      n0 += u0_[i] * u0_[i];
      n1 += u1_[i] * u1_[i];
      d += u0_[i] * u1_[i];
    }
    if (std::abs(std::sqrt(n0) - 1.0) > kNormTol || std::abs(std::sqrt(n1) - 1.0) > kNormTol)
      throw std::invalid_argument("RowPair: rows must be unit norm within 1e-10");
    if (std::abs(d) > kNormTol)
      throw std::invalid_argument("RowPair: rows must be orthogonal within 1e-10");
  }

  int pair_count() const { return n_; }
  std::size_t dim() const { return std::size_t{1} << n_; }
  const std::vector<double>& u0() const { return u0_; }
  const std::vector<double>& u1() const { return u1_; }
  const std::vector<double>& row(int mu) const { return mu == 0 ? u0_ : u1_; }

 private:
  int n_;
  std::vector<double> u0_, u1_;
};

// Post-selected two-qubit state plus the probability that all 2(n-1) spin-up
// tests succeed.
struct ReducedState {
  TwoQubitDensity rho_new;
  double success_probability;

  ReducedState(TwoQubitDensity rho, double p) : rho_new(std::move(rho)), success_probability(p) {
    if (!(p > 0.0 && p <= 1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "ReducedState: success probability " << p << " outside (0, 1]";
      throw std::invalid_argument(msg.str());
    }
  }
};

// Tensor product of n pairs in pair-major bit order.
class CompositeDensity {
 public:
  CompositeDensity(int n, std::vector<cplx> entries) : n_(n), e_(std::move(entries)) {
    if (n_ < 1 || n_ > kMaxCompositePairs)
      throw std::invalid_argument("CompositeDensity: n outside [1, 6]");
    const std::size_t d = dim();
    if (e_.size() != d * d) throw std::invalid_argument("CompositeDensity: wrong entry count");
    double herm = 0.0;
    cplx tr = 0.0;
    for (std::size_t r = 0; r < d; ++r) {
      tr += e_[r * d + r];
      for (std::size_t c = r; c < d; ++c)
        herm = std::max(herm, std::abs(e_[r * d + c] - std::conj(e_[c * d + r])));
    }
    if (herm > 1e-12) throw std::invalid_argument("CompositeDensity: not Hermitian within 1e-12");
    if (std::abs(tr - 1.0) > 1e-12)
      throw std::invalid_argument("CompositeDensity: trace not 1 within 1e-12");
  }

  int pair_count() const { return n_; }
  std::size_t dim() const { return std::size_t{1} << (2 * n_); }
  const cplx& operator()(std::size_t r, std::size_t c) const { return e_[r * dim() + c]; }
  const std::vector<cplx>& entries() const { return e_; }

 private:
  int n_;
  std::vector<cplx> e_;
};

// Retained rows of the XOR transformation: indices 00...0 and 11...1.
inline RowPair xor_rows(int n) {
  if (n < 1) throw std::invalid_argument("xor_rows: n must be >= 1");
  const std::size_t dim = std::size_t{1} << n;
  std::vector<double> u0(dim, 0.0), u1(dim, 0.0);
  u0[0] = 1.0;
  u1[dim - 1] = 1.0;
  return RowPair(n, std::move(u0), std::move(u1));
}

// Bob's optimal partner rows: V_{nu,b} = (-1)^(nu + popcount(b)) U_{nu,b}.
inline RowPair tie_partner_rows(const RowPair& u) {
  const std::size_t dim = u.dim();
  std::vector<double> v0(dim), v1(dim);
  for (std::size_t b = 0; b < dim; ++b) {
    const double parity = (std::popcount(b) & 1u) ? -1.0 : 1.0;
    v0[b] = parity * u.u0()[b];
    v1[b] = -parity * u.u1()[b];
  }
  return RowPair(u.pair_count(), std::move(v0), std::move(v1));
}

// SO(2) mixing of the two retained rows; a pure gauge move.
inline RowPair gauge_rotate(const RowPair& u, double alpha) {
  const double c = std::cos(alpha), s = std::sin(alpha);
  const std::size_t dim = u.dim();
  std::vector<double> r0(dim), r1(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    r0[i] = u.u0()[i] * c - u.u1()[i] * s;
    r1[i] = u.u0()[i] * s + u.u1()[i] * c;
  }
  return RowPair(u.pair_count(), std::move(r0), std::move(r1));
}

namespace detail {

// Gram-Schmidt a raw vector pair into orthonormal rows. Returns false when
// raw0 is too short or raw1 has no component orthogonal to raw0 (both
// thresholds 1e-8); callers turn that into a degeneracy error or resample.
inline bool orthonormalize_into(std::span<const double> raw0, std::span<const double> raw1,
                                std::span<double> out0, std::span<double> out1) {
  const std::size_t dim = raw0.size();
  double n0 = 0.0;
  for (std::size_t i = 0; i < dim; ++i) n0 += raw0[i] * raw0[i];
  n0 = std::sqrt(n0);
  if (!(n0 > 1e-8)) return false;
  for (std::size_t i = 0; i < dim; ++i) out0[i] = raw0[i] / n0;
  double proj = 0.0;
  for (std::size_t i = 0; i < dim; ++i) proj += out0[i] * raw1[i];
  double n1 = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    out1[i] = raw1[i] - proj * out0[i];
    n1 += out1[i] * out1[i];
  }
  n1 = std::sqrt(n1);
  if (!(n1 > 1e-8)) return false;
  for (std::size_t i = 0; i < dim; ++i) out1[i] /= n1;
  // Second orthogonalization pass; keeps |u0.u1| at rounding level even when
  // the first remainder was barely above threshold.
  double proj2 = 0.0;
  for (std::size_t i = 0; i < dim; ++i) proj2 += out0[i] * out1[i];
  double n2 = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    out1[i] -= proj2 * out0[i];
    n2 += out1[i] * out1[i];
  }
  n2 = std::sqrt(n2);
  if (!(n2 > 0.0)) return false;
  for (std::size_t i = 0; i < dim; ++i) out1[i] /= n2;
  return true;
}

inline std::vector<double> rotate_bit(const std::vector<double>& w, int bit, double c, double s) {
  std::vector<double> out(w.size());
  const std::size_t mask = std::size_t{1} << bit;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i & mask) continue;
    const std::size_t j = i | mask;
    out[i] = c * w[i] - s * w[j];
    out[j] = s * w[i] + c * w[j];
  }
  return out;
}

}  // namespace detail

// Same real rotation applied to bit position k (1-based, pair k) of all four
// vectors; leaves the reduced state of Werner inputs unchanged.
inline std::pair<RowPair, RowPair> pair_gauge_rotate(const RowPair& u, const RowPair& v, int k,
                                                     double beta) {
  const int n = u.pair_count();
  if (v.pair_count() != n) throw std::invalid_argument("pair_gauge_rotate: mismatched n");
  if (k < 1 || k > n) throw std::out_of_range("pair_gauge_rotate: pair index out of range");
  const int bit = n - k;
  const double c = std::cos(beta), s = std::sin(beta);
  RowPair ur(n, detail::rotate_bit(u.u0(), bit, c, s), detail::rotate_bit(u.u1(), bit, c, s));
  RowPair vr(n, detail::rotate_bit(v.u0(), bit, c, s), detail::rotate_bit(v.u1(), bit, c, s));
  return {std::move(ur), std::move(vr)};
}

// Tensor product of the given pairs, earlier pairs most significant.
inline CompositeDensity assemble_composite(std::span<const TwoQubitDensity> pairs) {
  const int n = static_cast<int>(pairs.size());
  if (n < 1 || n > kMaxCompositePairs)
    throw std::invalid_argument("assemble_composite: need between 1 and 6 pairs");
  std::vector<cplx> acc(pairs[0].entries().e.begin(), pairs[0].entries().e.end());
  std::size_t d = 4;
  for (int k = 1; k < n; ++k) {
    const Matrix4c& b = pairs[k].entries();
    std::vector<cplx> next(d * 4 * d * 4);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        const cplx aij = acc[i * d + j];
        for (int r = 0; r < 4; ++r)
          for (int c = 0; c < 4; ++c)
            next[(i * 4 + r) * (d * 4) + (j * 4 + c)] = aij * b(r, c);
      }
    acc = std::move(next);
    d *= 4;
  }
  return CompositeDensity(n, std::move(acc));
}

// Bijection from party-major index a*2^n + b to the pair-major composite
// index that interleaves the bits of a and b.
inline std::vector<std::uint32_t> party_to_pair_permutation(int n) {
  if (n < 1 || n > kMaxCompositePairs)
    throw std::invalid_argument("party_to_pair_permutation: n outside [1, 6]");
  const std::size_t half = std::size_t{1} << n;
  std::vector<std::uint32_t> perm(half * half);
  for (std::size_t a = 0; a < half; ++a)
    for (std::size_t b = 0; b < half; ++b) {
      std::uint32_t j = 0;
      for (int k = 0; k < n; ++k) {
        j |= static_cast<std::uint32_t>((a >> k) & 1u) << (2 * k + 1);
        j |= static_cast<std::uint32_t>((b >> k) & 1u) << (2 * k);
      }
      perm[(a << n) | b] = j;
    }
  return perm;
}

// Fast reduction path: permute the composite to party-major order, then
// contract with the four product rows w_{mu nu} = u_mu (x) v_nu.
inline ReducedState reduce_pairs(std::span<const TwoQubitDensity> pairs, const RowPair& u,
                                 const RowPair& v) {
  const int n = static_cast<int>(pairs.size());
  if (u.pair_count() != n || v.pair_count() != n)
    throw std::invalid_argument("reduce_pairs: row pairs must match the number of pairs");
  const CompositeDensity comp = assemble_composite(pairs);
  const std::vector<std::uint32_t> perm = party_to_pair_permutation(n);
  const std::size_t d = comp.dim();
  std::vector<cplx> pm(d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) pm[i * d + j] = comp(perm[i], perm[j]);

  const std::size_t half = std::size_t{1} << n;
  std::array<std::vector<double>, 4> w;
  for (int mu = 0; mu < 2; ++mu)
    for (int nu = 0; nu < 2; ++nu) {
      std::vector<double>& wr = w[2 * mu + nu];
      wr.resize(d);
      for (std::size_t a = 0; a < half; ++a) {
        const double ua = u.row(mu)[a];
        for (std::size_t b = 0; b < half; ++b) wr[(a << n) | b] = ua * v.row(nu)[b];
      }
    }

  Matrix4c unnorm;
  for (int r = 0; r < 4; ++r) {
    std::vector<cplx> x(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      const double wi = w[r][i];
      if (wi == 0.0) continue;
      const cplx* row = pm.data() + i * d;
      for (std::size_t j = 0; j < d; ++j) x[j] += wi * row[j];
    }
    for (int c = 0; c < 4; ++c) {
      cplx s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += x[j] * w[c][j];
      unnorm(r, c) = s;
    }
  }

  const double tr = trace(unnorm).real();
  if (tr < 1e-14)
    throw degenerate_selection_error("reduce_pairs: post-selection weight below 1e-14");
  Matrix4c rho;
  for (int i = 0; i < 16; ++i) rho.e[i] = unnorm.e[i] / tr;
  return ReducedState(TwoQubitDensity(rho), tr);
}

// Closed form of the XOR reduction of n identical Werner pairs:
// diagonal (a, b, b, a)/(2a+2b), off-diagonal (01,10) = -(x/2)^n/(2a+2b),
// with a = ((1-x)/4)^n, b = ((1+x)/4)^n; success probability 2(a+b).
inline ReducedState xor_reduced_closed_form(int n, SingletFraction x) {
  if (n < 1) throw std::invalid_argument("xor_reduced_closed_form: n must be >= 1");
  const double v = x.value();
  const double a = std::pow((1.0 - v) / 4.0, n);
  const double b = std::pow((1.0 + v) / 4.0, n);
  const double off = -std::pow(v / 2.0, n);
  const double norm = 2.0 * (a + b);
  Matrix4c rho;
  rho(0, 0) = a / norm;
  rho(1, 1) = b / norm;
  rho(2, 2) = b / norm;
  rho(3, 3) = a / norm;
  rho(1, 2) = off / norm;
  rho(2, 1) = off / norm;
  return ReducedState(TwoQubitDensity(rho), norm);
}

// Repeated-evaluation reduction for a fixed list of real pairs. Applies the
// tensor factors as per-pair 4x4 mode products instead of materializing the
// composite, so one evaluation costs O(n 4^n) instead of O(16^n).
class ReductionEngine {
 public:
  struct Workspace {
    std::vector<double> w;        // four product rows, party-major then interleaved
    std::vector<double> z;        // K applied to each row
    std::vector<double> scratch;  // mode-product ping-pong buffer
  };

  explicit ReductionEngine(std::span<const TwoQubitDensity> pairs)
      : n_(static_cast<int>(pairs.size())) {
    if (n_ < 1 || n_ > kMaxCompositePairs)
      throw std::invalid_argument("ReductionEngine: need between 1 and 6 pairs");
    factors_.resize(n_);
    for (int k = 0; k < n_; ++k) {
      if (max_abs_imag(pairs[k].entries()) > 1e-12)
        throw std::invalid_argument("ReductionEngine: pairs must have real entries");
      for (int i = 0; i < 16; ++i) factors_[k][i] = pairs[k].entries().e[i].real();
    }
    interleave_ = party_to_pair_permutation(n_);
  }

  int pair_count() const { return n_; }
  std::size_t dim() const { return std::size_t{1} << n_; }

  // Unnormalized reduced matrix (real symmetric, row-major 4x4) and its trace.
  double reduce_raw(std::span<const double> u0, std::span<const double> u1,
                    std::span<const double> v0, std::span<const double> v1, Workspace& ws,
                    std::array<double, 16>& out) const {
    const std::size_t half = dim();
    const std::size_t full = half * half;
    ws.w.resize(4 * full);
    ws.z.resize(4 * full);
    ws.scratch.resize(full);

    const std::array<std::span<const double>, 2> urows{u0, u1};
    const std::array<std::span<const double>, 2> vrows{v0, v1};
    for (int mu = 0; mu < 2; ++mu)
      for (int nu = 0; nu < 2; ++nu) {
        double* wr = ws.w.data() + std::size_t(2 * mu + nu) * full;
        const std::uint32_t* il = interleave_.data();
        for (std::size_t a = 0; a < half; ++a) {
          const double ua = urows[mu][a];
          const std::uint32_t* ilrow = il + (a << n_);
          for (std::size_t b = 0; b < half; ++b) wr[ilrow[b]] = ua * vrows[nu][b];
        }
      }

    std::copy(ws.w.begin(), ws.w.end(), ws.z.begin());
    for (int r = 0; r < 4; ++r) {
      double* zr = ws.z.data() + std::size_t(r) * full;
      for (int k = 0; k < n_; ++k) apply_mode(zr, ws.scratch.data(), full, k);
    }

    for (int r = 0; r < 4; ++r) {
      const double* wr = ws.w.data() + std::size_t(r) * full;
      for (int c = r; c < 4; ++c) {
        const double* zc = ws.z.data() + std::size_t(c) * full;
        double s = 0.0;
        for (std::size_t j = 0; j < full; ++j) s += wr[j] * zc[j];
        out[4 * r + c] = s;
        out[4 * c + r] = s;
      }
    }
    return out[0] + out[5] + out[10] + out[15];
  }

  ReducedState reduce(const RowPair& u, const RowPair& v) const {
    if (u.pair_count() != n_ || v.pair_count() != n_)
      throw std::invalid_argument("ReductionEngine::reduce: row pair size mismatch");
    Workspace ws;
    std::array<double, 16> out;
    const double tr = reduce_raw(u.u0(), u.u1(), v.u0(), v.u1(), ws, out);
    if (tr < 1e-14)
      throw degenerate_selection_error("ReductionEngine: post-selection weight below 1e-14");
    Matrix4c rho;
    for (int i = 0; i < 16; ++i) rho.e[i] = out[i] / tr;
    return ReducedState(TwoQubitDensity(rho), tr);
  }

 private:
  // y <- (I x ... x F_k x ... x I) y on the pair-major index, in place via
  // the scratch buffer. Mode k of the 4^n tensor has stride 4^(n-1-k).
  void apply_mode(double* y, double* scratch, std::size_t full, int k) const {
    const std::array<double, 16>& f = factors_[k];
    const std::size_t stride = std::size_t{1} << (2 * (n_ - 1 - k));
    for (std::size_t base = 0; base < full; base += 4 * stride) {
      for (std::size_t off = 0; off < stride; ++off) {
        const std::size_t i = base + off;
        const double x0 = y[i];
        const double x1 = y[i + stride];
        const double x2 = y[i + 2 * stride];
        const double x3 = y[i + 3 * stride];
        scratch[i] = f[0] * x0 + f[1] * x1 + f[2] * x2 + f[3] * x3;
        scratch[i + stride] = f[4] * x0 + f[5] * x1 + f[6] * x2 + f[7] * x3;
        scratch[i + 2 * stride] = f[8] * x0 + f[9] * x1 + f[10] * x2 + f[11] * x3;
        scratch[i + 3 * stride] = f[12] * x0 + f[13] * x1 + f[14] * x2 + f[15] * x3;
      }
    }
    std::copy(scratch, scratch + full, y);
  }

  int n_;
  std::vector<std::array<double, 16>> factors_;
  std::vector<std::uint32_t> interleave_;
};

}  // namespace collchsh
