#pragma once

// Independent brute-force references used to validate the fast reduction
// path, the Appendix correlation formulas, the eigenvalue bound, and the
// derived closed forms. Deliberately naive: direct nested iteration written
// from the defining six-index sum, with index arithmetic local to this
// module (no shared permutation tables).

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "collchsh/chsh.hpp"
#include "collchsh/common.hpp"
#include "collchsh/linalg.hpp"
#include "collchsh/protocol.hpp"
#include "collchsh/random.hpp"
#include "collchsh/states.hpp"

namespace collchsh {

// Row pair with complex amplitudes for the real-restriction probe.
class ComplexRows {
 public:
  ComplexRows(int n, std::vector<cplx> u0, std::vector<cplx> u1)
      : n_(n), u0_(std::move(u0)), u1_(std::move(u1)) {
    if (n_ < 1) throw std::invalid_argument("ComplexRows: n must be >= 1");
    const std::size_t dim = std::size_t{1} << n_;
    if (u0_.size() != dim || u1_.size() != dim)
      throw std::invalid_argument("ComplexRows: vectors must have dimension 2^n");
    double n0 = 0.0, n1 = 0.0;
    cplx d = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      n0 += std::norm(u0_[i]);
      n1 += std::norm(u1_[i]);
      d += std::conj(u0_[i]) * u1_[i];
    }
    if (std::abs(std::sqrt(n0) - 1.0) > 1e-10 || std::abs(std::sqrt(n1) - 1.0) > 1e-10)
      throw std::invalid_argument("ComplexRows: rows must be unit norm within 1e-10");
    if (std::abs(d) > 1e-10)
      throw std::invalid_argument("ComplexRows: rows must be orthogonal within 1e-10");
  }

  static ComplexRows from_real(const RowPair& u) {
    std::vector<cplx> c0(u.dim()), c1(u.dim());
    for (std::size_t i = 0; i < u.dim(); ++i) {
      c0[i] = u.u0()[i];
      c1[i] = u.u1()[i];
    }
    return ComplexRows(u.pair_count(), std::move(c0), std::move(c1));
  }

  int pair_count() const { return n_; }
  std::size_t dim() const { return std::size_t{1} << n_; }
  const std::vector<cplx>& row(int mu) const { return mu == 0 ? u0_ : u1_; }

 private:
  int n_;
  std::vector<cplx> u0_, u1_;
};

// Direct evaluation of the reduced-state sum: for each output entry, iterate
// all tuples (a, b, c, d) and multiply the per-pair density components.
// Bit of pair k (1-based) sits at position n-k of each index.
inline ReducedState brute_force_reduce(std::span<const TwoQubitDensity> pairs,
                                       const ComplexRows& u, const ComplexRows& v) {
  const int n = static_cast<int>(pairs.size());
  if (n < 1 || n > 4) throw std::invalid_argument("brute_force_reduce: n must be in [1, 4]");
  if (u.pair_count() != n || v.pair_count() != n)
    throw std::invalid_argument("brute_force_reduce: row pair size mismatch");
  const std::size_t dim = std::size_t{1} << n;

  Matrix4c unnorm;
  for (int mu = 0; mu < 2; ++mu)
    for (int nu = 0; nu < 2; ++nu)
      for (int sg = 0; sg < 2; ++sg)
        for (int ta = 0; ta < 2; ++ta) {
          cplx acc = 0.0;
          for (std::size_t a = 0; a < dim; ++a)
            for (std::size_t b = 0; b < dim; ++b) {
              const cplx left = u.row(mu)[a] * v.row(nu)[b];
              if (left == cplx(0.0)) continue;
              for (std::size_t c = 0; c < dim; ++c)
                for (std::size_t d = 0; d < dim; ++d) {
                  cplx prod = left * std::conj(u.row(sg)[c]) * std::conj(v.row(ta)[d]);
                  for (int k = 1; k <= n; ++k) {
                    const int ak = static_cast<int>((a >> (n - k)) & 1u);
                    const int bk = static_cast<int>((b >> (n - k)) & 1u);
                    const int ck = static_cast<int>((c >> (n - k)) & 1u);
                    const int dk = static_cast<int>((d >> (n - k)) & 1u);
                    prod *= pairs[k - 1](2 * ak + bk, 2 * ck + dk);
                  }
                  acc += prod;
                }
            }
          unnorm(2 * mu + nu, 2 * sg + ta) = acc;
        }

  const double tr = trace(unnorm).real();
  if (tr < 1e-14)
    throw degenerate_selection_error("brute_force_reduce: post-selection weight below 1e-14");
  Matrix4c rho;
  for (int i = 0; i < 16; ++i) rho.e[i] = unnorm.e[i] / tr;
  return ReducedState(TwoQubitDensity(rho), tr);
}

inline ReducedState brute_force_reduce(std::span<const TwoQubitDensity> pairs, const RowPair& u,
                                       const RowPair& v) {
  return brute_force_reduce(pairs, ComplexRows::from_real(u), ComplexRows::from_real(v));
}

// Second independent route for n up to 5: materialize the pair-major
// composite, then contract the four product rows against it directly,
// recomputing the interleaved index per component.
inline ReducedState reduce_dense_composite(std::span<const TwoQubitDensity> pairs,
                                           const RowPair& u, const RowPair& v) {
  const int n = static_cast<int>(pairs.size());
  if (u.pair_count() != n || v.pair_count() != n)
    throw std::invalid_argument("reduce_dense_composite: row pair size mismatch");
  const CompositeDensity comp = assemble_composite(pairs);
  const std::size_t half = std::size_t{1} << n;
  const std::size_t dim = comp.dim();

  std::vector<std::size_t> jtab(half * half);
  for (std::size_t a = 0; a < half; ++a)
    for (std::size_t b = 0; b < half; ++b) {
      std::size_t j = 0;
      for (int k = 1; k <= n; ++k) {
        j |= ((a >> (n - k)) & 1u) << (2 * (n - k) + 1);
        j |= ((b >> (n - k)) & 1u) << (2 * (n - k));
      }
      jtab[a * half + b] = j;
    }

  Matrix4c unnorm;
  for (int mu = 0; mu < 2; ++mu)
    for (int nu = 0; nu < 2; ++nu)
      for (int sg = 0; sg < 2; ++sg)
        for (int ta = 0; ta < 2; ++ta) {
          cplx acc = 0.0;
          for (std::size_t a = 0; a < half; ++a)
            for (std::size_t b = 0; b < half; ++b) {
              const double left = u.row(mu)[a] * v.row(nu)[b];
              if (left == 0.0) continue;
              const cplx* row = comp.entries().data() + jtab[a * half + b] * dim;
              cplx inner = 0.0;
              for (std::size_t c = 0; c < half; ++c)
                for (std::size_t d = 0; d < half; ++d)
                  inner += row[jtab[c * half + d]] * (u.row(sg)[c] * v.row(ta)[d]);
              acc += left * inner;
            }
          unnorm(2 * mu + nu, 2 * sg + ta) = acc;
        }

  const double tr = trace(unnorm).real();
  if (tr < 1e-14)
    throw degenerate_selection_error("reduce_dense_composite: post-selection weight below 1e-14");
  Matrix4c rho;
  for (int i = 0; i < 16; ++i) rho.e[i] = unnorm.e[i] / tr;
  return ReducedState(TwoQubitDensity(rho), tr);
}

namespace detail {

inline Vec3 spherical_direction(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

// CHSH score for Bob directions b1, b2 with Alice solved exactly:
// max over unit a, a2 of a.T(b1+b2) + a2.T(b1-b2) = |T b1 + T b2| + |T b1 - T b2|.
inline double chsh_score(const Mat3& t, const Vec3& b1, const Vec3& b2) {
  const Vec3 p = mul(t, b1);
  const Vec3 q = mul(t, b2);
  const Vec3 sum{p[0] + q[0], p[1] + q[1], p[2] + q[2]};
  const Vec3 diff{p[0] - q[0], p[1] - q[1], p[2] - q[2]};
  return norm(sum) + norm(diff);
}

}  // namespace detail

// Settings-space check of the eigenvalue bound: coarse spherical grid over
// Bob's two directions (Alice's optimal directions have a closed form given
// Bob's), then coordinate refinement with step halving. Monotone in
// refine_iterations and never above horodecki_bound.
inline double direct_chsh_max(const TwoQubitDensity& rho, double coarse_step_deg = 5.0,
                              int refine_iterations = 100) {
  if (!(coarse_step_deg > 0.0) || refine_iterations < 0)
    throw std::invalid_argument("direct_chsh_max: bad search parameters");
  const Mat3 t = correlation_matrix(rho).t;
  const double deg = std::numbers::pi / 180.0;

  const int n_theta = static_cast<int>(std::ceil(180.0 / coarse_step_deg));
  const int n_phi = static_cast<int>(std::ceil(360.0 / coarse_step_deg));
  std::vector<std::array<double, 2>> angles;
  angles.reserve(static_cast<std::size_t>(n_theta + 1) * n_phi);
  for (int j = 0; j <= n_theta; ++j)
    for (int i = 0; i < n_phi; ++i)
      angles.push_back({std::min(j * coarse_step_deg, 180.0) * deg, i * coarse_step_deg * deg});

  std::vector<Vec3> tv(angles.size());
  for (std::size_t i = 0; i < angles.size(); ++i)
    tv[i] = mul(t, detail::spherical_direction(angles[i][0], angles[i][1]));

  double best = 0.0;
  std::size_t bi = 0, bj = 0;
  for (std::size_t i = 0; i < angles.size(); ++i)
    for (std::size_t j = i; j < angles.size(); ++j) {
      const Vec3 sum{tv[i][0] + tv[j][0], tv[i][1] + tv[j][1], tv[i][2] + tv[j][2]};
      const Vec3 diff{tv[i][0] - tv[j][0], tv[i][1] - tv[j][1], tv[i][2] - tv[j][2]};
      const double score = norm(sum) + norm(diff);
      if (score > best) {
        best = score;
        bi = i;
        bj = j;
      }
    }

  std::array<double, 4> a{angles[bi][0], angles[bi][1], angles[bj][0], angles[bj][1]};
  auto eval = [&t](const std::array<double, 4>& ang) {
    return detail::chsh_score(t, detail::spherical_direction(ang[0], ang[1]),
                              detail::spherical_direction(ang[2], ang[3]));
  };
  double step = coarse_step_deg * deg;
  for (int pass = 0; pass < refine_iterations && step > 1e-12; ++pass) {
    bool improved = false;
    for (int idx = 0; idx < 4; ++idx)
      for (double sign : {1.0, -1.0}) {
        std::array<double, 4> cand = a;
        cand[idx] += sign * step;
        const double val = eval(cand);
        if (val > best) {
          best = val;
          a = cand;
          improved = true;
        }
      }
    if (!improved) step *= 0.5;
  }
  return best;
}

struct OracleCategory {
  std::string name;
  int cases = 0;
  double max_abs_deviation = 0.0;
  double tolerance = 0.0;
};

struct OracleReport {
  int case_count = 0;
  double max_abs_deviation = 0.0;
  std::vector<std::pair<std::string, double>> failures;
  std::vector<OracleCategory> categories;

  bool passed() const { return failures.empty(); }
};

namespace detail {

inline std::vector<double> random_raw(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(dim);
  for (double& x : v) x = normal(rng);
  return v;
}

inline RowPair random_row_pair(std::mt19937_64& rng, int n) {
  const std::size_t dim = std::size_t{1} << n;
  for (int attempt = 0; attempt < 100; ++attempt) {
    const std::vector<double> raw0 = random_raw(rng, dim);
    const std::vector<double> raw1 = random_raw(rng, dim);
    std::vector<double> u0(dim), u1(dim);
    if (orthonormalize_into(raw0, raw1, u0, u1)) return RowPair(n, std::move(u0), std::move(u1));
  }
  throw row_degeneracy_error("random_row_pair: could not draw independent rows");
}

inline ComplexRows random_complex_rows(std::mt19937_64& rng, int n) {
  const std::size_t dim = std::size_t{1} << n;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<cplx> r0(dim), r1(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      r0[i] = cplx(normal(rng), normal(rng));
      r1[i] = cplx(normal(rng), normal(rng));
    }
    double n0 = 0.0;
    for (const cplx& z : r0) n0 += std::norm(z);
    n0 = std::sqrt(n0);
    if (n0 < 1e-8) continue;
    for (cplx& z : r0) z /= n0;
    cplx proj = 0.0;
    for (std::size_t i = 0; i < dim; ++i) proj += std::conj(r0[i]) * r1[i];
    double n1 = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      r1[i] -= proj * r0[i];
      n1 += std::norm(r1[i]);
    }
    n1 = std::sqrt(n1);
    if (n1 < 1e-8) continue;
    for (cplx& z : r1) z /= n1;
    cplx proj2 = 0.0;
    for (std::size_t i = 0; i < dim; ++i) proj2 += std::conj(r0[i]) * r1[i];
    double n2 = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      r1[i] -= proj2 * r0[i];
      n2 += std::norm(r1[i]);
    }
    n2 = std::sqrt(n2);
    if (n2 <= 0.0) continue;
    for (cplx& z : r1) z /= n2;
    return ComplexRows(n, std::move(r0), std::move(r1));
  }
  throw row_degeneracy_error("random_complex_rows: could not draw independent rows");
}

inline std::vector<TwoQubitDensity> random_werner_pairs(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<TwoQubitDensity> pairs;
  pairs.reserve(n);
  for (int k = 0; k < n; ++k) pairs.push_back(make_werner(SingletFraction(uni(rng))));
  return pairs;
}

// Random real symmetric PSD matrix with unit trace: A^T A normalized.
inline TwoQubitDensity random_symmetric_density(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::array<double, 16> a;
  for (double& v : a) v = normal(rng);
  Matrix4c s;
  double tr = 0.0;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      double acc = 0.0;
      for (int k = 0; k < 4; ++k) acc += a[4 * k + r] * a[4 * k + c];
      s(r, c) = acc;
      if (r == c) tr += acc;
    }
  for (cplx& v : s.e) v /= tr;
  return TwoQubitDensity(s);
}

inline double reduced_state_deviation(const ReducedState& lhs, const ReducedState& rhs) {
  double dev = std::abs(lhs.success_probability - rhs.success_probability);
  dev = std::max(dev, max_abs_entry_diff(lhs.rho_new.entries(), rhs.rho_new.entries()));
  return dev;
}

inline void record_case(OracleReport& report, OracleCategory& cat, const std::string& name,
                        int index, double deviation) {
  cat.max_abs_deviation = std::max(cat.max_abs_deviation, deviation);
  report.max_abs_deviation = std::max(report.max_abs_deviation, deviation);
  if (!(deviation <= cat.tolerance)) {
    std::ostringstream desc;
    desc << name << "[case " << index << "]";
    report.failures.emplace_back(desc.str(), deviation);
  }
}

using FastReduce = std::function<ReducedState(std::span<const TwoQubitDensity>, const RowPair&,
                                              const RowPair&)>;

inline OracleReport run_equivalence_suite_impl(std::uint64_t seed, int case_count,
                                               const FastReduce& fast) {
  if (case_count < 1) throw std::invalid_argument("run_equivalence_suite: case_count must be >= 1");
  OracleReport report;
  report.case_count = case_count;

  OracleCategory reduce_cat{"reduce_vs_brute_force", case_count, 0.0, 1e-13};
  {
    std::mt19937_64 rng = make_engine(substream_seed(seed, 1));
    for (int i = 0; i < case_count; ++i) {
      const int n = 1 + i % 3;
      const std::vector<TwoQubitDensity> pairs = random_werner_pairs(rng, n);
      const RowPair u = random_row_pair(rng, n);
      const RowPair v = random_row_pair(rng, n);
      const ReducedState lhs = fast(pairs, u, v);
      const ReducedState rhs = brute_force_reduce(pairs, u, v);
      record_case(report, reduce_cat, reduce_cat.name, i, reduced_state_deviation(lhs, rhs));
    }
  }
  report.categories.push_back(reduce_cat);

  OracleCategory corr_cat{"correlation_symmetric_vs_general", case_count, 0.0, 1e-13};
  {
    std::mt19937_64 rng = make_engine(substream_seed(seed, 2));
    for (int i = 0; i < case_count; ++i) {
      const TwoQubitDensity rho = random_symmetric_density(rng);
      const Mat3 general = correlation_matrix(rho).t;
      const Mat3 sym = correlation_matrix_symmetric(rho).t;
      double dev = 0.0;
      for (int k = 0; k < 9; ++k) dev = std::max(dev, std::abs(general.e[k] - sym.e[k]));
      record_case(report, corr_cat, corr_cat.name, i, dev);
    }
  }
  report.categories.push_back(corr_cat);

  OracleCategory direct_cat{"horodecki_vs_direct_settings", case_count, 0.0, 1e-3};
  {
    std::mt19937_64 rng = make_engine(substream_seed(seed, 3));
    for (int i = 0; i < case_count; ++i) {
      const int n = 1 + i % 2;
      const std::vector<TwoQubitDensity> pairs = random_werner_pairs(rng, n);
      const RowPair u = random_row_pair(rng, n);
      const RowPair v = random_row_pair(rng, n);
      const ReducedState red = reduce_pairs(pairs, u, v);
      const double bound = horodecki_bound(correlation_matrix(red.rho_new)).bound;
      const double direct = direct_chsh_max(red.rho_new, 6.0, 80);
      // Settings search must stay below the bound and attain it within 1e-3.
      double dev = std::abs(bound - direct);
      if (direct > bound + 1e-9) dev = std::max(dev, 1.0 + (direct - bound));
      record_case(report, direct_cat, direct_cat.name, i, dev);
    }
  }
  report.categories.push_back(direct_cat);

  OracleCategory xor_cat{"xor_closed_form_vs_pipeline", case_count, 0.0, 1e-13};
  {
    std::mt19937_64 rng = make_engine(substream_seed(seed, 4));
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int i = 0; i < case_count; ++i) {
      const int n = 1 + i % 5;
      const SingletFraction x(uni(rng));
      const std::vector<TwoQubitDensity> pairs(n, make_werner(x));
      const RowPair u = xor_rows(n);
      const RowPair v = tie_partner_rows(u);
      const ReducedState pipeline = reduce_pairs(pairs, u, v);
      const ReducedState closed = xor_reduced_closed_form(n, x);
      double dev = reduced_state_deviation(pipeline, closed);
      const double pipeline_bound = horodecki_bound(correlation_matrix(pipeline.rho_new)).bound;
      dev = std::max(dev, std::abs(pipeline_bound - xor_bound_closed_form(n, x)));
      record_case(report, xor_cat, xor_cat.name, i, dev);
    }
  }
  report.categories.push_back(xor_cat);

  return report;
}

}  // namespace detail

// Randomized cross-validation of every fast path against its reference:
// (a) reduce_pairs vs brute_force_reduce, (b) symmetric vs general T,
// (c) horodecki_bound vs direct settings search, (d) XOR closed forms vs the
// full pipeline. Deterministic for a fixed seed.
inline OracleReport run_equivalence_suite(std::uint64_t seed, int case_count) {
  return detail::run_equivalence_suite_impl(
      seed, case_count,
      [](std::span<const TwoQubitDensity> pairs, const RowPair& u, const RowPair& v) {
        return reduce_pairs(pairs, u, v);
      });
}

// Gauge moves must not change physics: row mixing by independent angles on
// each side preserves the bound; an identical real rotation on both particles
// of pair k preserves the reduced state entrywise.
inline OracleReport run_gauge_invariance_suite(std::uint64_t seed, int case_count) {
  if (case_count < 1)
    throw std::invalid_argument("run_gauge_invariance_suite: case_count must be >= 1");
  OracleReport report;
  report.case_count = case_count;
  OracleCategory alpha_cat{"gauge_rotation_bound", case_count, 0.0, 1e-10};
  OracleCategory pair_bound_cat{"pair_rotation_bound", case_count, 0.0, 1e-10};
  OracleCategory pair_state_cat{"pair_rotation_state", case_count, 0.0, 1e-12};

  std::mt19937_64 rng = make_engine(substream_seed(seed, 11));
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_int_distribution<int> coin(0, 1 << 20);
  for (int i = 0; i < case_count; ++i) {
    const int n = 1 + i % 3;
    const std::vector<TwoQubitDensity> pairs = detail::random_werner_pairs(rng, n);
    const RowPair u = detail::random_row_pair(rng, n);
    const RowPair v = detail::random_row_pair(rng, n);
    const ReducedState base = reduce_pairs(pairs, u, v);
    const double base_bound = horodecki_bound(correlation_matrix(base.rho_new)).bound;

    const double a1 = angle(rng), a2 = angle(rng);
    const ReducedState rotated = reduce_pairs(pairs, gauge_rotate(u, a1), gauge_rotate(v, a2));
    const double rot_bound = horodecki_bound(correlation_matrix(rotated.rho_new)).bound;
    detail::record_case(report, alpha_cat, alpha_cat.name, i, std::abs(rot_bound - base_bound));

    const int k = 1 + coin(rng) % n;
    const double beta = angle(rng);
    const auto [ur, vr] = pair_gauge_rotate(u, v, k, beta);
    const ReducedState pr = reduce_pairs(pairs, ur, vr);
    const double pr_bound = horodecki_bound(correlation_matrix(pr.rho_new)).bound;
    detail::record_case(report, pair_bound_cat, pair_bound_cat.name, i,
                        std::abs(pr_bound - base_bound));
    detail::record_case(report, pair_state_cat, pair_state_cat.name, i,
                        detail::reduced_state_deviation(pr, base));
  }
  report.categories.push_back(alpha_cat);
  report.categories.push_back(pair_bound_cat);
  report.categories.push_back(pair_state_cat);
  return report;
}

// Every protocol output must be a valid density with success in (0, 1] and a
// bound inside [0, 2*sqrt(2)].
inline OracleReport run_density_validity_suite(std::uint64_t seed, int case_count) {
  if (case_count < 1)
    throw std::invalid_argument("run_density_validity_suite: case_count must be >= 1");
  OracleReport report;
  report.case_count = case_count;
  OracleCategory density_cat{"reduced_density_validity", case_count, 0.0, 1e-10};
  OracleCategory ceiling_cat{"bound_ceiling", case_count, 0.0, 1e-9};

  std::mt19937_64 rng = make_engine(substream_seed(seed, 21));
  for (int i = 0; i < case_count; ++i) {
    const int n = 1 + i % 3;
    const std::vector<TwoQubitDensity> pairs = detail::random_werner_pairs(rng, n);
    const RowPair u = detail::random_row_pair(rng, n);
    const RowPair v = detail::random_row_pair(rng, n);
    const ReducedState red = reduce_pairs(pairs, u, v);

    const DensityDiagnostics diag = validate_density(red.rho_new.entries(), 1e-10);
    double dev = std::max(diag.hermiticity_defect, diag.trace_defect);
    dev = std::max(dev, std::max(0.0, -diag.min_eigenvalue));
    dev = std::max(dev, std::max(0.0, red.success_probability - 1.0));
    if (!(red.success_probability > 0.0)) dev = std::max(dev, 1.0);
    detail::record_case(report, density_cat, density_cat.name, i, dev);

    const double bound = horodecki_bound(correlation_matrix(red.rho_new)).bound;
    double ceiling_dev = std::max(0.0, bound - kTsirelson);
    if (!(bound >= 0.0)) ceiling_dev = std::max(ceiling_dev, 1.0);
    detail::record_case(report, ceiling_cat, ceiling_cat.name, i, ceiling_dev);
  }
  report.categories.push_back(density_cat);
  report.categories.push_back(ceiling_cat);
  return report;
}

// Numerical probe of the real-restriction question at n=2: random complex
// orthonormal rows never beat the real optimum by more than 1e-6. Evidence,
// not a theorem; the margin is recorded per singlet fraction.
inline OracleReport run_complex_rows_probe(std::uint64_t seed, int case_count) {
  if (case_count < 1)
    throw std::invalid_argument("run_complex_rows_probe: case_count must be >= 1");
  OracleReport report;
  report.case_count = case_count;
  const std::array<double, 2> fractions{0.5, 0.8};
  for (std::size_t f = 0; f < fractions.size(); ++f) {
    std::ostringstream name;
    name << "complex_rows_excess_x" << fractions[f];
    OracleCategory cat{name.str(), case_count, 0.0, 1e-6};
    const SingletFraction x(fractions[f]);
    const std::vector<TwoQubitDensity> pairs(2, make_werner(x));
    const double real_best = xor_bound_closed_form(2, x);
    std::mt19937_64 rng = make_engine(substream_seed(seed, 31 + f));
    for (int i = 0; i < case_count; ++i) {
      const ComplexRows u = detail::random_complex_rows(rng, 2);
      const ComplexRows v = detail::random_complex_rows(rng, 2);
      const ReducedState red = brute_force_reduce(pairs, u, v);
      const double bound = horodecki_bound(correlation_matrix(red.rho_new)).bound;
      detail::record_case(report, cat, cat.name, i, std::max(0.0, bound - real_best));
    }
    report.categories.push_back(cat);
  }
  return report;
}

}  // namespace collchsh
