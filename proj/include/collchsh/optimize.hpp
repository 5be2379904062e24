#pragma once

// Maximization of the Horodecki M value over retained row pairs. The search
// runs unconstrained over 2*2^n (or 4*2^n when Bob is untied) raw reals that
// are Gram-Schmidt projected before every evaluation, so Powell never sees a
// constraint. Multi-start with per-restart counter-derived substreams keeps
// results independent of execution order.

#include <array>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "collchsh/chsh.hpp"
#include "collchsh/common.hpp"
#include "collchsh/protocol.hpp"
#include "collchsh/random.hpp"
#include "collchsh/states.hpp"

namespace collchsh {

struct OptimizationConfig {
  int restarts = 64;
  std::uint64_t seed = 0;
  double rel_tolerance = 1e-10;
  int max_iterations = 2000;
  bool include_xor_warm_start = true;
  bool tie_bob = true;
};

enum class StrategyLabel { xor_equivalent, general };

inline const char* strategy_label_name(StrategyLabel label) {
  return label == StrategyLabel::xor_equivalent ? "xor_equivalent" : "general";
}

struct OptimizationResult {
  RowPair best_rows;
  RowPair best_partner;
  BellBound bell;
  std::vector<double> restart_values;  // warm start first when enabled, then restarts in order
  StrategyLabel strategy_label;
  long long evaluations;
};

struct PowellResult {
  std::vector<double> point;
  double value;
  bool converged;
  int iterations;
  long long evaluations;
};

using Objective = std::function<double(std::span<const double>)>;

// Gram-Schmidt projection of two raw vectors onto an orthonormal row pair.
inline RowPair orthonormalize(std::span<const double> raw0, std::span<const double> raw1) {
  if (raw0.size() != raw1.size() || raw0.empty() || !std::has_single_bit(raw0.size()))
    throw std::invalid_argument("orthonormalize: vectors must share a power-of-two dimension");
  const int n = std::countr_zero(raw0.size());
  if (n < 1) throw std::invalid_argument("orthonormalize: dimension must be at least 2");
  std::vector<double> u0(raw0.size()), u1(raw1.size());
  if (!detail::orthonormalize_into(raw0, raw1, u0, u1))
    throw row_degeneracy_error("orthonormalize: raw vectors too close to dependent");
  return RowPair(n, std::move(u0), std::move(u1));
}

namespace detail {

inline void validate_config(const OptimizationConfig& config) {
  if (config.restarts < 1) throw std::invalid_argument("OptimizationConfig: restarts must be >= 1");
  if (!(config.rel_tolerance > 0.0))
    throw std::invalid_argument("OptimizationConfig: rel_tolerance must be > 0");
  if (config.max_iterations < 1)
    throw std::invalid_argument("OptimizationConfig: max_iterations must be >= 1");
}

inline int thread_count() {
  if (const char* env = std::getenv("COLLCHSH_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1 && v <= 256) return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Golden-section bracketing followed by Brent's parabolic minimization along
// p + t*dir. Accepts the move only when the value strictly improves.
class LineMinimizer {
 public:
  explicit LineMinimizer(std::size_t dim) : trial_(dim) {}

  template <class Eval>
  void minimize(std::vector<double>& p, const std::vector<double>& dir, double& fp, Eval&& eval) {
    auto g = [&](double t) {
      for (std::size_t i = 0; i < p.size(); ++i) trial_[i] = p[i] + t * dir[i];
      return eval(std::span<const double>(trial_));
    };

    constexpr double kGold = 1.618033988749895;
    double a = 0.0, ga = fp;
    double b = 1.0, gb = g(b);
    if (gb > ga) {
      std::swap(a, b);
      std::swap(ga, gb);
    }
    double c = b + kGold * (b - a), gc = g(c);
    for (int i = 0; i < 60 && gc < gb; ++i) {
      a = b;
      ga = gb;
      b = c;
      gb = gc;
      c = b + kGold * (b - a);
      gc = g(c);
    }
    if (gc < gb) return;  // no bracket within budget; keep the current point

    double t_best, g_best;
    brent(a, b, c, gb, g, t_best, g_best);
    if (g_best < fp && t_best != 0.0) {
      for (std::size_t i = 0; i < p.size(); ++i) p[i] += t_best * dir[i];
      fp = g_best;
    }
  }

 private:
  template <class G>
  void brent(double ax, double bx, double cx, double fbx, G&& g, double& tmin, double& fmin) {
    constexpr double kCGold = 0.3819660112501051;
    constexpr double kZeps = 1e-12;
    constexpr double kTol = 1e-7;
    double a = std::min(ax, cx), b = std::max(ax, cx);
    double x = bx, w = bx, v = bx;
    double fx = fbx, fw = fbx, fv = fbx;
    double d = 0.0, e = 0.0;
    for (int iter = 0; iter < 60; ++iter) {
      const double xm = 0.5 * (a + b);
      const double tol1 = kTol * std::abs(x) + kZeps;
      const double tol2 = 2.0 * tol1;
      if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) break;
      bool parabolic = false;
      if (std::abs(e) > tol1) {
        const double r = (x - w) * (fx - fv);
        double q = (x - v) * (fx - fw);
        double pn = (x - v) * q - (x - w) * r;
        q = 2.0 * (q - r);
        if (q > 0.0) pn = -pn;
        q = std::abs(q);
        const double etemp = e;
        e = d;
        if (std::abs(pn) < std::abs(0.5 * q * etemp) && pn > q * (a - x) && pn < q * (b - x)) {
          parabolic = true;
          d = pn / q;
          const double u = x + d;
          if (u - a < tol2 || b - u < tol2) d = (xm - x >= 0.0 ? tol1 : -tol1);
        }
      }
      if (!parabolic) {
        e = (x >= xm ? a - x : b - x);
        d = kCGold * e;
      }
      const double u = (std::abs(d) >= tol1 ? x + d : x + (d >= 0.0 ? tol1 : -tol1));
      const double fu = g(u);
      if (fu <= fx) {
        if (u >= x)
          a = x;
        else
          b = x;
        v = w;
        fv = fw;
        w = x;
        fw = fx;
        x = u;
        fx = fu;
      } else {
        if (u < x)
          a = u;
        else
          b = u;
        if (fu <= fw || w == x) {
          v = w;
          fv = fw;
          w = u;
          fw = fu;
        } else if (fu <= fv || v == x || v == w) {
          v = u;
          fv = fu;
        }
      }
    }
    tmin = x;
    fmin = fx;
  }

  std::vector<double> trial_;
};

}  // namespace detail

// Powell's direction-set minimization: cycle of line minimizations along a
// maintained direction set, replacing the direction of largest decrease by
// the cycle displacement when the standard acceptance test passes.
inline PowellResult powell_minimize(const Objective& objective, std::vector<double> start,
                                    const OptimizationConfig& config) {
  detail::validate_config(config);
  const std::size_t dim = start.size();
  if (dim == 0) throw std::invalid_argument("powell_minimize: empty start point");

  long long evaluations = 0;
  auto eval = [&](std::span<const double> p) {
    ++evaluations;
    return objective(p);
  };

  std::vector<std::vector<double>> dirs(dim, std::vector<double>(dim, 0.0));
  for (std::size_t i = 0; i < dim; ++i) dirs[i][i] = 1.0;

  std::vector<double> p = std::move(start);
  double fp = eval(p);
  if (!std::isfinite(fp)) throw std::invalid_argument("powell_minimize: objective not finite at start");

  detail::LineMinimizer line(dim);
  std::vector<double> p0(dim), pe(dim), dnew(dim);
  bool converged = false;
  int iter = 0;
  while (iter < config.max_iterations) {
    ++iter;
    p0 = p;
    const double f0 = fp;
    double biggest = 0.0;
    std::size_t ibig = 0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double fprev = fp;
      line.minimize(p, dirs[i], fp, eval);
      if (fprev - fp > biggest) {
        biggest = fprev - fp;
        ibig = i;
      }
    }
    if (2.0 * (f0 - fp) <= config.rel_tolerance * (std::abs(f0) + std::abs(fp)) + 1e-25) {
      converged = true;
      break;
    }
    for (std::size_t i = 0; i < dim; ++i) {
      pe[i] = 2.0 * p[i] - p0[i];
      dnew[i] = p[i] - p0[i];
    }
    const double fe = eval(pe);
    if (fe < f0) {
      const double t = 2.0 * (f0 - 2.0 * fp + fe) * (f0 - fp - biggest) * (f0 - fp - biggest) -
                       biggest * (f0 - fe) * (f0 - fe);
      if (t < 0.0) {
        line.minimize(p, dnew, fp, eval);
        dirs[ibig] = dirs[dim - 1];
        dirs[dim - 1] = dnew;
      }
    }
  }
  return PowellResult{std::move(p), fp, converged, iter, evaluations};
}

namespace detail {

// Objective state for one optimization task: buffers plus the shared engine.
class BoundObjective {
 public:
  BoundObjective(const ReductionEngine& engine, bool tie_bob)
      : engine_(engine),
        tie_(tie_bob),
        dim_(engine.dim()),
        u0_(dim_),
        u1_(dim_),
        v0_(dim_),
        v1_(dim_),
        sign_(dim_) {
    for (std::size_t b = 0; b < dim_; ++b) sign_[b] = (std::popcount(b) & 1u) ? -1.0 : 1.0;
  }

  std::size_t parameter_count() const { return (tie_ ? 2 : 4) * dim_; }

  // Returns -M; degenerate projections and dead post-selections score +1 so
  // a descending line search always rejects them.
  double operator()(std::span<const double> p) {
    if (!orthonormalize_into(p.subspan(0, dim_), p.subspan(dim_, dim_), u0_, u1_)) return 1.0;
    if (tie_) {
      for (std::size_t b = 0; b < dim_; ++b) {
        v0_[b] = sign_[b] * u0_[b];
        v1_[b] = -sign_[b] * u1_[b];
      }
    } else {
      if (!orthonormalize_into(p.subspan(2 * dim_, dim_), p.subspan(3 * dim_, dim_), v0_, v1_))
        return 1.0;
    }
    const double tr = engine_.reduce_raw(u0_, u1_, v0_, v1_, ws_, unnorm_);
    if (tr < 1e-14) return 1.0;
    Matrix4c rho;
    for (int i = 0; i < 16; ++i) rho.e[i] = unnorm_[i] / tr;
    Mat3 t;
    correlation_from_entries(rho, t);
    return -m_from_correlation(t);
  }

  RowPair rows_from(std::span<const double> p) const {
    return orthonormalize(p.subspan(0, dim_), p.subspan(dim_, dim_));
  }

  RowPair partner_from(std::span<const double> p) const {
    if (tie_) return tie_partner_rows(rows_from(p));
    return orthonormalize(p.subspan(2 * dim_, dim_), p.subspan(3 * dim_, dim_));
  }

 private:
  const ReductionEngine& engine_;
  bool tie_;
  std::size_t dim_;
  std::vector<double> u0_, u1_, v0_, v1_, sign_;
  ReductionEngine::Workspace ws_;
  std::array<double, 16> unnorm_{};
};

inline std::vector<double> xor_warm_start(int n, bool tie_bob) {
  const std::size_t dim = std::size_t{1} << n;
  std::vector<double> p((tie_bob ? 2 : 4) * dim, 0.0);
  p[0] = 1.0;                  // u0 = e_0
  p[dim + dim - 1] = 1.0;      // u1 = e_{2^n - 1}
  if (!tie_bob) {
    const RowPair v = tie_partner_rows(xor_rows(n));
    for (std::size_t i = 0; i < dim; ++i) {
      p[2 * dim + i] = v.u0()[i];
      p[3 * dim + i] = v.u1()[i];
    }
  }
  return p;
}

}  // namespace detail

// Multi-start Powell maximization of M over row pairs for n identical Werner
// pairs. Bob's rows are tied through the partner formula unless
// config.tie_bob is false, in which case they are independently
// parameterized. Deterministic for a fixed config regardless of thread count.
inline OptimizationResult maximize_bound(int n, SingletFraction x,
                                         const OptimizationConfig& config = {}) {
  if (n < 1 || n > 5) throw std::invalid_argument("maximize_bound: n must be in [1, 5]");
  detail::validate_config(config);

  const std::vector<TwoQubitDensity> pairs(static_cast<std::size_t>(n), make_werner(x));
  const ReductionEngine engine(pairs);
  const std::size_t dim = engine.dim();
  const std::size_t parameters = (config.tie_bob ? 2 : 4) * dim;

  struct Task {
    std::vector<double> start;
  };
  std::vector<Task> tasks;
  tasks.reserve(static_cast<std::size_t>(config.restarts) + 1);
  if (config.include_xor_warm_start)
    tasks.push_back(Task{detail::xor_warm_start(n, config.tie_bob)});
  for (int r = 1; r <= config.restarts; ++r) {
    std::mt19937_64 rng = make_engine(substream_seed(config.seed, static_cast<std::uint64_t>(r)));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> p(parameters);
    bool ok = false;
    for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
      for (double& v : p) v = normal(rng);
      std::vector<double> s0(dim), s1(dim);
      std::span<const double> sp(p);
      ok = detail::orthonormalize_into(sp.subspan(0, dim), sp.subspan(dim, dim), s0, s1);
      if (ok && !config.tie_bob)
        ok = detail::orthonormalize_into(sp.subspan(2 * dim, dim), sp.subspan(3 * dim, dim), s0,
                                         s1);
    }
    if (!ok)
      throw row_degeneracy_error("maximize_bound: could not sample a non-degenerate start");
    tasks.push_back(Task{std::move(p)});
  }

  struct TaskResult {
    double m = 0.0;
    std::vector<double> point;
    long long evaluations = 0;
  };
  std::vector<TaskResult> results(tasks.size());

  auto run_task = [&](std::size_t idx) {
    detail::BoundObjective objective(engine, config.tie_bob);
    Objective fn = [&objective](std::span<const double> p) { return objective(p); };
    PowellResult res = powell_minimize(fn, tasks[idx].start, config);
    results[idx] = TaskResult{std::max(0.0, -res.value), std::move(res.point), res.evaluations};
  };

  const int workers =
      std::min<int>(detail::thread_count(), static_cast<int>(tasks.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) run_task(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1))
          run_task(i);
      });
    for (std::thread& th : pool) th.join();
  }

  std::vector<double> restart_values;
  restart_values.reserve(results.size());
  long long evaluations = 0;
  std::size_t best = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    restart_values.push_back(2.0 * std::sqrt(results[i].m));
    evaluations += results[i].evaluations;
    if (results[i].m > results[best].m) best = i;  // ties keep the lowest index
  }

  detail::BoundObjective reconstruct(engine, config.tie_bob);
  RowPair best_rows = reconstruct.rows_from(results[best].point);
  RowPair best_partner = reconstruct.partner_from(results[best].point);
  const double bound = 2.0 * std::sqrt(results[best].m);
  const StrategyLabel label = bound <= xor_bound_closed_form(n, x) + 1e-7
                                  ? StrategyLabel::xor_equivalent
                                  : StrategyLabel::general;
  return OptimizationResult{std::move(best_rows), std::move(best_partner),
                            BellBound(results[best].m, bound), std::move(restart_values), label,
                            evaluations};
}

enum class SweepStrategy { XorOnly, Optimize, Both };

struct SweepRow {
  int n = 0;
  double x = 0.0;
  double xor_bound = 0.0;
  double xor_success_probability = 0.0;
  std::optional<double> opt_bound;
  std::optional<double> opt_success_probability;
  std::optional<StrategyLabel> opt_label;
  bool opt_failed = false;
  std::string opt_failure;
};

// One row per (n, x) in lexicographic order; optimizer failures are recorded
// per row without aborting the sweep.
inline std::vector<SweepRow> sweep(std::span<const int> ns, std::span<const double> x_grid,
                                   const OptimizationConfig& config, SweepStrategy strategy) {
  if (ns.empty() || x_grid.empty()) throw std::invalid_argument("sweep: grids must be nonempty");
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] < 1) throw std::invalid_argument("sweep: n must be >= 1");
    if (i > 0 && ns[i] <= ns[i - 1]) throw std::invalid_argument("sweep: ns must be increasing");
  }
  for (std::size_t i = 1; i < x_grid.size(); ++i)
    if (x_grid[i] < x_grid[i - 1]) throw std::invalid_argument("sweep: x grid must be sorted");

  std::vector<SweepRow> rows;
  rows.reserve(ns.size() * x_grid.size());
  for (int n : ns)
    for (double xv : x_grid) {
      const SingletFraction x(xv);
      SweepRow row;
      row.n = n;
      row.x = xv;
      row.xor_bound = xor_bound_closed_form(n, x);
      row.xor_success_probability = xor_reduced_closed_form(n, x).success_probability;
      if (strategy != SweepStrategy::XorOnly) {
        try {
          const OptimizationResult res = maximize_bound(n, x, config);
          const std::vector<TwoQubitDensity> pairs(static_cast<std::size_t>(n), make_werner(x));
          row.opt_bound = res.bell.bound;
          row.opt_success_probability =
              reduce_pairs(pairs, res.best_rows, res.best_partner).success_probability;
          row.opt_label = res.strategy_label;
        } catch (const std::exception& e) {
          row.opt_failed = true;
          row.opt_failure = e.what();
        }
      }
      rows.push_back(std::move(row));
    }
  return rows;
}

// Smallest x (on a bisection grid of resolution <= 0.005) where the optimized
// bound exceeds the XOR closed form by more than tol. n=2 is accepted as a
// diagnostic; no crossover exists there.
inline std::optional<double> crossover(int n, const OptimizationConfig& config,
                                       double tol = 1e-4) {
  if (n < 2 || n > 4) throw std::invalid_argument("crossover: n must be 2, 3 or 4");
  detail::validate_config(config);
  if (!(tol > 0.0)) throw std::invalid_argument("crossover: tol must be > 0");

  auto exceeds = [&](double xv) {
    const SingletFraction x(xv);
    const OptimizationResult res = maximize_bound(n, x, config);
    return res.bell.bound > xor_bound_closed_form(n, x) + tol;
  };

  const std::array<double, 8> probes{0.45, 0.50, 0.55, 0.60, 0.65, 0.70, 0.80, 0.90};
  std::optional<double> hi;
  double lo = 0.0;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    if (exceeds(probes[i])) {
      hi = probes[i];
      lo = (i == 0) ? 0.0 : probes[i - 1];
      break;
    }
    lo = probes[i];
  }
  if (!hi) return std::nullopt;
  if (lo == 0.0 && *hi == probes.front()) {
    // Crossover below the probe grid; extend the scan left.
    for (double probe : {0.35, 0.25, 0.15, 0.05}) {
      if (!exceeds(probe)) {
        lo = probe;
        break;
      }
      hi = probe;
    }
  }
  while (*hi - lo > 0.005) {
    const double mid = 0.5 * (lo + *hi);
    if (exceeds(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace collchsh
