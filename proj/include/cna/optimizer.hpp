#pragma once

// Restart-based maximization of the Cabello fraction (and the Hardy
// probability) over normalized state matrices. The measurement bases are not
// free parameters: the ladder fixes them for every candidate state.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "cna/errors.hpp"
#include "cna/fixtures.hpp"
#include "cna/nelder_mead.hpp"
#include "cna/scenario.hpp"

namespace cna {

struct OptimizerConfig {
  int restarts = 64;
  int max_iterations = 20000;  // simplex iterations per restart, all polishing rounds included
  double tolerance = 1e-12;
  std::uint64_t seed = 0x5eed;
  bool allow_complex = false;
  bool warm_start = true;  // seed restart 0 at the matching published state, if any
  unsigned threads = 0;    // 0: hardware concurrency

  void validate() const {
    if (restarts < 1) throw InvalidArgument("restarts must be >= 1");
    if (max_iterations < 1) throw InvalidArgument("max_iterations must be >= 1");
    if (!(tolerance > 0.0)) throw InvalidArgument("tolerance must be > 0");
  }
};

struct OptimizationResult {
  Scenario scenario;
  StateMatrix best_state;
  double best_fraction = 0.0;
  std::vector<double> per_restart_values;
  std::vector<int> iterations_used;
  int failed_restarts = 0;
  double wall_time = 0.0;  // seconds
};

/// Practical envelope for the search.
inline void check_envelope(int k, int d) {
  if (k < 2 || k > 8) throw InvalidArgument("optimizer supports 2 <= k <= 8, got " + std::to_string(k));
  if (d < 2 || d > 6) throw InvalidArgument("optimizer supports 2 <= d <= 6, got " + std::to_string(d));
}

namespace detail {

inline constexpr double kInfeasible = 2.0;  // above any attainable -fraction

inline StateMatrix decode_state(const Eigen::VectorXd& x, int d, bool complex_entries) {
  ComplexMatrix h(d, d);
  const Eigen::Index dd = static_cast<Eigen::Index>(d) * d;
  for (Eigen::Index i = 0; i < dd; ++i) {
    const double re = x(i);
    const double im = complex_entries ? x(dd + i) : 0.0;
    h(i / d, i % d) = Complex(re, im);
  }
  return StateMatrix::normalized(h);
}

inline Eigen::VectorXd encode_state(const StateMatrix& s, bool complex_entries) {
  const int d = s.dim();
  const Eigen::Index dd = static_cast<Eigen::Index>(d) * d;
  Eigen::VectorXd x(complex_entries ? 2 * dd : dd);
  for (Eigen::Index i = 0; i < dd; ++i) {
    x(i) = s.h()(i / d, i % d).real();
    if (complex_entries) x(dd + i) = s.h()(i / d, i % d).imag();
  }
  return x;
}

struct RestartOutcome {
  double value = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd x;
  int iterations = 0;
  bool feasible = false;
};

/// One restart: a simplex descent followed by polishing rounds from the best point.
template <class Objective>
RestartOutcome run_restart(const Objective& objective, Eigen::VectorXd x0,
                           const OptimizerConfig& cfg) {
  RestartOutcome out;
  NelderMeadOptions opt;
  opt.f_tolerance = cfg.tolerance;
  opt.x_tolerance = 1e-9;
  opt.initial_step = 0.15;
  int budget = cfg.max_iterations;
  double best_f = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_x = x0;
  for (int round = 0; round < 8 && budget > 0; ++round) {
    opt.max_iterations = budget;
    auto r = nelder_mead(objective, best_x, opt);
    budget -= r.iterations;
    out.iterations += r.iterations;
    const bool improved = r.f < best_f - cfg.tolerance;
    if (r.f < best_f) {
      best_f = r.f;
      best_x = r.x / r.x.norm();
    }
    if (!improved && round > 0) break;
    opt.initial_step = std::max(opt.initial_step * 0.3, 1e-4);
  }
  out.x = best_x;
  out.feasible = best_f < kInfeasible;
  out.value = -best_f;
  return out;
}

inline std::mt19937_64 restart_stream(std::uint64_t seed, int restart) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(restart)};
  return std::mt19937_64(seq);
}

/// Maximizes value(state) over restarts; value may throw cna::Error for
/// states where the ladder breaks down.
inline OptimizationResult maximize(const Scenario& scenario, const OptimizerConfig& cfg,
                                   const std::function<double(const StateMatrix&)>& value,
                                   const StateMatrix* warm) {
  cfg.validate();
  const auto started = std::chrono::steady_clock::now();
  const int d = scenario.d;
  const bool cplx = cfg.allow_complex;
  const Eigen::Index dims = static_cast<Eigen::Index>(d) * d * (cplx ? 2 : 1);

  auto objective = [&](const Eigen::VectorXd& x) {
    if (!x.allFinite() || x.norm() < 1e-12) return kInfeasible;
    try {
      return -value(decode_state(x, d, cplx));
    } catch (const Error&) {
      return kInfeasible;
    }
  };

  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(cfg.restarts));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next++; r < cfg.restarts; r = next++) {
      Eigen::VectorXd x0(dims);
      if (r == 0 && warm != nullptr) {
        x0 = encode_state(*warm, cplx);
      } else {
        auto rng = restart_stream(cfg.seed, r);
        std::normal_distribution<double> normal;
        for (Eigen::Index i = 0; i < dims; ++i) x0(i) = normal(rng);
        x0 /= x0.norm();
      }
      outcomes[static_cast<std::size_t>(r)] = run_restart(objective, x0, cfg);
    }
  };
  unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(cfg.restarts));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  OptimizationResult result;
  result.scenario = scenario;
  int best = -1;
  for (int r = 0; r < cfg.restarts; ++r) {
    const auto& o = outcomes[static_cast<std::size_t>(r)];
    result.iterations_used.push_back(o.iterations);
    if (!o.feasible) {
      ++result.failed_restarts;
      result.per_restart_values.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    result.per_restart_values.push_back(o.value);
    if (best < 0 || o.value > outcomes[static_cast<std::size_t>(best)].value) best = r;
  }
  if (best < 0) {
    throw OptimizationError("all " + std::to_string(cfg.restarts) +
                            " restarts failed: the ladder was degenerate at every iterate");
  }
  result.best_state = decode_state(outcomes[static_cast<std::size_t>(best)].x, d, cplx);
  result.best_fraction = outcomes[static_cast<std::size_t>(best)].value;
  result.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace detail

inline OptimizationResult maximize_cabello(const Scenario& scenario, const OptimizerConfig& cfg) {
  scenario.validate();
  check_envelope(scenario.k, scenario.d);
  const fixtures::StateFixture* fixture = cfg.warm_start ? fixtures::find_state(scenario) : nullptr;
  const StateMatrix warm = fixture ? fixture->state() : StateMatrix{};
  return detail::maximize(
      scenario, cfg, [&](const StateMatrix& s) { return fraction_only(scenario, s); },
      fixture ? &warm : nullptr);
}

/// J is ignored; the result's scenario carries J = 1 as a placeholder.
inline OptimizationResult maximize_hardy(const Scenario& scenario, const OptimizerConfig& cfg) {
  Scenario s{scenario.k, scenario.d, 1};
  s.validate();
  check_envelope(s.k, s.d);
  return detail::maximize(
      s, cfg, [k = s.k](const StateMatrix& st) { return hardy_probability(k, st); }, nullptr);
}

struct JScanEntry {
  int J;
  double fraction;
};

/// Maximal fraction for J = 1..k; J > k mirrors J' = 2k - J.
inline std::vector<JScanEntry> scan_J(int k, int d, const OptimizerConfig& cfg) {
  std::vector<JScanEntry> out;
  for (int J = 1; J <= k; ++J) {
    out.push_back({J, maximize_cabello(Scenario::make(k, d, J), cfg).best_fraction});
  }
  return out;
}

}  // namespace cna
