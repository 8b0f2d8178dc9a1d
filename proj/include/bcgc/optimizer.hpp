#ifndef BCGC_OPTIMIZER_HPP
#define BCGC_OPTIMIZER_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <utility>

#include "bcgc/mc.hpp"
#include "bcgc/runtime.hpp"
#include "bcgc/straggler.hpp"

namespace bcgc {

struct SubgradientConfig {
    int max_iters = 4000;
    // eta_k = step_constant / sqrt(k); when unset, defaults to
    // L / (E[T_(N)] * (M/N) * b * N), a subgradient-magnitude normalization.
    std::optional<double> step_constant;
    int batch = 1; // draws averaged per iteration
    std::uint64_t seed = 0;

    int eval_period = 100;      // running-best refresh cadence, in iterations
    int selection_draws = 512;  // common-random-number draws per refresh
    int final_eval_draws = 10000;
};

struct SolveReport {
    BlockAllocation allocation; // relaxed
    RuntimeEstimate objective;
    int iterations_used = 0;
};

// Euclidean projection onto { x >= 0, sum x = total }: x_i = max(v_i - nu, 0)
// with the level nu located by bisection.
Eigen::VectorXd project_onto_simplex(const Eigen::VectorXd& v, double total);

// A subgradient of tau_hat(., T) at alloc: with n* the smallest maximizer of
// the inner terms, g_i = (M/N) b T_(N-n*) (i+1) for i <= n*, else 0.
Eigen::VectorXd noisy_subgradient(const BlockAllocation& alloc,
                                  const WorkerDraw& draw, const SystemConfig& cfg);

// Stochastic projected subgradient descent on E[tau_hat(x, T)] over the
// relaxed feasible set. Tracks the best iterate on a fixed evaluation draw
// set and re-estimates the winner on fresh draws for the report.
SolveReport solve_subgradient(const SystemConfig& cfg,
                              const StragglerDistribution& dist,
                              const SubgradientConfig& sg);

// Closed-form minimizer of tau_hat(x, t) for a deterministic time vector t:
//   x_0 = m/t_N,  x_n = m/(n+1) (1/t_{N-n} - 1/t_{N+1-n}),
//   m   = L / ( sum_{n=1}^{N-1} 1/(n(n+1) t_{N+1-n}) + 1/(N t_1) ).
// All N inner terms of tau_hat equalize at m.
BlockAllocation closed_form_t(const SystemConfig& cfg, const Eigen::VectorXd& t);

// Same formula driven by the harmonic order-statistic means t'.
BlockAllocation closed_form_f(const SystemConfig& cfg,
                              const Eigen::VectorXd& t_prime);

// Deterministic rounding stage: floor everything, then hand the remaining
// units to the largest fractional parts (ties to the larger level index).
BlockAllocation round_largest_remainder(const BlockAllocation& alloc,
                                        const SystemConfig& cfg);

// Full rounding: largest-remainder start, then 1-opt single-unit transfers
// accepted only when they lower the Monte Carlo objective on a common
// random-number draw set of the given size.
BlockAllocation round_allocation(const BlockAllocation& alloc,
                                 const SystemConfig& cfg,
                                 const StragglerDistribution& dist,
                                 int eval_draws, std::uint64_t seed);

// Best single-block scheme: evaluates x = L e_n for every level n over a
// common draw set and returns the minimizer (ties to the smaller level).
BlockAllocation solve_single_block(const SystemConfig& cfg,
                                   const StragglerDistribution& dist,
                                   int eval_draws, std::uint64_t seed);

// Analytic upper bounds on the multiplicative optimality gaps of the two
// closed-form approximations under the shifted-exponential model:
//   first  (H_N+1)(H_N + mu t0) / (mu t0)^2,
//   second  H_N/(mu t0) + 1.
std::pair<double, double> gap_bounds(int n_workers,
                                     const StragglerDistribution& dist);

} // namespace bcgc

#endif
