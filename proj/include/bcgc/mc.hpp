#ifndef BCGC_MC_HPP
#define BCGC_MC_HPP

#include <Eigen/Dense>
#include <cstdint>

#include "bcgc/runtime.hpp"
#include "bcgc/straggler.hpp"

namespace bcgc {

struct RuntimeEstimate {
    double mean = 0.0;
    double half_width_95 = 0.0; // 1.96 * sample std / sqrt(n_draws)
    long n_draws = 0;
};

// n_draws x N matrix of i.i.d. worker draws, each row sorted ascending.
// Shared draw matrices are how common random numbers flow between schemes.
Eigen::MatrixXd sample_sorted_draws(const StragglerDistribution& dist,
                                    int n_workers, long n_draws, RngStream& rng);

// Sample mean of tau_hat over presorted draws; the cheap inner loop of every
// comparison (no confidence interval).
double mean_tau_hat(const Eigen::VectorXd& prefix,
                    const Eigen::MatrixXd& sorted_draws, double work_scale);

// Mean plus 95% confidence half-width over presorted draws.
RuntimeEstimate estimate_on_sorted_draws(const BlockAllocation& alloc,
                                         const SystemConfig& cfg,
                                         const Eigen::MatrixXd& sorted_draws);

} // namespace bcgc

#endif
