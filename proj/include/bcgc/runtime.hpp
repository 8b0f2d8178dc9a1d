#ifndef BCGC_RUNTIME_HPP
#define BCGC_RUNTIME_HPP

#include <Eigen/Dense>

#include "bcgc/straggler.hpp"

namespace bcgc {

// System configuration: N workers, L gradient coordinates, M samples,
// b CPU cycles per coordinate per sample.
struct SystemConfig {
    int n_workers;
    int model_size;
    int n_samples;
    double cycles_per_coordinate;

    SystemConfig(int n_workers, int model_size, int n_samples,
                 double cycles_per_coordinate);

    // (M/N) * b, the common scale of all completion times.
    double work_scale() const {
        return cycles_per_coordinate * n_samples / n_workers;
    }

    // Sample allocation needs equal-size subsets; runtime evaluation does not.
    void require_even_split() const;
};

// Per-coordinate straggler tolerance s, each entry in {0, ..., N-1}.
// Entries need not be sorted; the optimizer only ever produces sorted ones.
struct CodingProfile {
    Eigen::VectorXi s;

    CodingProfile(Eigen::VectorXi s, int n_workers);
    int model_size() const { return static_cast<int>(s.size()); }
    int max_level() const { return s.maxCoeff(); }
    bool is_sorted() const;
};

// Block view of a sorted profile: x[n] coordinates tolerate n stragglers.
struct BlockAllocation {
    Eigen::VectorXd x;
    bool integral;

    BlockAllocation(Eigen::VectorXd x, bool integral);
    int n_levels() const { return static_cast<int>(x.size()); }
    double total() const { return x.sum(); }
};

// Overall runtime tau(s, T) = (M/N) b max_l { T_(N-s_l) sum_{i<=l} (s_i+1) }.
double runtime_tau(const CodingProfile& profile, const WorkerDraw& draw,
                   const SystemConfig& cfg);

// Block form tau_hat(x, T) = (M/N) b max_n { T_(N-n) sum_{i<=n} (i+1) x_i }.
double runtime_tau_hat(const BlockAllocation& alloc, const WorkerDraw& draw,
                       const SystemConfig& cfg);

// Running sums sum_{i<=n} (i+1) x_i, n = 0..N-1.
Eigen::VectorXd weighted_prefix(const Eigen::VectorXd& x);

// The N inner max terms T_(N-n) * prefix_n (no work_scale factor).
Eigen::VectorXd tau_hat_inner_terms(const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& sorted);

// Fast path for Monte Carlo loops: prefix and the sorted draw are
// precomputed by the caller.
double tau_hat_presorted(const Eigen::VectorXd& prefix,
                         const Eigen::VectorXd& sorted, double work_scale);

// Change of variables of the block transformation: x_n = #{l : s_l = n}.
// The profile must be sorted nondecreasing.
BlockAllocation s_to_x(const CodingProfile& profile, int n_workers);

// Inverse map s_l = min{ i : sum_{n<=i} x_n >= l }; requires integral x.
CodingProfile x_to_s(const BlockAllocation& alloc);

} // namespace bcgc

#endif
