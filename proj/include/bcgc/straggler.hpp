#ifndef BCGC_STRAGGLER_HPP
#define BCGC_STRAGGLER_HPP

#include <Eigen/Dense>
#include <cstdint>

#include "bcgc/rng.hpp"

namespace bcgc {

// Shifted-exponential CPU cycle time model: Pr[T <= t] = 1 - e^{-mu (t - t0)}
// for t >= t0. Worker times are i.i.d. draws from this law.
class StragglerDistribution {
  public:
    StragglerDistribution(double mu, double t0);

    double mu() const { return mu_; }
    double t0() const { return t0_; }
    double mean() const { return 1.0 / mu_ + t0_; }

    // Inverse-CDF sample; bit-deterministic given the stream state.
    double sample(RngStream& rng) const;

  private:
    double mu_;
    double t0_;
};

// One realization of the N workers' cycle times.
struct WorkerDraw {
    Eigen::VectorXd times;

    explicit WorkerDraw(Eigen::VectorXd t);
    int n_workers() const { return static_cast<int>(times.size()); }
};

// Ascending copy of the draw; T(n) is the n-th smallest entry.
Eigen::VectorXd sorted_times(const WorkerDraw& draw);

WorkerDraw sample_draw(const StragglerDistribution& dist, int n_workers,
                       RngStream& rng);

// t_n = E[T_(n)] = (H_N - H_{N-n})/mu + t0, n = 1..N.
Eigen::VectorXd order_stat_means(const StragglerDistribution& dist, int n_workers);

// t'_n = 1 / E[1/T_(n)], n = 1..N, by adaptive quadrature of the
// order-statistic density. Requires t0 > 0. This is the production path.
Eigen::VectorXd order_stat_harmonic_means(const StragglerDistribution& dist,
                                          int n_workers);

// Same quantity through the closed form: an alternating binomial sum of
// exponential-integral terms. Numerically safe only for small N (the
// binomial coefficients amplify cancellation); kept as a cross-check.
Eigen::VectorXd order_stat_harmonic_means_series(const StragglerDistribution& dist,
                                                 int n_workers);

// Both order-statistic summaries together, validated: positive,
// nondecreasing, and t' <= t componentwise.
struct OrderStatSummary {
    Eigen::VectorXd t_mean;
    Eigen::VectorXd t_harmonic;
};

OrderStatSummary order_stat_summary(const StragglerDistribution& dist,
                                    int n_workers);

// Monte Carlo estimates of E[T_(n)] and E[1/T_(n)] with standard errors.
// Generic path for distributions only reachable through sampling.
struct OrderStatMcEstimate {
    Eigen::VectorXd mean;          // per-rank sample mean of T_(n)
    Eigen::VectorXd se;            // standard error of that mean
    Eigen::VectorXd inv_mean;      // sample mean of 1/T_(n)
    Eigen::VectorXd inv_se;
    long n_draws = 0;
};

OrderStatMcEstimate mc_order_stat_summary(const StragglerDistribution& dist,
                                          int n_workers, long n_draws,
                                          RngStream& rng);

} // namespace bcgc

#endif
