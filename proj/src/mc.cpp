#include "bcgc/mc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bcgc {

Eigen::MatrixXd sample_sorted_draws(const StragglerDistribution& dist,
                                    int n_workers, long n_draws, RngStream& rng) {
    if (n_workers < 1 || n_draws < 1)
        throw std::invalid_argument("sample_sorted_draws: need N >= 1, draws >= 1");
    Eigen::MatrixXd draws(n_draws, n_workers);
    for (long d = 0; d < n_draws; ++d) {
        for (int i = 0; i < n_workers; ++i) draws(d, i) = dist.sample(rng);
        std::sort(draws.row(d).begin(), draws.row(d).end());
    }
    return draws;
}

double mean_tau_hat(const Eigen::VectorXd& prefix,
                    const Eigen::MatrixXd& sorted_draws, double work_scale) {
    const Eigen::Index N = prefix.size();
    if (sorted_draws.cols() != N)
        throw std::invalid_argument("mean_tau_hat: draw width mismatch");
    double sum = 0.0;
    for (Eigen::Index d = 0; d < sorted_draws.rows(); ++d) {
        double worst = 0.0;
        for (Eigen::Index n = 0; n < N; ++n)
            worst = std::max(worst, sorted_draws(d, N - n - 1) * prefix[n]);
        sum += worst;
    }
    return work_scale * sum / static_cast<double>(sorted_draws.rows());
}

RuntimeEstimate estimate_on_sorted_draws(const BlockAllocation& alloc,
                                         const SystemConfig& cfg,
                                         const Eigen::MatrixXd& sorted_draws) {
    if (alloc.n_levels() != cfg.n_workers)
        throw std::invalid_argument("estimate_on_sorted_draws: level count mismatch");
    const long n = sorted_draws.rows();
    if (n < 2)
        throw std::invalid_argument("estimate_on_sorted_draws: need >= 2 draws");
    const Eigen::VectorXd prefix = weighted_prefix(alloc.x);
    const Eigen::Index N = prefix.size();
    double sum = 0.0, sum_sq = 0.0;
    for (long d = 0; d < n; ++d) {
        double worst = 0.0;
        for (Eigen::Index k = 0; k < N; ++k)
            worst = std::max(worst, sorted_draws(d, N - k - 1) * prefix[k]);
        const double tau = cfg.work_scale() * worst;
        sum += tau;
        sum_sq += tau * tau;
    }
    RuntimeEstimate est;
    est.n_draws = n;
    est.mean = sum / n;
    const double var = (sum_sq - sum * sum / n) / (n - 1.0);
    est.half_width_95 = 1.96 * std::sqrt(std::max(var, 0.0) / n);
    return est;
}

} // namespace bcgc
