#include "bcgc/straggler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bcgc/quadrature.hpp"
#include "bcgc/special_functions.hpp"

namespace bcgc {

StragglerDistribution::StragglerDistribution(double mu, double t0)
    : mu_(mu), t0_(t0) {
    if (!(mu > 0.0) || !std::isfinite(mu))
        throw std::invalid_argument("StragglerDistribution: mu must be > 0");
    if (!(t0 >= 0.0) || !std::isfinite(t0))
        throw std::invalid_argument("StragglerDistribution: t0 must be >= 0");
}

double StragglerDistribution::sample(RngStream& rng) const {
    const double u = uniform01(rng); // [0,1)
    return t0_ - std::log1p(-u) / mu_;
}

WorkerDraw::WorkerDraw(Eigen::VectorXd t) : times(std::move(t)) {
    if (times.size() < 1)
        throw std::invalid_argument("WorkerDraw: need at least one worker");
    for (Eigen::Index i = 0; i < times.size(); ++i)
        if (!(times[i] > 0.0) || !std::isfinite(times[i]))
            throw std::invalid_argument("WorkerDraw: times must be positive and finite");
}

Eigen::VectorXd sorted_times(const WorkerDraw& draw) {
    Eigen::VectorXd s = draw.times;
    std::sort(s.begin(), s.end());
    return s;
}

WorkerDraw sample_draw(const StragglerDistribution& dist, int n_workers,
                       RngStream& rng) {
    if (n_workers < 1)
        throw std::invalid_argument("sample_draw: n_workers must be >= 1");
    Eigen::VectorXd t(n_workers);
    for (int i = 0; i < n_workers; ++i) t[i] = dist.sample(rng);
    return WorkerDraw(std::move(t));
}

Eigen::VectorXd order_stat_means(const StragglerDistribution& dist, int n_workers) {
    if (n_workers < 1)
        throw std::invalid_argument("order_stat_means: n_workers must be >= 1");
    const int n = n_workers;
    const double hn = harmonic_number(n);
    Eigen::VectorXd t(n);
    for (int k = 1; k <= n; ++k)
        t[k - 1] = (hn - harmonic_number(n - k)) / dist.mu() + dist.t0();
    return t;
}

namespace {

// E[1/T_(n)] = int_0^1 mu/(a - ln x) * Beta(x; N-n+1, n) dx with a = mu*t0,
// after the substitution x = e^{-mu (t - t0)}. The beta density is evaluated
// in log space so large-N binomials never materialize.
double inverse_order_stat_mean(int n_workers, int n, double mu, double a) {
    const int N = n_workers;
    const double log_norm =
        std::log(static_cast<double>(n)) + log_binomial(N, n);
    auto integrand = [=](double x) -> double {
        if (x <= 0.0 || x >= 1.0) return 0.0;
        const double lx = std::log(x);
        const double log_density =
            log_norm + (N - n) * lx + (n - 1) * std::log1p(-x);
        return std::exp(log_density) * mu / (a - lx);
    };
    return integrate(integrand, 0.0, 1.0, 1e-12, 1e-300);
}

} // namespace

Eigen::VectorXd order_stat_harmonic_means(const StragglerDistribution& dist,
                                          int n_workers) {
    if (n_workers < 1)
        throw std::invalid_argument("order_stat_harmonic_means: n_workers must be >= 1");
    if (!(dist.t0() > 0.0))
        throw std::invalid_argument(
            "order_stat_harmonic_means: t0 must be > 0 (E[1/T] diverges at t0 = 0)");
    const double a = dist.mu() * dist.t0();
    Eigen::VectorXd tp(n_workers);
    for (int n = 1; n <= n_workers; ++n)
        tp[n - 1] = 1.0 / inverse_order_stat_mean(n_workers, n, dist.mu(), a);
    return tp;
}

Eigen::VectorXd order_stat_harmonic_means_series(const StragglerDistribution& dist,
                                                 int n_workers) {
    if (n_workers < 1)
        throw std::invalid_argument(
            "order_stat_harmonic_means_series: n_workers must be >= 1");
    if (!(dist.t0() > 0.0))
        throw std::invalid_argument(
            "order_stat_harmonic_means_series: t0 must be > 0");
    const int N = n_workers;
    const double a = dist.mu() * dist.t0();
    Eigen::VectorXd tp(N);
    for (int n = 1; n <= N; ++n) {
        // 1/t'_n = -mu n C(N,n) sum_{i=0}^{n-1} (-1)^i C(n-1,i)
        //          e^{a(N-n+1+i)} Ei(-a(N-n+1+i))
        double sum = 0.0;
        double binom = 1.0; // C(n-1, i), updated incrementally
        for (int i = 0; i < n; ++i) {
            const double z = a * (N - n + 1 + i);
            const double term = binom * exp_scaled_exponential_integral(z);
            sum += (i % 2 == 0) ? term : -term;
            binom = binom * (n - 1 - i) / (i + 1);
        }
        const double coeff =
            dist.mu() * n * std::exp(log_binomial(N, n));
        tp[n - 1] = 1.0 / (-coeff * sum);
    }
    return tp;
}

OrderStatSummary order_stat_summary(const StragglerDistribution& dist,
                                    int n_workers) {
    OrderStatSummary s{order_stat_means(dist, n_workers),
                       order_stat_harmonic_means(dist, n_workers)};
    for (int i = 0; i < n_workers; ++i) {
        if (!(s.t_mean[i] > 0.0) || !(s.t_harmonic[i] > 0.0))
            throw std::logic_error("order_stat_summary: nonpositive entry");
        if (s.t_harmonic[i] > s.t_mean[i] * (1.0 + 1e-12))
            throw std::logic_error("order_stat_summary: t' exceeds t");
        if (i > 0 && (s.t_mean[i] < s.t_mean[i - 1] ||
                      s.t_harmonic[i] < s.t_harmonic[i - 1]))
            throw std::logic_error("order_stat_summary: not nondecreasing");
    }
    return s;
}

OrderStatMcEstimate mc_order_stat_summary(const StragglerDistribution& dist,
                                          int n_workers, long n_draws,
                                          RngStream& rng) {
    if (n_workers < 1 || n_draws < 2)
        throw std::invalid_argument("mc_order_stat_summary: need N >= 1, draws >= 2");
    const int N = n_workers;
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(N);
    Eigen::VectorXd sum_sq = Eigen::VectorXd::Zero(N);
    Eigen::VectorXd inv_sum = Eigen::VectorXd::Zero(N);
    Eigen::VectorXd inv_sum_sq = Eigen::VectorXd::Zero(N);
    Eigen::VectorXd t(N);
    for (long d = 0; d < n_draws; ++d) {
        for (int i = 0; i < N; ++i) t[i] = dist.sample(rng);
        std::sort(t.begin(), t.end());
        for (int i = 0; i < N; ++i) {
            sum[i] += t[i];
            sum_sq[i] += t[i] * t[i];
            const double inv = 1.0 / t[i];
            inv_sum[i] += inv;
            inv_sum_sq[i] += inv * inv;
        }
    }
    OrderStatMcEstimate est;
    est.n_draws = n_draws;
    const double nd = static_cast<double>(n_draws);
    est.mean = sum / nd;
    est.inv_mean = inv_sum / nd;
    est.se.resize(N);
    est.inv_se.resize(N);
    for (int i = 0; i < N; ++i) {
        const double var = (sum_sq[i] - sum[i] * sum[i] / nd) / (nd - 1.0);
        const double inv_var =
            (inv_sum_sq[i] - inv_sum[i] * inv_sum[i] / nd) / (nd - 1.0);
        est.se[i] = std::sqrt(std::max(var, 0.0) / nd);
        est.inv_se[i] = std::sqrt(std::max(inv_var, 0.0) / nd);
    }
    return est;
}

} // namespace bcgc
