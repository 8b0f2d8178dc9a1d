#include "bcgc/runtime.hpp"

#include <cmath>
#include <stdexcept>

namespace bcgc {

SystemConfig::SystemConfig(int n_workers_, int model_size_, int n_samples_,
                           double cycles_per_coordinate_)
    : n_workers(n_workers_),
      model_size(model_size_),
      n_samples(n_samples_),
      cycles_per_coordinate(cycles_per_coordinate_) {
    if (n_workers < 1)
        throw std::invalid_argument("SystemConfig: n_workers must be >= 1");
    if (model_size < 1)
        throw std::invalid_argument("SystemConfig: model_size must be >= 1");
    if (n_samples < 1)
        throw std::invalid_argument("SystemConfig: n_samples must be >= 1");
    if (!(cycles_per_coordinate > 0.0))
        throw std::invalid_argument("SystemConfig: cycles_per_coordinate must be > 0");
}

void SystemConfig::require_even_split() const {
    if (n_samples % n_workers != 0)
        throw std::invalid_argument(
            "SystemConfig: n_workers must divide n_samples for sample allocation");
}

CodingProfile::CodingProfile(Eigen::VectorXi s_, int n_workers) : s(std::move(s_)) {
    if (s.size() < 1)
        throw std::invalid_argument("CodingProfile: empty profile");
    for (Eigen::Index l = 0; l < s.size(); ++l)
        if (s[l] < 0 || s[l] > n_workers - 1)
            throw std::invalid_argument(
                "CodingProfile: tolerance entries must lie in {0, ..., N-1}");
}

bool CodingProfile::is_sorted() const {
    for (Eigen::Index l = 1; l < s.size(); ++l)
        if (s[l] < s[l - 1]) return false;
    return true;
}

BlockAllocation::BlockAllocation(Eigen::VectorXd x_, bool integral_)
    : x(std::move(x_)), integral(integral_) {
    if (x.size() < 1)
        throw std::invalid_argument("BlockAllocation: empty allocation");
    for (Eigen::Index n = 0; n < x.size(); ++n) {
        if (!(x[n] >= 0.0) || !std::isfinite(x[n]))
            throw std::invalid_argument("BlockAllocation: entries must be >= 0");
        if (integral && x[n] != std::floor(x[n]))
            throw std::invalid_argument(
                "BlockAllocation: integral flag set but entries are fractional");
    }
}

namespace {

void check_alloc_against(const BlockAllocation& alloc, const SystemConfig& cfg) {
    if (alloc.n_levels() != cfg.n_workers)
        throw std::invalid_argument("allocation has wrong number of levels");
    const double L = cfg.model_size;
    const double tol = alloc.integral ? 0.0 : 1e-9 * L;
    if (std::fabs(alloc.total() - L) > tol)
        throw std::invalid_argument("allocation does not sum to the model size");
}

} // namespace

double runtime_tau(const CodingProfile& profile, const WorkerDraw& draw,
                   const SystemConfig& cfg) {
    const int N = cfg.n_workers;
    if (draw.n_workers() != N)
        throw std::invalid_argument("runtime_tau: draw size does not match n_workers");
    if (profile.model_size() != cfg.model_size)
        throw std::invalid_argument("runtime_tau: profile size does not match model size");
    if (profile.max_level() > N - 1)
        throw std::invalid_argument("runtime_tau: profile level exceeds N-1");
    const Eigen::VectorXd sorted = sorted_times(draw);
    double prefix = 0.0;
    double worst = 0.0;
    for (int l = 0; l < profile.model_size(); ++l) {
        prefix += profile.s[l] + 1;
        worst = std::max(worst, sorted[N - profile.s[l] - 1] * prefix);
    }
    return cfg.work_scale() * worst;
}

double runtime_tau_hat(const BlockAllocation& alloc, const WorkerDraw& draw,
                       const SystemConfig& cfg) {
    if (draw.n_workers() != cfg.n_workers)
        throw std::invalid_argument("runtime_tau_hat: draw size does not match n_workers");
    check_alloc_against(alloc, cfg);
    return tau_hat_presorted(weighted_prefix(alloc.x), sorted_times(draw),
                             cfg.work_scale());
}

Eigen::VectorXd weighted_prefix(const Eigen::VectorXd& x) {
    Eigen::VectorXd prefix(x.size());
    double acc = 0.0;
    for (Eigen::Index n = 0; n < x.size(); ++n) {
        acc += (n + 1) * x[n];
        prefix[n] = acc;
    }
    return prefix;
}

Eigen::VectorXd tau_hat_inner_terms(const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& sorted) {
    const Eigen::Index N = x.size();
    if (sorted.size() != N)
        throw std::invalid_argument("tau_hat_inner_terms: size mismatch");
    const Eigen::VectorXd prefix = weighted_prefix(x);
    Eigen::VectorXd terms(N);
    for (Eigen::Index n = 0; n < N; ++n) terms[n] = sorted[N - n - 1] * prefix[n];
    return terms;
}

double tau_hat_presorted(const Eigen::VectorXd& prefix,
                         const Eigen::VectorXd& sorted, double work_scale) {
    const Eigen::Index N = prefix.size();
    double worst = 0.0;
    for (Eigen::Index n = 0; n < N; ++n)
        worst = std::max(worst, sorted[N - n - 1] * prefix[n]);
    return work_scale * worst;
}

BlockAllocation s_to_x(const CodingProfile& profile, int n_workers) {
    if (!profile.is_sorted())
        throw std::invalid_argument("s_to_x: profile must be sorted nondecreasing");
    if (profile.max_level() > n_workers - 1)
        throw std::invalid_argument("s_to_x: profile level exceeds N-1");
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n_workers);
    for (Eigen::Index l = 0; l < profile.s.size(); ++l) x[profile.s[l]] += 1.0;
    return BlockAllocation(std::move(x), true);
}

CodingProfile x_to_s(const BlockAllocation& alloc) {
    if (!alloc.integral)
        throw std::invalid_argument("x_to_s: allocation must be integral");
    const int N = alloc.n_levels();
    const long L = std::lround(alloc.total());
    if (L < 1) throw std::invalid_argument("x_to_s: allocation sums to zero");
    Eigen::VectorXi s(L);
    long l = 0;
    for (int n = 0; n < N; ++n)
        for (long c = 0; c < std::lround(alloc.x[n]); ++c) s[l++] = n;
    return CodingProfile(std::move(s), N);
}

} // namespace bcgc
