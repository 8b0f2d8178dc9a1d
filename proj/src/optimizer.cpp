#include "bcgc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "bcgc/special_functions.hpp"

namespace bcgc {

Eigen::VectorXd project_onto_simplex(const Eigen::VectorXd& v, double total) {
    if (!(total > 0.0))
        throw std::invalid_argument("project_onto_simplex: total must be > 0");
    const Eigen::Index n = v.size();
    if (n < 1) throw std::invalid_argument("project_onto_simplex: empty vector");

    auto mass_at = [&](double nu) {
        double sum = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) sum += std::max(v[i] - nu, 0.0);
        return sum;
    };

    // sum max(v - nu, 0) is continuous and nonincreasing in nu; bracket the
    // level where it crosses `total` and bisect.
    double lo = v.minCoeff() - total / static_cast<double>(n);
    double hi = v.maxCoeff();
    const double tol = 1e-10 * total;
    double nu = lo;
    for (int iter = 0; iter < 200; ++iter) {
        nu = 0.5 * (lo + hi);
        const double mass = mass_at(nu);
        if (std::fabs(mass - total) <= tol) break;
        if (mass > total)
            lo = nu;
        else
            hi = nu;
    }
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = std::max(v[i] - nu, 0.0);
    return x;
}

Eigen::VectorXd noisy_subgradient(const BlockAllocation& alloc,
                                  const WorkerDraw& draw, const SystemConfig& cfg) {
    const int N = cfg.n_workers;
    if (alloc.n_levels() != N || draw.n_workers() != N)
        throw std::invalid_argument("noisy_subgradient: dimension mismatch");
    const Eigen::VectorXd sorted = sorted_times(draw);
    const Eigen::VectorXd terms = tau_hat_inner_terms(alloc.x, sorted);
    int n_star = 0;
    for (int k = 1; k < N; ++k)
        if (terms[k] > terms[n_star]) n_star = k; // ties keep the smaller index
    Eigen::VectorXd g = Eigen::VectorXd::Zero(N);
    const double scale = cfg.work_scale() * sorted[N - n_star - 1];
    for (int i = 0; i <= n_star; ++i) g[i] = scale * (i + 1);
    return g;
}

namespace {

double default_step_constant(const SystemConfig& cfg,
                             const StragglerDistribution& dist) {
    const Eigen::VectorXd t = order_stat_means(dist, cfg.n_workers);
    return cfg.model_size /
           (t[cfg.n_workers - 1] * cfg.work_scale() * cfg.n_workers);
}

} // namespace

SolveReport solve_subgradient(const SystemConfig& cfg,
                              const StragglerDistribution& dist,
                              const SubgradientConfig& sg) {
    if (sg.max_iters < 1 || sg.batch < 1)
        throw std::invalid_argument("solve_subgradient: max_iters and batch must be >= 1");
    const int N = cfg.n_workers;
    const double L = cfg.model_size;

    auto final_estimate = [&](const BlockAllocation& alloc) {
        RngStream rng(mix_seed(sg.seed, 2));
        const long n = std::max(sg.final_eval_draws, 2);
        return estimate_on_sorted_draws(alloc, cfg,
                                        sample_sorted_draws(dist, N, n, rng));
    };

    if (N == 1) {
        BlockAllocation only(Eigen::VectorXd::Constant(1, L), false);
        SolveReport report{only, final_estimate(only), 0};
        return report;
    }

    // Common-random-number draw set used for every running-best comparison.
    RngStream selection_rng(mix_seed(sg.seed, 1));
    const Eigen::MatrixXd selection_draws = sample_sorted_draws(
        dist, N, std::max(sg.selection_draws, 2), selection_rng);
    auto selection_mean = [&](const Eigen::VectorXd& x) {
        return mean_tau_hat(weighted_prefix(x), selection_draws, cfg.work_scale());
    };

    // Warm start from the closed-form approximations; both are candidates
    // for the running best from the outset.
    const Eigen::VectorXd t = order_stat_means(dist, N);
    Eigen::VectorXd best_x = closed_form_t(cfg, t).x;
    double best_val = selection_mean(best_x);
    if (dist.t0() > 0.0) {
        const Eigen::VectorXd xf =
            closed_form_f(cfg, order_stat_harmonic_means(dist, N)).x;
        const double vf = selection_mean(xf);
        if (vf < best_val) {
            best_val = vf;
            best_x = xf;
        }
    }

    const double step_c = sg.step_constant.value_or(default_step_constant(cfg, dist));
    if (!(step_c > 0.0))
        throw std::invalid_argument("solve_subgradient: step_constant must be > 0");

    RngStream iter_rng(mix_seed(sg.seed, 0));
    Eigen::VectorXd x = best_x;
    int iterations = 0;
    for (int k = 1; k <= sg.max_iters; ++k) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(N);
        for (int b = 0; b < sg.batch; ++b) {
            const WorkerDraw draw = sample_draw(dist, N, iter_rng);
            g += noisy_subgradient(BlockAllocation(x, false), draw, cfg);
        }
        g /= sg.batch;
        const double eta = step_c / std::sqrt(static_cast<double>(k));
        x = project_onto_simplex(x - eta * g, L);
        ++iterations;
        if (k % sg.eval_period == 0 || k == sg.max_iters) {
            const double val = selection_mean(x);
            if (val < best_val) {
                best_val = val;
                best_x = x;
            }
        }
    }

    BlockAllocation best(best_x, false);
    SolveReport report{best, final_estimate(best), iterations};
    return report;
}

namespace {

BlockAllocation closed_form_impl(const SystemConfig& cfg, const Eigen::VectorXd& t,
                                 const char* what) {
    const int N = cfg.n_workers;
    if (t.size() != N)
        throw std::invalid_argument(std::string(what) + ": time vector has wrong length");
    for (int i = 0; i < N; ++i) {
        if (!(t[i] > 0.0))
            throw std::invalid_argument(std::string(what) + ": times must be positive");
        if (i > 0 && t[i] < t[i - 1])
            throw std::invalid_argument(std::string(what) + ": times must be nondecreasing");
    }
    double denom = 1.0 / (static_cast<double>(N) * t[0]);
    for (int n = 1; n <= N - 1; ++n)
        denom += 1.0 / (static_cast<double>(n) * (n + 1) * t[N - n]); // t_{N+1-n}
    const double m = cfg.model_size / denom;

    Eigen::VectorXd x(N);
    x[0] = m / t[N - 1];
    for (int n = 1; n <= N - 1; ++n)
        x[n] = m / (n + 1) * (1.0 / t[N - n - 1] - 1.0 / t[N - n]);
    return BlockAllocation(std::move(x), false);
}

} // namespace

BlockAllocation closed_form_t(const SystemConfig& cfg, const Eigen::VectorXd& t) {
    return closed_form_impl(cfg, t, "closed_form_t");
}

BlockAllocation closed_form_f(const SystemConfig& cfg,
                              const Eigen::VectorXd& t_prime) {
    return closed_form_impl(cfg, t_prime, "closed_form_f");
}

BlockAllocation round_largest_remainder(const BlockAllocation& alloc,
                                        const SystemConfig& cfg) {
    const int N = cfg.n_workers;
    if (alloc.n_levels() != N)
        throw std::invalid_argument("round_largest_remainder: level count mismatch");
    if (std::fabs(alloc.total() - cfg.model_size) > 1e-6 * cfg.model_size)
        throw std::invalid_argument("round_largest_remainder: allocation infeasible");
    if (alloc.integral) return alloc;

    Eigen::VectorXd x(N);
    long assigned = 0;
    std::vector<std::pair<double, int>> fractional(N);
    for (int n = 0; n < N; ++n) {
        x[n] = std::floor(alloc.x[n]);
        assigned += std::lround(x[n]);
        fractional[n] = {alloc.x[n] - x[n], n};
    }
    long deficit = cfg.model_size - assigned;
    // Largest fractional part first; ties go to the larger level index.
    std::sort(fractional.begin(), fractional.end(),
              [](const auto& a, const auto& b) {
                  if (a.first != b.first) return a.first > b.first;
                  return a.second > b.second;
              });
    for (int k = 0; k < N && deficit > 0; ++k, --deficit)
        x[fractional[k].second] += 1.0;
    if (deficit != 0)
        throw std::logic_error("round_largest_remainder: unit accounting failed");
    return BlockAllocation(std::move(x), true);
}

BlockAllocation round_allocation(const BlockAllocation& alloc,
                                 const SystemConfig& cfg,
                                 const StragglerDistribution& dist,
                                 int eval_draws, std::uint64_t seed) {
    BlockAllocation rounded = round_largest_remainder(alloc, cfg);
    const int N = cfg.n_workers;
    if (N == 1 || eval_draws < 2) return rounded;

    RngStream rng(mix_seed(seed, 3));
    const Eigen::MatrixXd draws = sample_sorted_draws(dist, N, eval_draws, rng);
    Eigen::VectorXd x = rounded.x;
    double current = mean_tau_hat(weighted_prefix(x), draws, cfg.work_scale());

    // 1-opt over single-unit transfers, best improvement first.
    for (int round = 0; round < 200; ++round) {
        double best_val = current;
        int best_from = -1, best_to = -1;
        for (int i = 0; i < N; ++i) {
            if (x[i] < 1.0) continue;
            for (int j = 0; j < N; ++j) {
                if (j == i) continue;
                x[i] -= 1.0;
                x[j] += 1.0;
                const double val =
                    mean_tau_hat(weighted_prefix(x), draws, cfg.work_scale());
                x[i] += 1.0;
                x[j] -= 1.0;
                if (val < best_val) {
                    best_val = val;
                    best_from = i;
                    best_to = j;
                }
            }
        }
        if (best_from < 0) break;
        x[best_from] -= 1.0;
        x[best_to] += 1.0;
        current = best_val;
    }
    return BlockAllocation(std::move(x), true);
}

BlockAllocation solve_single_block(const SystemConfig& cfg,
                                   const StragglerDistribution& dist,
                                   int eval_draws, std::uint64_t seed) {
    const int N = cfg.n_workers;
    const double L = cfg.model_size;
    if (N == 1) return BlockAllocation(Eigen::VectorXd::Constant(1, L), true);
    if (eval_draws < 2)
        throw std::invalid_argument("solve_single_block: need eval_draws >= 2");

    RngStream rng(mix_seed(seed, 4));
    const Eigen::MatrixXd draws = sample_sorted_draws(dist, N, eval_draws, rng);
    int best_level = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (int n = 0; n < N; ++n) {
        // tau_hat(L e_n, T) = (M/N) b L (n+1) T_(N-n)
        const double mean = draws.col(N - n - 1).mean();
        const double val = L * (n + 1) * mean;
        if (val < best_val) { // ties keep the smaller level
            best_val = val;
            best_level = n;
        }
    }
    Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
    x[best_level] = L;
    return BlockAllocation(std::move(x), true);
}

std::pair<double, double> gap_bounds(int n_workers,
                                     const StragglerDistribution& dist) {
    if (n_workers < 1)
        throw std::invalid_argument("gap_bounds: n_workers must be >= 1");
    if (!(dist.t0() > 0.0))
        throw std::invalid_argument("gap_bounds: t0 must be > 0");
    const double hn = harmonic_number(n_workers);
    const double a = dist.mu() * dist.t0();
    const double bound_t = (hn + 1.0) * (hn + a) / (a * a);
    const double bound_f = hn / a + 1.0;
    return {bound_t, bound_f};
}

} // namespace bcgc
