#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bcgc/mc.hpp>
#include <bcgc/optimizer.hpp>
#include <bcgc/special_functions.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace bcgc;

namespace {

// Sort-based exact simplex projection (Held et al. / Michelot style); an
// independent oracle for the production bisection path.
Eigen::VectorXd project_by_sorting(const Eigen::VectorXd& v, double total) {
    const int n = static_cast<int>(v.size());
    std::vector<double> u(v.begin(), v.end());
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumulative = 0.0, nu = 0.0;
    for (int k = 0; k < n; ++k) {
        cumulative += u[k];
        const double candidate = (cumulative - total) / (k + 1);
        if (k + 1 == n || u[k + 1] <= candidate) {
            if (u[k] > candidate) nu = candidate;
            if (u[k] > candidate) break;
        }
    }
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = std::max(v[i] - nu, 0.0);
    return x;
}

Eigen::VectorXd random_feasible(int n, double total, RngStream& rng) {
    Eigen::VectorXd x(n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        x[i] = uniform01(rng) + 1e-12;
        sum += x[i];
    }
    return x * (total / sum);
}

} // namespace

TEST_CASE("projection leaves feasible points alone") {
    Eigen::VectorXd v(3);
    v << 1.0, 2.5, 0.5;
    const Eigen::VectorXd x = project_onto_simplex(v, 4.0);
    CHECK((x - v).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("projection of a constant vector splits evenly") {
    const Eigen::VectorXd v = Eigen::VectorXd::Constant(5, 3.7);
    const Eigen::VectorXd x = project_onto_simplex(v, 20.0);
    for (int i = 0; i < 5; ++i) CHECK(x[i] == doctest::Approx(4.0).epsilon(1e-8));
}

TEST_CASE("projection matches the hand KKT solution") {
    const double L = 6.0;
    Eigen::VectorXd v(2);
    v << -1.0, L + 1.0;
    const Eigen::VectorXd x = project_onto_simplex(v, L);
    CHECK(std::fabs(x[0]) < 1e-8);
    CHECK(x[1] == doctest::Approx(L).epsilon(1e-8));
}

TEST_CASE("bisection projection agrees with the sorting oracle") {
    RngStream rng(42);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 20);
        const double total = 0.5 + 30.0 * uniform01(rng);
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = 20.0 * (uniform01(rng) - 0.4);
        const Eigen::VectorXd got = project_onto_simplex(v, total);
        const Eigen::VectorXd want = project_by_sorting(v, total);
        CHECK(std::fabs(got.sum() - total) <= 1e-10 * total);
        CHECK((got - want).cwiseAbs().maxCoeff() < 1e-7);
    }
}

TEST_CASE("subgradient with a single active block") {
    const int N = 4;
    const SystemConfig cfg(N, 12, 8, 0.5);
    RngStream rng(7);
    const WorkerDraw draw = sample_draw(StragglerDistribution(1.0, 1.0), N, rng);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
    x[0] = 12.0;
    const Eigen::VectorXd g =
        noisy_subgradient(BlockAllocation(x, true), draw, cfg);
    const Eigen::VectorXd sorted = sorted_times(draw);
    CHECK(g[0] == doctest::Approx(cfg.work_scale() * sorted[N - 1]).epsilon(1e-14));
    for (int i = 1; i < N; ++i) CHECK(g[i] == 0.0);
}

TEST_CASE("subgradient of the worked example, ties to the smaller index") {
    const SystemConfig cfg(4, 4, 4, 1.0);
    Eigen::VectorXd t(4);
    t << 0.1, 0.1, 0.25, 1.0;
    Eigen::VectorXd x(4);
    x << 0, 2, 2, 0;
    const Eigen::VectorXd g =
        noisy_subgradient(BlockAllocation(x, true), WorkerDraw(t), cfg);
    CHECK(g[0] == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(g[1] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(g[2] == 0.0);
    CHECK(g[3] == 0.0);
}

TEST_CASE("subgradient matches directional finite differences") {
    RngStream rng(99);
    const StragglerDistribution dist(1.0, 0.5);
    int exercised = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 8);
        const double L = 10.0;
        const SystemConfig cfg(n, 10, n, 1.0);
        const Eigen::VectorXd x = random_feasible(n, L, rng);
        const WorkerDraw draw = sample_draw(dist, n, rng);

        // Skip near-ties: the max must be attained strictly once.
        const Eigen::VectorXd terms = tau_hat_inner_terms(x, sorted_times(draw));
        double top = -1.0, second = -1.0;
        for (int i = 0; i < n; ++i) {
            if (terms[i] > top) { second = top; top = terms[i]; }
            else if (terms[i] > second) second = terms[i];
        }
        if (second > 0.95 * top) continue;
        ++exercised;

        Eigen::VectorXd d(n);
        double mean = 0.0;
        for (int i = 0; i < n; ++i) { d[i] = uniform01(rng) - 0.5; mean += d[i]; }
        d.array() -= mean / n; // feasible direction: sums to zero
        const double h = 1e-7;
        const BlockAllocation a0(x, false);
        Eigen::VectorXd shifted = x + h * d;
        shifted = shifted.cwiseMax(0.0);
        const double fd = (tau_hat_presorted(weighted_prefix(shifted),
                                             sorted_times(draw), cfg.work_scale()) -
                           tau_hat_presorted(weighted_prefix(x),
                                             sorted_times(draw), cfg.work_scale())) /
                          h;
        const double gd = noisy_subgradient(a0, draw, cfg).dot(d);
        CHECK(fd == doctest::Approx(gd).epsilon(1e-4));
    }
    CHECK(exercised > 200);
}

TEST_CASE("closed form, two workers, by hand") {
    const SystemConfig cfg(2, 4, 2, 1.0);
    Eigen::VectorXd t(2);
    t << 1.0, 3.0;
    const BlockAllocation x = closed_form_t(cfg, t);
    // m = 2 L t1 t2 / (t1 + t2) = 6; x0 = m/t2 = 2; x1 = L(t2-t1)/(t1+t2) = 2.
    CHECK(x.x[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(x.x[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(x.total() == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("closed form under equal times puts everything at level zero") {
    const SystemConfig cfg(6, 30, 6, 1.0);
    const Eigen::VectorXd t = Eigen::VectorXd::Constant(6, 2.5);
    const BlockAllocation x = closed_form_t(cfg, t);
    CHECK(x.x[0] == doctest::Approx(30.0).epsilon(1e-12));
    for (int i = 1; i < 6; ++i) CHECK(std::fabs(x.x[i]) < 1e-12);
}

TEST_CASE("closed form rejects non-monotone times") {
    const SystemConfig cfg(3, 9, 3, 1.0);
    Eigen::VectorXd t(3);
    t << 1.0, 3.0, 2.0;
    CHECK_THROWS_AS(closed_form_t(cfg, t), std::invalid_argument);
    CHECK_THROWS_AS(closed_form_f(cfg, t), std::invalid_argument);
}

TEST_CASE("closed forms equalize every inner term") {
    for (int n : {2, 5, 10, 20, 50}) {
        for (double a : {0.01, 0.05, 1.0}) {
            const StragglerDistribution dist(a / 50.0, 50.0);
            const SystemConfig cfg(n, 2000, n, 1.0);
            const Eigen::VectorXd t = order_stat_means(dist, n);
            const Eigen::VectorXd tp = order_stat_harmonic_means(dist, n);
            for (const Eigen::VectorXd* times : {&t, &tp}) {
                const BlockAllocation x = (times == &t)
                                              ? closed_form_t(cfg, *times)
                                              : closed_form_f(cfg, *times);
                CHECK(std::fabs(x.total() - 2000.0) <= 1e-9 * 2000.0);
                // inner terms use T_(N-n), i.e. the time vector reversed
                const Eigen::VectorXd terms = tau_hat_inner_terms(x.x, *times);
                const double m0 = terms[0];
                for (int i = 0; i < n; ++i)
                    CHECK(std::fabs(terms[i] - m0) <= 1e-9 * m0);
            }
        }
    }
}

TEST_CASE("no feasible point beats the equalized level") {
    RngStream rng(2718);
    const int n = 8;
    const double L = 100.0;
    const SystemConfig cfg(n, 100, n, 1.0);
    const Eigen::VectorXd t = order_stat_means(StragglerDistribution(0.02, 50.0), n);
    const BlockAllocation xt = closed_form_t(cfg, t);
    const double m = tau_hat_inner_terms(xt.x, t).maxCoeff();
    for (int trial = 0; trial < 1000; ++trial) {
        const Eigen::VectorXd x = random_feasible(n, L, rng);
        CHECK(tau_hat_inner_terms(x, t).maxCoeff() >= m * (1.0 - 1e-12));
    }
}

TEST_CASE("largest-remainder rounding") {
    const SystemConfig cfg(2, 4, 2, 1.0);
    SUBCASE("already integral stays put") {
        Eigen::VectorXd x(2);
        x << 1, 3;
        const BlockAllocation r =
            round_largest_remainder(BlockAllocation(x, true), cfg);
        CHECK(r.x == x);
    }
    SUBCASE("single leftover unit goes to the largest fraction") {
        Eigen::VectorXd x(2);
        x << 1.2, 2.8;
        const BlockAllocation r =
            round_largest_remainder(BlockAllocation(x, false), cfg);
        CHECK(r.x == (Eigen::VectorXd(2) << 1, 3).finished());
    }
    SUBCASE("exact tie goes to the larger level") {
        Eigen::VectorXd x(2);
        x << 1.5, 2.5;
        const BlockAllocation r =
            round_largest_remainder(BlockAllocation(x, false), cfg);
        CHECK(r.x == (Eigen::VectorXd(2) << 1, 3).finished());
    }
}

TEST_CASE("full rounding is feasible, integral and deterministic") {
    const int n = 10;
    const SystemConfig cfg(n, 1000, n, 1.0);
    const StragglerDistribution dist(1e-3, 50.0);
    const BlockAllocation relaxed = closed_form_t(cfg, order_stat_means(dist, n));
    const BlockAllocation a = round_allocation(relaxed, cfg, dist, 500, 5);
    const BlockAllocation b = round_allocation(relaxed, cfg, dist, 500, 5);
    CHECK(a.integral);
    CHECK(a.total() == 1000.0);
    CHECK(a.x.minCoeff() >= 0.0);
    CHECK(a.x == b.x);

    // The 1-opt stage never loses to plain largest-remainder on fresh draws.
    RngStream rng(123);
    const Eigen::MatrixXd draws = sample_sorted_draws(dist, n, 4000, rng);
    const double searched =
        mean_tau_hat(weighted_prefix(a.x), draws, cfg.work_scale());
    const double plain = mean_tau_hat(
        weighted_prefix(round_largest_remainder(relaxed, cfg).x), draws,
        cfg.work_scale());
    CHECK(searched <= plain * 1.001);
}

TEST_CASE("single-block baseline") {
    SUBCASE("one worker means one block") {
        const SystemConfig cfg(1, 7, 1, 1.0);
        const BlockAllocation x =
            solve_single_block(cfg, StragglerDistribution(1.0, 1.0), 100, 1);
        CHECK(x.x[0] == 7.0);
    }
    SUBCASE("near-deterministic times favor no redundancy") {
        const SystemConfig cfg(5, 25, 5, 1.0);
        const BlockAllocation x =
            solve_single_block(cfg, StragglerDistribution(1e9, 50.0), 200, 2);
        CHECK(x.x[0] == 25.0);
    }
    SUBCASE("matches the brute-force definition on shared draws") {
        const int n = 4;
        const SystemConfig cfg(n, 100, n, 1.0);
        const StragglerDistribution dist(1e-3, 50.0);
        const BlockAllocation got = solve_single_block(cfg, dist, 2000, 77);
        RngStream rng(mix_seed(77, 4)); // same stream the solver derives
        const Eigen::MatrixXd draws = sample_sorted_draws(dist, n, 2000, rng);
        int best = 0;
        double best_val = std::numeric_limits<double>::infinity();
        for (int level = 0; level < n; ++level) {
            Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
            x[level] = 100.0;
            const double val =
                mean_tau_hat(weighted_prefix(x), draws, cfg.work_scale());
            if (val < best_val) { best_val = val; best = level; }
        }
        CHECK(got.x[best] == 100.0);
    }
}

TEST_CASE("gap bounds") {
    const StragglerDistribution dist(2.0, 3.0); // mu t0 = 6
    const auto [bt, bf] = gap_bounds(1, dist);
    CHECK(bt == doctest::Approx(2.0 * (1.0 + 6.0) / 36.0).epsilon(1e-12));
    CHECK(bf == doctest::Approx(1.0 / 6.0 + 1.0).epsilon(1e-12));

    double prev_t = 0.0, prev_f = 0.0;
    for (int n = 1; n <= 60; ++n) {
        const auto [t, f] = gap_bounds(n, dist);
        CHECK(t >= prev_t);
        CHECK(f >= prev_f);
        prev_t = t;
        prev_f = f;
    }
    // H_55 sits near 4.6, where the log-scale bound reaches 4.
    CHECK(std::fabs(harmonic_number(55) - 4.6) < 0.05);
    CHECK_THROWS_AS(gap_bounds(3, StragglerDistribution(1.0, 0.0)),
                    std::invalid_argument);
}

TEST_CASE("subgradient solver: one worker is immediate") {
    const SystemConfig cfg(1, 9, 1, 1.0);
    SubgradientConfig sg;
    sg.max_iters = 10;
    sg.seed = 3;
    const SolveReport report =
        solve_subgradient(cfg, StragglerDistribution(1.0, 1.0), sg);
    CHECK(report.allocation.x[0] == 9.0);
    CHECK(report.iterations_used == 0);
}

TEST_CASE("subgradient solver output is feasible and sorted as a profile") {
    const int n = 6;
    const SystemConfig cfg(n, 120, n, 1.0);
    const StragglerDistribution dist(1e-2, 10.0);
    SubgradientConfig sg;
    sg.max_iters = 500;
    sg.seed = 11;
    const SolveReport report = solve_subgradient(cfg, dist, sg);
    CHECK(std::fabs(report.allocation.total() - 120.0) <= 1e-9 * 120.0);
    CHECK(report.allocation.x.minCoeff() >= 0.0);
    CHECK(report.objective.n_draws >= 10000);
    CHECK(report.objective.mean > 0.0);

    const BlockAllocation rounded =
        round_allocation(report.allocation, cfg, dist, 500, 1);
    const CodingProfile profile = x_to_s(rounded);
    CHECK(profile.is_sorted());
}

TEST_CASE("subgradient solver under a near-deterministic distribution") {
    // Variance ~ 1e-18: every draw is essentially t0, so the solver should
    // land on the closed form for that fixed time vector within 1% of L.
    const int n = 5;
    const SystemConfig cfg(n, 100, n, 1.0);
    const StragglerDistribution dist(1e9, 50.0);
    SubgradientConfig sg;
    sg.max_iters = 2000;
    sg.seed = 21;
    const SolveReport report = solve_subgradient(cfg, dist, sg);
    const BlockAllocation want = closed_form_t(cfg, order_stat_means(dist, n));
    CHECK((report.allocation.x - want.x).cwiseAbs().maxCoeff() <= 0.01 * 100.0);
}

TEST_CASE("subgradient solution dominates both closed forms") {
    const int n = 10;
    const SystemConfig cfg(n, 1000, n, 1.0);
    const StragglerDistribution dist(1e-3, 50.0);
    SubgradientConfig sg;
    sg.max_iters = 1500;
    sg.seed = 31;
    const SolveReport report = solve_subgradient(cfg, dist, sg);

    RngStream rng(424242);
    const Eigen::MatrixXd draws = sample_sorted_draws(dist, n, 20000, rng);
    const RuntimeEstimate sub =
        estimate_on_sorted_draws(report.allocation, cfg, draws);
    const RuntimeEstimate ct = estimate_on_sorted_draws(
        closed_form_t(cfg, order_stat_means(dist, n)), cfg, draws);
    const RuntimeEstimate cf = estimate_on_sorted_draws(
        closed_form_f(cfg, order_stat_harmonic_means(dist, n)), cfg, draws);
    CHECK(sub.mean <= ct.mean + 2.0 * (sub.half_width_95 + ct.half_width_95));
    CHECK(sub.mean <= cf.mean + 2.0 * (sub.half_width_95 + cf.half_width_95));
}
