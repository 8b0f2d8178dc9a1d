#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bcgc/special_functions.hpp>
#include <bcgc/straggler.hpp>

#include <cmath>

using namespace bcgc;

namespace {

double rel_err(double got, double want) {
    return std::fabs(got - want) / std::fabs(want);
}

} // namespace

TEST_CASE("exponential integral matches high-precision references") {
    // Reference values computed with 40-digit arithmetic.
    const struct {
        double x, ei;
    } table[] = {
        {-0.01, -4.0379295765381138},
        {-0.1, -1.8229239584193906},
        {-0.5, -0.55977359477616081},
        {-1.0, -0.21938393439552027},
        {-2.0, -0.048900510708061120},
        {-4.0, -0.0037793524098489065},
        {-5.9, -0.00040390350894312923},
        {-6.0, -0.00036008245216265866},
        {-6.1, -0.00032108702794965483},
        {-8.0, -3.7665622843924902e-05},
        {-10.0, -4.1569689296853243e-06},
        {-30.0, -3.0215520106888125e-15},
        {-100.0, -3.6835977616820322e-46},
        {-300.0, -1.7103842768045101e-133},
        {-700.0, -1.4065187662340329e-307},
    };
    for (const auto& row : table) {
        CAPTURE(row.x);
        CHECK(rel_err(exponential_integral(row.x), row.ei) < 1e-10);
    }
}

TEST_CASE("exponential integral rejects nonnegative arguments") {
    CHECK_THROWS_AS(exponential_integral(0.0), std::domain_error);
    CHECK_THROWS_AS(exponential_integral(1.0), std::domain_error);
}

TEST_CASE("exponential integral vanishes from below at -inf") {
    double prev = -1.0;
    for (double x : {-50.0, -200.0, -600.0}) {
        const double v = exponential_integral(x);
        CHECK(v < 0.0);
        CHECK(v > prev);
        prev = v;
    }
    CHECK(std::fabs(exponential_integral(-600.0)) < 1e-250);
}

TEST_CASE("harmonic numbers") {
    CHECK(harmonic_number(0) == 0.0);
    CHECK(harmonic_number(1) == 1.0);
    CHECK(harmonic_number(4) == doctest::Approx(25.0 / 12.0).epsilon(1e-15));
}

TEST_CASE("sampling respects the distribution support") {
    StragglerDistribution dist(0.37, 5.0);
    RngStream rng(123);
    for (int i = 0; i < 100000; ++i) CHECK(dist.sample(rng) >= 5.0);
}

TEST_CASE("sample mean approaches 1/mu + t0") {
    StragglerDistribution dist(1e-3, 50.0);
    RngStream rng(7);
    double sum = 0.0;
    const long n = 1000000;
    for (long i = 0; i < n; ++i) sum += dist.sample(rng);
    CHECK(rel_err(sum / n, 1050.0) < 0.01);
}

TEST_CASE("fixed seed reproduces the draw exactly") {
    StragglerDistribution dist(2.0, 1.0);
    RngStream a(99), b(99);
    const WorkerDraw da = sample_draw(dist, 16, a);
    const WorkerDraw db = sample_draw(dist, 16, b);
    CHECK(da.times == db.times);
}

TEST_CASE("distribution and draw validation") {
    CHECK_THROWS_AS(StragglerDistribution(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(StragglerDistribution(-1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(StragglerDistribution(1.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(WorkerDraw{Eigen::VectorXd()}, std::invalid_argument);
    Eigen::VectorXd bad(2);
    bad << 1.0, -1.0;
    CHECK_THROWS_AS(WorkerDraw{bad}, std::invalid_argument);
}

TEST_CASE("order statistic means: single worker") {
    const Eigen::VectorXd t = order_stat_means(StragglerDistribution(2.0, 1.0), 1);
    CHECK(t.size() == 1);
    CHECK(t[0] == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("order statistic means: harmonic-number form") {
    const Eigen::VectorXd t = order_stat_means(StragglerDistribution(1.0, 50.0), 4);
    CHECK(t[3] == doctest::Approx(50.0 + 25.0 / 12.0).epsilon(1e-15));
}

TEST_CASE("order statistic means strictly increase") {
    for (double mu : {1e-3, 0.3, 7.0}) {
        const Eigen::VectorXd t =
            order_stat_means(StragglerDistribution(mu, 0.25), 20);
        for (int i = 1; i < 20; ++i) CHECK(t[i] > t[i - 1]);
    }
}

TEST_CASE("harmonic order-stat mean, single worker") {
    // 1/t'_1 = e * E1(1) for mu = 1, t0 = 1 (one-dimensional integral).
    const Eigen::VectorXd tp =
        order_stat_harmonic_means(StragglerDistribution(1.0, 1.0), 1);
    CHECK(rel_err(tp[0], 1.6768750281787009) < 1e-9);
}

TEST_CASE("harmonic order-stat means require t0 > 0") {
    CHECK_THROWS_AS(order_stat_harmonic_means(StragglerDistribution(1.0, 0.0), 3),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        order_stat_harmonic_means_series(StragglerDistribution(1.0, 0.0), 3),
        std::invalid_argument);
}

TEST_CASE("quadrature and closed-form paths for t' agree") {
    for (double a : {0.01, 0.1, 1.0, 10.0, 100.0}) {
        for (int n : {1, 2, 5, 8, 12}) {
            const StragglerDistribution dist(a / 50.0, 50.0);
            const Eigen::VectorXd quad = order_stat_harmonic_means(dist, n);
            const Eigen::VectorXd series = order_stat_harmonic_means_series(dist, n);
            for (int i = 0; i < n; ++i) {
                CAPTURE(a);
                CAPTURE(n);
                CAPTURE(i);
                CHECK(rel_err(quad[i], series[i]) < 1e-6);
            }
        }
    }
}

TEST_CASE("t' stays below t and both are frozen for a known case") {
    const StragglerDistribution dist(1e-3, 50.0);
    const OrderStatSummary s = order_stat_summary(dist, 5);
    // 40-digit reference values.
    const double want_tp[5] = {149.15517262934311, 327.94777045382169,
                               598.98531592311988, 1011.7731388861850,
                               1783.7883697001090};
    const double want_t[5] = {250.0, 500.0, 833.33333333333333,
                              1333.3333333333333, 2333.3333333333333};
    for (int i = 0; i < 5; ++i) {
        CHECK(rel_err(s.t_harmonic[i], want_tp[i]) < 1e-9);
        CHECK(rel_err(s.t_mean[i], want_t[i]) < 1e-12);
        CHECK(s.t_harmonic[i] <= s.t_mean[i]);
        if (i > 0) {
            CHECK(s.t_mean[i] > s.t_mean[i - 1]);
            CHECK(s.t_harmonic[i] > s.t_harmonic[i - 1]);
        }
    }
}

TEST_CASE("Monte Carlo cross-validates both order-stat summaries") {
    const StragglerDistribution dist(1e-3, 50.0);
    const int N = 5;
    RngStream rng(2024);
    const OrderStatMcEstimate mc = mc_order_stat_summary(dist, N, 1000000, rng);
    const OrderStatSummary s = order_stat_summary(dist, N);
    for (int i = 0; i < N; ++i) {
        // Analytic mean within 3 standard errors of the sorted-sample mean.
        CHECK(std::fabs(mc.mean[i] - s.t_mean[i]) < 3.0 * mc.se[i]);
        // Harmonic mean within 0.5% of 1 / (sample mean of 1/T_(n)).
        CHECK(rel_err(1.0 / mc.inv_mean[i], s.t_harmonic[i]) < 0.005);
    }
}
