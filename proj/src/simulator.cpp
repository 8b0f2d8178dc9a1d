#include "bcgc/simulator.hpp"

#include <cmath>
#include <stdexcept>

#include "bcgc/coding.hpp"

namespace bcgc {

SchemeSpec parse_scheme_spec(const std::string& text) {
    SchemeSpec spec;
    if (text == "subgradient") {
        spec.kind = SchemeSpec::Kind::Subgradient;
    } else if (text == "closed-t") {
        spec.kind = SchemeSpec::Kind::ClosedT;
    } else if (text == "closed-f") {
        spec.kind = SchemeSpec::Kind::ClosedF;
    } else if (text == "single-block") {
        spec.kind = SchemeSpec::Kind::SingleBlock;
    } else if (text.rfind("uniform:", 0) == 0) {
        spec.kind = SchemeSpec::Kind::Uniform;
        const std::string level = text.substr(8);
        size_t used = 0;
        int s = -1;
        try {
            s = std::stoi(level, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("unknown scheme '" + text +
                                        "': uniform level must be an integer");
        }
        if (used != level.size() || s < 0)
            throw std::invalid_argument("unknown scheme '" + text +
                                        "': uniform level must be an integer >= 0");
        spec.uniform_level = s;
    } else {
        throw std::invalid_argument(
            "unknown scheme '" + text +
            "' (expected subgradient|closed-t|closed-f|single-block|uniform:<s>)");
    }
    return spec;
}

std::string scheme_name(const SchemeSpec& spec) {
    switch (spec.kind) {
        case SchemeSpec::Kind::Subgradient: return "subgradient";
        case SchemeSpec::Kind::ClosedT: return "closed-t";
        case SchemeSpec::Kind::ClosedF: return "closed-f";
        case SchemeSpec::Kind::SingleBlock: return "single-block";
        case SchemeSpec::Kind::Uniform:
            return "uniform:" + std::to_string(spec.uniform_level);
    }
    return "?";
}

SchemeUnderTest resolve_scheme(const SchemeSpec& spec, const SystemConfig& cfg,
                               const StragglerDistribution& dist,
                               const SubgradientConfig& sg, int round_draws,
                               std::uint64_t seed) {
    const int N = cfg.n_workers;
    switch (spec.kind) {
        case SchemeSpec::Kind::Subgradient: {
            SubgradientConfig local = sg;
            local.seed = mix_seed(seed, 11);
            const SolveReport report = solve_subgradient(cfg, dist, local);
            return {scheme_name(spec),
                    round_allocation(report.allocation, cfg, dist, round_draws,
                                     mix_seed(seed, 12))};
        }
        case SchemeSpec::Kind::ClosedT: {
            const BlockAllocation x = closed_form_t(cfg, order_stat_means(dist, N));
            return {scheme_name(spec),
                    round_allocation(x, cfg, dist, round_draws, mix_seed(seed, 13))};
        }
        case SchemeSpec::Kind::ClosedF: {
            const BlockAllocation x =
                closed_form_f(cfg, order_stat_harmonic_means(dist, N));
            return {scheme_name(spec),
                    round_allocation(x, cfg, dist, round_draws, mix_seed(seed, 14))};
        }
        case SchemeSpec::Kind::SingleBlock:
            return {scheme_name(spec),
                    solve_single_block(cfg, dist, std::max(round_draws, 2),
                                       mix_seed(seed, 15))};
        case SchemeSpec::Kind::Uniform: {
            if (spec.uniform_level > N - 1)
                throw std::invalid_argument(
                    "uniform scheme level exceeds N-1 at N=" + std::to_string(N));
            Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
            x[spec.uniform_level] = cfg.model_size;
            return {scheme_name(spec), BlockAllocation(std::move(x), true)};
        }
    }
    throw std::logic_error("resolve_scheme: unreachable");
}

RuntimeEstimate estimate_expected_runtime(const SchemeUnderTest& scheme,
                                          const SystemConfig& cfg,
                                          const StragglerDistribution& dist,
                                          long n_draws, std::uint64_t seed) {
    if (n_draws < 2)
        throw std::invalid_argument("estimate_expected_runtime: need n_draws >= 2");
    RngStream rng(seed);
    return estimate_on_sorted_draws(
        scheme.allocation, cfg,
        sample_sorted_draws(dist, cfg.n_workers, n_draws, rng));
}

Eigen::VectorXd LeastSquaresProblem::gradient(const Eigen::VectorXd& theta) const {
    return features.transpose() * (features * theta - targets);
}

double LeastSquaresProblem::loss(const Eigen::VectorXd& theta) const {
    return 0.5 * (features * theta - targets).squaredNorm();
}

double LeastSquaresProblem::safe_step() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(features.transpose() *
                                                       features);
    return 1.0 / eig.eigenvalues().maxCoeff();
}

LeastSquaresProblem make_least_squares(int n_samples, int n_features,
                                       RngStream& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    LeastSquaresProblem p;
    p.features.resize(n_samples, n_features);
    for (int i = 0; i < n_samples; ++i)
        for (int j = 0; j < n_features; ++j) p.features(i, j) = gauss(rng);
    Eigen::VectorXd truth(n_features);
    for (int j = 0; j < n_features; ++j) truth[j] = gauss(rng);
    p.targets = p.features * truth;
    for (int i = 0; i < n_samples; ++i) p.targets[i] += 0.1 * gauss(rng);
    return p;
}

TrainingTrace run_gd_training(const SystemConfig& cfg,
                              const StragglerDistribution& dist,
                              const SchemeUnderTest& scheme,
                              const LeastSquaresProblem& dataset, int iters,
                              double step, std::uint64_t seed) {
    cfg.require_even_split();
    if (dataset.features.rows() != cfg.n_samples ||
        dataset.features.cols() != cfg.model_size)
        throw std::invalid_argument("run_gd_training: dataset does not match config");
    if (iters < 1) throw std::invalid_argument("run_gd_training: iters must be >= 1");

    const int N = cfg.n_workers;
    const int L = cfg.model_size;
    const CodingProfile profile = x_to_s(scheme.allocation);

    RngStream setup_rng(mix_seed(seed, 21));
    const SampleAssignment assignment = allocate_samples(cfg, profile, setup_rng);
    const CodingScheme codes(profile, N, setup_rng);

    RngStream draw_rng(mix_seed(seed, 22));
    TrainingTrace trace;
    trace.theta = Eigen::VectorXd::Zero(L);
    trace.loss.reserve(iters);
    trace.runtime.reserve(iters);

    for (int it = 0; it < iters; ++it) {
        // Per-subset partial gradients (row j = subset j).
        Eigen::MatrixXd partials(N, L);
        for (int j = 0; j < N; ++j) {
            Eigen::VectorXd g = Eigen::VectorXd::Zero(L);
            for (int sample : assignment.subsets[j]) {
                const double residual =
                    dataset.features.row(sample).dot(trace.theta) -
                    dataset.targets[sample];
                g += residual * dataset.features.row(sample).transpose();
            }
            partials.row(j) = g.transpose();
        }

        const WorkerDraw draw = sample_draw(dist, N, draw_rng);
        const Eigen::MatrixXd arrivals = completion_times(profile, draw, cfg);
        GradientWorkspace ws = encode_partials(codes, profile, partials);
        const Eigen::VectorXd gradient =
            recover_gradient(ws, profile, codes, arrivals);

        trace.theta -= step * gradient;
        trace.loss.push_back(dataset.loss(trace.theta));
        trace.runtime.push_back(runtime_tau(profile, draw, cfg));
    }
    return trace;
}

std::vector<SweepCell> sweep_experiment(SweepAxis axis,
                                        const std::vector<double>& values,
                                        const std::vector<SchemeSpec>& schemes,
                                        const SystemConfig& base_cfg,
                                        const StragglerDistribution& base_dist,
                                        long n_draws, std::uint64_t seed,
                                        const SubgradientConfig& sg,
                                        int round_draws) {
    if (values.empty())
        throw std::invalid_argument("sweep_experiment: empty value list");
    if (schemes.empty())
        throw std::invalid_argument("sweep_experiment: empty scheme list");

    std::vector<SweepCell> table;
    table.reserve(values.size() * schemes.size());
    for (size_t vi = 0; vi < values.size(); ++vi) {
        const double value = values[vi];
        SystemConfig cfg = base_cfg;
        StragglerDistribution dist = base_dist;
        if (axis == SweepAxis::Workers) {
            const int n = static_cast<int>(std::lround(value));
            if (n < 1 || std::fabs(value - n) > 1e-9)
                throw std::invalid_argument(
                    "sweep_experiment: worker-axis values must be positive integers");
            cfg = SystemConfig(n, base_cfg.model_size, base_cfg.n_samples,
                               base_cfg.cycles_per_coordinate);
        } else {
            dist = StragglerDistribution(value, base_dist.t0());
        }

        // One draw matrix per cell, shared by all schemes; the stream is
        // re-seeded identically for every cell so mu cells consume the same
        // uniforms (draws then shrink pointwise as mu grows).
        RngStream cell_rng(mix_seed(seed, 31));
        const Eigen::MatrixXd draws =
            sample_sorted_draws(dist, cfg.n_workers, n_draws, cell_rng);

        const std::uint64_t solve_seed = mix_seed(seed, 100 + vi);
        for (const SchemeSpec& spec : schemes) {
            const SchemeUnderTest scheme =
                resolve_scheme(spec, cfg, dist, sg, round_draws, solve_seed);
            SweepCell cell;
            cell.axis = (axis == SweepAxis::Workers) ? "N" : "mu";
            cell.value = value;
            cell.scheme = scheme.name;
            cell.estimate = estimate_on_sorted_draws(scheme.allocation, cfg, draws);
            table.push_back(std::move(cell));
        }
    }
    return table;
}

} // namespace bcgc
