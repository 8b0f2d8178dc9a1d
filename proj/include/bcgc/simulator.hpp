#ifndef BCGC_SIMULATOR_HPP
#define BCGC_SIMULATOR_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "bcgc/mc.hpp"
#include "bcgc/optimizer.hpp"
#include "bcgc/runtime.hpp"
#include "bcgc/straggler.hpp"

namespace bcgc {

// A named integer allocation; the proposed schemes and every baseline all
// reduce to this.
struct SchemeUnderTest {
    std::string name;
    BlockAllocation allocation;
};

// Scheme selector as accepted by the CLI:
//   subgradient | closed-t | closed-f | single-block | uniform:<s>
struct SchemeSpec {
    enum class Kind { Subgradient, ClosedT, ClosedF, SingleBlock, Uniform };
    Kind kind = Kind::Subgradient;
    int uniform_level = 0;
};

SchemeSpec parse_scheme_spec(const std::string& text);
std::string scheme_name(const SchemeSpec& spec);

// Solves/constructs the scheme at the given system settings and rounds it
// to an integer allocation.
SchemeUnderTest resolve_scheme(const SchemeSpec& spec, const SystemConfig& cfg,
                               const StragglerDistribution& dist,
                               const SubgradientConfig& sg, int round_draws,
                               std::uint64_t seed);

// Sample mean of tau_hat over n_draws i.i.d. draws, with 95% half-width;
// bit-deterministic given the seed.
RuntimeEstimate estimate_expected_runtime(const SchemeUnderTest& scheme,
                                          const SystemConfig& cfg,
                                          const StragglerDistribution& dist,
                                          long n_draws, std::uint64_t seed);

// Synthetic least-squares instance: F(theta) = 1/2 ||A theta - y||^2.
struct LeastSquaresProblem {
    Eigen::MatrixXd features; // M x L
    Eigen::VectorXd targets;  // M

    Eigen::VectorXd gradient(const Eigen::VectorXd& theta) const;
    double loss(const Eigen::VectorXd& theta) const;
    // 1 / lambda_max(A'A), under which gradient descent descends.
    double safe_step() const;
};

LeastSquaresProblem make_least_squares(int n_samples, int n_features,
                                       RngStream& rng);

struct TrainingTrace {
    std::vector<double> loss;    // per iteration, after the update
    std::vector<double> runtime; // simulated tau of each iteration
    Eigen::VectorXd theta;
};

// End-to-end demonstration: every iteration draws fresh worker times,
// encodes per-subset partial derivatives, recovers the exact gradient from
// the fastest workers per coordinate, and takes a gradient step.
TrainingTrace run_gd_training(const SystemConfig& cfg,
                              const StragglerDistribution& dist,
                              const SchemeUnderTest& scheme,
                              const LeastSquaresProblem& dataset, int iters,
                              double step, std::uint64_t seed);

struct SweepCell {
    std::string axis;
    double value;
    std::string scheme;
    RuntimeEstimate estimate;
};

enum class SweepAxis { Workers, Mu };

// Full factorial (axis value) x (scheme) table. All schemes within one cell
// are evaluated on one shared draw matrix, and every cell derives its draws
// from the same seed, so mu sweeps reuse identical uniforms.
std::vector<SweepCell> sweep_experiment(SweepAxis axis,
                                        const std::vector<double>& values,
                                        const std::vector<SchemeSpec>& schemes,
                                        const SystemConfig& base_cfg,
                                        const StragglerDistribution& base_dist,
                                        long n_draws, std::uint64_t seed,
                                        const SubgradientConfig& sg,
                                        int round_draws = 2000);

} // namespace bcgc

#endif
