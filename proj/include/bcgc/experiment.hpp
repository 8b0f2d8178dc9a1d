#ifndef BCGC_EXPERIMENT_HPP
#define BCGC_EXPERIMENT_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace bcgc {

enum class Command { Solve, Sweep, Train, Validate };

// Everything a CLI invocation pins down. Values arrive from flags, with an
// optional config file underneath (flags win).
struct ExperimentSpec {
    Command command = Command::Solve;

    int workers = 20;
    int model_size = 20000;
    double mu = 1e-3;
    double t0 = 50.0;
    int samples_m = 50;
    double cycles_b = 1.0;

    std::uint64_t seed = 1;
    long draws = 100000;

    std::vector<std::string> schemes; // raw scheme selectors
    std::string axis;                 // "N" or "mu" (sweep only)
    std::vector<double> values;       // sweep grid

    int max_iters = 4000;
    double step_constant = 0.0; // 0 = automatic scale
    int batch = 1;
    int round_draws = 2000;

    int train_iters = 50;
    double train_step = 0.0; // 0 = 1/lambda_max of the synthetic problem

    std::string output; // empty = per-command default filename
};

// Parses argv-style arguments (without the program name). Throws
// std::invalid_argument with a categorized message on unknown flags,
// invalid values, or missing required parameters.
ExperimentSpec parse_experiment(const std::vector<std::string>& args);

// Runs the experiment, writing CSV output and progress to `log`.
// Returns the process exit code (0 on success).
int run_experiment(const ExperimentSpec& spec, std::ostream& log);

// Entry point used by the binary: parse + run with error reporting.
int run_cli(int argc, char** argv);

} // namespace bcgc

#endif
