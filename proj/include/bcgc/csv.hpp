#ifndef BCGC_CSV_HPP
#define BCGC_CSV_HPP

#include <string>
#include <vector>

#include "bcgc/runtime.hpp"
#include "bcgc/simulator.hpp"

namespace bcgc {

// 12 significant digits, '.' decimal separator, no locale. Whole numbers
// print without a decimal point, so integer allocations stay integers.
std::string format_number(double value);

// Header: level,x_optimal,x_t,x_f ; one row per level 0..N-1.
struct SolutionTable {
    BlockAllocation x_optimal;
    BlockAllocation x_t;
    BlockAllocation x_f;
};

void emit_solution_csv(const SolutionTable& table, const std::string& path);

// Header: axis,value,scheme,mean_runtime,ci95_halfwidth,n_draws.
void emit_sweep_csv(const std::vector<SweepCell>& table, const std::string& path);

// Header: iteration,loss,runtime.
void emit_training_csv(const TrainingTrace& trace, const std::string& path);

} // namespace bcgc

#endif
