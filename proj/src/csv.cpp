#include "bcgc/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace bcgc {

std::string format_number(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

namespace {

std::ofstream open_csv(const std::string& path) {
    std::ofstream out(path, std::ios::binary); // LF line endings everywhere
    if (!out)
        throw std::runtime_error("cannot open output file '" + path + "'");
    return out;
}

void finish_csv(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out)
        throw std::runtime_error("failed while writing '" + path + "'");
}

} // namespace

void emit_solution_csv(const SolutionTable& table, const std::string& path) {
    const int n = table.x_optimal.n_levels();
    if (table.x_t.n_levels() != n || table.x_f.n_levels() != n)
        throw std::invalid_argument("emit_solution_csv: level count mismatch");
    std::ofstream out = open_csv(path);
    out << "level,x_optimal,x_t,x_f\n";
    for (int level = 0; level < n; ++level)
        out << level << ',' << format_number(table.x_optimal.x[level]) << ','
            << format_number(table.x_t.x[level]) << ','
            << format_number(table.x_f.x[level]) << '\n';
    finish_csv(out, path);
}

void emit_sweep_csv(const std::vector<SweepCell>& table, const std::string& path) {
    std::ofstream out = open_csv(path);
    out << "axis,value,scheme,mean_runtime,ci95_halfwidth,n_draws\n";
    for (const SweepCell& cell : table)
        out << cell.axis << ',' << format_number(cell.value) << ',' << cell.scheme
            << ',' << format_number(cell.estimate.mean) << ','
            << format_number(cell.estimate.half_width_95) << ','
            << cell.estimate.n_draws << '\n';
    finish_csv(out, path);
}

void emit_training_csv(const TrainingTrace& trace, const std::string& path) {
    std::ofstream out = open_csv(path);
    out << "iteration,loss,runtime\n";
    for (size_t i = 0; i < trace.loss.size(); ++i)
        out << (i + 1) << ',' << format_number(trace.loss[i]) << ','
            << format_number(trace.runtime[i]) << '\n';
    finish_csv(out, path);
}

} // namespace bcgc
