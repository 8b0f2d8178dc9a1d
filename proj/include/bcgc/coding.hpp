#ifndef BCGC_CODING_HPP
#define BCGC_CODING_HPP

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <vector>

#include "bcgc/rng.hpp"
#include "bcgc/runtime.hpp"

namespace bcgc {

// Output of the sample allocation phase: the dataset split into N equal
// subsets plus the cyclic window of subsets each worker holds. The master
// allocates without seeing any worker times; no draw is reachable from here.
struct SampleAssignment {
    std::vector<std::vector<int>> subsets;        // N groups of sample indices
    std::vector<std::vector<int>> worker_subsets; // I_n, 0-based subset ids
};

SampleAssignment allocate_samples(const SystemConfig& cfg,
                                  const CodingProfile& profile, RngStream& rng);

// Combining matrix for one redundancy level: row n holds worker n's
// coefficients over the N per-subset partial derivatives, supported on the
// cyclic window {n, ..., n+s} (mod N). Any N-s rows span the all-ones row,
// so the master can decode from any N-s workers.
class CodeMatrix {
  public:
    // Random construction: all rows lie in the kernel of a random s x N
    // matrix whose rows are orthogonal to the all-ones vector. Resamples on
    // rank failure (a probability-zero event for continuous draws).
    static CodeMatrix build(int n_workers, int level, RngStream& rng);

    // Wrap explicit coefficients (regression fixtures); validates the
    // cyclic support and decodability of every admissible active set.
    static CodeMatrix from_rows(int level, const Eigen::MatrixXd& rows);

    int n_workers() const { return static_cast<int>(rows_.rows()); }
    int level() const { return level_; }
    const Eigen::MatrixXd& rows() const { return rows_; }

    CodeMatrix(const CodeMatrix& other);
    CodeMatrix(CodeMatrix&&) noexcept;
    ~CodeMatrix();

  private:
    CodeMatrix(int level, Eigen::MatrixXd rows);

    friend Eigen::VectorXd decode_coefficients(const CodeMatrix& code,
                                               std::span<const int> active_workers);

    int level_;
    Eigen::MatrixXd rows_;
    struct DecodeCache;
    std::unique_ptr<DecodeCache> cache_; // shared reads, exclusive insertion
};

// Coefficients a with a' B_active = 1'; throws if the active set is too
// small or the system is infeasible (which a valid CodeMatrix never is).
// Results are cached per active set.
Eigen::VectorXd decode_coefficients(const CodeMatrix& code,
                                    std::span<const int> active_workers);

// One CodeMatrix per distinct redundancy level of a sorted profile;
// coordinates in the same block share the matrix.
class CodingScheme {
  public:
    CodingScheme(const CodingProfile& profile, int n_workers, RngStream& rng);
    const CodeMatrix& code_for_level(int level) const;

  private:
    std::vector<std::unique_ptr<CodeMatrix>> by_level_;
};

// Worker n finishes the l-th coded partial derivative at
// (M/N) b T_n sum_{i<=l} (s_i+1); rows are workers, columns coordinates.
Eigen::MatrixXd completion_times(const CodingProfile& profile,
                                 const WorkerDraw& draw, const SystemConfig& cfg);

// Per-worker coded streams plus the master-side recovery state.
struct GradientWorkspace {
    Eigen::MatrixXd coded;          // N x L coded partial derivatives
    Eigen::VectorXd recovered;      // L, filled by recover_gradient
    Eigen::VectorXd recovery_times; // when each coordinate became decodable
};

// coded(n, l) = row n of the level-s_l code applied to the per-subset
// partials for coordinate l (subset_partials is N x L, row j = subset j).
GradientWorkspace encode_partials(const CodingScheme& scheme,
                                  const CodingProfile& profile,
                                  const Eigen::MatrixXd& subset_partials);

// Decodes every coordinate from the N-s_l earliest arrivals of that
// coordinate (ties broken by worker index; +inf marks a worker that never
// finishes). Returns the full gradient; also records per-coordinate
// recovery times in the workspace.
Eigen::VectorXd recover_gradient(GradientWorkspace& workspace,
                                 const CodingProfile& profile,
                                 const CodingScheme& scheme,
                                 const Eigen::MatrixXd& arrivals);

} // namespace bcgc

#endif
