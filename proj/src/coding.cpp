#include "bcgc/coding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace bcgc {

namespace {

constexpr double kDecodeResidualTol = 1e-10;

// Exhaustive decodability verification is combinatorial; beyond this many
// subsets we spot-check random ones instead.
constexpr long kExhaustiveSubsetCap = 20000;

std::string active_key(std::span<const int> active) {
    std::string key;
    key.reserve(active.size() * sizeof(int));
    for (int w : active)
        key.append(reinterpret_cast<const char*>(&w), sizeof(int));
    return key;
}

Eigen::VectorXd solve_combination(const Eigen::MatrixXd& rows,
                                  std::span<const int> active) {
    // a' B_active = 1'  <=>  B_active' a = 1
    Eigen::MatrixXd bt(rows.cols(), active.size());
    for (size_t k = 0; k < active.size(); ++k) bt.col(k) = rows.row(active[k]);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(rows.cols());
    Eigen::VectorXd a = bt.completeOrthogonalDecomposition().solve(ones);
    if ((bt * a - ones).cwiseAbs().maxCoeff() > kDecodeResidualTol)
        throw std::runtime_error(
            "decode_coefficients: infeasible system (defective code matrix)");
    return a;
}

bool subset_decodable(const Eigen::MatrixXd& rows, std::span<const int> active) {
    try {
        solve_combination(rows, active);
        return true;
    } catch (const std::runtime_error&) {
        return false;
    }
}

// Visit every size-k subset of {0..n-1}; returns false as soon as the
// visitor does.
template <typename F>
bool for_each_subset(int n, int k, F&& visit) {
    std::vector<int> pick(k);
    std::iota(pick.begin(), pick.end(), 0);
    while (true) {
        if (!visit(std::span<const int>(pick))) return false;
        int i = k - 1;
        while (i >= 0 && pick[i] == n - k + i) --i;
        if (i < 0) return true;
        ++pick[i];
        for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
}

double log_choose(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

bool verify_decodable(const Eigen::MatrixXd& rows, int level, RngStream& rng) {
    const int n = static_cast<int>(rows.rows());
    const int k = n - level;
    if (log_choose(n, k) <= std::log(static_cast<double>(kExhaustiveSubsetCap))) {
        return for_each_subset(n, k, [&](std::span<const int> active) {
            return subset_decodable(rows, active);
        });
    }
    // Spot-check: random active sets.
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int trial = 0; trial < 128; ++trial) {
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<int> active(perm.begin(), perm.begin() + k);
        std::sort(active.begin(), active.end());
        if (!subset_decodable(rows, active)) return false;
    }
    return true;
}

} // namespace

struct CodeMatrix::DecodeCache {
    mutable std::shared_mutex mutex;
    std::unordered_map<std::string, Eigen::VectorXd> entries;
};

CodeMatrix::CodeMatrix(int level, Eigen::MatrixXd rows)
    : level_(level), rows_(std::move(rows)), cache_(std::make_unique<DecodeCache>()) {}

CodeMatrix::CodeMatrix(const CodeMatrix& other)
    : level_(other.level_),
      rows_(other.rows_),
      cache_(std::make_unique<DecodeCache>()) {}

CodeMatrix::CodeMatrix(CodeMatrix&&) noexcept = default;
CodeMatrix::~CodeMatrix() = default;

CodeMatrix CodeMatrix::build(int n_workers, int level, RngStream& rng) {
    const int N = n_workers;
    if (N < 1) throw std::invalid_argument("CodeMatrix: n_workers must be >= 1");
    if (level < 0 || level > N - 1)
        throw std::invalid_argument("CodeMatrix: level must lie in {0, ..., N-1}");
    if (level == 0) return CodeMatrix(0, Eigen::MatrixXd::Identity(N, N));

    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int attempt = 0; attempt < 64; ++attempt) {
        // H is level x N with zero row sums, so the all-ones vector lies in
        // its kernel; every code row is constructed inside that kernel.
        Eigen::MatrixXd h(level, N);
        for (int r = 0; r < level; ++r) {
            double row_sum = 0.0;
            for (int c = 0; c < N - 1; ++c) {
                h(r, c) = gauss(rng);
                row_sum += h(r, c);
            }
            h(r, N - 1) = -row_sum;
        }
        Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(N, N);
        bool ok = true;
        for (int n = 0; n < N && ok; ++n) {
            Eigen::MatrixXd sub(level, level);
            for (int j = 1; j <= level; ++j) sub.col(j - 1) = h.col((n + j) % N);
            Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
            if (!lu.isInvertible()) {
                ok = false;
                break;
            }
            const Eigen::VectorXd tail = lu.solve(-h.col(n));
            rows(n, n) = 1.0;
            for (int j = 1; j <= level; ++j) {
                if (tail[j - 1] == 0.0) ok = false; // window must stay dense
                rows(n, (n + j) % N) = tail[j - 1];
            }
        }
        if (!ok || !verify_decodable(rows, level, rng)) continue;
        return CodeMatrix(level, std::move(rows));
    }
    throw std::runtime_error("CodeMatrix::build: repeated rank failures");
}

CodeMatrix CodeMatrix::from_rows(int level, const Eigen::MatrixXd& rows) {
    const int N = static_cast<int>(rows.rows());
    if (rows.cols() != N)
        throw std::invalid_argument("CodeMatrix::from_rows: matrix must be square");
    if (level < 0 || level > N - 1)
        throw std::invalid_argument("CodeMatrix::from_rows: level out of range");
    for (int n = 0; n < N; ++n) {
        for (int c = 0; c < N; ++c) {
            const int offset = (c - n + N) % N;
            const bool in_window = offset <= level;
            if (in_window && rows(n, c) == 0.0)
                throw std::invalid_argument(
                    "CodeMatrix::from_rows: zero inside the cyclic window");
            if (!in_window && rows(n, c) != 0.0)
                throw std::invalid_argument(
                    "CodeMatrix::from_rows: nonzero outside the cyclic window");
        }
    }
    const bool all_ok = for_each_subset(N, N - level, [&](std::span<const int> a) {
        return subset_decodable(rows, a);
    });
    if (!all_ok)
        throw std::invalid_argument("CodeMatrix::from_rows: not decodable");
    return CodeMatrix(level, rows);
}

Eigen::VectorXd decode_coefficients(const CodeMatrix& code,
                                    std::span<const int> active_workers) {
    const int N = code.n_workers();
    const int need = N - code.level();
    if (static_cast<int>(active_workers.size()) < need)
        throw std::invalid_argument(
            "decode_coefficients: need at least N - s active workers");
    for (int w : active_workers)
        if (w < 0 || w >= N)
            throw std::invalid_argument("decode_coefficients: worker index out of range");

    const std::string key = active_key(active_workers);
    auto& cache = *code.cache_;
    {
        std::shared_lock lock(cache.mutex);
        if (auto it = cache.entries.find(key); it != cache.entries.end())
            return it->second;
    }
    Eigen::VectorXd a = solve_combination(code.rows(), active_workers);
    {
        std::unique_lock lock(cache.mutex);
        cache.entries.emplace(key, a);
    }
    return a;
}

SampleAssignment allocate_samples(const SystemConfig& cfg,
                                  const CodingProfile& profile, RngStream& rng) {
    cfg.require_even_split();
    if (profile.model_size() != cfg.model_size)
        throw std::invalid_argument("allocate_samples: profile size mismatch");
    const int N = cfg.n_workers;
    const int per_subset = cfg.n_samples / N;

    std::vector<int> samples(cfg.n_samples);
    std::iota(samples.begin(), samples.end(), 0);
    std::shuffle(samples.begin(), samples.end(), rng);

    SampleAssignment out;
    out.subsets.resize(N);
    for (int i = 0; i < N; ++i)
        out.subsets[i].assign(samples.begin() + static_cast<long>(i) * per_subset,
                              samples.begin() + static_cast<long>(i + 1) * per_subset);

    const int window = profile.max_level() + 1;
    out.worker_subsets.resize(N);
    for (int n = 0; n < N; ++n) {
        out.worker_subsets[n].reserve(window);
        for (int j = 0; j < window; ++j)
            out.worker_subsets[n].push_back((n + j) % N);
    }
    return out;
}

CodingScheme::CodingScheme(const CodingProfile& profile, int n_workers,
                           RngStream& rng) {
    by_level_.resize(n_workers);
    for (Eigen::Index l = 0; l < profile.s.size(); ++l) {
        const int level = profile.s[l];
        if (!by_level_[level])
            by_level_[level] =
                std::make_unique<CodeMatrix>(CodeMatrix::build(n_workers, level, rng));
    }
}

const CodeMatrix& CodingScheme::code_for_level(int level) const {
    if (level < 0 || level >= static_cast<int>(by_level_.size()) ||
        !by_level_[level])
        throw std::invalid_argument("CodingScheme: no code built for this level");
    return *by_level_[level];
}

Eigen::MatrixXd completion_times(const CodingProfile& profile,
                                 const WorkerDraw& draw, const SystemConfig& cfg) {
    const int N = cfg.n_workers;
    const int L = profile.model_size();
    if (draw.n_workers() != N)
        throw std::invalid_argument("completion_times: draw size mismatch");
    Eigen::MatrixXd times(N, L);
    double prefix = 0.0;
    for (int l = 0; l < L; ++l) {
        prefix += profile.s[l] + 1;
        times.col(l) = cfg.work_scale() * prefix * draw.times;
    }
    return times;
}

GradientWorkspace encode_partials(const CodingScheme& scheme,
                                  const CodingProfile& profile,
                                  const Eigen::MatrixXd& subset_partials) {
    const int N = static_cast<int>(subset_partials.rows());
    const int L = profile.model_size();
    if (subset_partials.cols() != L)
        throw std::invalid_argument("encode_partials: partials size mismatch");
    GradientWorkspace ws;
    ws.coded.resize(N, L);
    ws.recovered = Eigen::VectorXd::Zero(L);
    ws.recovery_times = Eigen::VectorXd::Zero(L);
    for (int l = 0; l < L; ++l)
        ws.coded.col(l) = scheme.code_for_level(profile.s[l]).rows() *
                          subset_partials.col(l);
    return ws;
}

Eigen::VectorXd recover_gradient(GradientWorkspace& workspace,
                                 const CodingProfile& profile,
                                 const CodingScheme& scheme,
                                 const Eigen::MatrixXd& arrivals) {
    const int N = static_cast<int>(arrivals.rows());
    const int L = profile.model_size();
    if (arrivals.cols() != L || workspace.coded.rows() != N ||
        workspace.coded.cols() != L)
        throw std::invalid_argument("recover_gradient: dimension mismatch");
    for (int n = 0; n < N; ++n)
        for (int l = 1; l < L; ++l)
            if (arrivals(n, l) < arrivals(n, l - 1))
                throw std::invalid_argument(
                    "recover_gradient: schedule not sequential in l");

    std::vector<std::pair<double, int>> order(N);
    for (int l = 0; l < L; ++l) {
        const int need = N - profile.s[l];
        int finite = 0;
        for (int n = 0; n < N; ++n) {
            order[n] = {arrivals(n, l), n};
            if (std::isfinite(arrivals(n, l))) ++finite;
        }
        if (finite < need)
            throw std::runtime_error(
                "recover_gradient: insufficient arrivals for coordinate " +
                std::to_string(l + 1));
        std::sort(order.begin(), order.end());
        std::vector<int> active(need);
        for (int k = 0; k < need; ++k) active[k] = order[k].second;
        std::sort(active.begin(), active.end());
        const Eigen::VectorXd a =
            decode_coefficients(scheme.code_for_level(profile.s[l]), active);
        double value = 0.0;
        for (int k = 0; k < need; ++k) value += a[k] * workspace.coded(active[k], l);
        workspace.recovered[l] = value;
        workspace.recovery_times[l] = order[need - 1].first;
    }
    return workspace.recovered;
}

} // namespace bcgc
