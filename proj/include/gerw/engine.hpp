#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "gerw/kernels.hpp"
#include "gerw/model.hpp"
#include "gerw/rng.hpp"

namespace gerw {

/// Everything needed to simulate one ensemble of walks.
struct WalkConfig {
    Direction direction = Direction::axis(2);
    KernelPtr kernel;
    std::optional<DriftSchedule> schedule;
    ExcitationSet excitation = ExcitationSet::full_lattice();
    std::uint64_t horizon = 0;
    std::uint64_t seed = 0;
    /// Maximum range size before a trajectory is aborted and flagged.
    std::size_t memory_cap = std::size_t{1} << 26;
    /// Times at which per-trajectory snapshots are taken; the horizon is always added.
    std::vector<std::uint64_t> checkpoints;
    /// Levels K for first-passage times zeta_K = inf{n : X_n.l >= K}.
    std::vector<double> passage_levels;

    int dimension() const noexcept { return direction.dim(); }

    /// Rejects inconsistent dimensions and horizons whose reachable
    /// coordinates (horizon * K) would not fit the packed site key.
    void validate() const;
    std::vector<std::uint64_t> normalized_checkpoints() const;
    /// Canonical description of everything that influences results.
    std::string fingerprint() const;
};

/// L_n(m): visits with X.l in [m, m+1), stored densely between the extreme bins.
class LocalTimes {
public:
    void clear() noexcept {
        counts_.clear();
        offset_ = 0;
    }
    void add(std::int64_t bin);
    std::uint64_t at(std::int64_t bin) const noexcept;
    std::uint64_t total() const noexcept;
    std::map<std::int64_t, std::uint64_t> to_map() const;
    std::int64_t min_bin() const noexcept { return offset_; }
    std::int64_t max_bin() const noexcept { return offset_ + static_cast<std::int64_t>(counts_.size()) - 1; }
    bool empty() const noexcept { return counts_.empty(); }

private:
    std::int64_t offset_ = 0;
    std::vector<std::uint64_t> counts_;
};

struct CheckpointSample {
    std::uint64_t n = 0;
    double proj = 0.0;
    double min_proj = 0.0;
    double max_proj = 0.0;
    bool survived = true;
    std::uint64_t range_size = 1;
    double compensator = 0.0;
};

struct TrajectoryStats {
    std::uint64_t trajectory = 0;
    std::uint64_t steps = 0;
    bool aborted = false;

    std::uint64_t range_size = 1;
    LocalTimes local_times;
    double min_proj = 0.0;
    double max_proj = 0.0;
    double final_proj = 0.0;
    /// X_k.l > 0 for every 1 <= k <= n.
    bool survived = true;
    /// Sum of D_k.l with D_k the exact conditional mean increment.
    double compensator_proj = 0.0;
    std::map<double, std::uint64_t> first_passage;
    std::vector<CheckpointSample> checkpoints;
};

struct StepEvent {
    std::uint64_t time;
    const Site& position;
    double proj;
    bool fresh;
    bool in_excitation;
};

/// Receives X_0, X_1, ... as they are produced.
class StepObserver {
public:
    virtual ~StepObserver() = default;
    virtual void on_position(const StepEvent& event) = 0;
    virtual void on_finish(std::uint64_t /*last_time*/) {}
};

/// One step of the optional log: the step taken from time `time` and the
/// context it was drawn under.
struct StepRecord {
    std::uint64_t time = 0;
    Site dx;
    bool fresh = false;
    bool excited = false;
};

/// Simulates trajectories of one config, reusing the visited-set storage.
class TrajectoryRunner {
public:
    explicit TrajectoryRunner(const WalkConfig& config);

    TrajectoryStats run(std::uint64_t trajectory, StepObserver* observer = nullptr,
                        std::vector<StepRecord>* log = nullptr);

private:
    const WalkConfig& config_;
    CounterRng rng_;
    WalkState state_;
    std::vector<std::uint64_t> checkpoints_;
    std::vector<double> levels_;
};

TrajectoryStats run_trajectory(const WalkConfig& config, std::uint64_t trajectory, StepObserver* observer = nullptr,
                               std::vector<StepRecord>* log = nullptr);

/// Positions X_0..X_n rebuilt from a step log.
std::vector<Site> path_from_log(int dim, std::span<const StepRecord> log);

/// Records every position.
class PathRecorder final : public StepObserver {
public:
    void on_position(const StepEvent& e) override { path.push_back(e.position); }
    std::vector<Site> path;
};

// ---------------------------------------------------------------- excursions

enum class GammaOutcome { hit, miss, censored };

const char* to_string(GammaOutcome g);

/// Exit times tau_j from H(0, m), reentry times nu_j, and for each reentry
/// whether X.l < 0 within (nu_j, nu_j + m_hat], m_hat = floor(m / r) + 1.
/// `censored` marks windows that run past the end of the trajectory.
struct ExcursionRecord {
    double m = 0.0;
    std::uint64_t m_hat = 0;
    std::vector<std::uint64_t> tau;
    std::vector<std::uint64_t> nu;
    std::vector<GammaOutcome> gamma;
};

class ExcursionTracker final : public StepObserver {
public:
    ExcursionTracker(double m, double r);

    void on_position(const StepEvent& e) override { observe(e.time, e.proj); }
    void on_finish(std::uint64_t last_time) override;

    void observe(std::uint64_t time, double proj);
    const ExcursionRecord& record() const noexcept { return record_; }
    void reset();

private:
    struct Window {
        std::size_t index;
        std::uint64_t deadline;
    };

    ExcursionRecord record_;
    bool seeking_exit_ = true;
    std::vector<Window> open_;
};

ExcursionRecord track_excursions(std::span<const Site> path, const Direction& l, double m, double r);

// ---------------------------------------------------------------- traps

/// Strips H^n_j = H(2(j-1) n^e_w, 2(j+1) n^e_w) over all integers j, the
/// traps among them, and the sigma_k recursion.
struct TrapDiagnostics {
    double e_w = 0.0;
    double e_t = 0.0;
    double width = 0.0;     // 4 n^e_w
    double threshold = 0.0; // n^e_t
    std::map<std::int64_t, std::uint64_t> strip_counts;
    std::set<std::int64_t> traps;
    std::vector<std::uint64_t> sigma;
    /// |R_n| >= n^(1/2 + e_w(1-b) - 4 eps)
    bool g = false;
    /// L_n(k) <= n^(1/2 + eps) for every level k
    bool g1 = false;
    /// a new site is hit in each completed [sigma_{j-1}, sigma_j), j <= n^(1 - 2e_w + eps) / 2
    bool g2 = false;
};

TrapDiagnostics trap_scan(std::span<const Site> path, const Direction& l, double e_w, double b, double eps);

// ---------------------------------------------------------------- step log output

/// CSV with header `time,dx_0,...,dx_{d-1},fresh,excited`.
void write_step_log_csv(std::ostream& out, int dim, std::span<const StepRecord> log);
/// Little-endian frame: "GERWLOG1", u32 d, u64 count, then per record
/// u64 time, d x i32 dx, u8 flags (bit 0 fresh, bit 1 excited).
void write_step_log_binary(std::ostream& out, int dim, std::span<const StepRecord> log);
std::vector<StepRecord> read_step_log_binary(std::istream& in, int* dim_out = nullptr);

} // namespace gerw
