#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "gerw/engine.hpp"

namespace gerw {

/// Fixed-point accumulator (resolution 2^-32) over 128-bit integers. Integer
/// addition makes merges exactly associative and commutative, so any
/// sharding of an ensemble sums to the same bits.
class ExactSum {
public:
    void add(double x);
    void merge(const ExactSum& o) noexcept { raw_ += o.raw_; }
    double value() const noexcept;
    std::string raw_string() const;
    friend bool operator==(const ExactSum&, const ExactSum&) = default;

private:
    __int128 raw_ = 0;
};

using Histogram = std::map<double, std::uint64_t>;

struct CheckpointSummary {
    std::uint64_t n = 0;
    std::uint64_t count = 0;
    std::uint64_t survived = 0;
    ExactSum proj;
    ExactSum proj_sq;
    ExactSum martingale;    // (X_n - sum D_k).l
    ExactSum martingale_sq;
    ExactSum range;
    Histogram proj_hist;
    Histogram range_hist;
    Histogram min_proj_hist;

    friend bool operator==(const CheckpointSummary&, const CheckpointSummary&) = default;
};

/// Merged per-checkpoint statistics of an ensemble. The default-constructed
/// aggregate (no fingerprint, no trajectories) is the merge identity.
class EnsembleAggregate {
public:
    EnsembleAggregate() = default;
    explicit EnsembleAggregate(const WalkConfig& config);

    void add(const TrajectoryStats& stats);
    /// Throws ConfigMismatch when both sides are non-empty and built from different configs.
    static EnsembleAggregate merge(const EnsembleAggregate& a, const EnsembleAggregate& b);

    bool empty() const noexcept { return fingerprint_.empty(); }
    const std::string& fingerprint() const noexcept { return fingerprint_; }
    std::uint64_t trajectories() const noexcept { return trajectories_; }
    std::uint64_t aborted() const noexcept { return aborted_; }
    const std::vector<CheckpointSummary>& checkpoints() const noexcept { return checkpoints_; }
    const CheckpointSummary& at(std::uint64_t n) const;
    const CheckpointSummary& final() const;

    nlohmann::json to_json() const;
    friend bool operator==(const EnsembleAggregate&, const EnsembleAggregate&) = default;

private:
    std::string fingerprint_;
    std::uint64_t trajectories_ = 0;
    std::uint64_t aborted_ = 0;
    std::vector<CheckpointSummary> checkpoints_;
};

} // namespace gerw
