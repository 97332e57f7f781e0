#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gerw/aggregate.hpp"
#include "gerw/engine.hpp"

namespace gerw::mc {

inline constexpr int kSchemaVersion = 1;
inline constexpr double kZ95 = 1.959963984540054;

struct Interval {
    double low = 0.0;
    double high = 0.0;
};

/// Wilson score interval for k successes in n trials.
Interval wilson(std::uint64_t k, std::uint64_t n, double z = kZ95);
/// Student-t 95% interval for a mean from its sum and sum of squares.
Interval t_interval(double sum, double sum_sq, std::uint64_t n);

struct CurvePoint {
    std::uint64_t n = 0;
    double estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

struct ExperimentResult {
    std::string estimator;
    std::uint64_t n_trajectories = 0;
    std::uint64_t horizon = 0;
    double point_estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::optional<double> bound_value;
    /// bound_value >= 1, so the comparison carries no information.
    bool vacuous = false;
    std::vector<CurvePoint> checkpoints;
    nlohmann::json extra = nlohmann::json::object();

    nlohmann::json to_json() const;
};

/// Runs trajectories 0..N-1 in `workers` contiguous shards and merges them
/// in shard order. The result does not depend on `workers`.
EnsembleAggregate run_ensemble(const WalkConfig& config, std::uint64_t n_trajectories, unsigned workers = 1);

/// 1, 10, 100, ... up to the horizon, plus the horizon.
std::vector<std::uint64_t> log_checkpoints(std::uint64_t horizon);

/// Truncated survival: X_k.l > 0 for 1 <= k <= horizon, with the curve at
/// logarithmic checkpoints on the same trajectories. Requires N >= 100.
ExperimentResult estimate_survival(const WalkConfig& config, std::uint64_t n_trajectories, unsigned workers = 1);

/// P[|R_n| < n^(1/2 + alpha)], paired with exp(-gamma1 n^gamma2).
ExperimentResult estimate_range_tail(const WalkConfig& config, std::uint64_t n, double alpha,
                                     std::uint64_t n_trajectories, unsigned workers = 1, double gamma1 = 0.05,
                                     double gamma2 = 0.05);

/// P[X_n.l < (1/3) lambda n^(1/2 + alpha - beta)], paired with 5n exp(-theta1 n^theta2).
/// The counting hypothesis on Z^d \ A is checked first; custom sets throw HypothesisUnverifiable.
ExperimentResult estimate_position_tail(const WalkConfig& config, std::uint64_t n, double alpha,
                                        std::uint64_t n_trajectories, unsigned workers = 1, double gamma1 = 0.05,
                                        double gamma2 = 0.05);

/// |(Z^d \ A) cap H(-n^(1/2+alpha), (2 lambda / 3) n^(1/2+alpha))| <= (1/3) n^(1/2+alpha).
/// nullopt when the set cannot be counted; false when the complement is infinite there.
std::optional<bool> position_hypothesis(const ExcitationSet& a, const Direction& l, double lambda, std::uint64_t n,
                                        double alpha);

/// P[min_{k<=n} X_k.l < -t], paired with the union Azuma bound n exp(-t^2 / (2 K^2 n)).
ExperimentResult estimate_min_tail(const WalkConfig& config, std::uint64_t n, double t, std::uint64_t n_trajectories,
                                   unsigned workers = 1);

struct ExcursionSummary {
    double m = 0.0;
    std::uint64_t m_hat = 0;
    double h = 0.0;
    double comparison = 0.0; // h^m_hat
    std::uint64_t trajectories = 0;
    std::uint64_t exits = 0;
    std::uint64_t reentries = 0;
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
    std::uint64_t censored = 0;
    /// histogram of reentries per trajectory
    std::map<std::uint64_t, std::uint64_t> reentry_counts;
    double gamma_frequency = 0.0;
    Interval gamma_ci;

    nlohmann::json to_json() const;
};

ExcursionSummary excursion_experiment(const WalkConfig& config, double m, std::uint64_t n_trajectories,
                                      unsigned workers = 1);

struct DriftCurve {
    std::vector<CurvePoint> points;
    /// least-squares slope of log mean against log n over the last decade
    std::optional<double> slope;
    std::optional<Interval> slope_ci;
    std::size_t fit_points = 0;

    nlohmann::json to_json() const;
};

/// Mean X_n.l at each checkpoint. Ten log-spaced points are added inside the
/// last decade for the slope fit.
DriftCurve drift_growth_curve(const WalkConfig& config, const std::vector<std::uint64_t>& checkpoints,
                              std::uint64_t n_trajectories, unsigned workers = 1);

} // namespace gerw::mc
