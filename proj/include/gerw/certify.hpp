#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "gerw/kernels.hpp"

namespace gerw {

struct CertificationFailure {
    std::string condition; // "bounded", "drift", "martingale", "ue1", "ue2"
    StepContext context;
    std::string detail;
};

/// Outcome of checking the bounded-jump, drift/martingale and uniform
/// ellipticity conditions against a kernel by enumerating its support.
struct EllipticityCertificate {
    double K = 0.0;
    double h = 0.0;
    double r = 0.0;
    bool bounded_ok = false;
    bool drift_ok = false;
    bool martingale_ok = false;
    bool ue1_ok = false;
    bool ue2_ok = false;
    /// UE2 closed over all of S^{d-1} by the nearest-neighbour argument, not just the grid.
    bool ue2_analytic = false;
    std::uint64_t n_max = 0;
    std::size_t directions_checked = 0;
    std::optional<CertificationFailure> counterexample;

    bool certified() const noexcept { return bounded_ok && drift_ok && martingale_ok && ue1_ok && ue2_ok; }
    nlohmann::json to_json() const;
};

struct CertifyOptions {
    std::uint64_t n_max = 1000;
    std::size_t direction_grid = 1000;
    /// Override the kernel's declared constants.
    std::optional<double> h;
    std::optional<double> r;
};

/// Enumerates the support for every context class and every n <= n_max.
/// Without a schedule the drift check is vacuous and every context must be
/// mean-zero. r is clamped to 1. Throws InfiniteSupport for unbounded kernels.
EllipticityCertificate certify(const IncrementKernel& kernel, const std::optional<DriftSchedule>& schedule,
                               const Direction& l, const CertifyOptions& options = {});

/// Deterministic grid of unit vectors: evenly spaced angles for d = 2,
/// normalized Gaussian draws from a fixed Philox stream otherwise.
std::vector<Direction> direction_grid(int dim, std::size_t count);

} // namespace gerw
