#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include "json.hpp"

#include "gerw/model.hpp"
#include "gerw/rng.hpp"

namespace gerw {

using Rational = boost::multiprecision::cpp_rational;

/// Parses "p/q", an integer, or a terminating decimal ("0.75") into an exact rational.
Rational parse_rational(const std::string& text);
/// Exact rational value of a finite double.
Rational exact_rational(double x);
std::string to_string(const Rational& q);

/// What the increment law may depend on at time n.
struct StepContext {
    std::uint64_t time = 0;
    bool fresh = true;
    bool in_excitation = true;

    /// First visit to a site of A: the drift condition applies.
    bool excited() const noexcept { return fresh && in_excitation; }
};

struct WeightedStep {
    Site step;
    double probability = 0.0;
    std::optional<Rational> exact;
};

using Support = std::vector<WeightedStep>;

/// Conditional law of X_{n+1} - X_n given the context. Kernels are immutable
/// and may be shared between worker threads.
class IncrementKernel {
public:
    virtual ~IncrementKernel() = default;

    virtual std::string name() const = 0;
    virtual int dimension() const = 0;
    /// Strict bound K on step norms.
    virtual double jump_bound() const = 0;
    /// Declared ellipticity constants (h, r).
    virtual double ellipticity_mass() const = 0;
    virtual double ellipticity_displacement() const = 0;
    virtual bool finite_support() const { return true; }
    virtual std::size_t max_support_size() const = 0;

    virtual Support support(const StepContext& ctx) const = 0;

    /// Inverse-CDF draw from support(ctx) given u in [0, 1).
    virtual Site sample(const StepContext& ctx, double u) const;
    /// E[step | ctx] . l
    virtual double mean_projection(const StepContext& ctx, const Direction& l) const;

    /// Zero-mean law is uniform on the 2d unit steps; enables the exact UE2 argument.
    virtual bool symmetric_nearest_neighbor_martingale() const { return false; }

    virtual nlohmann::json describe() const = 0;
};

using KernelPtr = std::shared_ptr<const IncrementKernel>;

/// Default ellipticity constants for nearest-neighbour kernels in dimension d.
double nearest_neighbor_h(int dim);
double nearest_neighbor_r(int dim);

/// Tilted nearest-neighbour kernel. On excited contexts the walk steps to
/// sign(e*.l) e* with probability p_n = min(1, sqrt(d) lambda_n) and is
/// otherwise uniform on the 2d unit steps; it is uniform on all other
/// contexts. With `rational_denominator` = D > 0, p_n is rounded up to a
/// multiple of 1/D so the law is exactly rational.
KernelPtr tilted_nn_kernel(int dim, const Direction& l, const DriftSchedule& schedule,
                           std::uint64_t rational_denominator = 0);

/// Classical cookie-style kernel: a fixed rational tilt q toward e* on
/// excited contexts, the remaining mass spread evenly on the other 2d - 1
/// unit steps; uniform elsewhere.
KernelPtr cookie_kernel(int dim, const Direction& l, const Rational& tilt);

/// Pure martingale: uniform on the 2d unit steps on every context.
KernelPtr uniform_kernel(int dim);

/// Kernel given by two explicit, time-independent tables (excited and plain contexts).
KernelPtr table_kernel(std::string name, int dim, double jump_bound, double h, double r, Support excited,
                       Support plain);

/// Point mass at `step` on every context.
KernelPtr point_mass_kernel(const Site& step, double jump_bound = 2.0);

/// Builds a support entry from an exact rational.
WeightedStep exact_step(const Site& step, const Rational& p);

/// Draws the step at time ctx.time of `trajectory` from the stream keyed by the rng seed.
Site sample_step(const IncrementKernel& kernel, const StepContext& ctx, const CounterRng& rng,
                 std::uint64_t trajectory);

} // namespace gerw
