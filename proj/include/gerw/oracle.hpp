#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>

#include "gerw/engine.hpp"
#include "gerw/kernels.hpp"

namespace gerw {

enum class Observable { final_proj, survived, range_size, min_proj };

Observable parse_observable(const std::string& name);
const char* to_string(Observable o);

/// Exact law of an observable of X_0..X_H.
struct ExactDistribution {
    std::uint64_t horizon = 0;
    Observable observable = Observable::final_proj;
    std::map<double, Rational> outcomes;
    std::uint64_t paths = 0; // positive-probability paths enumerated

    Rational total() const;
    Rational mean() const;
};

inline constexpr std::uint64_t kOracleCap = 100'000'000;

/// Depth-first enumeration of every step sequence of length `horizon`,
/// carrying the visited set and the exact path probability. Freshness and
/// excitation are evaluated exactly as the engine does. Throws TooLarge when
/// s^H > cap (s the kernel's maximum support size) and NotRational when the
/// kernel has no exact probabilities.
ExactDistribution enumerate(const WalkConfig& config, std::uint64_t horizon, Observable observable,
                            std::uint64_t cap = kOracleCap);

/// Exact E[X_H . l].
Rational exact_mean_proj(const WalkConfig& config, std::uint64_t horizon, std::uint64_t cap = kOracleCap);

/// CSV `value,numerator,denominator`, one outcome per row in increasing value order.
void write_distribution_csv(std::ostream& out, const ExactDistribution& dist);

} // namespace gerw
