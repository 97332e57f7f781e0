#include "gerw/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace gerw {

Observable parse_observable(const std::string& name) {
    if (name == "final_proj") return Observable::final_proj;
    if (name == "survived") return Observable::survived;
    if (name == "range_size") return Observable::range_size;
    if (name == "min_proj") return Observable::min_proj;
    fail(ErrorKind::config, "unknown observable '" + name + "' (final_proj, survived, range_size, min_proj)");
}

const char* to_string(Observable o) {
    switch (o) {
    case Observable::final_proj: return "final_proj";
    case Observable::survived: return "survived";
    case Observable::range_size: return "range_size";
    case Observable::min_proj: return "min_proj";
    }
    return "?";
}

Rational ExactDistribution::total() const {
    Rational t(0);
    for (const auto& [v, p] : outcomes) t += p;
    return t;
}

Rational ExactDistribution::mean() const {
    Rational m(0);
    for (const auto& [v, p] : outcomes) m += exact_rational(v) * p;
    return m;
}

namespace {

struct Enumerator {
    const WalkConfig& config;
    const IncrementKernel& kernel;
    std::uint64_t horizon;
    Observable observable;
    ExactDistribution& out;

    std::vector<Site> visited;
    Site position;
    double min_proj = 0.0;
    bool survived = true;

    void descend(std::uint64_t n, bool fresh, bool in_a, const Rational& prob) {
        if (n == horizon) {
            out.outcomes[value()] += prob;
            ++out.paths;
            return;
        }
        const StepContext ctx{n, fresh, in_a};
        for (const auto& w : kernel.support(ctx)) {
            require(w.exact.has_value(), ErrorKind::not_rational,
                    "kernel '" + kernel.name() + "' has no exact probabilities at n=" + std::to_string(n) +
                        " (declare a rational grid for oracle runs)");
            if (*w.exact == 0) continue;

            const Site saved = position;
            const double saved_min = min_proj;
            const bool saved_survived = survived;

            position += w.step;
            const bool next_fresh = std::find(visited.begin(), visited.end(), position) == visited.end();
            if (next_fresh) visited.push_back(position);
            const double proj = config.direction.dot(position);
            min_proj = std::min(min_proj, proj);
            if (!(proj > 0.0)) survived = false;

            descend(n + 1, next_fresh, config.excitation.contains(position), prob * *w.exact);

            if (next_fresh) visited.pop_back();
            position = saved;
            min_proj = saved_min;
            survived = saved_survived;
        }
    }

    double value() const {
        switch (observable) {
        case Observable::final_proj: return config.direction.dot(position);
        case Observable::survived: return survived ? 1.0 : 0.0;
        case Observable::range_size: return static_cast<double>(visited.size());
        case Observable::min_proj: return min_proj;
        }
        return 0.0;
    }
};

} // namespace

ExactDistribution enumerate(const WalkConfig& config, std::uint64_t horizon, Observable observable,
                            std::uint64_t cap) {
    require(config.kernel != nullptr, ErrorKind::config, "no kernel configured");
    require(config.kernel->dimension() == config.dimension(), ErrorKind::config, "kernel/direction dimension mismatch");
    const auto s = static_cast<std::uint64_t>(config.kernel->max_support_size());
    std::uint64_t paths = 1;
    for (std::uint64_t k = 0; k < horizon; ++k) {
        require(s <= 1 || paths <= cap / s, ErrorKind::too_large,
                "support size " + std::to_string(s) + " to the power H = " + std::to_string(horizon) +
                    " exceeds the enumeration cap " + std::to_string(cap));
        paths *= std::max<std::uint64_t>(s, 1);
    }
    require(paths <= cap, ErrorKind::too_large, "enumeration exceeds the cap");

    ExactDistribution dist;
    dist.horizon = horizon;
    dist.observable = observable;
    Enumerator e{config, *config.kernel, horizon, observable, dist, {}, Site(config.dimension())};
    e.visited.push_back(e.position);
    e.descend(0, true, config.excitation.contains(e.position), Rational(1));
    return dist;
}

Rational exact_mean_proj(const WalkConfig& config, std::uint64_t horizon, std::uint64_t cap) {
    return enumerate(config, horizon, Observable::final_proj, cap).mean();
}

void write_distribution_csv(std::ostream& out, const ExactDistribution& dist) {
    out << "value,numerator,denominator\n";
    for (const auto& [v, p] : dist.outcomes) {
        nlohmann::json jv = v; // shortest round-trip representation
        out << jv.dump() << ',' << numerator(p).str() << ',' << denominator(p).str() << '\n';
    }
}

} // namespace gerw
