#include "gerw/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "gerw/bounds.hpp"

namespace gerw::mc {

Interval wilson(std::uint64_t k, std::uint64_t n, double z) {
    if (n == 0) return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
    Interval ci{std::max(0.0, center - half), std::min(1.0, center + half)};
    if (k == 0) ci.low = 0.0;
    if (k == n) ci.high = 1.0;
    ci.low = std::min(ci.low, p);
    ci.high = std::max(ci.high, p);
    return ci;
}

Interval t_interval(double sum, double sum_sq, std::uint64_t n) {
    if (n == 0) return {0.0, 0.0};
    const double nn = static_cast<double>(n);
    const double mean = sum / nn;
    if (n == 1) return {mean, mean};
    const double var = std::max(0.0, (sum_sq - nn * mean * mean) / (nn - 1.0));
    const boost::math::students_t dist(nn - 1.0);
    const double q = boost::math::quantile(boost::math::complement(dist, 0.025));
    const double half = q * std::sqrt(var / nn);
    return {mean - half, mean + half};
}

nlohmann::json ExperimentResult::to_json() const {
    nlohmann::json cps = nlohmann::json::array();
    for (const auto& c : checkpoints) {
        cps.push_back({{"n", c.n}, {"estimate", c.estimate}, {"ci_low", c.ci_low}, {"ci_high", c.ci_high}});
    }
    nlohmann::json out = {{"schema_version", kSchemaVersion},
                          {"estimator", estimator},
                          {"n_trajectories", n_trajectories},
                          {"horizon", horizon},
                          {"point_estimate", point_estimate},
                          {"ci_low", ci_low},
                          {"ci_high", ci_high},
                          {"bound_value", nullptr},
                          {"vacuous", vacuous},
                          {"checkpoints", cps},
                          {"extra", extra}};
    if (bound_value && std::isfinite(*bound_value)) out["bound_value"] = *bound_value;
    return out;
}

namespace {

struct Shard {
    std::uint64_t begin;
    std::uint64_t end;
};

std::vector<Shard> shards(std::uint64_t n, unsigned workers) {
    const std::uint64_t w = std::max<std::uint64_t>(1, std::min<std::uint64_t>(workers, std::max<std::uint64_t>(n, 1)));
    std::vector<Shard> out;
    for (std::uint64_t i = 0; i < w; ++i) out.push_back({n * i / w, n * (i + 1) / w});
    return out;
}

template <class Work>
void parallel_shards(const std::vector<Shard>& parts, Work&& work) {
    if (parts.size() == 1) {
        work(0, parts[0]);
        return;
    }
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i) {
        threads.emplace_back([&, i] {
            try {
                work(i, parts[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

ExperimentResult proportion(std::string name, const EnsembleAggregate& agg, std::uint64_t hits, std::uint64_t total,
                            std::uint64_t horizon) {
    ExperimentResult r;
    r.estimator = std::move(name);
    r.n_trajectories = agg.trajectories();
    r.horizon = horizon;
    r.point_estimate = total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
    const auto ci = wilson(hits, total);
    r.ci_low = ci.low;
    r.ci_high = ci.high;
    r.extra["events"] = hits;
    r.extra["completed"] = total;
    r.extra["aborted"] = agg.aborted();
    return r;
}

} // namespace

EnsembleAggregate run_ensemble(const WalkConfig& config, std::uint64_t n_trajectories, unsigned workers) {
    config.validate();
    const auto parts = shards(n_trajectories, workers);
    std::vector<EnsembleAggregate> partial(parts.size(), EnsembleAggregate(config));
    parallel_shards(parts, [&](std::size_t i, Shard s) {
        TrajectoryRunner runner(config);
        for (std::uint64_t t = s.begin; t < s.end; ++t) partial[i].add(runner.run(t));
    });
    EnsembleAggregate out(config);
    for (const auto& p : partial) out = EnsembleAggregate::merge(out, p);
    return out;
}

std::vector<std::uint64_t> log_checkpoints(std::uint64_t horizon) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t n = 1; n <= horizon; n *= 10) {
        out.push_back(n);
        if (n > horizon / 10) break;
    }
    if (out.empty() || out.back() != horizon) out.push_back(horizon);
    return out;
}

ExperimentResult estimate_survival(const WalkConfig& config, std::uint64_t n_trajectories, unsigned workers) {
    require(n_trajectories >= 100, ErrorKind::config, "survival estimation needs at least 100 trajectories");
    WalkConfig c = config;
    for (auto n : log_checkpoints(c.horizon)) c.checkpoints.push_back(n);
    const auto agg = run_ensemble(c, n_trajectories, workers);
    const auto& last = agg.final();
    auto r = proportion("survival", agg, last.survived, last.count, c.horizon);
    for (const auto& cp : agg.checkpoints()) {
        const auto ci = wilson(cp.survived, cp.count);
        r.checkpoints.push_back({cp.n, cp.count ? static_cast<double>(cp.survived) / cp.count : 0.0, ci.low, ci.high});
    }
    r.extra["label"] = "horizon-truncated upper bound on the survival event";
    return r;
}

namespace {

std::uint64_t count_below(const Histogram& h, double threshold) {
    std::uint64_t k = 0;
    for (const auto& [v, c] : h) {
        if (v < threshold) k += c;
    }
    return k;
}

WalkConfig single_checkpoint(const WalkConfig& config, std::uint64_t n) {
    require(n >= 1, ErrorKind::config, "n must be at least 1");
    WalkConfig c = config;
    c.horizon = n;
    c.checkpoints = {n};
    return c;
}

} // namespace

ExperimentResult estimate_range_tail(const WalkConfig& config, std::uint64_t n, double alpha,
                                     std::uint64_t n_trajectories, unsigned workers, double gamma1, double gamma2) {
    require(alpha > 0.0 && alpha < 1.0 / 6.0, ErrorKind::domain, "alpha must lie in (0, 1/6)");
    const auto c = single_checkpoint(config, n);
    const auto agg = run_ensemble(c, n_trajectories, workers);
    const double threshold = std::pow(static_cast<double>(n), 0.5 + alpha);
    const auto& last = agg.final();
    auto r = proportion("range_tail", agg, count_below(last.range_hist, threshold), last.count, n);
    bool vacuous = false;
    r.bound_value = bounds::as_probability(bounds::range_tail_bound(static_cast<double>(n), gamma1, gamma2), &vacuous);
    r.vacuous = vacuous;
    r.extra["threshold"] = threshold;
    r.extra["alpha"] = alpha;
    return r;
}

std::optional<bool> position_hypothesis(const ExcitationSet& a, const Direction& l, double lambda, std::uint64_t n,
                                        double alpha) {
    const double w = std::pow(static_cast<double>(n), 0.5 + alpha);
    if (a.kind() == ExcitationSet::Kind::positive_half_space) {
        // the strip reaches below 0, where the complement is infinite
        return false;
    }
    const auto count = a.complement_count_in_strip(Strip(-w, 2.0 * lambda / 3.0 * w), l);
    if (!count) return std::nullopt;
    return static_cast<double>(*count) <= w / 3.0;
}

ExperimentResult estimate_position_tail(const WalkConfig& config, std::uint64_t n, double alpha,
                                        std::uint64_t n_trajectories, unsigned workers, double gamma1, double gamma2) {
    require(config.schedule.has_value(), ErrorKind::config, "position tail needs a drift schedule (lambda, beta)");
    const auto& s = *config.schedule;
    require(s.beta() < alpha, ErrorKind::domain, "beta < alpha required (alpha is the range-growth exponent)");
    const auto hyp = position_hypothesis(config.excitation, config.direction, s.lambda(), n, alpha);
    require(hyp.has_value(), ErrorKind::hypothesis_unverifiable,
            "cannot count Z^d \\ A for excitation set '" + config.excitation.describe() + "'");

    const auto c = single_checkpoint(config, n);
    const auto agg = run_ensemble(c, n_trajectories, workers);
    const double threshold = s.lambda() / 3.0 * std::pow(static_cast<double>(n), 0.5 + alpha - s.beta());
    const auto& last = agg.final();
    auto r = proportion("position_tail", agg, count_below(last.proj_hist, threshold), last.count, n);
    const double K = config.kernel->jump_bound();
    const double t1 = bounds::theta1(gamma1, K, std::min(1.0, s.lambda()), s.beta());
    const double t2 = bounds::theta2(gamma2, alpha, s.beta());
    bool vacuous = false;
    r.bound_value = bounds::as_probability(bounds::position_tail_bound(static_cast<double>(n), t1, t2), &vacuous);
    r.vacuous = vacuous;
    r.extra["threshold"] = threshold;
    r.extra["hypothesis_holds"] = *hyp;
    r.extra["theta1"] = t1;
    r.extra["theta2"] = t2;
    return r;
}

ExperimentResult estimate_min_tail(const WalkConfig& config, std::uint64_t n, double t, std::uint64_t n_trajectories,
                                   unsigned workers) {
    require(t >= 0.0, ErrorKind::domain, "t must be non-negative");
    const auto c = single_checkpoint(config, n);
    const auto agg = run_ensemble(c, n_trajectories, workers);
    const auto& last = agg.final();
    auto r = proportion("min_tail", agg, count_below(last.min_proj_hist, -t), last.count, n);
    const double raw = bounds::azuma_running_min_bound(t, n, config.kernel->jump_bound());
    bool vacuous = false;
    r.bound_value = bounds::as_probability(raw, &vacuous);
    r.vacuous = vacuous;
    r.extra["t"] = t;
    r.extra["bound_raw"] = raw;
    return r;
}

// ---------------------------------------------------------------- excursions

nlohmann::json ExcursionSummary::to_json() const {
    nlohmann::json hist = nlohmann::json::array();
    for (const auto& [k, v] : reentry_counts) hist.push_back({k, v});
    return {{"schema_version", kSchemaVersion},
            {"estimator", "excursions"},
            {"m", m},
            {"m_hat", m_hat},
            {"h", h},
            {"comparison", comparison},
            {"n_trajectories", trajectories},
            {"exits", exits},
            {"reentries", reentries},
            {"gamma_hits", hits},
            {"gamma_misses", misses},
            {"gamma_censored", censored},
            {"reentry_counts", hist},
            {"gamma_frequency", gamma_frequency},
            {"ci_low", gamma_ci.low},
            {"ci_high", gamma_ci.high}};
}

ExcursionSummary excursion_experiment(const WalkConfig& config, double m, std::uint64_t n_trajectories,
                                      unsigned workers) {
    require(m >= 1.0, ErrorKind::domain, "m must be at least 1");
    config.validate();
    const double r = std::min(1.0, config.kernel->ellipticity_displacement());
    ExcursionSummary out;
    out.m = m;
    out.h = config.kernel->ellipticity_mass();
    out.m_hat = static_cast<std::uint64_t>(std::floor(m / r)) + 1;
    out.comparison = std::pow(out.h, static_cast<double>(out.m_hat));
    if (n_trajectories == 0) {
        out.gamma_ci = {0.0, 1.0};
        return out;
    }

    const auto parts = shards(n_trajectories, workers);
    std::vector<ExcursionSummary> partial(parts.size());
    parallel_shards(parts, [&](std::size_t i, Shard s) {
        TrajectoryRunner runner(config);
        ExcursionTracker tracker(m, r);
        auto& p = partial[i];
        for (std::uint64_t t = s.begin; t < s.end; ++t) {
            tracker.reset();
            const auto stats = runner.run(t, &tracker);
            if (stats.aborted) continue;
            const auto& rec = tracker.record();
            ++p.trajectories;
            p.exits += rec.tau.size();
            p.reentries += rec.nu.size();
            ++p.reentry_counts[rec.nu.size()];
            for (auto g : rec.gamma) {
                if (g == GammaOutcome::hit) ++p.hits;
                else if (g == GammaOutcome::miss) ++p.misses;
                else ++p.censored;
            }
        }
    });
    for (const auto& p : partial) {
        out.trajectories += p.trajectories;
        out.exits += p.exits;
        out.reentries += p.reentries;
        out.hits += p.hits;
        out.misses += p.misses;
        out.censored += p.censored;
        for (const auto& [k, v] : p.reentry_counts) out.reentry_counts[k] += v;
    }
    const std::uint64_t decided = out.hits + out.misses;
    out.gamma_frequency = decided ? static_cast<double>(out.hits) / static_cast<double>(decided) : 0.0;
    out.gamma_ci = wilson(out.hits, decided);
    return out;
}

// ---------------------------------------------------------------- drift growth

nlohmann::json DriftCurve::to_json() const {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& c : points) {
        pts.push_back({{"n", c.n}, {"mean", c.estimate}, {"ci_low", c.ci_low}, {"ci_high", c.ci_high}});
    }
    nlohmann::json out = {{"schema_version", kSchemaVersion},
                          {"estimator", "drift_growth"},
                          {"points", pts},
                          {"fit_points", fit_points},
                          {"slope", nullptr},
                          {"slope_ci", nullptr}};
    if (slope) out["slope"] = *slope;
    if (slope_ci) out["slope_ci"] = {slope_ci->low, slope_ci->high};
    return out;
}

DriftCurve drift_growth_curve(const WalkConfig& config, const std::vector<std::uint64_t>& checkpoints,
                              std::uint64_t n_trajectories, unsigned workers) {
    require(!checkpoints.empty(), ErrorKind::config, "no checkpoints given");
    require(std::is_sorted(checkpoints.begin(), checkpoints.end()) &&
                std::adjacent_find(checkpoints.begin(), checkpoints.end()) == checkpoints.end(),
            ErrorKind::config, "checkpoints must be increasing");
    WalkConfig c = config;
    c.horizon = checkpoints.back();
    c.checkpoints = checkpoints;
    const double top = static_cast<double>(c.horizon);
    for (int i = 0; i <= 10; ++i) {
        const auto n = static_cast<std::uint64_t>(std::llround(top * std::pow(10.0, -1.0 + i / 10.0)));
        if (n >= 1) c.checkpoints.push_back(n);
    }
    const auto agg = run_ensemble(c, n_trajectories, workers);

    DriftCurve curve;
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& cp : agg.checkpoints()) {
        const double sum = cp.proj.value();
        const double mean = cp.count ? sum / static_cast<double>(cp.count) : 0.0;
        const auto ci = t_interval(sum, cp.proj_sq.value(), cp.count);
        curve.points.push_back({cp.n, mean, ci.low, ci.high});
        if (static_cast<double>(cp.n) * 10.0 >= top && mean > 0.0) {
            xs.push_back(std::log(static_cast<double>(cp.n)));
            ys.push_back(std::log(mean));
        }
    }
    curve.fit_points = xs.size();
    if (xs.size() >= 2) {
        const double k = static_cast<double>(xs.size());
        double mx = 0.0;
        double my = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            mx += xs[i] / k;
            my += ys[i] / k;
        }
        double sxx = 0.0;
        double sxy = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxx += (xs[i] - mx) * (xs[i] - mx);
            sxy += (xs[i] - mx) * (ys[i] - my);
        }
        if (sxx > 0.0) {
            const double b = sxy / sxx;
            curve.slope = b;
            if (xs.size() >= 3) {
                double sse = 0.0;
                for (std::size_t i = 0; i < xs.size(); ++i) {
                    const double e = ys[i] - my - b * (xs[i] - mx);
                    sse += e * e;
                }
                const double se = std::sqrt(sse / (k - 2.0) / sxx);
                const boost::math::students_t dist(k - 2.0);
                const double q = boost::math::quantile(boost::math::complement(dist, 0.025));
                curve.slope_ci = Interval{b - q * se, b + q * se};
            }
        }
    }
    return curve;
}

} // namespace gerw::mc
