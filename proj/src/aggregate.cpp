#include "gerw/aggregate.hpp"

#include <cmath>

namespace gerw {

void ExactSum::add(double x) {
    require(std::isfinite(x), ErrorKind::domain, "non-finite value in an ensemble sum");
    const double scaled = std::nearbyint(std::ldexp(x, 32));
    require(std::abs(scaled) < 0x1.0p126, ErrorKind::domain, "value too large for the fixed-point accumulator");
    raw_ += static_cast<__int128>(scaled);
}

double ExactSum::value() const noexcept { return std::ldexp(static_cast<double>(raw_), -32); }

std::string ExactSum::raw_string() const {
    if (raw_ == 0) return "0";
    __int128 v = raw_;
    const bool neg = v < 0;
    std::string digits;
    while (v != 0) {
        const int d = static_cast<int>(v % 10);
        digits.push_back(static_cast<char>('0' + (neg ? -d : d)));
        v /= 10;
    }
    if (neg) digits.push_back('-');
    return {digits.rbegin(), digits.rend()};
}

EnsembleAggregate::EnsembleAggregate(const WalkConfig& config) : fingerprint_(config.fingerprint()) {
    for (auto n : config.normalized_checkpoints()) {
        CheckpointSummary c;
        c.n = n;
        checkpoints_.push_back(std::move(c));
    }
}

void EnsembleAggregate::add(const TrajectoryStats& stats) {
    ++trajectories_;
    if (stats.aborted) {
        ++aborted_;
        return;
    }
    require(stats.checkpoints.size() == checkpoints_.size(), ErrorKind::config_mismatch,
            "trajectory checkpoints do not match the aggregate");
    for (std::size_t i = 0; i < checkpoints_.size(); ++i) {
        const auto& s = stats.checkpoints[i];
        auto& c = checkpoints_[i];
        require(s.n == c.n, ErrorKind::config_mismatch, "trajectory checkpoint times differ");
        ++c.count;
        c.survived += s.survived ? 1 : 0;
        c.proj.add(s.proj);
        c.proj_sq.add(s.proj * s.proj);
        const double y = s.proj - s.compensator;
        c.martingale.add(y);
        c.martingale_sq.add(y * y);
        c.range.add(static_cast<double>(s.range_size));
        ++c.proj_hist[s.proj];
        ++c.range_hist[static_cast<double>(s.range_size)];
        ++c.min_proj_hist[s.min_proj];
    }
}

EnsembleAggregate EnsembleAggregate::merge(const EnsembleAggregate& a, const EnsembleAggregate& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    require(a.fingerprint_ == b.fingerprint_, ErrorKind::config_mismatch,
            "aggregates were built from different configurations");
    EnsembleAggregate out = a;
    out.trajectories_ += b.trajectories_;
    out.aborted_ += b.aborted_;
    for (std::size_t i = 0; i < out.checkpoints_.size(); ++i) {
        auto& c = out.checkpoints_[i];
        const auto& o = b.checkpoints_[i];
        c.count += o.count;
        c.survived += o.survived;
        c.proj.merge(o.proj);
        c.proj_sq.merge(o.proj_sq);
        c.martingale.merge(o.martingale);
        c.martingale_sq.merge(o.martingale_sq);
        c.range.merge(o.range);
        for (const auto& [k, v] : o.proj_hist) c.proj_hist[k] += v;
        for (const auto& [k, v] : o.range_hist) c.range_hist[k] += v;
        for (const auto& [k, v] : o.min_proj_hist) c.min_proj_hist[k] += v;
    }
    return out;
}

const CheckpointSummary& EnsembleAggregate::at(std::uint64_t n) const {
    for (const auto& c : checkpoints_) {
        if (c.n == n) return c;
    }
    fail(ErrorKind::config, "no checkpoint at n = " + std::to_string(n));
}

const CheckpointSummary& EnsembleAggregate::final() const {
    require(!checkpoints_.empty(), ErrorKind::config, "empty aggregate has no checkpoints");
    return checkpoints_.back();
}

nlohmann::json EnsembleAggregate::to_json() const {
    auto hist = [](const Histogram& h) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& [k, v] : h) out.push_back({k, v});
        return out;
    };
    nlohmann::json cps = nlohmann::json::array();
    for (const auto& c : checkpoints_) {
        cps.push_back({{"n", c.n},
                       {"count", c.count},
                       {"survived", c.survived},
                       {"proj_sum", c.proj.raw_string()},
                       {"proj_sq_sum", c.proj_sq.raw_string()},
                       {"martingale_sum", c.martingale.raw_string()},
                       {"martingale_sq_sum", c.martingale_sq.raw_string()},
                       {"range_sum", c.range.raw_string()},
                       {"proj_hist", hist(c.proj_hist)},
                       {"range_hist", hist(c.range_hist)},
                       {"min_proj_hist", hist(c.min_proj_hist)}});
    }
    return {{"fingerprint", fingerprint_}, {"trajectories", trajectories_}, {"aborted", aborted_}, {"checkpoints", cps}};
}

} // namespace gerw
