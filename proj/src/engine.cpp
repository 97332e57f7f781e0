#include "gerw/engine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "json.hpp"

namespace gerw {

// ---------------------------------------------------------------- config

void WalkConfig::validate() const {
    require(kernel != nullptr, ErrorKind::config, "no kernel configured");
    require(kernel->dimension() == dimension(), ErrorKind::config,
            "kernel dimension " + std::to_string(kernel->dimension()) + " differs from direction dimension " +
                std::to_string(dimension()));
    require(memory_cap >= 1, ErrorKind::config, "memory cap must be >= 1");
    const SitePacker packer(dimension());
    const double reach = static_cast<double>(horizon) * std::ceil(kernel->jump_bound());
    require(reach <= static_cast<double>(packer.max_abs_coordinate()), ErrorKind::overflow_risk,
            "horizon * K = " + std::to_string(reach) + " exceeds the " + std::to_string(packer.bits_per_coordinate()) +
                "-bit coordinate range of a packed d=" + std::to_string(dimension()) + " site");
    for (auto c : checkpoints) {
        require(c <= horizon, ErrorKind::config, "checkpoint " + std::to_string(c) + " lies beyond the horizon");
    }
}

std::vector<std::uint64_t> WalkConfig::normalized_checkpoints() const {
    std::vector<std::uint64_t> c;
    for (auto t : checkpoints) {
        if (t <= horizon) c.push_back(t);
    }
    c.push_back(horizon);
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    return c;
}

std::string WalkConfig::fingerprint() const {
    nlohmann::json j;
    j["direction"] = direction.components();
    j["kernel"] = kernel ? kernel->describe() : nlohmann::json();
    if (schedule) j["schedule"] = {schedule->lambda(), schedule->beta(), schedule->n0()};
    j["excitation"] = excitation.describe();
    nlohmann::json excluded = nlohmann::json::array();
    for (const auto& s : excitation.excluded()) excluded.push_back(s.to_string());
    j["excluded"] = excluded;
    j["horizon"] = horizon;
    j["seed"] = seed;
    j["memory_cap"] = memory_cap;
    j["checkpoints"] = normalized_checkpoints();
    j["passage_levels"] = passage_levels;
    return j.dump();
}

// ---------------------------------------------------------------- local times

void LocalTimes::add(std::int64_t bin) {
    if (counts_.empty()) {
        offset_ = bin;
        counts_.assign(1, 0);
    } else if (bin < offset_) {
        const auto grow = static_cast<std::size_t>(offset_ - bin);
        // grow geometrically toward the low side so repeated extensions stay amortized
        const std::size_t pad = std::max(grow, counts_.size());
        counts_.insert(counts_.begin(), pad, 0);
        offset_ -= static_cast<std::int64_t>(pad);
    } else if (bin > max_bin()) {
        const auto need = static_cast<std::size_t>(bin - offset_) + 1;
        counts_.resize(std::max(need, 2 * counts_.size()), 0);
    }
    ++counts_[static_cast<std::size_t>(bin - offset_)];
}

std::uint64_t LocalTimes::at(std::int64_t bin) const noexcept {
    if (counts_.empty() || bin < offset_ || bin > max_bin()) return 0;
    return counts_[static_cast<std::size_t>(bin - offset_)];
}

std::uint64_t LocalTimes::total() const noexcept {
    std::uint64_t t = 0;
    for (auto c : counts_) t += c;
    return t;
}

std::map<std::int64_t, std::uint64_t> LocalTimes::to_map() const {
    std::map<std::int64_t, std::uint64_t> m;
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        if (counts_[i]) m[offset_ + static_cast<std::int64_t>(i)] = counts_[i];
    }
    return m;
}

// ---------------------------------------------------------------- runner

TrajectoryRunner::TrajectoryRunner(const WalkConfig& config)
    : config_(config), rng_(config.seed), state_(config.dimension()),
      checkpoints_(config.normalized_checkpoints()), levels_(config.passage_levels) {
    config_.validate();
    std::sort(levels_.begin(), levels_.end());
    levels_.erase(std::unique(levels_.begin(), levels_.end()), levels_.end());
}

TrajectoryStats TrajectoryRunner::run(std::uint64_t trajectory, StepObserver* observer,
                                      std::vector<StepRecord>* log) {
    const IncrementKernel& kernel = *config_.kernel;
    const Direction& l = config_.direction;
    const ExcitationSet& excitation = config_.excitation;
    const std::uint64_t horizon = config_.horizon;

    TrajectoryStats st;
    st.trajectory = trajectory;
    state_.reset();
    st.checkpoints.reserve(checkpoints_.size());

    bool fresh = true;
    bool in_a = excitation.contains(state_.position());
    double proj = 0.0;
    double comp = 0.0;
    std::size_t next_level = 0;
    std::size_t next_cp = 0;

    auto visit = [&](std::uint64_t n) {
        st.local_times.add(static_cast<std::int64_t>(std::floor(proj)));
        st.min_proj = std::min(st.min_proj, proj);
        st.max_proj = std::max(st.max_proj, proj);
        if (n >= 1 && !(proj > 0.0)) st.survived = false;
        while (next_level < levels_.size() && proj >= levels_[next_level]) st.first_passage[levels_[next_level++]] = n;
        if (next_cp < checkpoints_.size() && checkpoints_[next_cp] == n) {
            st.checkpoints.push_back(CheckpointSample{n, proj, st.min_proj, st.max_proj, st.survived,
                                                      static_cast<std::uint64_t>(state_.range_size()), comp});
            ++next_cp;
        }
        if (observer) observer->on_position(StepEvent{n, state_.position(), proj, fresh, in_a});
    };

    visit(0);
    if (log) log->clear();
    for (std::uint64_t n = 0; n < horizon; ++n) {
        const StepContext ctx{n, fresh, in_a};
        comp += kernel.mean_projection(ctx, l);
        const Site step = kernel.sample(ctx, rng_.uniform(trajectory, n));
        if (log) log->push_back(StepRecord{n, step, fresh, ctx.excited()});
        fresh = state_.advance(step);
        if (state_.range_size() > config_.memory_cap) {
            st.aborted = true;
            st.steps = n + 1;
            break;
        }
        in_a = excitation.contains(state_.position());
        proj = l.dot(state_.position());
        visit(n + 1);
    }
    if (!st.aborted) st.steps = horizon;
    st.range_size = state_.range_size();
    st.final_proj = proj;
    st.compensator_proj = comp;
    if (observer) observer->on_finish(st.steps);
    return st;
}

TrajectoryStats run_trajectory(const WalkConfig& config, std::uint64_t trajectory, StepObserver* observer,
                               std::vector<StepRecord>* log) {
    TrajectoryRunner runner(config);
    return runner.run(trajectory, observer, log);
}

std::vector<Site> path_from_log(int dim, std::span<const StepRecord> log) {
    std::vector<Site> path{Site(dim)};
    path.reserve(log.size() + 1);
    for (const auto& r : log) path.push_back(path.back() + r.dx);
    return path;
}

// ---------------------------------------------------------------- excursions

const char* to_string(GammaOutcome g) {
    switch (g) {
    case GammaOutcome::hit: return "hit";
    case GammaOutcome::miss: return "miss";
    case GammaOutcome::censored: return "censored";
    }
    return "?";
}

ExcursionTracker::ExcursionTracker(double m, double r) {
    require(m > 0.0, ErrorKind::domain, "excursion strip height m must be > 0");
    require(r > 0.0 && r <= 1.0, ErrorKind::domain, "ellipticity displacement r must lie in (0, 1]");
    record_.m = m;
    record_.m_hat = static_cast<std::uint64_t>(std::floor(m / r)) + 1;
}

void ExcursionTracker::reset() {
    record_.tau.clear();
    record_.nu.clear();
    record_.gamma.clear();
    seeking_exit_ = true;
    open_.clear();
}

void ExcursionTracker::observe(std::uint64_t time, double proj) {
    if (!open_.empty()) {
        std::erase_if(open_, [&](const Window& w) {
            if (proj < 0.0) {
                record_.gamma[w.index] = GammaOutcome::hit;
                return true;
            }
            if (time >= w.deadline) {
                record_.gamma[w.index] = GammaOutcome::miss;
                return true;
            }
            return false;
        });
    }
    if (time == 0) return; // nu_0 = 0; both searches start strictly after it
    const bool inside = 0.0 <= proj && proj <= record_.m;
    if (seeking_exit_ && !inside) {
        record_.tau.push_back(time);
        seeking_exit_ = false;
    } else if (!seeking_exit_ && inside) {
        record_.nu.push_back(time);
        record_.gamma.push_back(GammaOutcome::censored);
        open_.push_back(Window{record_.gamma.size() - 1, time + record_.m_hat});
        seeking_exit_ = true;
    }
}

void ExcursionTracker::on_finish(std::uint64_t) {
    // windows still open ran past the data and stay censored
    open_.clear();
}

ExcursionRecord track_excursions(std::span<const Site> path, const Direction& l, double m, double r) {
    ExcursionTracker tracker(m, r);
    for (std::size_t n = 0; n < path.size(); ++n) tracker.observe(n, l.dot(path[n]));
    tracker.on_finish(path.empty() ? 0 : path.size() - 1);
    return tracker.record();
}

// ---------------------------------------------------------------- traps

TrapDiagnostics trap_scan(std::span<const Site> path, const Direction& l, double e_w, double b, double eps) {
    require(e_w > 0.0 && e_w < 1.0 / 6.0, ErrorKind::domain, "trap scan needs 0 < e_w < 1/6");
    require(b > 0.0 && b < 1.0, ErrorKind::domain, "trap scan needs b in (0, 1)");
    require(eps > 0.0, ErrorKind::domain, "trap scan needs eps > 0");
    TrapDiagnostics d;
    d.e_w = e_w;
    d.e_t = 2.0 * e_w * (1.0 - b / 2.0) - 2.0 * eps;
    require(d.e_t > 0.0, ErrorKind::domain, "eps too large: trap exponent 2 e_w (1 - b/2) - 2 eps must be > 0");

    d.sigma.push_back(0);
    if (path.size() <= 1) {
        d.g = d.g1 = d.g2 = true;
        return d;
    }
    const auto n = static_cast<std::uint64_t>(path.size() - 1);
    const double nd = static_cast<double>(n);
    const double w = std::pow(nd, e_w);
    d.width = 4.0 * w;
    d.threshold = std::pow(nd, d.e_t);

    std::unordered_map<Site, std::uint64_t, SiteHash> first_visit;
    std::vector<bool> fresh_at(path.size(), false);
    for (std::size_t k = 0; k < path.size(); ++k) {
        if (first_visit.emplace(path[k], k).second) fresh_at[k] = true;
    }

    // a projection p lies in H^n_j iff 2(j-1)w <= p <= 2(j+1)w
    for (const auto& [site, t] : first_visit) {
        const double p = l.dot(site);
        const auto lo = static_cast<std::int64_t>(std::ceil(p / (2.0 * w) - 1.0));
        const auto hi = static_cast<std::int64_t>(std::floor(p / (2.0 * w) + 1.0));
        for (auto j = lo; j <= hi; ++j) ++d.strip_counts[j];
    }
    for (const auto& [j, c] : d.strip_counts) {
        if (static_cast<double>(c) >= d.threshold) d.traps.insert(j);
    }

    // lattice offsets inside the Euclidean ball of radius n^e_w
    const int dim = path[0].dim();
    const auto rad = static_cast<std::int64_t>(std::floor(w));
    std::vector<Site> ball;
    Site off(dim);
    std::function<void(int)> enumerate = [&](int axis) {
        if (axis == dim) {
            if (off.norm() <= w) ball.push_back(off);
            return;
        }
        for (std::int64_t v = -rad; v <= rad; ++v) {
            off[axis] = v;
            enumerate(axis + 1);
        }
        off[axis] = 0;
    };
    enumerate(0);

    auto sparse_at = [&](std::uint64_t j) {
        std::uint64_t count = 0;
        for (const auto& o : ball) {
            auto it = first_visit.find(path[j] + o);
            if (it != first_visit.end() && it->second <= j) ++count;
        }
        return static_cast<double>(count) <= d.threshold;
    };
    const auto gap = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::floor(std::pow(nd, 2.0 * e_w - eps))));
    for (;;) {
        std::uint64_t j = d.sigma.back() + gap;
        while (j <= n && !sparse_at(j)) ++j;
        if (j > n) break;
        d.sigma.push_back(j);
    }

    d.g = static_cast<double>(first_visit.size()) >= std::pow(nd, 0.5 + e_w * (1.0 - b) - 4.0 * eps);

    std::map<std::int64_t, std::uint64_t> local;
    for (const auto& x : path) ++local[static_cast<std::int64_t>(std::floor(l.dot(x)))];
    const double lt_cap = std::pow(nd, 0.5 + eps);
    d.g1 = std::all_of(local.begin(), local.end(), [&](const auto& kv) { return static_cast<double>(kv.second) <= lt_cap; });

    const double intervals = 0.5 * std::pow(nd, 1.0 - 2.0 * e_w + eps);
    d.g2 = true;
    for (std::size_t k = 1; k < d.sigma.size() && static_cast<double>(k) <= intervals; ++k) {
        bool hit = false;
        for (auto t = d.sigma[k - 1]; t < d.sigma[k] && !hit; ++t) hit = fresh_at[t];
        if (!hit) {
            d.g2 = false;
            break;
        }
    }
    return d;
}

// ---------------------------------------------------------------- step logs

void write_step_log_csv(std::ostream& out, int dim, std::span<const StepRecord> log) {
    out << "time";
    for (int i = 0; i < dim; ++i) out << ",dx_" << i;
    out << ",fresh,excited\n";
    for (const auto& r : log) {
        out << r.time;
        for (int i = 0; i < dim; ++i) out << ',' << r.dx[i];
        out << ',' << (r.fresh ? 1 : 0) << ',' << (r.excited ? 1 : 0) << '\n';
    }
}

namespace {

template <class T>
void put_le(std::ostream& out, T v) {
    using U = std::make_unsigned_t<T>;
    auto u = static_cast<U>(v);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        out.put(static_cast<char>(u & 0xff));
        u = static_cast<U>(u >> 8);
    }
}

template <class T>
T get_le(std::istream& in) {
    using U = std::make_unsigned_t<T>;
    U u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        const int c = in.get();
        require(c != std::char_traits<char>::eof(), ErrorKind::config, "truncated step log");
        u |= static_cast<U>(static_cast<U>(c & 0xff) << (8 * i));
    }
    return static_cast<T>(u);
}

constexpr char kLogMagic[8] = {'G', 'E', 'R', 'W', 'L', 'O', 'G', '1'};

} // namespace

void write_step_log_binary(std::ostream& out, int dim, std::span<const StepRecord> log) {
    out.write(kLogMagic, sizeof kLogMagic);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(dim));
    put_le<std::uint64_t>(out, log.size());
    for (const auto& r : log) {
        put_le<std::uint64_t>(out, r.time);
        for (int i = 0; i < dim; ++i) put_le<std::int32_t>(out, static_cast<std::int32_t>(r.dx[i]));
        put_le<std::uint8_t>(out, static_cast<std::uint8_t>((r.fresh ? 1 : 0) | (r.excited ? 2 : 0)));
    }
}

std::vector<StepRecord> read_step_log_binary(std::istream& in, int* dim_out) {
    char magic[8];
    in.read(magic, sizeof magic);
    require(in.gcount() == 8 && std::equal(magic, magic + 8, kLogMagic), ErrorKind::config, "not a step log");
    const auto dim = static_cast<int>(get_le<std::uint32_t>(in));
    require(dim >= 1 && dim <= kMaxDimension, ErrorKind::config, "step log has an unsupported dimension");
    const auto count = get_le<std::uint64_t>(in);
    std::vector<StepRecord> log;
    for (std::uint64_t k = 0; k < count; ++k) {
        StepRecord r;
        r.time = get_le<std::uint64_t>(in);
        r.dx = Site(dim);
        for (int i = 0; i < dim; ++i) r.dx[i] = get_le<std::int32_t>(in);
        const auto flags = get_le<std::uint8_t>(in);
        r.fresh = (flags & 1) != 0;
        r.excited = (flags & 2) != 0;
        log.push_back(r);
    }
    if (dim_out) *dim_out = dim;
    return log;
}

} // namespace gerw
