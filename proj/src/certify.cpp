#include "gerw/certify.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numbers>

namespace gerw {

namespace {

constexpr double kTol = 1e-12;

struct SupportFacts {
    bool valid_law = true;
    bool bounded = true;
    std::vector<double> mean;
    double mean_proj = 0.0;
    double ue1_mass = 0.0;
    bool zero_mean = true;
    bool uniform_nn = false;
    double ue2_min_mass = 1.0; // only filled for zero-mean supports
    std::string ue2_witness;
    std::string detail;
};

std::string support_key(const Support& s) {
    std::string key;
    for (const auto& w : s) {
        for (auto c : w.step.coords()) key.append(reinterpret_cast<const char*>(&c), sizeof c);
        key.append(reinterpret_cast<const char*>(&w.probability), sizeof w.probability);
    }
    return key;
}

bool is_uniform_nn(const Support& s, int dim) {
    std::vector<double> mass(static_cast<std::size_t>(2 * dim), 0.0);
    for (const auto& w : s) {
        if (w.probability == 0.0) continue;
        if (std::abs(w.step.norm() - 1.0) > 0.0) return false;
        for (int i = 0; i < dim; ++i) {
            if (w.step[i] != 0) mass[static_cast<std::size_t>(2 * i + (w.step[i] > 0 ? 0 : 1))] += w.probability;
        }
    }
    const double target = 1.0 / (2.0 * dim);
    return std::all_of(mass.begin(), mass.end(), [&](double m) { return std::abs(m - target) <= kTol; });
}

SupportFacts analyze(const Support& s, int dim, double K, double r, const Direction& l,
                     const std::vector<Direction>& grid) {
    SupportFacts f;
    f.mean.assign(static_cast<std::size_t>(dim), 0.0);
    double total = 0.0;
    Rational exact_total(0);
    bool all_exact = true;
    for (const auto& w : s) {
        if (w.probability < 0.0) {
            f.valid_law = false;
            f.detail = "negative probability at step " + w.step.to_string();
        }
        total += w.probability;
        if (w.exact) {
            exact_total += *w.exact;
        } else {
            all_exact = false;
        }
        if (w.probability > 0.0 && !(w.step.norm() < K)) {
            f.bounded = false;
            f.detail = "step " + w.step.to_string() + " has norm " + std::to_string(w.step.norm()) +
                       " >= K = " + std::to_string(K);
        }
        for (int i = 0; i < dim; ++i) f.mean[static_cast<std::size_t>(i)] += w.probability * static_cast<double>(w.step[i]);
        if (l.dot(w.step) > r) f.ue1_mass += w.probability;
    }
    if (all_exact ? exact_total != 1 : std::abs(total - 1.0) > kTol) {
        f.valid_law = false;
        f.detail = "probabilities sum to " + std::to_string(total);
    }
    for (int i = 0; i < dim; ++i) f.mean_proj += f.mean[static_cast<std::size_t>(i)] * l[i];
    f.zero_mean = std::all_of(f.mean.begin(), f.mean.end(), [](double m) { return std::abs(m) <= kTol; });
    if (f.zero_mean) {
        f.uniform_nn = is_uniform_nn(s, dim);
        for (const auto& dir : grid) {
            double mass = 0.0;
            for (const auto& w : s) {
                if (dir.dot(w.step) > r) mass += w.probability;
            }
            if (mass < f.ue2_min_mass) {
                f.ue2_min_mass = mass;
                std::string c;
                for (double v : dir.components()) c += (c.empty() ? "" : ",") + std::to_string(v);
                f.ue2_witness = "l' = (" + c + ")";
            }
        }
    }
    return f;
}

} // namespace

std::vector<Direction> direction_grid(int dim, std::size_t count) {
    std::vector<Direction> out;
    out.reserve(count);
    if (dim == 2) {
        for (std::size_t k = 0; k < count; ++k) {
            const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
            out.push_back(Direction::normalized({std::cos(a), std::sin(a)}));
        }
        return out;
    }
    const CounterRng rng(0x5eed'd1ec'0000'0001ULL);
    std::uint64_t counter = 0;
    while (out.size() < count) {
        std::vector<double> v(static_cast<std::size_t>(dim));
        for (auto& x : v) {
            // Box-Muller on one Philox block
            const auto b = rng.block(static_cast<std::uint64_t>(dim), counter++);
            const double u1 = (static_cast<double>(b[0]) + 1.0) * 0x1.0p-32;
            const double u2 = static_cast<double>(b[1]) * 0x1.0p-32;
            x = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        }
        double sq = 0.0;
        for (double x : v) sq += x * x;
        if (sq > 1e-12) out.push_back(Direction::normalized(std::move(v)));
    }
    return out;
}

nlohmann::json EllipticityCertificate::to_json() const {
    nlohmann::json j{{"K", K},
                     {"h", h},
                     {"r", r},
                     {"bounded_ok", bounded_ok},
                     {"drift_ok", drift_ok},
                     {"martingale_ok", martingale_ok},
                     {"ue1_ok", ue1_ok},
                     {"ue2_ok", ue2_ok},
                     {"ue2_analytic", ue2_analytic},
                     {"n_max", n_max},
                     {"directions_checked", directions_checked},
                     {"certified", certified()}};
    if (counterexample) {
        j["counterexample"] = {{"condition", counterexample->condition},
                               {"time", counterexample->context.time},
                               {"fresh", counterexample->context.fresh},
                               {"in_excitation", counterexample->context.in_excitation},
                               {"detail", counterexample->detail}};
    } else {
        j["counterexample"] = nullptr;
    }
    return j;
}

EllipticityCertificate certify(const IncrementKernel& kernel, const std::optional<DriftSchedule>& schedule,
                               const Direction& l, const CertifyOptions& options) {
    require(kernel.finite_support(), ErrorKind::infinite_support,
            "kernel '" + kernel.name() + "' reports unbounded support; it is outside the model class");
    require(options.n_max >= 1, ErrorKind::domain, "certification needs n_max >= 1");
    require(options.direction_grid >= 100, ErrorKind::domain, "certification needs a direction grid of >= 100");
    const int dim = kernel.dimension();
    require(l.dim() == dim, ErrorKind::domain, "direction and kernel dimensions differ");

    EllipticityCertificate cert;
    cert.K = kernel.jump_bound();
    cert.h = options.h.value_or(kernel.ellipticity_mass());
    cert.r = std::min(1.0, options.r.value_or(kernel.ellipticity_displacement()));
    cert.n_max = options.n_max;
    require(cert.h > 0.0 && cert.h <= 1.0, ErrorKind::domain, "ellipticity mass h must lie in (0, 1]");
    require(cert.r > 0.0, ErrorKind::domain, "ellipticity displacement r must be > 0");
    cert.bounded_ok = cert.drift_ok = cert.martingale_ok = cert.ue1_ok = cert.ue2_ok = true;

    auto grid = direction_grid(dim, options.direction_grid);
    for (int i = 0; i < dim; ++i) {
        grid.push_back(Direction::axis(dim, i));
        std::vector<double> neg(static_cast<std::size_t>(dim), 0.0);
        neg[static_cast<std::size_t>(i)] = -1.0;
        grid.emplace_back(std::move(neg));
    }
    cert.directions_checked = grid.size();

    auto flag = [&](bool& ok, const char* condition, const StepContext& ctx, const std::string& detail) {
        if (ok) {
            ok = false;
            if (!cert.counterexample) cert.counterexample = CertificationFailure{condition, ctx, detail};
        }
    };

    std::map<std::string, SupportFacts> cache;
    bool saw_zero_mean = false;
    bool all_zero_mean_uniform = true;

    for (std::uint64_t n = 0; n <= options.n_max; ++n) {
        for (int cls = 0; cls < 4; ++cls) {
            const StepContext ctx{n, (cls & 1) != 0, (cls & 2) != 0};
            const Support s = kernel.support(ctx);
            auto key = support_key(s);
            auto it = cache.find(key);
            if (it == cache.end()) it = cache.emplace(std::move(key), analyze(s, dim, cert.K, cert.r, l, grid)).first;
            const SupportFacts& f = it->second;

            if (!f.valid_law || !f.bounded) flag(cert.bounded_ok, "bounded", ctx, f.detail);

            const bool drift_applies = ctx.excited() && schedule.has_value();
            if (drift_applies) {
                // the drift lower bound is only constrained where it is defined (n0 + n >= 1 when beta > 0)
                if (schedule->beta() == 0.0 || schedule->n0() + n >= 1) {
                    const double need = drift_lower_bound(*schedule, n);
                    if (f.mean_proj < need - kTol) {
                        flag(cert.drift_ok, "drift", ctx,
                             "drift condition shortfall at n=" + std::to_string(n) + ": mean.l = " +
                                 std::to_string(f.mean_proj) + " < lambda_n = " + std::to_string(need));
                    }
                }
            } else if (!f.zero_mean) {
                flag(cert.martingale_ok, "martingale", ctx,
                     "non-excited conditional mean is not zero (mean.l = " + std::to_string(f.mean_proj) + ")");
            }

            if (f.ue1_mass < cert.h - kTol) {
                flag(cert.ue1_ok, "ue1", ctx,
                     "P[step.l > r] = " + std::to_string(f.ue1_mass) + " < h = " + std::to_string(cert.h));
            }
            if (f.zero_mean) {
                saw_zero_mean = true;
                all_zero_mean_uniform = all_zero_mean_uniform && f.uniform_nn;
                if (f.ue2_min_mass < cert.h - kTol) {
                    flag(cert.ue2_ok, "ue2", ctx,
                         "P[step.l' > r] = " + std::to_string(f.ue2_min_mass) + " < h at " + f.ue2_witness);
                }
            }
        }
    }

    if (saw_zero_mean && kernel.symmetric_nearest_neighbor_martingale() && all_zero_mean_uniform) {
        // For every unit l' some axis has |e_i.l'| >= 1/sqrt(d); the matching
        // unit step then clears r with probability 1/(2d).
        const double axis_floor = 1.0 / std::sqrt(static_cast<double>(dim));
        cert.ue2_analytic = cert.r < axis_floor && cert.h <= 1.0 / (2.0 * dim) + kTol;
        if (!cert.ue2_analytic) {
            flag(cert.ue2_ok, "ue2", StepContext{0, false, false},
                 "nearest-neighbour argument needs r < 1/sqrt(d) and h <= 1/(2d)");
        }
    }
    return cert;
}

} // namespace gerw
