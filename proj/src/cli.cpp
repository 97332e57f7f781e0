#include "gerw/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"

#include "gerw/certify.hpp"
#include "gerw/montecarlo.hpp"
#include "gerw/oracle.hpp"

namespace gerw::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <class T>
void read(const json& j, const char* key, T& target) {
    if (j.contains(key) && !j.at(key).is_null()) target = j.at(key).get<T>();
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
    for (const auto& [k, v] : j.items()) {
        require(known.count(k) != 0, ErrorKind::config, "unknown key '" + k + "' in " + where);
    }
}

} // namespace

Settings Settings::from_json(const json& j) {
    require(j.is_object(), ErrorKind::config, "config must be a JSON object");
    reject_unknown(j,
                   {"experiment", "dimension", "direction", "kernel", "schedule", "excitation", "horizon",
                    "trajectories", "seed", "memory_cap", "checkpoints", "theorem_regime", "require_certificate",
                    "certify", "alpha", "range_alpha", "gamma1", "gamma2", "c_slack", "tail_n", "min_tail_t",
                    "excursion_m", "oracle", "mk_terms"},
                   "config");
    Settings s;
    try {
        read(j, "experiment", s.experiment);
        read(j, "dimension", s.dimension);
        read(j, "direction", s.direction);
        if (j.contains("kernel")) {
            const auto& k = j.at("kernel");
            if (k.is_string()) {
                s.kernel = k.get<std::string>();
            } else {
                reject_unknown(k, {"name", "rational_denominator", "tilt", "step"}, "kernel");
                read(k, "name", s.kernel);
                read(k, "rational_denominator", s.rational_denominator);
                read(k, "tilt", s.tilt);
                read(k, "step", s.step);
            }
        }
        if (j.contains("schedule")) {
            const auto& d = j.at("schedule");
            if (d.is_null()) {
                s.schedule.reset();
            } else {
                reject_unknown(d, {"lambda", "beta", "n0"}, "schedule");
                s.schedule = DriftSchedule(d.value("lambda", 0.5), d.value("beta", 0.1), d.value("n0", std::uint64_t{1}));
            }
        }
        if (j.contains("excitation")) {
            const auto& e = j.at("excitation");
            if (e.is_string()) {
                s.excitation = e.get<std::string>();
            } else {
                reject_unknown(e, {"kind", "excluded"}, "excitation");
                read(e, "kind", s.excitation);
                read(e, "excluded", s.excluded);
            }
        }
        read(j, "horizon", s.horizon);
        read(j, "trajectories", s.trajectories);
        if (j.contains("seed") && !j.at("seed").is_null()) s.seed = j.at("seed").get<std::uint64_t>();
        read(j, "memory_cap", s.memory_cap);
        read(j, "checkpoints", s.checkpoints);
        read(j, "theorem_regime", s.theorem_regime);
        read(j, "require_certificate", s.require_certificate);
        if (j.contains("certify")) {
            const auto& c = j.at("certify");
            reject_unknown(c, {"n_max", "direction_grid"}, "certify");
            read(c, "n_max", s.certify_n_max);
            read(c, "direction_grid", s.certify_directions);
        }
        read(j, "alpha", s.alpha);
        read(j, "range_alpha", s.range_alpha);
        read(j, "gamma1", s.gamma1);
        read(j, "gamma2", s.gamma2);
        read(j, "c_slack", s.c_slack);
        read(j, "tail_n", s.tail_n);
        read(j, "min_tail_t", s.min_tail_t);
        read(j, "excursion_m", s.excursion_m);
        if (j.contains("oracle")) {
            const auto& o = j.at("oracle");
            reject_unknown(o, {"horizon", "observable", "cap"}, "oracle");
            read(o, "horizon", s.oracle_horizon);
            read(o, "observable", s.oracle_observable);
            read(o, "cap", s.oracle_cap);
        }
        read(j, "mk_terms", s.mk_terms);
    } catch (const json::exception& e) {
        fail(ErrorKind::config, std::string("bad value in config: ") + e.what());
    }
    if (s.direction.empty()) {
        s.direction.assign(static_cast<std::size_t>(s.dimension), 0.0);
        if (s.dimension > 0) s.direction[0] = 1.0;
    }
    if (s.step.empty()) {
        s.step.assign(static_cast<std::size_t>(std::max(s.dimension, 0)), 0);
        if (s.dimension > 0) s.step[0] = 1;
    }
    return s;
}

json Settings::to_json() const {
    json sched = nullptr;
    if (schedule) sched = {{"lambda", schedule->lambda()}, {"beta", schedule->beta()}, {"n0", schedule->n0()}};
    json out = {{"experiment", experiment},
                {"dimension", dimension},
                {"direction", direction},
                {"kernel", {{"name", kernel}, {"rational_denominator", rational_denominator}, {"tilt", tilt}, {"step", step}}},
                {"schedule", sched},
                {"excitation", {{"kind", excitation}, {"excluded", excluded}}},
                {"horizon", horizon},
                {"trajectories", trajectories},
                {"seed", nullptr},
                {"memory_cap", memory_cap},
                {"checkpoints", checkpoints},
                {"theorem_regime", theorem_regime},
                {"require_certificate", require_certificate},
                {"certify", {{"n_max", certify_n_max}, {"direction_grid", certify_directions}}},
                {"alpha", alpha},
                {"range_alpha", range_alpha},
                {"gamma1", gamma1},
                {"gamma2", gamma2},
                {"c_slack", c_slack},
                {"tail_n", tail_n},
                {"min_tail_t", min_tail_t},
                {"excursion_m", excursion_m},
                {"oracle", {{"horizon", oracle_horizon}, {"observable", oracle_observable}, {"cap", oracle_cap}}},
                {"mk_terms", mk_terms}};
    if (seed) out["seed"] = *seed;
    return out;
}

namespace {

Site to_site(int dim, const std::vector<std::int64_t>& v, const std::string& what) {
    require(static_cast<int>(v.size()) == dim, ErrorKind::config, what + " must have " + std::to_string(dim) + " coordinates");
    Site x(dim);
    for (int i = 0; i < dim; ++i) x[i] = v[static_cast<std::size_t>(i)];
    return x;
}

} // namespace

WalkConfig build_walk_config(const Settings& s) {
    require(s.dimension >= 2 && s.dimension <= kMaxDimension, ErrorKind::config,
            "dimension must lie in [2, " + std::to_string(kMaxDimension) + "]");
    require(static_cast<int>(s.direction.size()) == s.dimension, ErrorKind::config, "direction has the wrong length");
    WalkConfig c;
    c.direction = Direction::normalized(s.direction);
    c.schedule = s.schedule;
    const int d = s.dimension;
    if (s.kernel == "tilted") {
        require(s.schedule.has_value(), ErrorKind::config, "the tilted kernel needs a drift schedule");
        c.kernel = tilted_nn_kernel(d, c.direction, *s.schedule, s.rational_denominator);
    } else if (s.kernel == "uniform") {
        c.kernel = uniform_kernel(d);
    } else if (s.kernel == "cookie") {
        c.kernel = cookie_kernel(d, c.direction, parse_rational(s.tilt));
    } else if (s.kernel == "point_mass") {
        c.kernel = point_mass_kernel(to_site(d, s.step, "kernel.step"));
    } else {
        fail(ErrorKind::config, "unknown kernel '" + s.kernel + "' (tilted, uniform, cookie, point_mass)");
    }
    if (s.excitation == "full") {
        c.excitation = ExcitationSet::full_lattice();
    } else if (s.excitation == "half_space") {
        c.excitation = ExcitationSet::positive_half_space(c.direction);
    } else if (s.excitation == "complement") {
        std::vector<Site> ex;
        for (const auto& v : s.excluded) ex.push_back(to_site(d, v, "excluded site"));
        c.excitation = ExcitationSet::complement(std::move(ex));
    } else {
        fail(ErrorKind::config, "unknown excitation kind '" + s.excitation + "' (full, half_space, complement)");
    }
    c.horizon = s.horizon;
    c.seed = s.seed.value_or(0);
    c.memory_cap = static_cast<std::size_t>(s.memory_cap);
    c.checkpoints = s.checkpoints;
    c.validate();
    return c;
}

bounds::LedgerInputs ledger_inputs(const Settings& s) {
    require(s.schedule.has_value(), ErrorKind::config, "the constants ledger needs a drift schedule");
    const auto c = build_walk_config(s);
    bounds::LedgerInputs in;
    in.alpha = s.alpha;
    in.beta = s.schedule->beta();
    in.lambda = s.schedule->lambda();
    in.n0 = s.schedule->n0();
    in.K = c.kernel->jump_bound();
    in.h = c.kernel->ellipticity_mass();
    in.r = std::min(1.0, c.kernel->ellipticity_displacement());
    in.gamma1 = s.gamma1;
    in.gamma2 = s.gamma2;
    in.c_slack = s.c_slack;
    return in;
}

namespace {

struct Output {
    fs::path dir;
    std::ofstream results;
    std::ofstream curves;

    Output(const fs::path& root, const Settings& s, const std::string& sub, const std::string& leaf) {
        dir = root / (s.experiment.empty() ? sub : s.experiment) / leaf;
        fs::create_directories(dir);
        results.open(dir / "results.jsonl");
        curves.open(dir / "curves.csv");
        std::ofstream(dir / "config.echo") << s.to_json().dump(2) << '\n';
        require(results.good() && curves.good(), ErrorKind::config, "cannot write to " + dir.string());
    }

    void line(const json& j) { results << j.dump() << '\n'; }
};

void write_meta(const fs::path& dir, const std::string& sub, unsigned workers, double seconds) {
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    json meta = {{"subcommand", sub},
                 {"workers", workers},
                 {"wall_seconds", seconds},
                 {"unix_time", std::chrono::duration_cast<std::chrono::seconds>(now).count()},
                 {"schema_version", mc::kSchemaVersion}};
    std::ofstream(dir / "meta.json") << meta.dump(2) << '\n';
}

EllipticityCertificate certify_settings(const Settings& s, const WalkConfig& c) {
    CertifyOptions opt;
    opt.n_max = s.certify_n_max;
    opt.direction_grid = s.certify_directions;
    return certify(*c.kernel, c.schedule, c.direction, opt);
}

std::string describe_failure(const EllipticityCertificate& cert) {
    if (!cert.counterexample) return "kernel not certified";
    const auto& f = *cert.counterexample;
    return "kernel not certified: " + f.condition + " check failed: " + f.detail;
}

void validate_for_run(const Settings& s, const WalkConfig& c) {
    require(s.seed.has_value(), ErrorKind::config, "a seed is required (set \"seed\" or pass --seed)");
    if (s.theorem_regime) {
        require(c.schedule.has_value(), ErrorKind::config, "theorem regime needs a drift schedule");
        require(c.excitation.contains_half_space(c.direction).value_or(false), ErrorKind::config,
                "theorem regime needs the excitation set to contain the half-space {x : x.l > 0}");
        require(c.schedule->beta() < s.alpha && s.alpha < 1.0 / 6.0, ErrorKind::domain,
                "theorem regime needs beta < alpha < 1/6");
    }
    if (s.require_certificate) {
        const auto cert = certify_settings(s, c);
        require(cert.certified(), ErrorKind::domain, describe_failure(cert));
    }
}

void curve_rows(std::ostream& out, const std::vector<mc::CurvePoint>& pts, const char* header) {
    out << header << '\n';
    for (const auto& p : pts) {
        out << p.n << ',' << json(p.estimate).dump() << ',' << json(p.ci_low).dump() << ',' << json(p.ci_high).dump()
            << '\n';
    }
}

int dispatch(const std::string& sub, Settings s, const fs::path& outdir, unsigned workers, std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    const bool deterministic = sub == "bounds" || sub == "certify" || sub == "oracle";
    if (deterministic) s.seed.reset();
    const WalkConfig config = build_walk_config(s);
    if (!deterministic) validate_for_run(s, config);

    const std::string leaf = deterministic ? "deterministic" : std::to_string(*s.seed);
    Output o(outdir, s, sub, leaf);
    const std::uint64_t tail_n = s.tail_n ? s.tail_n : s.horizon;

    if (sub == "certify") {
        const auto cert = certify_settings(s, config);
        o.line(cert.to_json());
        o.curves << "n_max,directions_checked,certified\n"
                 << cert.n_max << ',' << cert.directions_checked << ',' << (cert.certified() ? 1 : 0) << '\n';
        out << cert.to_json().dump(2) << '\n';
        if (!cert.certified()) fail(ErrorKind::domain, describe_failure(cert));
    } else if (sub == "bounds") {
        const auto ledger = bounds::psi_ledger(ledger_inputs(s));
        o.line(ledger.to_json());
        const auto seq = bounds::mk_sequence_log(ledger.log_m_final, ledger.inputs.lambda, ledger.delta, s.mk_terms);
        o.curves << "k,log_m_k\n";
        for (std::size_t k = 1; k < seq.log_terms.size(); ++k) o.curves << k << ',' << json(seq.log_terms[k]).dump() << '\n';
        out << ledger.to_json().dump(2) << '\n' << ledger.to_table();
    } else if (sub == "oracle") {
        const auto dist = enumerate(config, s.oracle_horizon, parse_observable(s.oracle_observable), s.oracle_cap);
        json outcomes = json::array();
        for (const auto& [v, p] : dist.outcomes) outcomes.push_back({v, to_string(p)});
        o.line({{"schema_version", mc::kSchemaVersion},
                {"estimator", "oracle"},
                {"horizon", dist.horizon},
                {"observable", to_string(dist.observable)},
                {"paths", dist.paths},
                {"mean", to_string(dist.mean())},
                {"outcomes", outcomes}});
        write_distribution_csv(o.curves, dist);
        write_distribution_csv(out, dist);
    } else if (sub == "simulate") {
        auto cps = s.checkpoints;
        for (auto n : mc::log_checkpoints(s.horizon)) cps.push_back(n);
        std::sort(cps.begin(), cps.end());
        cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
        const auto curve = mc::drift_growth_curve(config, cps, s.trajectories, workers);
        o.line(curve.to_json());
        for (double t : s.min_tail_t) o.line(mc::estimate_min_tail(config, s.horizon, t, s.trajectories, workers).to_json());
        curve_rows(o.curves, curve.points, "n,mean_proj,ci_low,ci_high");
        out << curve.to_json().dump() << '\n';
    } else if (sub == "survival") {
        const auto r = mc::estimate_survival(config, s.trajectories, workers);
        o.line(r.to_json());
        curve_rows(o.curves, r.checkpoints, "n,survival,ci_low,ci_high");
        out << r.to_json().dump() << '\n';
    } else if (sub == "range") {
        const auto r = mc::estimate_range_tail(config, tail_n, s.range_alpha, s.trajectories, workers, s.gamma1, s.gamma2);
        o.line(r.to_json());
        o.curves << "n,estimate,ci_low,ci_high,bound\n"
                 << tail_n << ',' << json(r.point_estimate).dump() << ',' << json(r.ci_low).dump() << ','
                 << json(r.ci_high).dump() << ',' << json(r.bound_value.value_or(1.0)).dump() << '\n';
        out << r.to_json().dump() << '\n';
    } else if (sub == "position") {
        const auto r = mc::estimate_position_tail(config, tail_n, s.alpha, s.trajectories, workers, s.gamma1, s.gamma2);
        o.line(r.to_json());
        o.curves << "n,estimate,ci_low,ci_high,bound\n"
                 << tail_n << ',' << json(r.point_estimate).dump() << ',' << json(r.ci_low).dump() << ','
                 << json(r.ci_high).dump() << ',' << json(r.bound_value.value_or(1.0)).dump() << '\n';
        out << r.to_json().dump() << '\n';
    } else if (sub == "excursions") {
        const auto r = mc::excursion_experiment(config, s.excursion_m, s.trajectories, workers);
        o.line(r.to_json());
        o.curves << "reentries,trajectories\n";
        for (const auto& [k, v] : r.reentry_counts) o.curves << k << ',' << v << '\n';
        out << r.to_json().dump() << '\n';
    } else {
        fail(ErrorKind::config, "unknown subcommand '" + sub + "'");
    }

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_meta(o.dir, sub, workers, secs);
    return 0;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Simulator, exact oracle and bounds calculator for excited random walks with decaying drift"};
    app.require_subcommand(1);
    std::string config_path;
    unsigned workers = 1;
    std::string outdir = "out";
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "JSON config file")->required();
    app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--outdir", outdir, "output root directory");
    app.add_option("--seed", seed, "64-bit seed (overrides the file)");
    const std::vector<std::pair<std::string, std::string>> subs = {
        {"simulate", "mean projection curve and running-minimum tails"},
        {"survival", "truncated survival probability and curve"},
        {"range", "range tail probability"},
        {"position", "projection tail probability"},
        {"excursions", "excursion and reentry statistics"},
        {"bounds", "explicit constants ledger"},
        {"oracle", "exact distribution by enumeration"},
        {"certify", "kernel condition certificate"}};
    for (const auto& [name, help] : subs) app.add_subcommand(name, help);
    app.fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    const std::string sub = app.get_subcommands().front()->get_name();
    try {
        std::ifstream in(config_path);
        require(in.good(), ErrorKind::config, "cannot open config '" + config_path + "'");
        json j;
        try {
            j = json::parse(in);
        } catch (const json::parse_error& e) {
            fail(ErrorKind::config, std::string("config does not parse: ") + e.what());
        }
        Settings s = Settings::from_json(j);
        if (seed) s.seed = *seed;
        return dispatch(sub, std::move(s), outdir, workers, out);
    } catch (const Error& e) {
        err << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "runtime failure: " << e.what() << '\n';
        return 2;
    }
}

} // namespace gerw::cli
