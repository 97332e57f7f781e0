#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gerw/cli.hpp"

using namespace gerw;
namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::path(GERW_TEST_TMP) / "cli";

fs::path write_config(const std::string& name, const std::string& text) {
    fs::create_directories(kRoot);
    const auto p = kRoot / name;
    std::ofstream(p) << text;
    return p;
}

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run invoke(std::vector<std::string> args) {
    std::vector<const char*> argv{"gerw"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace

TEST_CASE("certify the default tilted kernel") {
    const auto cfg = write_config("default.json", "{}");
    const auto r = invoke({"--config", cfg.string(), "--outdir", (kRoot / "out").string(), "certify"});
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["K"] == 2.0);
    CHECK(j["h"] == 0.25);
    CHECK(j["r"] == 0.5);
    CHECK(j["certified"] == true);
    CHECK(fs::exists(kRoot / "out" / "certify" / "deterministic" / "results.jsonl"));
    CHECK(fs::exists(kRoot / "out" / "certify" / "deterministic" / "meta.json"));
}

TEST_CASE("oracle over the cap fails validation") {
    const auto cfg = write_config("big.json", R"({"kernel": "uniform", "schedule": null, "oracle": {"horizon": 20}})");
    const auto r = invoke({"--config", cfg.string(), "--outdir", (kRoot / "out").string(), "oracle"});
    CHECK(r.code == 1);
    CHECK(r.err.find("TooLarge") != std::string::npos);
}

TEST_CASE("bounds with beta >= alpha fails validation") {
    const auto cfg = write_config("beta.json", R"({"schedule": {"lambda": 0.5, "beta": 0.2, "n0": 1}, "alpha": 0.15})");
    const auto r = invoke({"--config", cfg.string(), "--outdir", (kRoot / "out").string(), "bounds"});
    CHECK(r.code == 1);
    CHECK(r.err.find("beta < alpha") != std::string::npos);
}

TEST_CASE("bounds prints json and a table") {
    const auto cfg = write_config("ledger.json", "{}");
    const auto r = invoke({"--config", cfg.string(), "--outdir", (kRoot / "out").string(), "bounds"});
    CHECK(r.code == 0);
    CHECK(r.out.find("\"log_psi\"") != std::string::npos);
    CHECK(r.out.find("1/7 passes") != std::string::npos);
}

TEST_CASE("stochastic runs need a seed") {
    const auto cfg = write_config("noseed.json", R"({"horizon": 10, "trajectories": 100})");
    const auto r = invoke({"--config", cfg.string(), "--outdir", (kRoot / "out").string(), "survival"});
    CHECK(r.code == 1);
    CHECK(r.err.find("seed") != std::string::npos);
}

TEST_CASE("bad config and usage errors") {
    const auto typo = write_config("typo.json", R"({"horizn": 10})");
    CHECK(invoke({"--config", typo.string(), "survival"}).code == 1);
    const auto broken = write_config("broken.json", "{ nope");
    CHECK(invoke({"--config", broken.string(), "survival"}).code == 1);
    CHECK(invoke({"--config", (kRoot / "missing.json").string(), "survival"}).code == 1);
    CHECK(invoke({"survival"}).code == 1);
    const auto uncertified = write_config("point.json", R"({"kernel": "point_mass", "seed": 1, "trajectories": 100})");
    const auto r = invoke({"--config", uncertified.string(), "--outdir", (kRoot / "out").string(), "survival"});
    CHECK(r.code == 1);
    CHECK(r.err.find("martingale") != std::string::npos);
}

TEST_CASE("identical configs give identical results, and the echo reproduces them") {
    const auto cfg = write_config("surv.json", R"({"experiment": "surv", "horizon": 200, "trajectories": 300, "seed": 5})");
    const auto a = kRoot / "a";
    const auto b = kRoot / "b";
    REQUIRE(invoke({"--config", cfg.string(), "--outdir", a.string(), "survival"}).code == 0);
    REQUIRE(invoke({"--config", cfg.string(), "--outdir", b.string(), "--workers", "3", "survival"}).code == 0);
    const auto leaf = fs::path("surv") / "5";
    for (const char* f : {"results.jsonl", "curves.csv", "config.echo"}) {
        CHECK(slurp(a / leaf / f) == slurp(b / leaf / f));
    }
    const auto c = kRoot / "c";
    REQUIRE(invoke({"--config", (a / leaf / "config.echo").string(), "--outdir", c.string(), "survival"}).code == 0);
    CHECK(slurp(c / leaf / "results.jsonl") == slurp(a / leaf / "results.jsonl"));
    CHECK(slurp(c / leaf / "config.echo") == slurp(a / leaf / "config.echo"));
}

TEST_CASE("seed flag overrides the file") {
    const auto cfg = write_config("seeded.json", R"({"experiment": "s", "horizon": 20, "trajectories": 100, "seed": 5})");
    REQUIRE(invoke({"--config", cfg.string(), "--outdir", (kRoot / "d").string(), "--seed", "11", "survival"}).code == 0);
    CHECK(fs::exists(kRoot / "d" / "s" / "11" / "results.jsonl"));
}

TEST_CASE("theorem regime requires the half-space") {
    const auto bad = write_config("theorem.json", R"({"theorem_regime": true, "excitation": {"kind": "complement",
        "excluded": [[1, 0]]}, "seed": 1, "horizon": 10, "trajectories": 100})");
    const auto r = invoke({"--config", bad.string(), "--outdir", (kRoot / "out").string(), "survival"});
    CHECK(r.code == 1);
    const auto ok = write_config("theorem_ok.json", R"({"theorem_regime": true, "seed": 1, "horizon": 10, "trajectories": 100})");
    CHECK(invoke({"--config", ok.string(), "--outdir", (kRoot / "out").string(), "survival"}).code == 0);
}

TEST_CASE("every subcommand runs") {
    const auto cfg = write_config("all.json", R"({"experiment": "all", "horizon": 300, "trajectories": 100, "seed": 2,
        "tail_n": 300, "min_tail_t": [5, 50]})");
    for (const char* sub : {"simulate", "survival", "range", "position", "excursions"}) {
        const auto r = invoke({"--config", cfg.string(), "--outdir", (kRoot / sub).string(), sub});
        CHECK_MESSAGE(r.code == 0, sub << ": " << r.err);
        CHECK(fs::exists(kRoot / sub / "all" / "2" / "curves.csv"));
    }
    const auto orc = write_config("orc.json", R"({"kernel": "uniform", "schedule": null, "oracle": {"horizon": 2,
        "observable": "survived"}})");
    const auto r = invoke({"--config", orc.string(), "--outdir", (kRoot / "out").string(), "oracle"});
    CHECK(r.code == 0);
    CHECK(r.out.find("1.0,3,16") != std::string::npos);
}
