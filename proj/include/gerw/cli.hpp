#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gerw/bounds.hpp"
#include "gerw/engine.hpp"

namespace gerw::cli {

/// Effective run configuration: the parsed file with every default filled in.
/// to_json() is the echo; parsing the echo gives back the same settings.
struct Settings {
    std::string experiment; // empty: named after the subcommand
    int dimension = 2;
    std::vector<double> direction; // defaults to e_1
    std::string kernel = "tilted";  // tilted | uniform | cookie | point_mass
    std::uint64_t rational_denominator = 0;
    std::string tilt = "1/2";
    std::vector<std::int64_t> step; // point_mass; defaults to e_1
    std::optional<DriftSchedule> schedule = DriftSchedule(0.5, 0.1, 1);
    std::string excitation = "full"; // full | half_space | complement
    std::vector<std::vector<std::int64_t>> excluded;
    std::uint64_t horizon = 1000;
    std::uint64_t trajectories = 1000;
    std::optional<std::uint64_t> seed;
    std::uint64_t memory_cap = std::uint64_t{1} << 26;
    std::vector<std::uint64_t> checkpoints;
    bool theorem_regime = false;
    bool require_certificate = true;

    std::uint64_t certify_n_max = 1000;
    std::uint64_t certify_directions = 1000;

    /// range-growth exponent of the ledger and the position tail
    double alpha = 0.15;
    /// exponent of the range tail experiment
    double range_alpha = 0.05;
    double gamma1 = 0.05;
    double gamma2 = 0.05;
    double c_slack = 0.1;
    std::uint64_t tail_n = 0; // 0 means the horizon
    std::vector<double> min_tail_t = {50.0, 100.0, 200.0};
    double excursion_m = 1.0;
    std::uint64_t oracle_horizon = 2;
    std::string oracle_observable = "final_proj";
    std::uint64_t oracle_cap = 100'000'000;
    std::size_t mk_terms = 8;

    static Settings from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

WalkConfig build_walk_config(const Settings& s);
bounds::LedgerInputs ledger_inputs(const Settings& s);

/// Entry point behind the `gerw` tool. Exit 0 on success, 1 on validation
/// failure, 2 on runtime failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace gerw::cli
