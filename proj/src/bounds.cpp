#include "gerw/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "gerw/errors.hpp"

namespace gerw::bounds {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLogMaxTerm = std::log(1e300);

double log_add(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double exp_or_inf(double log_x) { return log_x > kLogMaxTerm ? kInf : std::exp(log_x); }

} // namespace

double azuma_tail(double t, std::uint64_t n, double K) {
    require(t >= 0.0 && n >= 1 && K > 0.0, ErrorKind::domain, "azuma_tail needs t >= 0, n >= 1, K > 0");
    return std::exp(-t * t / (2.0 * static_cast<double>(n) * K * K));
}

double azuma_running_min_bound(double t, std::uint64_t n, double K) {
    return static_cast<double>(n) * azuma_tail(t, n, K);
}

double log_position_tail_bound(double n, double theta1, double theta2) {
    require(n > 0.0 && theta1 > 0.0 && theta2 > 0.0, ErrorKind::domain, "position tail bound needs positive inputs");
    return std::log(5.0 * n) - theta1 * std::pow(n, theta2);
}

double position_tail_bound(double n, double theta1, double theta2) {
    return std::exp(log_position_tail_bound(n, theta1, theta2));
}

double range_tail_bound(double n, double gamma1, double gamma2) {
    require(n > 0.0 && gamma1 > 0.0 && gamma2 > 0.0, ErrorKind::domain, "range tail bound needs positive inputs");
    return std::exp(-gamma1 * std::pow(n, gamma2));
}

double local_time_tail_bound(double n, double gamma1p, double delta_loc) {
    require(n > 0.0 && gamma1p > 0.0 && delta_loc > 0.0, ErrorKind::domain,
            "local time tail bound needs positive inputs");
    return std::exp(-gamma1p * std::pow(n, delta_loc));
}

double range_event_bound(double n, double K, double gamma1p, double gamma4p, double e_w, double eps) {
    require(n > 0.0 && K > 0.0 && gamma1p > 0.0 && gamma4p > 0.0 && eps > 0.0, ErrorKind::domain,
            "range event bound needs positive inputs");
    require(e_w > 0.0 && e_w < 1.0 / 6.0, ErrorKind::domain, "e_w must lie in (0, 1/6)");
    const double a = std::log(2.0 * K * n + 1.0) - gamma1p * std::pow(n, eps / 2.0);
    const double b = (1.0 - 2.0 * e_w + eps) * std::log(n) - std::log(2.0) - gamma4p * std::pow(n, eps);
    return std::exp(log_add(a, b));
}

double as_probability(double bound, bool* vacuous) {
    if (vacuous) *vacuous = !(bound < 1.0);
    return std::clamp(bound, 0.0, 1.0);
}

double theta1(double gamma1, double K, double lambda, double beta) {
    require(gamma1 > 0.0 && K >= 1.0 && lambda > 0.0 && lambda <= 1.0 && beta >= 0.0 && beta < 1.0,
            ErrorKind::domain, "theta1 needs gamma1 > 0, K >= 1, lambda in (0,1], beta in [0,1)");
    const double k2 = K * K;
    const double last = (1.0 / 3.0 - std::pow(2.0, 1.0 - beta) / 3.0) * lambda;
    return std::min({gamma1, 1.0 / (2.0 * k2), lambda * lambda / (18.0 * k2), last * last / (2.0 * k2)});
}

double theta2(double gamma2, double alpha, double beta) {
    require(gamma2 > 0.0, ErrorKind::domain, "gamma2 must be positive");
    return std::min(gamma2, 2.0 * (alpha - beta));
}

// ---------------------------------------------------------------- m_k

SequenceMk mk_sequence_log(double log_m, double lambda, double delta, std::size_t k_max) {
    require(std::isfinite(log_m), ErrorKind::domain, "m must be positive and finite");
    require(lambda > 0.0 && lambda < 1.0, ErrorKind::domain, "lambda must lie in (0,1)");
    require(delta > 1.0, ErrorKind::domain, "delta must exceed 1");
    SequenceMk s;
    const double log_scale = std::log(lambda / 3.0);
    s.criterion = log_scale + (delta - 1.0) * log_m > 0.0;
    s.terms.push_back(0.0);
    s.log_terms.push_back(-kInf);
    double lm = log_m;
    for (std::size_t k = 1; k <= k_max; ++k) {
        s.log_terms.push_back(lm);
        s.terms.push_back(exp_or_inf(lm));
        lm = log_scale + delta * lm;
    }
    s.increasing = true;
    for (std::size_t k = 2; k < s.log_terms.size(); ++k) {
        if (!(s.log_terms[k] > s.log_terms[k - 1])) s.increasing = false;
    }
    return s;
}

SequenceMk mk_sequence(double m, double lambda, double delta, std::size_t k_max) {
    require(m > 0.0, ErrorKind::domain, "m must be positive");
    return mk_sequence_log(std::log(m), lambda, delta, k_max);
}

// ---------------------------------------------------------------- 1/7

double log_inflection_point(double theta, double theta1, double phi1) {
    return std::log((2.0 - theta) / (theta1 * phi1)) / phi1;
}

OneSeventh check_one_seventh_log(double log_m, double theta, double theta1, double phi1) {
    require(theta > 0.0 && theta1 > 0.0 && phi1 > 0.0, ErrorKind::domain, "1/7 check needs positive constants");
    OneSeventh out;
    const double x = theta1 * std::exp(phi1 * log_m);
    const double first = (2.0 - theta) * log_m - x;
    const double s = (3.0 - theta) / phi1;
    const double second = -std::log(phi1) + (theta - 3.0) / phi1 * std::log(theta1) + log_incomplete_gamma(s, x);
    out.log_lhs = log_add(first, second);
    out.lhs = std::exp(out.log_lhs);
    out.applicable = log_m > log_inflection_point(theta, theta1, phi1);
    out.passes = out.applicable && out.log_lhs <= -std::log(7.0);
    return out;
}

OneSeventh check_one_seventh(double m, double theta, double theta1, double phi1) {
    require(m > 0.0, ErrorKind::domain, "m must be positive");
    return check_one_seventh_log(std::log(m), theta, theta1, phi1);
}

double minimal_log_m_one_seventh(double theta, double theta1, double phi1) {
    const double lo0 = log_inflection_point(theta, theta1, phi1);
    const double gate = lo0 + std::max(1e-12, std::abs(lo0) * 1e-14);
    if (check_one_seventh_log(gate, theta, theta1, phi1).passes) return gate;
    double lo = gate;
    double step = std::max(1.0, std::abs(lo0));
    double hi = lo + step;
    while (!check_one_seventh_log(hi, theta, theta1, phi1).passes) {
        lo = hi;
        step *= 2.0;
        hi = lo + step;
        require(std::isfinite(hi), ErrorKind::domain, "no m passes the 1/7 inequality");
    }
    while (hi - lo > 1e-12 * std::max(1.0, std::abs(hi))) {
        const double mid = 0.5 * (lo + hi);
        if (check_one_seventh_log(mid, theta, theta1, phi1).passes) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

// ---------------------------------------------------------------- ledger

TransienceConstants psi_ledger(const LedgerInputs& in) {
    require(in.beta < in.alpha, ErrorKind::domain, "beta < alpha required (alpha is the range-growth exponent)");
    require(in.alpha < 1.0 / 6.0, ErrorKind::domain, "alpha < 1/6 required");
    require(in.beta >= 0.0, ErrorKind::domain, "beta must be non-negative");
    require(in.lambda > 0.0 && in.lambda < 1.0, ErrorKind::domain, "lambda must lie in (0,1)");
    require(in.r > 0.0 && in.r <= 1.0, ErrorKind::domain, "r must lie in (0,1]");
    require(in.h > 0.0 && in.h <= 1.0, ErrorKind::domain, "h must lie in (0,1]");
    require(in.K >= 1.0, ErrorKind::domain, "K must be at least 1");
    require(in.c_slack > 0.0 && in.c_slack < 1.0, ErrorKind::domain, "c_slack must lie in (0,1)");
    require(in.gamma1 > 0.0 && in.gamma2 > 0.0, ErrorKind::domain, "gamma1 and gamma2 must be positive");

    TransienceConstants t;
    t.inputs = in;
    t.theta = in.alpha - in.beta;
    t.delta = (2.0 - t.theta) * (0.5 + t.theta);
    t.delta_minus_one = t.theta * (1.5 - t.theta);
    t.theta1 = theta1(in.gamma1, in.K, in.lambda, in.beta);
    t.theta2 = theta2(in.gamma2, in.alpha, in.beta);
    t.phi1 = std::min(t.theta, (2.0 - t.theta) * t.theta2);
    t.log_eta = log_inflection_point(t.theta, t.theta1, t.phi1);
    t.eta = exp_or_inf(t.log_eta);
    t.ceil_r_inv = std::ceil(1.0 / in.r);

    const double inv = 1.0 / t.delta_minus_one;
    const double log_q = std::log(t.ceil_r_inv);
    const double log_n0 = in.n0 == 0 ? -kInf : std::log(static_cast<double>(in.n0));
    t.log_C = log_add(std::log(in.K) * inv + log_add(t.log_eta, log_q * inv), log_n0);
    t.C = exp_or_inf(t.log_C);
    const double log_growth = std::log(3.0 / in.lambda) * inv;
    t.log_m = t.log_C + log_growth;
    t.m = exp_or_inf(t.log_m);

    auto log_psi_at = [&](double log_m, double* exponent) {
        const double log_abs_ln_h = in.h < 1.0 ? std::log(-std::log(in.h)) : -kInf;
        *exponent = log_q + log_m + log_abs_ln_h;
        return std::log(in.c_slack) - exp_or_inf(*exponent);
    };
    t.log_psi = log_psi_at(t.log_m, &t.log_psi_exponent);

    t.chain_ok = t.delta_minus_one * t.log_C > std::log(in.K) + log_q;
    require(t.chain_ok, ErrorKind::domain, "constant chain m^(delta-1)/(3 ceil(1/r)) > K/lambda failed");
    t.above_inflection = t.log_m > t.log_eta;
    t.mk_increasing = std::log(in.lambda / 3.0) + t.delta_minus_one * t.log_m > 0.0;

    t.log_m_one_seventh = minimal_log_m_one_seventh(t.theta, t.theta1, t.phi1);
    t.log_m_final = std::max(t.log_m, t.log_m_one_seventh);
    t.log_C_final = t.log_m_final - log_growth;
    double unused = 0.0;
    t.log_psi_final = log_psi_at(t.log_m_final, &unused);
    t.one_seventh_at_final = check_one_seventh_log(t.log_m_final, t.theta, t.theta1, t.phi1);
    return t;
}

namespace {

nlohmann::json finite_or_null(double x) {
    if (std::isfinite(x)) return x;
    return nullptr;
}

} // namespace

nlohmann::json TransienceConstants::to_json() const {
    return {
        {"inputs",
         {{"alpha", inputs.alpha},
          {"beta", inputs.beta},
          {"lambda", inputs.lambda},
          {"K", inputs.K},
          {"h", inputs.h},
          {"r", inputs.r},
          {"n0", inputs.n0},
          {"gamma1", inputs.gamma1},
          {"gamma2", inputs.gamma2},
          {"c_slack", inputs.c_slack}}},
        {"theta", theta},
        {"delta", delta},
        {"delta_minus_one", delta_minus_one},
        {"theta1", theta1},
        {"theta2", theta2},
        {"phi1", phi1},
        {"eta", finite_or_null(eta)},
        {"log_eta", log_eta},
        {"ceil_r_inv", ceil_r_inv},
        {"C", finite_or_null(C)},
        {"log_C", log_C},
        {"m", finite_or_null(m)},
        {"log_m", log_m},
        {"log_psi", finite_or_null(log_psi)},
        {"log_psi_exponent", finite_or_null(log_psi_exponent)},
        {"chain_ok", chain_ok},
        {"above_inflection", above_inflection},
        {"mk_increasing", mk_increasing},
        {"log_m_one_seventh", log_m_one_seventh},
        {"log_m_final", log_m_final},
        {"log_C_final", log_C_final},
        {"log_psi_final", finite_or_null(log_psi_final)},
        {"one_seventh_lhs_log", one_seventh_at_final.log_lhs},
        {"one_seventh_passes", one_seventh_at_final.passes},
    };
}

std::string TransienceConstants::to_table() const {
    std::ostringstream out;
    out << std::setprecision(10);
    auto row = [&](const std::string& name, const std::string& value) {
        out << std::left << std::setw(22) << name << value << '\n';
    };
    auto num = [](double x) {
        std::ostringstream s;
        s << std::setprecision(10) << x;
        return s.str();
    };
    row("alpha", num(inputs.alpha));
    row("beta", num(inputs.beta));
    row("lambda", num(inputs.lambda));
    row("K", num(inputs.K));
    row("h", num(inputs.h));
    row("r", num(inputs.r));
    row("n0", std::to_string(inputs.n0));
    row("gamma1", num(inputs.gamma1));
    row("gamma2", num(inputs.gamma2));
    row("c_slack", num(inputs.c_slack));
    row("theta", num(theta));
    row("delta", num(delta));
    row("theta1", num(theta1));
    row("theta2", num(theta2));
    row("phi1", num(phi1));
    row("log eta", num(log_eta));
    row("ceil(1/r)", num(ceil_r_inv));
    row("log C", num(log_C));
    row("log m", num(log_m));
    row("log psi", num(log_psi));
    row("chain ok", chain_ok ? "yes" : "no");
    row("above inflection", above_inflection ? "yes" : "no");
    row("m_k increasing", mk_increasing ? "yes" : "no");
    row("log m (1/7 minimal)", num(log_m_one_seventh));
    row("log m (final)", num(log_m_final));
    row("log C (final)", num(log_C_final));
    row("log psi (final)", num(log_psi_final));
    row("1/7 lhs (log)", num(one_seventh_at_final.log_lhs));
    row("1/7 passes", one_seventh_at_final.passes ? "yes" : "no");
    return out.str();
}

} // namespace gerw::bounds
