#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace gerw::bounds {

// ---------------------------------------------------------------- special functions

/// Upper incomplete gamma Gamma(s, x) = int_x^inf t^(s-1) e^-t dt, s > 0, x >= 0.
/// Series for x < s + 1, Lentz continued fraction otherwise.
double incomplete_gamma(double s, double x);
/// log Gamma(s, x), finite even where Gamma(s, x) under- or overflows.
double log_incomplete_gamma(double s, double x);

// ---------------------------------------------------------------- tail bounds

/// exp(-t^2 / (2 n K^2)): one-sided Azuma bound for n increments bounded by K.
double azuma_tail(double t, std::uint64_t n, double K);
/// n * azuma_tail(t, n, K): union over the first n times (running minimum below -t).
double azuma_running_min_bound(double t, std::uint64_t n, double K);

/// 5 n exp(-theta1 n^theta2): tail of X_n.l below (1/3) lambda n^(1/2+alpha-beta).
double position_tail_bound(double n, double theta1, double theta2);
double log_position_tail_bound(double n, double theta1, double theta2);
/// exp(-gamma1 n^gamma2): tail of |R_n| below n^(1/2+alpha).
double range_tail_bound(double n, double gamma1, double gamma2);
/// exp(-gamma1' n^delta_loc): local time tail L_n(m) >= n^(1/2 + 2 delta_loc).
double local_time_tail_bound(double n, double gamma1p, double delta_loc);
/// (2Kn + 1) e^(-gamma1' n^(eps/2)) + (n^(1-2e_w+eps) / 2) e^(-gamma4' n^eps): failure
/// probability of the range-growth event.
double range_event_bound(double n, double K, double gamma1p, double gamma4p, double e_w, double eps);

/// Clamps a bound to [0, 1] for use as a probability; `vacuous` is set when it was >= 1.
double as_probability(double bound, bool* vacuous = nullptr);

// ---------------------------------------------------------------- constants

/// min{ gamma1, 1/(2K^2), lambda^2/(18K^2), ((1/3 - 2^(1-beta)/3) lambda)^2 / (2K^2) }.
double theta1(double gamma1, double K, double lambda, double beta);
/// min{ gamma2, 2(alpha - beta) }.
double theta2(double gamma2, double alpha, double beta);

struct LedgerInputs {
    double alpha = 0.15;
    double beta = 0.1;
    double lambda = 0.5;
    double K = 2.0;
    double h = 0.25;
    double r = 0.5;
    std::uint64_t n0 = 1;
    double gamma1 = 0.05;
    double gamma2 = 0.05;
    double c_slack = 0.1;
};

struct OneSeventh {
    double log_lhs = 0.0;
    double lhs = 0.0;
    bool applicable = false; // m above the inflection point
    bool passes = false;     // applicable and lhs <= 1/7
};

/// All explicit constants of the survival lower bound psi. Quantities that
/// overflow a double are also carried as logarithms.
struct TransienceConstants {
    LedgerInputs inputs;
    double theta = 0.0;
    double delta = 0.0;
    double delta_minus_one = 0.0;
    double theta1 = 0.0;
    double theta2 = 0.0;
    double phi1 = 0.0;
    double eta = 0.0;
    double log_eta = 0.0;
    double ceil_r_inv = 0.0;
    double C = 0.0;
    double log_C = 0.0;
    double m = 0.0;
    double log_m = 0.0;
    /// log psi = ceil(1/r) C (3/lambda)^(1/(delta-1)) ln h + ln c
    double log_psi = 0.0;
    /// log(ceil(1/r) m |ln h|); log psi = ln c - exp(this). -inf when h = 1.
    double log_psi_exponent = 0.0;
    /// m^(delta-1) / (3 ceil(1/r)) > K / lambda > 1
    bool chain_ok = false;
    /// m above the inflection point ((2-theta)/(theta1 phi1))^(1/phi1) (= eta)
    bool above_inflection = false;
    /// (lambda/3) m^(delta-1) > 1
    bool mk_increasing = false;

    /// Smallest m passing the 1/7 inequality, and the ledger re-derived from max(m, that).
    double log_m_one_seventh = 0.0;
    double log_m_final = 0.0;
    double log_C_final = 0.0;
    double log_psi_final = 0.0;
    OneSeventh one_seventh_at_final;

    nlohmann::json to_json() const;
    std::string to_table() const;
};

/// Throws DomainError unless 0 <= beta < alpha < 1/6, 0 < lambda < 1,
/// r in (0,1], h in (0,1], K >= 1, c in (0,1), gamma1, gamma2 > 0.
TransienceConstants psi_ledger(const LedgerInputs& in);

struct SequenceMk {
    /// m_0 = 0, m_1 = m, m_{k+1} = (lambda/3) m_k^delta; +inf once beyond 1e300.
    std::vector<double> terms;
    std::vector<double> log_terms;
    /// (lambda/3) m^(delta-1) > 1
    bool criterion = false;
    /// terms strictly increase from k = 1 on (checked on the logs)
    bool increasing = false;
};

SequenceMk mk_sequence(double m, double lambda, double delta, std::size_t k_max);
SequenceMk mk_sequence_log(double log_m, double lambda, double delta, std::size_t k_max);

/// log of the inflection point ((2-theta)/(theta1 phi1))^(1/phi1) of x^(2-theta) e^(-theta1 x^phi1).
double log_inflection_point(double theta, double theta1, double phi1);

/// m^(2-theta) e^(-theta1 m^phi1) + phi1^-1 theta1^((theta-3)/phi1) Gamma((3-theta)/phi1, theta1 m^phi1) <= 1/7.
OneSeventh check_one_seventh(double m, double theta, double theta1, double phi1);
OneSeventh check_one_seventh_log(double log_m, double theta, double theta1, double phi1);
/// log of the smallest m above the inflection point that passes (bisection in log m).
double minimal_log_m_one_seventh(double theta, double theta1, double phi1);

} // namespace gerw::bounds
