#include <cmath>
#include <limits>

#include "gerw/bounds.hpp"
#include "gerw/errors.hpp"

namespace gerw::bounds {

namespace {

constexpr double kEps = 1e-17;
constexpr int kMaxIter = 100000;

// Lower regularized P(s, x) by its power series; valid for x < s + 1.
double series_p(double s, double x) {
    double term = 1.0 / s;
    double sum = term;
    for (int n = 1; n < kMaxIter; ++n) {
        term *= x / (s + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps) break;
    }
    return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

// log of the continued fraction factor: Gamma(s, x) = e^-x x^s * cf, for x >= s + 1.
double log_cf(double s, double x) {
    constexpr double tiny = std::numeric_limits<double>::min() / kEps;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return std::log(h);
}

void check_domain(double s, double x) {
    require(s > 0.0 && std::isfinite(s), ErrorKind::domain, "incomplete gamma needs s > 0");
    require(x >= 0.0 && !std::isnan(x), ErrorKind::domain, "incomplete gamma needs x >= 0");
}

} // namespace

double log_incomplete_gamma(double s, double x) {
    check_domain(s, x);
    if (x == 0.0) return std::lgamma(s);
    if (std::isinf(x)) return -std::numeric_limits<double>::infinity();
    if (x < s + 1.0) return std::lgamma(s) + std::log1p(-series_p(s, x));
    return -x + s * std::log(x) + log_cf(s, x);
}

double incomplete_gamma(double s, double x) {
    check_domain(s, x);
    if (x == 0.0) return std::tgamma(s);
    if (x < s + 1.0) return std::tgamma(s) * (1.0 - series_p(s, x));
    return std::exp(log_incomplete_gamma(s, x));
}

} // namespace gerw::bounds
