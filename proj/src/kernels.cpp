#include "gerw/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gerw {

// ---------------------------------------------------------------- rationals

Rational parse_rational(const std::string& text) {
    using boost::multiprecision::cpp_int;
    require(!text.empty(), ErrorKind::config, "empty rational literal");
    try {
        if (auto slash = text.find('/'); slash != std::string::npos) {
            const cpp_int num(text.substr(0, slash));
            const cpp_int den(text.substr(slash + 1));
            require(den != 0, ErrorKind::config, "zero denominator in '" + text + "'");
            return Rational(num, den);
        }
        if (auto dot = text.find('.'); dot != std::string::npos) {
            std::string digits = text.substr(0, dot) + text.substr(dot + 1);
            if (digits.empty() || digits == "-" || digits == "+") fail(ErrorKind::config, "bad rational '" + text + "'");
            const bool neg = !digits.empty() && digits[0] == '-';
            if (!digits.empty() && (digits[0] == '-' || digits[0] == '+')) digits.erase(0, 1);
            // cpp_int reads a leading 0 as octal
            digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
            if (neg) digits.insert(0, "-");
            cpp_int den = 1;
            for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
            return Rational(cpp_int(digits), den);
        }
        return Rational(cpp_int(text));
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        fail(ErrorKind::config, "bad rational '" + text + "'");
    }
}

Rational exact_rational(double x) {
    using boost::multiprecision::cpp_int;
    require(std::isfinite(x), ErrorKind::domain, "non-finite value has no rational form");
    if (x == 0.0) return Rational(0);
    int exp = 0;
    const double mant = std::frexp(x, &exp); // x = mant * 2^exp, |mant| in [0.5, 1)
    const auto scaled = static_cast<std::int64_t>(std::ldexp(mant, 53));
    exp -= 53;
    cpp_int num(scaled);
    cpp_int den(1);
    if (exp >= 0) {
        num <<= exp;
    } else {
        den <<= -exp;
    }
    return Rational(num, den);
}

std::string to_string(const Rational& q) {
    return numerator(q).str() + "/" + denominator(q).str();
}

WeightedStep exact_step(const Site& step, const Rational& p) {
    return WeightedStep{step, static_cast<double>(p), p};
}

// ---------------------------------------------------------------- base class defaults

Site IncrementKernel::sample(const StepContext& ctx, double u) const {
    const Support s = support(ctx);
    double acc = 0.0;
    for (const auto& w : s) {
        acc += w.probability;
        if (u < acc) return w.step;
    }
    // u landed in the rounding gap above the last partial sum
    for (auto it = s.rbegin(); it != s.rend(); ++it) {
        if (it->probability > 0.0) return it->step;
    }
    return Site(dimension());
}

double IncrementKernel::mean_projection(const StepContext& ctx, const Direction& l) const {
    double m = 0.0;
    for (const auto& w : support(ctx)) m += w.probability * l.dot(w.step);
    return m;
}

Site sample_step(const IncrementKernel& kernel, const StepContext& ctx, const CounterRng& rng,
                 std::uint64_t trajectory) {
    return kernel.sample(ctx, rng.uniform(trajectory, ctx.time));
}

double nearest_neighbor_h(int dim) { return 1.0 / (2.0 * dim); }

double nearest_neighbor_r(int dim) { return std::min(0.5, 0.9 / std::sqrt(static_cast<double>(dim))); }

namespace {

Site unit_step(int dim, int index) {
    // index 2i -> +e_i, 2i+1 -> -e_i
    return Site::unit(dim, index / 2, index % 2 == 0 ? +1 : -1);
}

int unit_index(int axis, int sign) { return 2 * axis + (sign > 0 ? 0 : 1); }

Support uniform_support(int dim) {
    Support s;
    const Rational p(1, 2 * dim);
    for (int i = 0; i < 2 * dim; ++i) s.push_back(exact_step(unit_step(dim, i), p));
    return s;
}

class UniformKernel final : public IncrementKernel {
public:
    explicit UniformKernel(int dim) : dim_(dim), support_(uniform_support(dim)) {
        require(dim >= 2 && dim <= kMaxDimension, ErrorKind::domain, "uniform kernel needs 2 <= d <= 8");
    }

    std::string name() const override { return "uniform"; }
    int dimension() const override { return dim_; }
    double jump_bound() const override { return 2.0; }
    double ellipticity_mass() const override { return nearest_neighbor_h(dim_); }
    double ellipticity_displacement() const override { return nearest_neighbor_r(dim_); }
    std::size_t max_support_size() const override { return support_.size(); }
    Support support(const StepContext&) const override { return support_; }
    Site sample(const StepContext&, double u) const override {
        return unit_step(dim_, static_cast<int>(u * (2 * dim_)));
    }
    double mean_projection(const StepContext&, const Direction&) const override { return 0.0; }
    bool symmetric_nearest_neighbor_martingale() const override { return true; }
    nlohmann::json describe() const override { return {{"name", name()}, {"dimension", dim_}}; }

private:
    int dim_;
    Support support_;
};

class TiltedKernel final : public IncrementKernel {
public:
    TiltedKernel(int dim, const Direction& l, const DriftSchedule& schedule, std::uint64_t denominator)
        : dim_(dim), l_(l), schedule_(schedule), denominator_(denominator),
          target_(unit_index(l.dominant_axis(), l.dominant_sign())), uniform_(uniform_support(dim)) {
        require(dim >= 2 && dim == l.dim(), ErrorKind::domain, "tilted kernel: dimension must match the direction");
    }

    std::string name() const override { return "tilted"; }
    int dimension() const override { return dim_; }
    double jump_bound() const override { return 2.0; }
    double ellipticity_mass() const override { return nearest_neighbor_h(dim_); }
    double ellipticity_displacement() const override { return nearest_neighbor_r(dim_); }
    std::size_t max_support_size() const override { return uniform_.size(); }
    bool symmetric_nearest_neighbor_martingale() const override { return true; }

    Support support(const StepContext& ctx) const override {
        if (!ctx.excited()) return uniform_;
        Support s;
        const auto p_exact = exact_tilt(ctx.time);
        const Rational rest = (1 - p_exact.value_or(0)) / (2 * dim_);
        const double p = tilt(ctx.time);
        const double rest_d = (1.0 - p) / (2 * dim_);
        for (int i = 0; i < 2 * dim_; ++i) {
            WeightedStep w{unit_step(dim_, i), i == target_ ? p + rest_d : rest_d, std::nullopt};
            if (p_exact) {
                w.exact = i == target_ ? *p_exact + rest : rest;
                w.probability = static_cast<double>(*w.exact);
            }
            s.push_back(std::move(w));
        }
        return s;
    }

    Site sample(const StepContext& ctx, double u) const override {
        if (ctx.excited()) {
            const double p = tilt(ctx.time);
            if (u < p) return unit_step(dim_, target_);
            u = (u - p) / (1.0 - p);
        }
        return unit_step(dim_, std::min(static_cast<int>(u * (2 * dim_)), 2 * dim_ - 1));
    }

    double mean_projection(const StepContext& ctx, const Direction& l) const override {
        if (!ctx.excited()) return 0.0;
        return tilt(ctx.time) * l.dot(unit_step(dim_, target_));
    }

    nlohmann::json describe() const override {
        return {{"name", name()},
                {"dimension", dim_},
                {"lambda", schedule_.lambda()},
                {"beta", schedule_.beta()},
                {"n0", schedule_.n0()},
                {"rational_denominator", denominator_}};
    }

    double tilt(std::uint64_t n) const {
        const double raw = raw_tilt(n);
        if (denominator_ == 0) return raw;
        const double d = static_cast<double>(denominator_);
        return std::min(1.0, std::ceil(raw * d) / d);
    }

private:
    double raw_tilt(std::uint64_t n) const {
        // lambda_n is unbounded as n0 + n -> 0; the tilt saturates at 1 there
        if (schedule_.beta() > 0.0 && schedule_.n0() + n == 0) return 1.0;
        return std::min(1.0, std::sqrt(static_cast<double>(dim_)) * schedule_.value(n));
    }

    std::optional<Rational> exact_tilt(std::uint64_t n) const {
        if (denominator_ == 0) return std::nullopt;
        const double d = static_cast<double>(denominator_);
        const auto k = static_cast<std::int64_t>(std::min(d, std::ceil(raw_tilt(n) * d)));
        return Rational(k, static_cast<std::int64_t>(denominator_));
    }

    int dim_;
    Direction l_;
    DriftSchedule schedule_;
    std::uint64_t denominator_;
    int target_;
    Support uniform_;
};

class CookieKernel final : public IncrementKernel {
public:
    CookieKernel(int dim, const Direction& l, const Rational& tilt)
        : dim_(dim), tilt_(tilt), tilt_d_(static_cast<double>(tilt)),
          target_(unit_index(l.dominant_axis(), l.dominant_sign())), uniform_(uniform_support(dim)) {
        require(dim >= 2 && dim == l.dim(), ErrorKind::domain, "cookie kernel: dimension must match the direction");
        require(tilt >= 0 && tilt <= 1, ErrorKind::domain, "cookie tilt must lie in [0, 1]");
        const Rational rest = (1 - tilt_) / (2 * dim_ - 1);
        for (int i = 0; i < 2 * dim_; ++i) excited_.push_back(exact_step(unit_step(dim_, i), i == target_ ? tilt_ : rest));
        target_step_ = unit_step(dim_, target_);
        excited_mean_ = tilt_d_ - static_cast<double>(rest);
    }

    std::string name() const override { return "cookie"; }
    int dimension() const override { return dim_; }
    double jump_bound() const override { return 2.0; }
    // UE1 on excited contexts rests on the tilted step alone
    double ellipticity_mass() const override {
        return tilt_d_ > 0.0 ? std::min(nearest_neighbor_h(dim_), tilt_d_) : nearest_neighbor_h(dim_);
    }
    double ellipticity_displacement() const override { return nearest_neighbor_r(dim_); }
    std::size_t max_support_size() const override { return uniform_.size(); }
    bool symmetric_nearest_neighbor_martingale() const override { return true; }

    Support support(const StepContext& ctx) const override { return ctx.excited() ? excited_ : uniform_; }

    Site sample(const StepContext& ctx, double u) const override {
        if (ctx.excited()) {
            if (u < tilt_d_) return target_step_;
            int k = std::min(static_cast<int>((u - tilt_d_) / (1.0 - tilt_d_) * (2 * dim_ - 1)), 2 * dim_ - 2);
            if (k >= target_) ++k;
            return unit_step(dim_, k);
        }
        return unit_step(dim_, std::min(static_cast<int>(u * (2 * dim_)), 2 * dim_ - 1));
    }

    double mean_projection(const StepContext& ctx, const Direction& l) const override {
        if (!ctx.excited()) return 0.0;
        return excited_mean_ * l.dot(target_step_);
    }

    nlohmann::json describe() const override {
        return {{"name", name()}, {"dimension", dim_}, {"tilt", to_string(tilt_)}};
    }

private:
    int dim_;
    Rational tilt_;
    double tilt_d_;
    int target_;
    Site target_step_;
    double excited_mean_ = 0.0;
    Support uniform_;
    Support excited_;
};

class TableKernel final : public IncrementKernel {
public:
    TableKernel(std::string name, int dim, double jump_bound, double h, double r, Support excited, Support plain)
        : name_(std::move(name)), dim_(dim), k_(jump_bound), h_(h), r_(r), excited_(std::move(excited)),
          plain_(std::move(plain)) {
        require(!excited_.empty() && !plain_.empty(), ErrorKind::config, "table kernel needs nonempty supports");
        for (const auto* s : {&excited_, &plain_}) {
            for (const auto& w : *s) {
                require(w.step.dim() == dim_, ErrorKind::config, "table kernel step has the wrong dimension");
                require(w.probability >= 0.0, ErrorKind::config, "negative probability in table kernel");
            }
        }
    }

    std::string name() const override { return name_; }
    int dimension() const override { return dim_; }
    double jump_bound() const override { return k_; }
    double ellipticity_mass() const override { return h_; }
    double ellipticity_displacement() const override { return r_; }
    std::size_t max_support_size() const override { return std::max(excited_.size(), plain_.size()); }
    Support support(const StepContext& ctx) const override { return ctx.excited() ? excited_ : plain_; }

    nlohmann::json describe() const override {
        auto dump = [](const Support& s) {
            nlohmann::json out = nlohmann::json::array();
            for (const auto& w : s) {
                std::vector<std::int64_t> c(w.step.coords().begin(), w.step.coords().end());
                out.push_back({{"step", c}, {"p", w.exact ? to_string(*w.exact) : std::to_string(w.probability)}});
            }
            return out;
        };
        return {{"name", name_}, {"dimension", dim_}, {"K", k_}, {"excited", dump(excited_)}, {"plain", dump(plain_)}};
    }

private:
    std::string name_;
    int dim_;
    double k_;
    double h_;
    double r_;
    Support excited_;
    Support plain_;
};

} // namespace

KernelPtr tilted_nn_kernel(int dim, const Direction& l, const DriftSchedule& schedule,
                           std::uint64_t rational_denominator) {
    return std::make_shared<TiltedKernel>(dim, l, schedule, rational_denominator);
}

KernelPtr cookie_kernel(int dim, const Direction& l, const Rational& tilt) {
    return std::make_shared<CookieKernel>(dim, l, tilt);
}

KernelPtr uniform_kernel(int dim) { return std::make_shared<UniformKernel>(dim); }

KernelPtr table_kernel(std::string name, int dim, double jump_bound, double h, double r, Support excited,
                       Support plain) {
    return std::make_shared<TableKernel>(std::move(name), dim, jump_bound, h, r, std::move(excited),
                                         std::move(plain));
}

KernelPtr point_mass_kernel(const Site& step, double jump_bound) {
    Support s{exact_step(step, Rational(1))};
    return table_kernel("point_mass", step.dim(), jump_bound, 1.0, 0.5, s, s);
}

} // namespace gerw
