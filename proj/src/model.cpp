#include "gerw/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gerw {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::domain: return "DomainError";
    case ErrorKind::config: return "ConfigError";
    case ErrorKind::infinite_support: return "InfiniteSupport";
    case ErrorKind::overflow_risk: return "OverflowRisk";
    case ErrorKind::too_large: return "TooLarge";
    case ErrorKind::config_mismatch: return "ConfigMismatch";
    case ErrorKind::hypothesis_unverifiable: return "HypothesisUnverifiable";
    case ErrorKind::not_rational: return "NotRational";
    }
    return "Error";
}

// ---------------------------------------------------------------- Site

Site::Site(int dim) : dim_(dim) {
    require(dim >= 1 && dim <= kMaxDimension, ErrorKind::domain,
            "dimension must lie in [1, " + std::to_string(kMaxDimension) + "]");
}

Site::Site(std::initializer_list<std::int64_t> coords) : Site(static_cast<int>(coords.size())) {
    std::copy(coords.begin(), coords.end(), c_.begin());
}

Site Site::unit(int dim, int axis, int sign) {
    Site s(dim);
    s[axis] = sign;
    return s;
}

double Site::norm() const noexcept {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += static_cast<double>((*this)[i]) * static_cast<double>((*this)[i]);
    return std::sqrt(s);
}

std::string Site::to_string() const {
    std::ostringstream out;
    out << '(';
    for (int i = 0; i < dim_; ++i) out << (i ? "," : "") << (*this)[i];
    out << ')';
    return out.str();
}

std::size_t SiteHash::operator()(const Site& s) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(s.dim());
    for (auto c : s.coords()) {
        h ^= static_cast<std::uint64_t>(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
}

// ---------------------------------------------------------------- Direction

Direction::Direction(std::vector<double> components) : c_(std::move(components)) {
    require(dim() >= 2, ErrorKind::domain, "direction needs d >= 2");
    require(dim() <= kMaxDimension, ErrorKind::domain, "direction dimension exceeds the supported maximum");
    double sq = 0.0;
    for (double v : c_) {
        require(std::isfinite(v), ErrorKind::domain, "direction component is not finite");
        sq += v * v;
    }
    require(std::abs(std::sqrt(sq) - 1.0) <= 1e-12, ErrorKind::domain,
            "direction must be a unit vector (|l| = 1 within 1e-12)");

    int nonzero = 0;
    for (int i = 0; i < dim(); ++i) {
        if (c_[static_cast<std::size_t>(i)] != 0.0) ++nonzero;
        if (std::abs(c_[static_cast<std::size_t>(i)]) > std::abs(c_[static_cast<std::size_t>(dominant_)])) dominant_ = i;
    }
    dominant_sign_ = c_[static_cast<std::size_t>(dominant_)] < 0.0 ? -1 : 1;
    if (nonzero == 1 && std::abs(c_[static_cast<std::size_t>(dominant_)]) == 1.0) axis_ = dominant_;
}

Direction Direction::axis(int dim, int index) {
    require(index >= 0 && index < dim, ErrorKind::domain, "axis index out of range");
    std::vector<double> v(static_cast<std::size_t>(dim), 0.0);
    v[static_cast<std::size_t>(index)] = 1.0;
    return Direction(std::move(v));
}

Direction Direction::normalized(std::vector<double> v) {
    double sq = 0.0;
    for (double x : v) sq += x * x;
    require(sq > 0.0 && std::isfinite(sq), ErrorKind::domain, "cannot normalize a zero vector");
    const double n = std::sqrt(sq);
    for (double& x : v) x /= n;
    return Direction(std::move(v));
}

// ---------------------------------------------------------------- DriftSchedule

DriftSchedule::DriftSchedule(double lambda, double beta, std::uint64_t n0)
    : lambda_(lambda), beta_(beta), n0_(n0) {
    require(std::isfinite(lambda) && lambda > 0.0, ErrorKind::domain, "drift scale lambda must be > 0");
    require(beta >= 0.0 && beta < 1.0, ErrorKind::domain, "decay exponent beta must lie in [0, 1)");
}

double DriftSchedule::value(std::uint64_t n) const {
    if (beta_ == 0.0) return lambda_;
    const std::uint64_t t = n0_ + n;
    require(t >= 1, ErrorKind::domain, "lambda (n0 + n)^(-beta) is undefined at n0 + n = 0 when beta > 0");
    return lambda_ * std::pow(static_cast<double>(t), -beta_);
}

double drift_lower_bound(const DriftSchedule& schedule, std::uint64_t n) { return schedule.value(n); }

// ---------------------------------------------------------------- Strip

Strip::Strip(double a, double b) : a_(a), b_(b) {
    require(a < b, ErrorKind::domain, "strip needs a < b");
}

bool half_space_membership(const Direction& l, const Site& x) { return l.dot(x) > 0.0; }

bool strip_membership(const Strip& strip, const Direction& l, const Site& x) { return strip.contains(x, l); }

// ---------------------------------------------------------------- ExcitationSet

ExcitationSet ExcitationSet::full_lattice() { return ExcitationSet{}; }

ExcitationSet ExcitationSet::positive_half_space(Direction l) {
    ExcitationSet s;
    s.kind_ = Kind::positive_half_space;
    s.l_ = std::move(l);
    return s;
}

ExcitationSet ExcitationSet::complement(std::vector<Site> excluded) {
    ExcitationSet s;
    s.kind_ = Kind::complement;
    s.excluded_set_ = std::make_shared<const std::unordered_set<Site, SiteHash>>(excluded.begin(), excluded.end());
    s.excluded_ = std::move(excluded);
    return s;
}

ExcitationSet ExcitationSet::custom(std::function<bool(const Site&)> predicate, std::string label) {
    require(static_cast<bool>(predicate), ErrorKind::config, "custom excitation set needs a predicate");
    ExcitationSet s;
    s.kind_ = Kind::custom;
    s.predicate_ = std::move(predicate);
    s.label_ = std::move(label);
    return s;
}

std::optional<std::size_t> ExcitationSet::complement_count_in_strip(const Strip& strip, const Direction& l) const {
    switch (kind_) {
    case Kind::full_lattice: return std::size_t{0};
    case Kind::complement: {
        std::size_t count = 0;
        for (const auto& x : *excluded_set_) count += strip.contains(x, l) ? 1 : 0;
        return count;
    }
    case Kind::positive_half_space:
        // {x.l <= 0} meets every strip around the origin in infinitely many sites.
        if (strip.a() <= 0.0) return std::nullopt;
        return std::size_t{0};
    case Kind::custom: return std::nullopt;
    }
    return std::nullopt;
}

std::optional<bool> ExcitationSet::contains_half_space(const Direction& l) const {
    switch (kind_) {
    case Kind::full_lattice: return true;
    case Kind::positive_half_space: return *l_ == l;
    case Kind::complement:
        return std::none_of(excluded_.begin(), excluded_.end(), [&](const Site& x) { return l.dot(x) > 0.0; });
    case Kind::custom: return std::nullopt;
    }
    return std::nullopt;
}

std::string ExcitationSet::describe() const {
    switch (kind_) {
    case Kind::full_lattice: return "full";
    case Kind::positive_half_space: return "half_space";
    case Kind::complement: return "complement(" + std::to_string(excluded_.size()) + ")";
    case Kind::custom: return "custom:" + label_;
    }
    return "?";
}

// ---------------------------------------------------------------- packing and the visited set

SitePacker::SitePacker(int dim) : dim_(dim), bits_(64 / dim) {
    require(dim >= 1 && dim <= kMaxDimension, ErrorKind::domain, "unsupported dimension");
    bias_ = std::int64_t{1} << (bits_ - 1);
    limit_ = bias_ - 1;
    mask_ = bits_ == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << bits_) - 1);
}

SiteSet::SiteSet() : slots_(1024), mask_(1023) {}

bool SiteSet::insert(std::uint64_t key) {
    if (2 * (size_ + 1) > slots_.size()) grow();
    std::size_t i = static_cast<std::size_t>(mix(key)) & mask_;
    while (slots_[i].epoch == epoch_) {
        if (slots_[i].key == key) return false;
        i = (i + 1) & mask_;
    }
    slots_[i] = Slot{key, epoch_};
    ++size_;
    return true;
}

bool SiteSet::contains(std::uint64_t key) const noexcept {
    std::size_t i = static_cast<std::size_t>(mix(key)) & mask_;
    while (slots_[i].epoch == epoch_) {
        if (slots_[i].key == key) return true;
        i = (i + 1) & mask_;
    }
    return false;
}

void SiteSet::clear() noexcept {
    size_ = 0;
    if (++epoch_ == 0) {
        // wrapped: stale stamps could alias the new epoch
        std::fill(slots_.begin(), slots_.end(), Slot{});
        epoch_ = 1;
    }
}

void SiteSet::grow() {
    std::vector<Slot> old;
    old.swap(slots_);
    slots_.assign(old.size() * 2, Slot{});
    mask_ = slots_.size() - 1;
    const std::uint32_t live = epoch_;
    epoch_ = 1;
    size_ = 0;
    for (const auto& s : old) {
        if (s.epoch == live) insert(s.key);
    }
}

WalkState::WalkState(int dim) : packer_(dim), position_(dim) { reset(); }

void WalkState::reset() {
    visited_.clear();
    position_ = Site(position_.dim());
    time_ = 0;
    fresh_ = true;
    visited_.insert(packer_.pack(position_));
}

bool WalkState::advance(const Site& step) {
    position_ += step;
    ++time_;
    fresh_ = visited_.insert(packer_.pack(position_));
    return fresh_;
}

} // namespace gerw
