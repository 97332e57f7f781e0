#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "gerw/errors.hpp"

namespace gerw {

inline constexpr int kMaxDimension = 8;

/// A point of Z^d (also used for lattice steps). Unused trailing
/// coordinates are kept at zero so that equality and hashing are plain.
class Site {
public:
    Site() = default;
    explicit Site(int dim);
    Site(std::initializer_list<std::int64_t> coords);

    static Site unit(int dim, int axis, int sign = +1);

    int dim() const noexcept { return dim_; }
    std::int64_t operator[](int i) const noexcept { return c_[static_cast<std::size_t>(i)]; }
    std::int64_t& operator[](int i) noexcept { return c_[static_cast<std::size_t>(i)]; }
    std::span<const std::int64_t> coords() const noexcept {
        return {c_.data(), static_cast<std::size_t>(dim_)};
    }

    Site& operator+=(const Site& o) noexcept {
        for (int i = 0; i < dim_; ++i) c_[static_cast<std::size_t>(i)] += o.c_[static_cast<std::size_t>(i)];
        return *this;
    }
    friend Site operator+(Site a, const Site& b) noexcept { return a += b; }
    friend Site operator-(Site a, const Site& b) noexcept {
        for (int i = 0; i < a.dim_; ++i) a[i] -= b[i];
        return a;
    }
    friend bool operator==(const Site&, const Site&) = default;

    double norm() const noexcept;
    std::string to_string() const;

private:
    std::array<std::int64_t, kMaxDimension> c_{};
    int dim_ = 0;
};

struct SiteHash {
    std::size_t operator()(const Site& s) const noexcept;
};

/// Unit vector l in R^d, d >= 2.
class Direction {
public:
    explicit Direction(std::vector<double> components);
    static Direction axis(int dim, int index = 0);
    /// Normalizes an arbitrary nonzero vector.
    static Direction normalized(std::vector<double> v);

    int dim() const noexcept { return static_cast<int>(c_.size()); }
    const std::vector<double>& components() const noexcept { return c_; }
    double operator[](int i) const noexcept { return c_[static_cast<std::size_t>(i)]; }

    double dot(const Site& x) const noexcept {
        double s = 0.0;
        for (int i = 0; i < dim(); ++i) s += c_[static_cast<std::size_t>(i)] * static_cast<double>(x[i]);
        return s;
    }

    /// Set when l = +-e_i exactly; projections are then exact integers.
    std::optional<int> axis_index() const noexcept { return axis_; }

    /// Axis e* maximizing |e.l| (lowest index on ties) and the sign of e*.l.
    int dominant_axis() const noexcept { return dominant_; }
    int dominant_sign() const noexcept { return dominant_sign_; }

    friend bool operator==(const Direction& a, const Direction& b) { return a.c_ == b.c_; }

private:
    std::vector<double> c_;
    std::optional<int> axis_;
    int dominant_ = 0;
    int dominant_sign_ = 1;
};

/// lambda_n >= lambda * (n0 + n)^(-beta).
class DriftSchedule {
public:
    DriftSchedule(double lambda, double beta, std::uint64_t n0);

    double lambda() const noexcept { return lambda_; }
    double beta() const noexcept { return beta_; }
    std::uint64_t n0() const noexcept { return n0_; }

    double value(std::uint64_t n) const;

private:
    double lambda_;
    double beta_;
    std::uint64_t n0_;
};

/// The drift lower bound lambda * (n0 + n)^(-beta). Throws on n0 = n = 0 with beta > 0.
double drift_lower_bound(const DriftSchedule& schedule, std::uint64_t n);

/// H(a, b): sites whose projection on l lies in [a, b].
class Strip {
public:
    Strip(double a, double b);

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    bool contains(const Site& x, const Direction& l) const noexcept {
        const double p = l.dot(x);
        return a_ <= p && p <= b_;
    }

private:
    double a_;
    double b_;
};

bool half_space_membership(const Direction& l, const Site& x);
bool strip_membership(const Strip& strip, const Direction& l, const Site& x);

/// The set A of sites where a first visit triggers a drifted increment.
class ExcitationSet {
public:
    enum class Kind { full_lattice, positive_half_space, complement, custom };

    static ExcitationSet full_lattice();
    static ExcitationSet positive_half_space(Direction l);
    static ExcitationSet complement(std::vector<Site> excluded);
    static ExcitationSet custom(std::function<bool(const Site&)> predicate, std::string label);

    Kind kind() const noexcept { return kind_; }

    bool contains(const Site& x) const {
        switch (kind_) {
        case Kind::full_lattice: return true;
        case Kind::positive_half_space: return l_->dot(x) > 0.0;
        case Kind::complement: return excluded_set_->count(x) == 0;
        case Kind::custom: return predicate_(x);
        }
        return false;
    }

    /// |(Z^d \ A) cap strip|, or nullopt when it is infinite or cannot be counted.
    std::optional<std::size_t> complement_count_in_strip(const Strip& strip, const Direction& l) const;

    /// True when A is known to contain the positive half-space M_l.
    std::optional<bool> contains_half_space(const Direction& l) const;

    const std::vector<Site>& excluded() const noexcept { return excluded_; }
    const std::optional<Direction>& half_space_direction() const noexcept { return l_; }
    std::string describe() const;

private:
    ExcitationSet() = default;

    Kind kind_ = Kind::full_lattice;
    std::optional<Direction> l_;
    std::vector<Site> excluded_;
    std::shared_ptr<const std::unordered_set<Site, SiteHash>> excluded_set_;
    std::function<bool(const Site&)> predicate_;
    std::string label_;
};

/// Packs a site into 64 bits with 64/d bits per coordinate.
class SitePacker {
public:
    explicit SitePacker(int dim);

    int bits_per_coordinate() const noexcept { return bits_; }
    /// Largest |coordinate| representable.
    std::int64_t max_abs_coordinate() const noexcept { return limit_; }

    std::uint64_t pack(const Site& x) const noexcept {
        std::uint64_t key = 0;
        for (int i = 0; i < dim_; ++i) {
            const auto biased = static_cast<std::uint64_t>(x[i] + bias_) & mask_;
            key |= biased << (i * bits_);
        }
        return key;
    }

private:
    int dim_;
    int bits_;
    std::int64_t bias_;
    std::int64_t limit_;
    std::uint64_t mask_;
};

/// Open-addressing hash set of packed keys. clear() is O(1) through an
/// epoch stamp so a worker can reuse one table across trajectories.
class SiteSet {
public:
    SiteSet();

    /// Returns true when the key was not present.
    bool insert(std::uint64_t key);
    bool contains(std::uint64_t key) const noexcept;
    std::size_t size() const noexcept { return size_; }
    void clear() noexcept;

private:
    struct Slot {
        std::uint64_t key = 0;
        std::uint32_t epoch = 0;
    };

    static std::uint64_t mix(std::uint64_t k) noexcept {
        k ^= k >> 30;
        k *= 0xbf58476d1ce4e5b9ULL;
        k ^= k >> 27;
        k *= 0x94d049bb133111ebULL;
        k ^= k >> 31;
        return k;
    }
    void grow();

    std::vector<Slot> slots_;
    std::size_t mask_ = 0;
    std::size_t size_ = 0;
    std::uint32_t epoch_ = 1;
};

/// Position, time, range and freshness of one walk.
class WalkState {
public:
    explicit WalkState(int dim);

    void reset();
    /// Moves by `step`; returns whether the arrival site is fresh.
    bool advance(const Site& step);

    std::uint64_t time() const noexcept { return time_; }
    const Site& position() const noexcept { return position_; }
    bool fresh() const noexcept { return fresh_; }
    std::size_t range_size() const noexcept { return visited_.size(); }
    bool visited(const Site& x) const noexcept { return visited_.contains(packer_.pack(x)); }
    const SitePacker& packer() const noexcept { return packer_; }

private:
    SitePacker packer_;
    SiteSet visited_;
    Site position_;
    std::uint64_t time_ = 0;
    bool fresh_ = true;
};

} // namespace gerw
