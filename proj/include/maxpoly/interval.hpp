#pragma once

#include <cmath>
#include <limits>
#include <string>

namespace maxpoly {

// Closed interval [lo, hi] of doubles.  Every operation rounds its result
// outward by one ulp per bound (std::nextafter), so enclosures stay valid
// under any IEEE rounding mode without touching the FPU control word.
class Interval {
public:
    constexpr Interval() noexcept = default;
    explicit Interval(double v);
    Interval(double lo, double hi);

    static Interval point(double v) { return Interval(v); }
    // Smallest interval with outward-rounded bounds around [lo, hi].
    static Interval widened(double lo, double hi);

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    double width() const noexcept { return hi_ - lo_; }
    double mid() const noexcept { return 0.5 * (lo_ + hi_); }
    bool contains(double v) const noexcept { return lo_ <= v && v <= hi_; }
    bool contains_zero() const noexcept { return lo_ <= 0.0 && 0.0 <= hi_; }
    bool strictly_positive() const noexcept { return lo_ > 0.0; }

    Interval& operator+=(const Interval& o);
    Interval& operator-=(const Interval& o);
    Interval& operator*=(const Interval& o);

    friend bool operator==(const Interval&, const Interval&) = default;

private:
    double lo_ = 0.0;
    double hi_ = 0.0;
};

Interval operator+(Interval a, const Interval& b);
Interval operator-(Interval a, const Interval& b);
Interval operator-(const Interval& a);
Interval operator*(Interval a, const Interval& b);
Interval square(const Interval& a);
// Square root of the nonnegative part; throws DomainError when hi < 0.
Interval sqrt(const Interval& a);
// Interval hull of max over elements.
Interval max(const Interval& a, const Interval& b);

inline double next_down(double v) { return std::nextafter(v, -std::numeric_limits<double>::infinity()); }
inline double next_up(double v) { return std::nextafter(v, std::numeric_limits<double>::infinity()); }

std::string to_string(const Interval& a);

} // namespace maxpoly
