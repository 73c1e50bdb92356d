#include "maxpoly/interval.hpp"

#include "maxpoly/errors.hpp"

#include <algorithm>
#include <sstream>

namespace maxpoly {

Interval::Interval(double v) : lo_(v), hi_(v)
{
    if (std::isnan(v)) {
        throw DomainError("interval endpoint is NaN");
    }
}

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi)
{
    if (std::isnan(lo) || std::isnan(hi) || lo > hi) {
        throw DomainError("invalid interval bounds");
    }
}

Interval Interval::widened(double lo, double hi) { return Interval(next_down(lo), next_up(hi)); }

Interval& Interval::operator+=(const Interval& o)
{
    *this = widened(lo_ + o.lo_, hi_ + o.hi_);
    return *this;
}

Interval& Interval::operator-=(const Interval& o)
{
    *this = widened(lo_ - o.hi_, hi_ - o.lo_);
    return *this;
}

Interval& Interval::operator*=(const Interval& o)
{
    const double a = lo_ * o.lo_;
    const double b = lo_ * o.hi_;
    const double c = hi_ * o.lo_;
    const double d = hi_ * o.hi_;
    *this = widened(std::min({a, b, c, d}), std::max({a, b, c, d}));
    return *this;
}

Interval operator+(Interval a, const Interval& b) { return a += b; }
Interval operator-(Interval a, const Interval& b) { return a -= b; }
Interval operator-(const Interval& a) { return Interval(-a.hi(), -a.lo()); }
Interval operator*(Interval a, const Interval& b) { return a *= b; }

Interval square(const Interval& a)
{
    const double l = a.lo() * a.lo();
    const double h = a.hi() * a.hi();
    if (a.contains_zero()) {
        return Interval(0.0, next_up(std::max(l, h)));
    }
    return Interval::widened(std::min(l, h), std::max(l, h));
}

Interval sqrt(const Interval& a)
{
    if (a.hi() < 0.0) {
        throw DomainError("sqrt of a negative interval");
    }
    const double lo = a.lo() > 0.0 ? std::max(0.0, next_down(std::sqrt(a.lo()))) : 0.0;
    return Interval(lo, next_up(std::sqrt(a.hi())));
}

Interval max(const Interval& a, const Interval& b)
{
    return Interval(std::max(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

std::string to_string(const Interval& a)
{
    std::ostringstream out;
    out.precision(17);
    out << '[' << a.lo() << ", " << a.hi() << ']';
    return out.str();
}

} // namespace maxpoly
