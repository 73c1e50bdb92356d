#include "maxpoly/certify.hpp"

#include "maxpoly/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

#include <json.hpp>

namespace maxpoly {

namespace {

Interval eval_affine(const LinExpr& e, const std::vector<Interval>& values)
{
    // Start from the first term when the constant is zero: 0 + t needs no widening.
    std::optional<Interval> acc;
    if (e.constant() != 0.0 || e.is_constant()) {
        acc = Interval(e.constant());
    }
    for (const auto& [v, c] : e.coefficients()) {
        const Interval& value = values[static_cast<std::size_t>(v)];
        const Interval term = c == 1.0 ? value : c == -1.0 ? -value : Interval(c) * value;
        acc = acc ? *acc + term : term;
    }
    return *acc;
}

// (b - a) x (c - a)
Interval cross(const IntervalPoint& a, const IntervalPoint& b, const IntervalPoint& c)
{
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

Interval signed_area(const std::vector<IntervalPoint>& v)
{
    Interval acc(0.0);
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = v[i];
        const auto& b = v[(i + 1) % n];
        acc += a.x * b.y - b.x * a.y;
    }
    return acc * Interval(0.5);
}

} // namespace

std::vector<IntervalPoint> enclose_polygon(int n, const Assignment& a)
{
    if (n < 4 || n % 2 != 0) {
        throw DomainError("enclose_polygon: n must be even and >= 4");
    }
    const Assignment full = (n >= 6 && is_symmetric_form(a, n)) ? expand_symmetric(a, n) : a;
    const int m = n - 3;
    if (static_cast<int>(full.x.size()) != m) {
        throw DimensionMismatch("enclose_polygon: wrong number of x values");
    }
    std::vector<Interval> values(static_cast<std::size_t>(2 * m));
    for (int i = 0; i < m; ++i) {
        const double x = full.x[static_cast<std::size_t>(i)];
        if (!(x >= -1.0 && x <= 1.0)) {
            throw DomainError("enclose_polygon: x" + std::to_string(i + 1) + " outside [-1, 1]");
        }
        const Interval xi(x);
        values[static_cast<std::size_t>(i)] = xi;
        values[static_cast<std::size_t>(m + i)] = sqrt(Interval(1.0) - square(xi));
    }
    const VertexExprs v = vertex_expressions(n);
    std::vector<IntervalPoint> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) {
        out.push_back({eval_affine(v.x(i), values), eval_affine(v.y(i), values)});
    }
    return out;
}

Certificate certify_vertices(std::vector<IntervalPoint> v)
{
    Certificate c;
    c.n = static_cast<int>(v.size());
    if (v.size() < 3) {
        c.failure_reason = "fewer than 3 vertices";
        return c;
    }
    Interval area = signed_area(v);
    if (area.hi() < 0.0) {
        std::reverse(v.begin(), v.end());
        area = signed_area(v);
    }
    c.area = area;

    Interval dsq(0.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (std::size_t j = i + 1; j < v.size(); ++j) {
            dsq = max(dsq, square(v[i].x - v[j].x) + square(v[i].y - v[j].y));
        }
    }
    c.diameter_sq = dsq;

    if (!area.strictly_positive()) {
        c.failure_reason = "convexity: orientation not decidable (area interval contains 0)";
        return c;
    }
    // Strict convexity: every vertex strictly left of every directed edge.
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t i1 = (i + 1) % n;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || j == i1) {
                continue;
            }
            if (!cross(v[i], v[i1], v[j]).strictly_positive()) {
                c.failure_reason = "convexity: vertex " + std::to_string(j) + " not strictly left of edge " +
                                   std::to_string(i) + "-" + std::to_string(i1);
                return c;
            }
        }
    }
    c.convex_verified = true;
    const double denom = std::max(1.0, dsq.hi());
    // IEEE division is correctly rounded, so one step down is a lower bound.
    c.certified_lower_bound = denom == 1.0 ? area.lo() : next_down(area.lo() / denom);
    return c;
}

Certificate certify(int n, const Assignment& a)
{
    Certificate c = certify_vertices(enclose_polygon(n, a));
    c.n = n;
    c.input = a;
    return c;
}

Certificate certify_polygon(const Polygon& p)
{
    std::vector<IntervalPoint> v;
    v.reserve(p.size());
    for (const auto& q : p.vertices()) {
        v.push_back({Interval(q.x), Interval(q.y)});
    }
    return certify_vertices(std::move(v));
}

Bracket bracket(int n, const Assignment& a)
{
    const Certificate c = certify(n, a);
    if (!c.certified_lower_bound) {
        throw CertificationFailed(c.failure_reason);
    }
    return {*c.certified_lower_bound, upper_bound_area(n)};
}

std::string shortest_decimal(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string hex_float(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

std::string certificate_to_json(const Certificate& c)
{
    using nlohmann::json;
    auto ival = [](const Interval& i) {
        return json{{"lo", shortest_decimal(i.lo())},
                    {"hi", shortest_decimal(i.hi())},
                    {"lo_hex", hex_float(i.lo())},
                    {"hi_hex", hex_float(i.hi())}};
    };
    json j;
    j["version"] = "maxpoly-cert/1";
    j["n"] = c.n;
    j["area"] = ival(c.area);
    j["diameter_sq"] = ival(c.diameter_sq);
    j["convex_verified"] = c.convex_verified;
    if (c.certified_lower_bound) {
        j["certified_lower_bound"] = shortest_decimal(*c.certified_lower_bound);
        j["certified_lower_bound_hex"] = hex_float(*c.certified_lower_bound);
    } else {
        j["certified_lower_bound"] = nullptr;
        j["failure_reason"] = c.failure_reason;
    }
    if (c.n >= 3) {
        const double ub = upper_bound_area(c.n);
        j["upper_bound"] = shortest_decimal(ub);
        j["upper_bound_hex"] = hex_float(ub);
    }
    j["x"] = c.input.x;
    return j.dump(2);
}

} // namespace maxpoly
