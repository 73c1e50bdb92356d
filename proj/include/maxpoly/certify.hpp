#pragma once

#include "maxpoly/errors.hpp"
#include "maxpoly/formulation.hpp"
#include "maxpoly/geometry.hpp"
#include "maxpoly/interval.hpp"

#include <optional>
#include <string>
#include <vector>

namespace maxpoly {

struct IntervalPoint {
    Interval x;
    Interval y;
};

// Rigorous enclosures of v_1..v_n (index order) with y_i = sqrt(1 - x_i^2).
std::vector<IntervalPoint> enclose_polygon(int n, const Assignment& a);

struct Certificate {
    int n = 0;
    Interval area;
    Interval diameter_sq;
    bool convex_verified = false;
    // area.lo / max(1, diameter_sq.hi), rounded down; present only when convex_verified.
    std::optional<double> certified_lower_bound;
    Assignment input;
    std::string failure_reason;
};

Certificate certify(int n, const Assignment& a);
// Certify an explicit vertex list (either orientation).
Certificate certify_vertices(std::vector<IntervalPoint> vertices);
Certificate certify_polygon(const Polygon& p);

struct Bracket {
    double lower = 0.0;
    double upper = 0.0;
};

// (certified lower bound, upper_bound_area(n)); throws CertificationFailed.
Bracket bracket(int n, const Assignment& a);

struct CertificationFailed : Error {
    using Error::Error;
};

// "maxpoly-cert/1"
std::string certificate_to_json(const Certificate& c);

// Shortest round-trip decimal and C99 hex-float spellings.
std::string shortest_decimal(double v);
std::string hex_float(double v);

} // namespace maxpoly
