#include "maxpoly/errors.hpp"
#include "maxpoly/formulation.hpp"
#include "maxpoly/geometry.hpp"
#include "support/solutions.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <regex>

using namespace maxpoly;
using doctest::Approx;

namespace {

// Independent signed shoelace over a raw vertex list.
double signed_area(const std::vector<Point2>& v)
{
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point2& a = v[i];
        const Point2& b = v[(i + 1) % v.size()];
        s += a.x * b.y - b.x * a.y;
    }
    return 0.5 * s;
}

std::vector<Point2> regular_hexagon_unit_diameter()
{
    std::vector<Point2> v;
    for (int k = 0; k < 6; ++k) {
        const double t = 2.0 * std::numbers::pi * k / 6.0;
        v.push_back({0.5 * std::cos(t), 0.5 * std::sin(t)});
    }
    return v;
}

std::size_t count_matches(const std::string& s, const std::string& pattern)
{
    const std::regex re(pattern);
    return static_cast<std::size_t>(std::distance(std::sregex_iterator(s.begin(), s.end(), re), std::sregex_iterator()));
}

} // namespace

TEST_CASE("area_shoelace")
{
    const double s3 = std::sqrt(3.0) / 2.0;
    CHECK(area_shoelace(Polygon({{0, 0}, {0.5, s3}, {0, 1}, {-0.5, s3}})) == Approx(0.5).epsilon(1e-15));

    const Polygon oct = assignment_to_polygon(8, fixture::octagon());
    CHECK(std::abs(area_shoelace(oct) - 0.72686848) <= 1e-7);

    const auto hex = regular_hexagon_unit_diameter();
    CHECK(std::abs(area_shoelace(Polygon(hex)) - 0.64951905) <= 1e-8);
    CHECK(std::abs(area_shoelace(Polygon(hex)) - (6.0 / 8.0) * std::sin(2.0 * std::numbers::pi / 6.0)) <= 1e-15);

    CHECK_THROWS_AS(Polygon({{0, 0}, {1, 0}}), InvalidPolygon);
    CHECK_THROWS_AS(Polygon({{0, 0}, {0, 0}, {1, 1}}), InvalidPolygon);
}

TEST_CASE("orientation is canonicalized")
{
    auto hex = regular_hexagon_unit_diameter();
    const Polygon ccw(hex);
    CHECK_FALSE(ccw.reoriented());
    std::reverse(hex.begin(), hex.end());
    CHECK(signed_area(hex) < 0.0);
    const Polygon cw(hex);
    CHECK(cw.reoriented());
    CHECK(area_shoelace(cw) == Approx(area_shoelace(ccw)).epsilon(1e-15));
}

TEST_CASE("shoelace invariants on random polygons")
{
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        // Random convex polygon: sorted angles on a circle.
        const int n = 3 + trial % 10;
        std::vector<double> t(static_cast<std::size_t>(n));
        for (auto& a : t) {
            a = std::numbers::pi * (u(gen) + 1.0);
        }
        std::sort(t.begin(), t.end());
        t.erase(std::unique(t.begin(), t.end()), t.end());
        std::vector<Point2> v;
        for (double a : t) {
            v.push_back({0.5 * std::cos(a), 0.5 * std::sin(a)});
        }
        if (v.size() < 3) {
            continue;
        }
        const double a0 = signed_area(v);
        std::rotate(v.begin(), v.begin() + 1, v.end());
        CHECK(signed_area(v) == Approx(a0).epsilon(1e-12));
        const Polygon p(v);
        CHECK(area_shoelace(p) == Approx(a0).epsilon(1e-12));
        CHECK(area_shoelace(p) <= upper_bound_area(static_cast<int>(v.size())) + 1e-12);

        const double s = 0.5 + (u(gen) + 1.0);
        const Polygon q = p.scaled(s);
        CHECK(std::abs(area_shoelace(q) - s * s * area_shoelace(p)) <= 1e-12 * s * s);
        CHECK(std::abs(diameter_sq(q) - s * s * diameter_sq(p)) <= 1e-12 * s * s);
    }
}

TEST_CASE("diameter_sq")
{
    CHECK(std::abs(diameter_sq(Polygon({{0, 0}, {1, 0}, {0.5, 1e-9}})) - 1.0) <= 1e-12);
    const double s = 0.37;
    CHECK(diameter_sq(Polygon({{0, 0}, {s, 0}, {s, s}, {0, s}})) == Approx(2 * s * s).epsilon(1e-15));
    const Polygon dec = assignment_to_polygon(10, fixture::decagon_full());
    CHECK(std::abs(diameter_sq(dec) - 1.0) <= 1e-6);
}

TEST_CASE("is_convex")
{
    CHECK(is_convex(Polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}})));
    CHECK_FALSE(is_convex(Polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}})));
    CHECK(is_convex(assignment_to_polygon(12, fixture::dodecagon_full())));

    const Polygon flat({{0, 0}, {0.5, 0}, {1, 0}, {1, 1}, {0, 1}});
    CHECK_FALSE(is_convex(flat));
    CHECK(is_convex(flat, true));
}

TEST_CASE("diameter_graph")
{
    const Polygon oct = assignment_to_polygon(8, fixture::octagon());
    CHECK(diameter_graph(oct, 1e-6).edges.size() == 8);

    // Brute-force oracle for the hexagon's unit pairs.
    const auto hex = regular_hexagon_unit_diameter();
    std::size_t unit_pairs = 0;
    for (std::size_t i = 0; i < hex.size(); ++i) {
        for (std::size_t j = i + 1; j < hex.size(); ++j) {
            const double d = std::hypot(hex[i].x - hex[j].x, hex[i].y - hex[j].y);
            unit_pairs += std::abs(d - 1.0) < 1e-9 ? 1 : 0;
        }
    }
    CHECK(unit_pairs == 3);
    CHECK(diameter_graph(Polygon(hex), 1e-9).edges.size() == unit_pairs);

    const double s3 = std::sqrt(3.0) / 2.0;
    CHECK(diameter_graph(Polygon({{0, 0}, {1, 0}, {0.5, s3}})).edges.size() == 3);

    CHECK_THROWS_AS(diameter_graph(Polygon({{0, 0}, {2, 0}, {1, 1}})), NotSmallPolygon);
}

TEST_CASE("check_graham_configuration")
{
    const Polygon oct = assignment_to_polygon(8, fixture::octagon());
    CHECK(check_graham_configuration(diameter_graph(oct)));
    const Polygon dec = assignment_to_polygon(10, fixture::decagon_full());
    CHECK(check_graham_configuration(diameter_graph(dec, 1e-6)));

    // A 7-cycle on vertices 0..6 plus pendant 6-7, then with the pendant removed.
    DiameterGraph g{8, {}, 1e-6};
    for (int i = 0; i < 7; ++i) {
        g.edges.emplace_back(std::min(i, (i + 1) % 7), std::max(i, (i + 1) % 7));
    }
    g.edges.emplace_back(3, 7);
    std::sort(g.edges.begin(), g.edges.end());
    CHECK(check_graham_configuration(g));
    g.edges.erase(std::find(g.edges.begin(), g.edges.end(), std::pair{3, 7}));
    CHECK_FALSE(check_graham_configuration(g));

    for (int n = 6; n <= 16; n += 2) {
        const DiameterGraph r = diameter_graph(regular_small_polygon(n), 1e-9);
        CHECK(static_cast<int>(r.edges.size()) == n / 2);
        CHECK_FALSE(check_graham_configuration(r));
    }
}

TEST_CASE("regular_small_area and upper_bound_area")
{
    CHECK(std::abs(regular_small_area(6) - 0.64951905) <= 1e-8);
    CHECK(std::abs(regular_small_area(6) - area_shoelace(Polygon(regular_hexagon_unit_diameter()))) <= 1e-14);
    CHECK(std::abs(regular_small_area(8) - std::sqrt(0.5)) <= 1e-15);
    CHECK(regular_small_area(4) == Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(regular_small_area(2), DomainError);
    CHECK_THROWS_AS(upper_bound_area(2), DomainError);

    for (int n = 3; n <= 31; ++n) {
        // Shoelace of the explicit regular polygon as the oracle.
        CHECK(std::abs(area_shoelace(regular_small_polygon(n)) - regular_small_area(n)) <= 1e-14);
        if (n % 2 == 1) {
            CHECK(regular_small_area(n) == upper_bound_area(n));
        } else {
            CHECK(regular_small_area(n) < upper_bound_area(n));
        }
    }

    CHECK(std::abs(upper_bound_area(14) - 0.76893595) <= 1e-8);
    CHECK(std::abs(upper_bound_area(16) - 0.77279135) <= 1e-8);
    const double pi = std::numbers::pi;
    const double ub10 = (10.0 / 8.0) * std::sin(2 * pi / 10) / std::pow(std::cos(pi / 20), 2);
    CHECK(upper_bound_area(10) == Approx(ub10).epsilon(1e-15));
    CHECK(upper_bound_area(10) > 0.74913736);
}

TEST_CASE("render_svg")
{
    const Polygon dec = assignment_to_polygon(10, fixture::decagon_full());
    const std::string with_graph = render_svg(dec, diameter_graph(dec));
    CHECK(with_graph.rfind("<?xml", 0) == 0);
    CHECK(count_matches(with_graph, "class=\"vertex\"") == 10);
    CHECK(count_matches(with_graph, "class=\"chord\"") == 10);
    CHECK(count_matches(render_svg(dec), "class=\"chord\"") == 0);

    const Polygon dod = assignment_to_polygon(12, fixture::dodecagon_symmetric());
    CHECK(count_matches(render_svg(dod), "class=\"vertex\"") == 12);
}

TEST_CASE("polygon json round trip")
{
    const Polygon oct = assignment_to_polygon(8, fixture::octagon());
    const Polygon back = polygon_from_json(polygon_to_json(oct));
    CHECK(back.vertices() == oct.vertices());
    CHECK_THROWS_AS(polygon_from_json("{\"n\": 3}"), ParseError);
}
