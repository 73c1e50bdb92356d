#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace maxpoly {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

// Ordered planar polygon, stored counterclockwise.  Clockwise input is
// reversed on construction and `reoriented()` reports that it happened.
class Polygon {
public:
    explicit Polygon(std::vector<Point2> vertices);

    const std::vector<Point2>& vertices() const noexcept { return vertices_; }
    std::size_t size() const noexcept { return vertices_.size(); }
    const Point2& operator[](std::size_t i) const { return vertices_[i]; }
    bool reoriented() const noexcept { return reoriented_; }

    Polygon scaled(double s) const;

private:
    std::vector<Point2> vertices_;
    bool reoriented_ = false;
};

struct DiameterGraph {
    int n = 0;
    std::vector<std::pair<int, int>> edges; // i < j, lexicographically sorted
    double tol = 1e-6;
};

inline constexpr double kDiameterGraphTol = 1e-6;
inline constexpr double kCollinearTol = 1e-12;

double area_shoelace(const Polygon& p);
double diameter_sq(const Polygon& p);

// Strict convexity unless allow_collinear, which admits |cross| <= kCollinearTol.
bool is_convex(const Polygon& p, bool allow_collinear = false);

// Pairs whose squared distance lies within tol of 1.  Throws NotSmallPolygon
// when some pair exceeds 1 + tol.
DiameterGraph diameter_graph(const Polygon& p, double tol = kDiameterGraphTol);

// True iff the graph is an (n-1)-cycle plus one pendant edge to the remaining vertex.
bool check_graham_configuration(const DiameterGraph& g);

// Regular n-gon scaled to unit diameter, first vertex at the top.
Polygon regular_small_polygon(int n);
double regular_small_area(int n);

// Even n: (n/8) sin(2 pi/n) / cos^2(pi/(2n)).  Odd n: the regular n-gon.
// The form sin^2(pi/2n) cot(pi/n) seen elsewhere evaluates to ~0.055 and is
// not this bound.
double upper_bound_area(int n);

std::string render_svg(const Polygon& p, const std::optional<DiameterGraph>& g = std::nullopt);

// {"n": int, "vertices": [[x, y], ...]}
std::string polygon_to_json(const Polygon& p);
Polygon polygon_from_json(std::string_view text);

} // namespace maxpoly
