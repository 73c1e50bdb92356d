#include "maxpoly/geometry.hpp"

#include "maxpoly/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace maxpoly {

namespace {

double signed_area(const std::vector<Point2>& v)
{
    double acc = 0.0;
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& a = v[i];
        const Point2& b = v[(i + 1) % n];
        acc += a.x * b.y - b.x * a.y;
    }
    return 0.5 * acc;
}

double dist_sq(const Point2& a, const Point2& b)
{
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

} // namespace

Polygon::Polygon(std::vector<Point2> vertices) : vertices_(std::move(vertices))
{
    if (vertices_.size() < 3) {
        throw InvalidPolygon("polygon needs at least 3 vertices, got " + std::to_string(vertices_.size()));
    }
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        const Point2& a = vertices_[i];
        if (!std::isfinite(a.x) || !std::isfinite(a.y)) {
            throw InvalidPolygon("vertex " + std::to_string(i) + " is not finite");
        }
        if (a == vertices_[(i + 1) % vertices_.size()]) {
            throw InvalidPolygon("consecutive vertices " + std::to_string(i) + " coincide");
        }
    }
    if (signed_area(vertices_) < 0.0) {
        std::reverse(vertices_.begin(), vertices_.end());
        reoriented_ = true;
    }
}

Polygon Polygon::scaled(double s) const
{
    std::vector<Point2> v = vertices_;
    for (auto& p : v) {
        p.x *= s;
        p.y *= s;
    }
    return Polygon(std::move(v));
}

double area_shoelace(const Polygon& p) { return signed_area(p.vertices()); }

double diameter_sq(const Polygon& p)
{
    double best = 0.0;
    const auto& v = p.vertices();
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (std::size_t j = i + 1; j < v.size(); ++j) {
            best = std::max(best, dist_sq(v[i], v[j]));
        }
    }
    return best;
}

bool is_convex(const Polygon& p, bool allow_collinear)
{
    const auto& v = p.vertices();
    const std::size_t n = v.size();
    int sign = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& a = v[i];
        const Point2& b = v[(i + 1) % n];
        const Point2& c = v[(i + 2) % n];
        const double cross = (b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x);
        if (std::abs(cross) <= kCollinearTol) {
            if (!allow_collinear) {
                return false;
            }
            continue;
        }
        const int s = cross > 0 ? 1 : -1;
        if (sign == 0) {
            sign = s;
        } else if (s != sign) {
            return false;
        }
    }
    // A simple polygon with one turn sign can still wind twice around.
    double turning = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& a = v[i];
        const Point2& b = v[(i + 1) % n];
        const Point2& c = v[(i + 2) % n];
        const double a1 = std::atan2(b.y - a.y, b.x - a.x);
        const double a2 = std::atan2(c.y - b.y, c.x - b.x);
        double d = a2 - a1;
        while (d <= -std::numbers::pi) d += 2 * std::numbers::pi;
        while (d > std::numbers::pi) d -= 2 * std::numbers::pi;
        turning += d;
    }
    return std::abs(std::abs(turning) - 2 * std::numbers::pi) < 1e-6;
}

DiameterGraph diameter_graph(const Polygon& p, double tol)
{
    DiameterGraph g;
    g.n = static_cast<int>(p.size());
    g.tol = tol;
    const auto& v = p.vertices();
    for (int i = 0; i < g.n; ++i) {
        for (int j = i + 1; j < g.n; ++j) {
            const double d2 = dist_sq(v[i], v[j]);
            if (d2 > 1.0 + tol) {
                std::ostringstream msg;
                msg << "vertices " << i << " and " << j << " are at squared distance " << d2;
                throw NotSmallPolygon(msg.str());
            }
            if (std::abs(d2 - 1.0) <= tol) {
                g.edges.emplace_back(i, j);
            }
        }
    }
    return g;
}

bool check_graham_configuration(const DiameterGraph& g)
{
    const int n = g.n;
    if (n < 4 || n % 2 != 0 || static_cast<int>(g.edges.size()) != n) {
        return false;
    }
    std::vector<std::vector<int>> adj(n);
    for (const auto& [a, b] : g.edges) {
        if (a == b || a < 0 || b < 0 || a >= n || b >= n) {
            return false;
        }
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    for (auto& nb : adj) {
        std::sort(nb.begin(), nb.end());
        if (std::adjacent_find(nb.begin(), nb.end()) != nb.end()) {
            return false;
        }
    }
    // Exactly one pendant vertex, attached to a degree-3 vertex; all others degree 2.
    int pendant = -1;
    for (int i = 0; i < n; ++i) {
        if (adj[i].size() == 1) {
            if (pendant >= 0) {
                return false;
            }
            pendant = i;
        }
    }
    if (pendant < 0) {
        return false;
    }
    const int hub = adj[pendant][0];
    for (int i = 0; i < n; ++i) {
        if (i == pendant) {
            continue;
        }
        const std::size_t expect = (i == hub) ? 3 : 2;
        if (adj[i].size() != expect) {
            return false;
        }
    }
    // The remaining 2-regular graph on n-1 vertices must be one cycle.
    int prev = -1;
    int cur = hub;
    int visited = 0;
    do {
        int next = -1;
        for (int nb : adj[cur]) {
            if (nb != pendant && nb != prev) {
                next = nb;
                break;
            }
        }
        if (next < 0) {
            return false;
        }
        prev = cur;
        cur = next;
        ++visited;
    } while (cur != hub && visited <= n);
    return cur == hub && visited == n - 1;
}

Polygon regular_small_polygon(int n)
{
    if (n < 3) {
        throw DomainError("regular polygon needs n >= 3");
    }
    // Diameter of a regular n-gon with circumradius r: 2r (even n), 2r cos(pi/(2n)) (odd n).
    const double pi = std::numbers::pi;
    const double r = (n % 2 == 0) ? 0.5 : 0.5 / std::cos(pi / (2.0 * n));
    std::vector<Point2> v;
    v.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double t = pi / 2 + 2 * pi * k / n;
        v.push_back({r * std::cos(t), r * std::sin(t)});
    }
    return Polygon(std::move(v));
}

double regular_small_area(int n)
{
    if (n < 3) {
        throw DomainError("regular_small_area needs n >= 3");
    }
    const double pi = std::numbers::pi;
    const double base = n / 8.0 * std::sin(2 * pi / n);
    if (n % 2 == 0) {
        return base;
    }
    const double c = std::cos(pi / (2.0 * n));
    return base / (c * c);
}

double upper_bound_area(int n)
{
    if (n < 3) {
        throw DomainError("upper_bound_area needs n >= 3");
    }
    const double pi = std::numbers::pi;
    const double c = std::cos(pi / (2.0 * n));
    return n / 8.0 * std::sin(2 * pi / n) / (c * c);
}

std::string render_svg(const Polygon& p, const std::optional<DiameterGraph>& g)
{
    constexpr double canvas = 512.0;
    const auto& v = p.vertices();
    double xmin = v[0].x, xmax = v[0].x, ymin = v[0].y, ymax = v[0].y;
    for (const auto& q : v) {
        xmin = std::min(xmin, q.x);
        xmax = std::max(xmax, q.x);
        ymin = std::min(ymin, q.y);
        ymax = std::max(ymax, q.y);
    }
    const double span = std::max({xmax - xmin, ymax - ymin, 1e-12});
    const double margin = 0.05 * span;
    const double scale = canvas / (span + 2 * margin);
    const double cx = 0.5 * (xmin + xmax);
    const double cy = 0.5 * (ymin + ymax);
    auto sx = [&](double x) { return canvas / 2 + (x - cx) * scale; };
    auto sy = [&](double y) { return canvas / 2 - (y - cy) * scale; };

    std::ostringstream out;
    out.precision(10);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"512\" height=\"512\" "
           "viewBox=\"0 0 512 512\">\n";
    out << "  <polygon class=\"outline\" fill=\"none\" stroke=\"black\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < v.size(); ++i) {
        out << (i ? " " : "") << sx(v[i].x) << ',' << sy(v[i].y);
    }
    out << "\"/>\n";
    if (g) {
        for (const auto& [a, b] : g->edges) {
            out << "  <line class=\"chord\" stroke=\"gray\" stroke-width=\"0.75\" x1=\"" << sx(v[a].x)
                << "\" y1=\"" << sy(v[a].y) << "\" x2=\"" << sx(v[b].x) << "\" y2=\"" << sy(v[b].y)
                << "\"/>\n";
        }
    }
    for (const auto& q : v) {
        out << "  <circle class=\"vertex\" r=\"4\" fill=\"black\" cx=\"" << sx(q.x) << "\" cy=\"" << sy(q.y)
            << "\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string polygon_to_json(const Polygon& p)
{
    nlohmann::json j;
    j["n"] = p.size();
    auto& arr = j["vertices"] = nlohmann::json::array();
    for (const auto& q : p.vertices()) {
        arr.push_back({q.x, q.y});
    }
    return j.dump(2);
}

Polygon polygon_from_json(std::string_view text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("", e.what());
    }
    if (!j.is_object() || !j.contains("vertices")) {
        throw ParseError("/vertices", "missing field");
    }
    const auto& arr = j["vertices"];
    if (!arr.is_array()) {
        throw ParseError("/vertices", "expected array");
    }
    std::vector<Point2> v;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto& e = arr[i];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
            throw ParseError("/vertices/" + std::to_string(i), "expected [x, y]");
        }
        v.push_back({e[0].get<double>(), e[1].get<double>()});
    }
    if (j.contains("n") && (!j["n"].is_number_integer() || j["n"].get<std::size_t>() != v.size())) {
        throw ParseError("/n", "does not match vertex count");
    }
    return Polygon(std::move(v));
}

} // namespace maxpoly
