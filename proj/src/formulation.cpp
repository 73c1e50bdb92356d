#include "maxpoly/formulation.hpp"

#include "maxpoly/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace maxpoly {

namespace {

void require_even_n(int n, const char* what)
{
    if (n < 4 || n % 2 != 0) {
        throw DomainError(std::string(what) + ": n must be even and >= 4, got " + std::to_string(n));
    }
}

VarId x_id(int i) { return i - 1; }
VarId y_id(int n, int i) { return (n - 3) + i - 1; }

// Vertex numbers of u_k and w_k, k = 0..n/2-2.
struct ChainLayout {
    std::vector<int> u_vertex;
    std::vector<int> w_vertex;
};

ChainLayout chain_layout(int n)
{
    const int kmax = n / 2 - 2;
    ChainLayout c;
    c.u_vertex.assign(static_cast<std::size_t>(kmax + 1), 0);
    c.w_vertex.assign(static_cast<std::size_t>(kmax + 1), 0);
    const int lo = (n - 2) / 4;
    const int hi = (n - 2 + 3) / 4;
    for (int i = 1; i <= lo; ++i) {
        c.u_vertex[static_cast<std::size_t>(2 * i - 1)] = i;
        c.w_vertex[static_cast<std::size_t>(2 * i - 1)] = n - i;
    }
    for (int i = 1; i <= hi; ++i) {
        c.w_vertex[static_cast<std::size_t>(2 * (i - 1))] = n / 2 - i;
        c.u_vertex[static_cast<std::size_t>(2 * (i - 1))] = n / 2 + i;
    }
    return c;
}

std::string pair_tag(int a, int b)
{
    return "pair:" + std::to_string(std::min(a, b)) + ":" + std::to_string(std::max(a, b));
}

QuadExpr distance_sq(const VertexExprs& v, int i, int j)
{
    return QuadExpr::square(v.x(i) - v.x(j)) + QuadExpr::square(v.y(i) - v.y(j));
}

// ybar_i xbar_{i+1} - xbar_i ybar_{i+1}
QuadExpr cross_term(const VertexExprs& v, int i, int j)
{
    return QuadExpr::product(v.y(i), v.x(j)) - QuadExpr::product(v.x(i), v.y(j));
}

// Index of x_j in a symmetric program (x1, x2, x4, ...).
int reduced_slot(int j) { return j == 1 ? 0 : j / 2; }

} // namespace

VertexExprs vertex_expressions(int n)
{
    require_even_n(n, "vertex_expressions");
    const int kmax = n / 2 - 2;
    std::vector<LinExpr> ux, uy, wx, wy;
    LinExpr cux = LinExpr::variable(x_id(1));
    LinExpr cuy = LinExpr::variable(y_id(n, 1));
    LinExpr cwx = LinExpr::variable(x_id(1), -1.0);
    LinExpr cwy = LinExpr::variable(y_id(n, 1));
    for (int k = 0; k <= kmax; ++k) {
        if (k > 0) {
            const double s = (k % 2 == 0) ? 1.0 : -1.0; // (-1)^k
            cux.add_term(x_id(2 * k), s);
            cuy.add_term(y_id(n, 2 * k), s);
            cwx.add_term(x_id(2 * k + 1), -s); // (-1)^(k+1)
            cwy.add_term(y_id(n, 2 * k + 1), s);
        }
        ux.push_back(cux);
        uy.push_back(cuy);
        wx.push_back(cwx);
        wy.push_back(cwy);
    }

    VertexExprs v;
    v.n = n;
    v.xbar.assign(static_cast<std::size_t>(n), LinExpr{});
    v.ybar.assign(static_cast<std::size_t>(n), LinExpr{});
    v.ybar[static_cast<std::size_t>(n / 2 - 1)] = LinExpr(1.0);
    const ChainLayout c = chain_layout(n);
    for (int k = 0; k <= kmax; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        v.xbar[static_cast<std::size_t>(c.u_vertex[ku] - 1)] = ux[ku];
        v.ybar[static_cast<std::size_t>(c.u_vertex[ku] - 1)] = uy[ku];
        v.xbar[static_cast<std::size_t>(c.w_vertex[ku] - 1)] = wx[ku];
        v.ybar[static_cast<std::size_t>(c.w_vertex[ku] - 1)] = wy[ku];
    }
    return v;
}

std::vector<GrahamEdge> graham_edges(int n)
{
    require_even_n(n, "graham_edges");
    const ChainLayout c = chain_layout(n);
    const int kmax = n / 2 - 2;
    std::vector<GrahamEdge> edges;
    auto add = [&](int a, int b, EdgeRole role, int j) {
        edges.push_back({std::min(a, b), std::max(a, b), role, j});
    };
    add(n / 2, n, EdgeRole::Pending, 0);
    add(c.u_vertex[0], n, EdgeRole::Chain, 1);
    add(c.w_vertex[0], n, EdgeRole::Chain, 1);
    for (int k = 0; k < kmax; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        add(c.u_vertex[ku], c.u_vertex[ku + 1], EdgeRole::Chain, 2 * (k + 1));
        add(c.w_vertex[ku], c.w_vertex[ku + 1], EdgeRole::Chain, 2 * (k + 1) + 1);
    }
    add(c.u_vertex[static_cast<std::size_t>(kmax)], c.w_vertex[static_cast<std::size_t>(kmax)],
        EdgeRole::Closing, 0);
    return edges;
}

QuadExpr area_objective(int n)
{
    const VertexExprs v = vertex_expressions(n);
    QuadExpr sum;
    for (int i = 1; i <= n - 2; ++i) {
        if (i == n / 2 - 1 || i == n / 2) {
            continue;
        }
        sum += cross_term(v, i, i + 1);
    }
    sum *= 0.5;
    sum.add_linear(x_id(1), 1.0);
    return sum;
}

QuadExpr area_partial_shoelace(int n)
{
    const VertexExprs v = vertex_expressions(n);
    QuadExpr sum;
    for (int i = 1; i <= n - 2; ++i) {
        sum += cross_term(v, i, i + 1);
    }
    return 0.5 * sum;
}

QuadExpr area_trapezoid(int n)
{
    const VertexExprs v = vertex_expressions(n);
    QuadExpr sum;
    for (int i = 1; i <= n; ++i) {
        const int j = i % n + 1;
        sum += QuadExpr::product(v.x(i) + v.x(j), v.y(i) - v.y(j));
    }
    return 0.5 * sum;
}

std::string_view to_string(ConstraintKind k)
{
    switch (k) {
    case ConstraintKind::LessEqualOne: return "less-equal-one";
    case ConstraintKind::EqualOne: return "equal-one";
    case ConstraintKind::CircleEquality: return "circle-equality";
    case ConstraintKind::Box: return "box";
    case ConstraintKind::OrderCut: return "order-cut";
    case ConstraintKind::Nonneg: return "nonneg";
    }
    return "unknown";
}

std::optional<ConstraintKind> constraint_kind_from_string(std::string_view s)
{
    for (auto k : {ConstraintKind::LessEqualOne, ConstraintKind::EqualOne, ConstraintKind::CircleEquality,
                   ConstraintKind::Box, ConstraintKind::OrderCut, ConstraintKind::Nonneg}) {
        if (to_string(k) == s) {
            return k;
        }
    }
    return std::nullopt;
}

double QuadConstraint::residual(std::span<const double> values) const
{
    const double v = value(values);
    switch (sense) {
    case Sense::LessEqual: return std::max(0.0, v - rhs);
    case Sense::GreaterEqual: return std::max(0.0, rhs - v);
    case Sense::Equal: return std::abs(v - rhs);
    }
    return 0.0;
}

std::optional<VarId> QuadraticProgram::find_variable(std::string_view name) const
{
    for (std::size_t i = 0; i < variables.size(); ++i) {
        if (variables[i].name == name) {
            return static_cast<VarId>(i);
        }
    }
    return std::nullopt;
}

QuadraticProgram build_program(int n, const BuildOptions& options)
{
    require_even_n(n, "build_program");
    if (options.symmetric) {
        BuildOptions full = options;
        full.symmetric = false;
        full.order_cut = false;
        return reduce_symmetric(build_program(n, full));
    }
    const int m = n - 3;
    const VertexExprs v = vertex_expressions(n);

    QuadraticProgram p;
    p.n = n;
    p.symmetric = false;
    p.relax_closing_edge = options.relax_closing_edge;
    p.order_cut = options.order_cut.value_or(n == 8) && m >= 3;
    p.include_bound_implied = options.include_bound_implied;
    for (int i = 1; i <= m; ++i) {
        p.variables.push_back({"x" + std::to_string(i), false, i});
    }
    for (int i = 1; i <= m; ++i) {
        p.variables.push_back({"y" + std::to_string(i), true, i});
    }
    p.objective = area_objective(n);

    const auto edges = graham_edges(n);
    const GrahamEdge closing = edges.back();
    std::set<std::pair<int, int>> skip;
    for (const auto& e : edges) {
        if (e.role != EdgeRole::Closing) {
            skip.insert({e.a, e.b});
        }
    }
    const std::set<std::pair<int, int>> bound_implied = {
        {n / 2 - 1, n / 2 + 1}, {n / 2 - 1, n / 2}, {n / 2, n / 2 + 1}};

    for (int i = 1; i <= n; ++i) {
        for (int j = i + 1; j <= n; ++j) {
            if (skip.contains({i, j})) {
                continue;
            }
            const bool implied = bound_implied.contains({i, j});
            const bool is_closing = (i == closing.a && j == closing.b);
            if (implied && !options.include_bound_implied) {
                continue;
            }
            QuadConstraint c{distance_sq(v, i, j), ConstraintKind::LessEqualOne, Sense::LessEqual, 1.0,
                             pair_tag(i, j)};
            // For n = 4 the closing pair is one of the bound-implied pairs.
            if (is_closing && !implied && !options.relax_closing_edge) {
                c.kind = ConstraintKind::EqualOne;
                c.sense = Sense::Equal;
            }
            p.constraints.push_back(std::move(c));
        }
    }
    for (int i = 1; i <= m; ++i) {
        QuadExpr e = QuadExpr::square(LinExpr::variable(x_id(i))) + QuadExpr::square(LinExpr::variable(y_id(n, i)));
        p.constraints.push_back(
            {std::move(e), ConstraintKind::CircleEquality, Sense::Equal, 1.0, "circle:" + std::to_string(i)});
    }
    for (int i = 1; i <= m; ++i) {
        p.constraints.push_back({QuadExpr(LinExpr::variable(y_id(n, i))), ConstraintKind::Nonneg,
                                 Sense::GreaterEqual, 0.0, "nonneg:y" + std::to_string(i)});
    }
    for (int i = 1; i <= m; ++i) {
        const std::string name = "x" + std::to_string(i);
        p.constraints.push_back({QuadExpr(LinExpr::variable(x_id(i))), ConstraintKind::Box, Sense::GreaterEqual,
                                 0.0, "box:" + name + ":lb"});
        p.constraints.push_back({QuadExpr(LinExpr::variable(x_id(i))), ConstraintKind::Box, Sense::LessEqual,
                                 i == 1 ? 0.5 : 1.0, "box:" + name + ":ub"});
    }
    if (p.order_cut) {
        p.constraints.push_back({QuadExpr(LinExpr::variable(x_id(2)) - LinExpr::variable(x_id(3))),
                                 ConstraintKind::OrderCut, Sense::GreaterEqual, 0.0, "order:x2:x3"});
    }
    return p;
}

QuadraticProgram reduce_symmetric(const QuadraticProgram& p)
{
    if (p.symmetric) {
        return p;
    }
    const int n = p.n;
    const int m = n - 3;
    if (p.num_x() != m) {
        throw DimensionMismatch("reduce_symmetric: program is not in full form");
    }
    const int k = (n - 2) / 2;
    std::vector<VarId> mapping(static_cast<std::size_t>(2 * m));
    for (int j = 1; j <= m; ++j) {
        mapping[static_cast<std::size_t>(j - 1)] = reduced_slot(j);
        mapping[static_cast<std::size_t>(m + j - 1)] = k + reduced_slot(j);
    }

    QuadraticProgram r;
    r.n = n;
    r.symmetric = true;
    r.relax_closing_edge = p.relax_closing_edge;
    r.order_cut = false;
    r.include_bound_implied = p.include_bound_implied;
    for (int s = 0; s < k; ++s) {
        const int idx = s == 0 ? 1 : 2 * s;
        r.variables.push_back({"x" + std::to_string(idx), false, idx});
    }
    for (int s = 0; s < k; ++s) {
        const int idx = s == 0 ? 1 : 2 * s;
        r.variables.push_back({"y" + std::to_string(idx), true, idx});
    }
    r.objective = p.objective.substitute(mapping);
    for (const auto& c : p.constraints) {
        QuadConstraint rc = c;
        rc.expr = c.expr.substitute(mapping);
        if (rc.expr.degree() == 0) {
            continue; // e.g. the order cut collapses to 0 >= 0
        }
        const bool duplicate = std::any_of(r.constraints.begin(), r.constraints.end(), [&](const auto& o) {
            return o.sense == rc.sense && o.rhs == rc.rhs && o.kind == rc.kind && o.expr == rc.expr;
        });
        if (!duplicate) {
            r.constraints.push_back(std::move(rc));
        }
    }
    return r;
}

namespace {

// sigma on variable subscripts.
int sigma_index(int j, int m)
{
    if (j >= 2 && j % 2 == 0 && j + 1 <= m) {
        return j + 1;
    }
    if (j >= 3 && j % 2 == 1) {
        return j - 1;
    }
    return j;
}

// sigma on vertex numbers: v_i -> v_{n-i}, v_n fixed.
int sigma_vertex(int i, int n) { return i == n ? n : n - i; }

std::string sigma_tag(const std::string& tag, int n)
{
    const int m = n - 3;
    auto parse_int = [](const std::string& s) { return std::stoi(s); };
    if (tag.rfind("pair:", 0) == 0) {
        const auto colon = tag.find(':', 5);
        const int a = parse_int(tag.substr(5, colon - 5));
        const int b = parse_int(tag.substr(colon + 1));
        return pair_tag(sigma_vertex(a, n), sigma_vertex(b, n));
    }
    if (tag.rfind("circle:", 0) == 0) {
        return "circle:" + std::to_string(sigma_index(parse_int(tag.substr(7)), m));
    }
    if (tag.rfind("nonneg:y", 0) == 0) {
        return "nonneg:y" + std::to_string(sigma_index(parse_int(tag.substr(8)), m));
    }
    if (tag.rfind("box:x", 0) == 0) {
        const auto colon = tag.find(':', 5);
        return "box:x" + std::to_string(sigma_index(parse_int(tag.substr(5, colon - 5)), m)) + tag.substr(colon);
    }
    if (tag == "order:x2:x3") {
        return "order:x3:x2";
    }
    return tag;
}

} // namespace

QuadraticProgram substitute_sigma(const QuadraticProgram& p)
{
    if (p.symmetric) {
        throw DomainError("substitute_sigma: sigma is the identity on a symmetric program");
    }
    const int m = p.n - 3;
    std::vector<VarId> mapping(static_cast<std::size_t>(2 * m));
    for (int j = 1; j <= m; ++j) {
        mapping[static_cast<std::size_t>(j - 1)] = sigma_index(j, m) - 1;
        mapping[static_cast<std::size_t>(m + j - 1)] = m + sigma_index(j, m) - 1;
    }
    QuadraticProgram s = p;
    s.objective = p.objective.substitute(mapping);
    for (auto& c : s.constraints) {
        c.expr = c.expr.substitute(mapping);
        c.tag = sigma_tag(c.tag, p.n);
    }
    return s;
}

Assignment apply_sigma(const Assignment& a, int n)
{
    require_even_n(n, "apply_sigma");
    const int m = n - 3;
    if (n >= 6 && is_symmetric_form(a, n)) {
        throw DomainError("apply_sigma: symmetric-form assignment (sigma is the identity there)");
    }
    if (static_cast<int>(a.x.size()) != m) {
        throw DimensionMismatch("apply_sigma: expected " + std::to_string(m) + " x values");
    }
    auto swap_pairs = [m](std::vector<double> v) {
        for (int j = 2; j + 1 <= m; j += 2) {
            std::swap(v[static_cast<std::size_t>(j - 1)], v[static_cast<std::size_t>(j)]);
        }
        return v;
    };
    Assignment out;
    out.x = swap_pairs(a.x);
    if (a.y) {
        out.y = swap_pairs(*a.y);
    }
    return out;
}

bool is_symmetric_form(const Assignment& a, int n) { return static_cast<int>(a.x.size()) == (n - 2) / 2; }

Assignment expand_symmetric(const Assignment& a, int n)
{
    require_even_n(n, "expand_symmetric");
    const int m = n - 3;
    if (!is_symmetric_form(a, n)) {
        throw DimensionMismatch("expand_symmetric: expected " + std::to_string((n - 2) / 2) + " x values");
    }
    auto expand = [m](const std::vector<double>& v) {
        std::vector<double> out(static_cast<std::size_t>(m));
        for (int j = 1; j <= m; ++j) {
            out[static_cast<std::size_t>(j - 1)] = v[static_cast<std::size_t>(reduced_slot(j))];
        }
        return out;
    };
    Assignment out;
    out.x = expand(a.x);
    if (a.y) {
        out.y = expand(*a.y);
    }
    return out;
}

std::vector<double> variable_values(const QuadraticProgram& p, const Assignment& a)
{
    const auto k = static_cast<std::size_t>(p.num_x());
    if (a.x.size() != k) {
        throw DimensionMismatch("assignment has " + std::to_string(a.x.size()) + " x values, program expects " +
                                std::to_string(k));
    }
    if (a.y && a.y->size() != k) {
        throw DimensionMismatch("assignment y vector has wrong length");
    }
    std::vector<double> values(2 * k);
    for (std::size_t i = 0; i < k; ++i) {
        values[i] = a.x[i];
        if (a.y) {
            values[k + i] = (*a.y)[i];
        } else {
            if (std::abs(a.x[i]) > 1.0) {
                throw DomainError("cannot derive y from |x| > 1 (variable " + p.variables[i].name + ")");
            }
            values[k + i] = std::sqrt(1.0 - a.x[i] * a.x[i]);
        }
    }
    return values;
}

EvaluationReport evaluate(const QuadraticProgram& p, const Assignment& a)
{
    const std::vector<double> values = variable_values(p, a);
    EvaluationReport r;
    r.objective = p.objective.evaluate(values);
    r.residuals.reserve(p.constraints.size());
    for (const auto& c : p.constraints) {
        const double res = c.residual(values);
        r.residuals.push_back(res);
        r.max_violation = std::max(r.max_violation, res);
    }
    return r;
}

std::vector<Point2> assignment_vertices(int n, const Assignment& a)
{
    require_even_n(n, "assignment_to_polygon");
    const Assignment full = (n >= 6 && is_symmetric_form(a, n)) ? expand_symmetric(a, n) : a;
    const int m = n - 3;
    if (static_cast<int>(full.x.size()) != m) {
        throw DimensionMismatch("assignment_to_polygon: expected " + std::to_string(m) + " or " +
                                std::to_string((n - 2) / 2) + " x values");
    }
    std::vector<double> values(static_cast<std::size_t>(2 * m));
    for (int i = 0; i < m; ++i) {
        const double x = full.x[static_cast<std::size_t>(i)];
        values[static_cast<std::size_t>(i)] = x;
        if (full.y) {
            values[static_cast<std::size_t>(m + i)] = (*full.y)[static_cast<std::size_t>(i)];
        } else {
            if (x > 1.0 || x < -1.0) {
                throw DomainError("cannot derive y from x" + std::to_string(i + 1) + " > 1");
            }
            values[static_cast<std::size_t>(m + i)] = std::sqrt(1.0 - x * x);
        }
    }
    const VertexExprs v = vertex_expressions(n);
    std::vector<Point2> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) {
        pts.push_back({v.x(i).evaluate(values), v.y(i).evaluate(values)});
    }
    return pts;
}

Polygon assignment_to_polygon(int n, const Assignment& a) { return Polygon(assignment_vertices(n, a)); }

} // namespace maxpoly
