#pragma once

#include "maxpoly/expr.hpp"
#include "maxpoly/geometry.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace maxpoly {

// Vertex coordinates of the Graham-configuration n-gon as affine forms in the
// full variable set: x_i has id i-1 and y_i has id (n-3)+i-1, for i = 1..n-3.
// Vertices are numbered 1..n; v_n = (0,0) and v_{n/2} = (0,1).  Index order is
// clockwise in the plane.
struct VertexExprs {
    int n = 0;
    std::vector<LinExpr> xbar; // xbar[i-1] is the abscissa of v_i
    std::vector<LinExpr> ybar;

    const LinExpr& x(int i) const { return xbar.at(static_cast<std::size_t>(i - 1)); }
    const LinExpr& y(int i) const { return ybar.at(static_cast<std::size_t>(i - 1)); }
};

VertexExprs vertex_expressions(int n);

enum class EdgeRole {
    Pending,  // v_n -- v_{n/2}
    Chain,    // unit edge eliminated by a circle equality x_j^2 + y_j^2 = 1
    Closing,  // v_{floor(n/4)} -- v_{ceil(3n/4)}
};

struct GrahamEdge {
    int a = 0; // vertex numbers, a < b
    int b = 0;
    EdgeRole role = EdgeRole::Chain;
    int circle_index = 0; // j for Chain edges, 0 otherwise
};

// The n edges of the diameter graph the formulation encodes.
std::vector<GrahamEdge> graham_edges(int n);

// A_n = x1 + 1/2 sum_{i=1, i != n/2-1, n/2}^{n-2} (ybar_i xbar_{i+1} - xbar_i ybar_{i+1})
QuadExpr area_objective(int n);
// 1/2 sum_{i=1}^{n-2} (ybar_i xbar_{i+1} - xbar_i ybar_{i+1})
QuadExpr area_partial_shoelace(int n);
// 1/2 sum_{i=1}^{n} (xbar_i + xbar_{i+1}) (ybar_i - ybar_{i+1}), indices mod n
QuadExpr area_trapezoid(int n);

enum class ConstraintKind { LessEqualOne, EqualOne, CircleEquality, Box, OrderCut, Nonneg };
enum class Sense { LessEqual, Equal, GreaterEqual };

std::string_view to_string(ConstraintKind k);
std::optional<ConstraintKind> constraint_kind_from_string(std::string_view s);

// expr (sense) rhs
struct QuadConstraint {
    QuadExpr expr;
    ConstraintKind kind = ConstraintKind::LessEqualOne;
    Sense sense = Sense::LessEqual;
    double rhs = 1.0;
    std::string tag;

    double value(std::span<const double> values) const { return expr.evaluate(values); }
    // Violation: max(0, v - rhs), max(0, rhs - v) or |v - rhs|.
    double residual(std::span<const double> values) const;

    friend bool operator==(const QuadConstraint&, const QuadConstraint&) = default;
};

struct Variable {
    std::string name; // "x4", "y4"
    bool is_y = false;
    int index = 0; // subscript

    friend bool operator==(const Variable&, const Variable&) = default;
};

struct BuildOptions {
    bool symmetric = false;
    bool relax_closing_edge = false;
    // Unset: on for n = 8 full programs, off otherwise.
    std::optional<bool> order_cut;
    // Keep the three pairs around v_{n/2} that the x1 bound already implies.
    bool include_bound_implied = false;

    friend bool operator==(const BuildOptions&, const BuildOptions&) = default;
};

// Variables are ordered x-block then y-block; y at id k pairs with x at id k - num_x().
struct QuadraticProgram {
    int n = 0;
    bool symmetric = false;
    bool relax_closing_edge = false;
    bool order_cut = false;
    bool include_bound_implied = false;
    std::vector<Variable> variables;
    QuadExpr objective;
    std::vector<QuadConstraint> constraints;

    int num_x() const noexcept { return static_cast<int>(variables.size()) / 2; }
    int num_vars() const noexcept { return static_cast<int>(variables.size()); }
    VarId y_of(VarId x) const noexcept { return x + num_x(); }
    std::optional<VarId> find_variable(std::string_view name) const;

    friend bool operator==(const QuadraticProgram&, const QuadraticProgram&) = default;
};

QuadraticProgram build_program(int n, const BuildOptions& options = {});

// Identify x_{2i+1} with x_{2i} and y_{2i+1} with y_{2i}, merging duplicate constraints.
QuadraticProgram reduce_symmetric(const QuadraticProgram& p);

// The program with sigma applied to its variables (x_{2i} <-> x_{2i+1}, y alike).
QuadraticProgram substitute_sigma(const QuadraticProgram& p);

// Values of the program's x variables (in variable order); y absent means
// y_i = +sqrt(1 - x_i^2).
struct Assignment {
    std::vector<double> x;
    std::optional<std::vector<double>> y;

    friend bool operator==(const Assignment&, const Assignment&) = default;
};

// x_{2i} <-> x_{2i+1} for a full-form assignment of an n-gon.
Assignment apply_sigma(const Assignment& a, int n);

// Full-form assignment from a symmetric one (x1, x2, x4, ...).
Assignment expand_symmetric(const Assignment& a, int n);
bool is_symmetric_form(const Assignment& a, int n);

// Values for every program variable: x followed by y (derived when absent).
std::vector<double> variable_values(const QuadraticProgram& p, const Assignment& a);

struct EvaluationReport {
    double objective = 0.0;
    double max_violation = 0.0;
    std::vector<double> residuals; // aligned with p.constraints
};

EvaluationReport evaluate(const QuadraticProgram& p, const Assignment& a);

// Vertices v_1..v_n evaluated numerically.  The result is stored
// counterclockwise, i.e. the reverse of the index order.
Polygon assignment_to_polygon(int n, const Assignment& a);
std::vector<Point2> assignment_vertices(int n, const Assignment& a);

// "maxpoly-qp/1"
std::string to_json(const QuadraticProgram& p);
QuadraticProgram program_from_json(std::string_view text);

} // namespace maxpoly
