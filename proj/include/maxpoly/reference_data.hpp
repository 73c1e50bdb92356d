#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace maxpoly {

// Reference optima the toolkit is checked against.  x is in the program's own
// variable order (reduced for symmetric rows).
struct ReferenceOptimum {
    int n = 0;
    bool symmetric = false;
    double area = 0.0;
    double area_tol = 0.0;
    std::vector<double> x; // empty when no reference coordinates exist
    double x_tol = 0.0;
    std::string_view source;
};

struct ReferenceRelaxation {
    int n = 0;
    bool symmetric = false;
    int order = 0;
    int moment_vars = 0;
    int moment_matrix = 0;
    std::string_view source;
};

struct ReferenceBound {
    int n = 0;
    double value = 0.0;
    std::string_view source;
};

inline constexpr std::string_view kReferenceDataVersion = "maxpoly-reference/1";

// Rows of the reproduction table, in run order.
std::span<const ReferenceOptimum> reference_optima();
const ReferenceOptimum* find_reference(int n, bool symmetric);
std::span<const ReferenceRelaxation> reference_relaxations();
std::span<const ReferenceBound> reference_upper_bounds();
// Rigorous lower bounds obtained with a verified SDP solver.
std::span<const ReferenceBound> reference_verified_lower_bounds();

} // namespace maxpoly
