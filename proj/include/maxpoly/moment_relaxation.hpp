#pragma once

#include "maxpoly/formulation.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace maxpoly {

// Dense exponent vector over a program's variables.
struct Monomial {
    std::vector<std::uint8_t> exps;

    int degree() const;
    friend bool operator==(const Monomial&, const Monomial&) = default;
};

// Graded lexicographic: lower degree first; within a degree, larger exponent
// of the earlier variable first (x1^2 < x1 x2 < x2^2 < ...).
struct GradLexLess {
    bool operator()(const Monomial& a, const Monomial& b) const;
};

using Polynomial = std::map<Monomial, double, GradLexLess>;

Monomial unit_monomial(int nvars);
Monomial multiply(const Monomial& a, const Monomial& b);
Polynomial to_polynomial(const QuadExpr& e, int nvars);
Polynomial multiply(const Polynomial& a, const Polynomial& b);
double evaluate(const Polynomial& p, std::span<const double> values);
double evaluate(const Monomial& m, std::span<const double> values);

// Rewrite y_i^2 -> 1 - x_i^2 until every y exponent is at most one.
Polynomial normal_form(const QuadraticProgram& p, const Polynomial& q);
bool is_normal(const QuadraticProgram& p, const Monomial& m);

struct MomentBasis {
    int degree = 0;
    std::vector<Monomial> monomials; // graded-lex, constant first
    std::map<Monomial, int, GradLexLess> index;

    std::size_t size() const noexcept { return monomials.size(); }
};

// All normal monomials of total degree <= degree over p's variables.
MomentBasis monomial_basis(const QuadraticProgram& p, int degree);

// constant + sum_k coef_k * moment_k   (k indexes SDPInstance::moments)
struct MomentForm {
    double constant = 0.0;
    std::vector<std::pair<int, double>> terms; // sorted by moment index

    double evaluate(std::span<const double> moments) const;
    friend bool operator==(const MomentForm&, const MomentForm&) = default;
};

struct BlockEntry {
    int row = 0; // 0-based, row <= col
    int col = 0;
    MomentForm value;

    friend bool operator==(const BlockEntry&, const BlockEntry&) = default;
};

struct SdpBlock {
    std::string label; // "moment" or "loc:<constraint tag>[:+|:-]"
    int size = 0;
    std::vector<BlockEntry> entries; // upper triangle, nonzero forms only

    // Dense symmetric matrix (row-major) at the given moment vector.
    std::vector<double> dense(std::span<const double> moments) const;
    friend bool operator==(const SdpBlock&, const SdpBlock&) = default;
};

// Order-d moment relaxation.  The constant moment is pinned to 1 and is not a
// decision variable; circle equalities are consumed by the normal form.
struct SDPInstance {
    int n = 0;
    bool symmetric = false;
    int order = 0;
    std::vector<std::string> variable_names;
    std::vector<bool> variable_is_y;
    std::vector<Monomial> moments; // degree 1..2d, graded-lex
    std::map<Monomial, int, GradLexLess> moment_index;
    MomentBasis basis;          // order d (moment matrix)
    std::vector<SdpBlock> blocks; // blocks[0] is the moment matrix
    MomentForm objective;       // area, to be maximized

    std::size_t num_moment_vars() const noexcept { return moments.size(); }
};

SDPInstance build_relaxation(const QuadraticProgram& p, int order);

struct RelaxationStats {
    int num_moment_vars = 0;
    int moment_matrix_size = 0;
    int localizing_blocks = 0;
    std::vector<int> localizing_sizes;
    long long nonzero_entries = 0;
};

RelaxationStats stats(const SDPInstance& s);

// Moments of the Dirac measure at `point` (values of all program variables).
std::vector<double> dirac_moments(const SDPInstance& s, std::span<const double> point);

// Smallest eigenvalue of a block at a moment vector.
double min_eigenvalue(const SdpBlock& b, std::span<const double> moments);

struct Extraction {
    double upper_bound = 0.0;
    int moment_matrix_rank = 0;
    int previous_rank = 0; // rank of the order d-1 leading block
    bool flat = false;
    bool certified = false; // flat with rank one
    Assignment candidate;   // degree-1 moments of the x variables
};

inline constexpr double kRankTol = 1e-6;

Extraction extract(const SDPInstance& s, std::span<const double> moments);

// Extraction from a solver's dense moment matrix (row-major, basis order).
// Throws DimensionMismatch, or ParseError when the matrix is not symmetric to
// 1e-9 or its entries disagree with the moment structure.
Extraction extract_from_moment_matrix(const SDPInstance& s, std::span<const double> matrix);

// SDPA sparse format (.dat-s) in the standard SDPA dual form
//   min c^T m  s.t.  sum_k F_k m_k - F_0 >= 0,
// with c = -(area form) so that minimizing gives the negated upper bound.
std::string export_sdpa(const SDPInstance& s);
// "maxpoly-moments/1": moment index -> exponent map.
std::string export_sidecar_json(const SDPInstance& s);

} // namespace maxpoly
