#pragma once

#include <map>
#include <span>
#include <utility>
#include <vector>

namespace maxpoly {

using VarId = int;

// Sparse affine form  c + sum_k a_k v_k.  Zero coefficients are never stored.
class LinExpr {
public:
    LinExpr() = default;
    explicit LinExpr(double constant) : constant_(constant) {}

    static LinExpr variable(VarId v, double coeff = 1.0);

    const std::map<VarId, double>& coefficients() const noexcept { return coeffs_; }
    double constant() const noexcept { return constant_; }
    double coefficient(VarId v) const;
    bool is_constant() const noexcept { return coeffs_.empty(); }

    void add_term(VarId v, double coeff);
    void add_constant(double c) { constant_ += c; }

    LinExpr& operator+=(const LinExpr& other);
    LinExpr& operator-=(const LinExpr& other);
    LinExpr& operator*=(double s);

    double evaluate(std::span<const double> values) const;

    // Rename variables: v -> mapping[v].  Entries that collide are summed.
    LinExpr substitute(std::span<const VarId> mapping) const;

    friend bool operator==(const LinExpr&, const LinExpr&) = default;

private:
    std::map<VarId, double> coeffs_;
    double constant_ = 0.0;
};

LinExpr operator+(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a);
LinExpr operator*(double s, LinExpr a);

// Polynomial of total degree at most two.  Quadratic keys are ordered pairs (i <= j).
class QuadExpr {
public:
    using Key = std::pair<VarId, VarId>;

    QuadExpr() = default;
    QuadExpr(LinExpr linear) : linear_(std::move(linear)) {} // NOLINT(google-explicit-constructor)

    static QuadExpr product(const LinExpr& a, const LinExpr& b);
    static QuadExpr square(const LinExpr& a) { return product(a, a); }

    const std::map<Key, double>& quadratic() const noexcept { return quad_; }
    const LinExpr& linear() const noexcept { return linear_; }
    double constant() const noexcept { return linear_.constant(); }
    double quadratic_coefficient(VarId a, VarId b) const;

    void add_quadratic(VarId a, VarId b, double coeff);
    void add_linear(VarId v, double coeff) { linear_.add_term(v, coeff); }
    void add_constant(double c) { linear_.add_constant(c); }

    QuadExpr& operator+=(const QuadExpr& other);
    QuadExpr& operator-=(const QuadExpr& other);
    QuadExpr& operator*=(double s);

    double evaluate(std::span<const double> values) const;
    // out must have one slot per variable; it is overwritten.
    void gradient(std::span<const double> values, std::span<double> out) const;

    QuadExpr substitute(std::span<const VarId> mapping) const;

    // Largest variable id referenced, or -1 for a constant.
    VarId max_variable() const;
    bool references(VarId v) const;
    int degree() const;

    friend bool operator==(const QuadExpr&, const QuadExpr&) = default;

private:
    std::map<Key, double> quad_;
    LinExpr linear_;
};

QuadExpr operator+(QuadExpr a, const QuadExpr& b);
QuadExpr operator-(QuadExpr a, const QuadExpr& b);
QuadExpr operator*(double s, QuadExpr a);

} // namespace maxpoly
