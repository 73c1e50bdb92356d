#include "maxpoly/expr.hpp"

#include <algorithm>

namespace maxpoly {

LinExpr LinExpr::variable(VarId v, double coeff)
{
    LinExpr e;
    e.add_term(v, coeff);
    return e;
}

double LinExpr::coefficient(VarId v) const
{
    auto it = coeffs_.find(v);
    return it == coeffs_.end() ? 0.0 : it->second;
}

void LinExpr::add_term(VarId v, double coeff)
{
    if (coeff == 0.0) {
        return;
    }
    auto [it, inserted] = coeffs_.try_emplace(v, coeff);
    if (!inserted) {
        it->second += coeff;
        if (it->second == 0.0) {
            coeffs_.erase(it);
        }
    }
}

LinExpr& LinExpr::operator+=(const LinExpr& other)
{
    for (const auto& [v, c] : other.coeffs_) {
        add_term(v, c);
    }
    constant_ += other.constant_;
    return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& other)
{
    for (const auto& [v, c] : other.coeffs_) {
        add_term(v, -c);
    }
    constant_ -= other.constant_;
    return *this;
}

LinExpr& LinExpr::operator*=(double s)
{
    if (s == 0.0) {
        coeffs_.clear();
        constant_ = 0.0;
        return *this;
    }
    for (auto& [v, c] : coeffs_) {
        c *= s;
    }
    constant_ *= s;
    return *this;
}

double LinExpr::evaluate(std::span<const double> values) const
{
    double acc = constant_;
    for (const auto& [v, c] : coeffs_) {
        acc += c * values[static_cast<std::size_t>(v)];
    }
    return acc;
}

LinExpr LinExpr::substitute(std::span<const VarId> mapping) const
{
    LinExpr out(constant_);
    for (const auto& [v, c] : coeffs_) {
        out.add_term(mapping[static_cast<std::size_t>(v)], c);
    }
    return out;
}

LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
LinExpr operator-(LinExpr a) { return a *= -1.0; }
LinExpr operator*(double s, LinExpr a) { return a *= s; }

QuadExpr QuadExpr::product(const LinExpr& a, const LinExpr& b)
{
    QuadExpr out;
    for (const auto& [va, ca] : a.coefficients()) {
        for (const auto& [vb, cb] : b.coefficients()) {
            out.add_quadratic(va, vb, ca * cb);
        }
    }
    for (const auto& [va, ca] : a.coefficients()) {
        out.add_linear(va, ca * b.constant());
    }
    for (const auto& [vb, cb] : b.coefficients()) {
        out.add_linear(vb, cb * a.constant());
    }
    out.add_constant(a.constant() * b.constant());
    return out;
}

double QuadExpr::quadratic_coefficient(VarId a, VarId b) const
{
    auto it = quad_.find({std::min(a, b), std::max(a, b)});
    return it == quad_.end() ? 0.0 : it->second;
}

void QuadExpr::add_quadratic(VarId a, VarId b, double coeff)
{
    if (coeff == 0.0) {
        return;
    }
    auto [it, inserted] = quad_.try_emplace({std::min(a, b), std::max(a, b)}, coeff);
    if (!inserted) {
        it->second += coeff;
        if (it->second == 0.0) {
            quad_.erase(it);
        }
    }
}

QuadExpr& QuadExpr::operator+=(const QuadExpr& other)
{
    for (const auto& [k, c] : other.quad_) {
        add_quadratic(k.first, k.second, c);
    }
    linear_ += other.linear_;
    return *this;
}

QuadExpr& QuadExpr::operator-=(const QuadExpr& other)
{
    for (const auto& [k, c] : other.quad_) {
        add_quadratic(k.first, k.second, -c);
    }
    linear_ -= other.linear_;
    return *this;
}

QuadExpr& QuadExpr::operator*=(double s)
{
    if (s == 0.0) {
        quad_.clear();
    }
    for (auto& [k, c] : quad_) {
        c *= s;
    }
    linear_ *= s;
    return *this;
}

double QuadExpr::evaluate(std::span<const double> values) const
{
    double acc = linear_.evaluate(values);
    for (const auto& [k, c] : quad_) {
        acc += c * values[static_cast<std::size_t>(k.first)] * values[static_cast<std::size_t>(k.second)];
    }
    return acc;
}

void QuadExpr::gradient(std::span<const double> values, std::span<double> out) const
{
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& [v, c] : linear_.coefficients()) {
        out[static_cast<std::size_t>(v)] += c;
    }
    for (const auto& [k, c] : quad_) {
        const auto i = static_cast<std::size_t>(k.first);
        const auto j = static_cast<std::size_t>(k.second);
        if (i == j) {
            out[i] += 2.0 * c * values[i];
        } else {
            out[i] += c * values[j];
            out[j] += c * values[i];
        }
    }
}

QuadExpr QuadExpr::substitute(std::span<const VarId> mapping) const
{
    QuadExpr out(linear_.substitute(mapping));
    for (const auto& [k, c] : quad_) {
        out.add_quadratic(mapping[static_cast<std::size_t>(k.first)],
                          mapping[static_cast<std::size_t>(k.second)], c);
    }
    return out;
}

VarId QuadExpr::max_variable() const
{
    VarId m = -1;
    for (const auto& [k, c] : quad_) {
        m = std::max(m, k.second);
    }
    if (!linear_.coefficients().empty()) {
        m = std::max(m, linear_.coefficients().rbegin()->first);
    }
    return m;
}

bool QuadExpr::references(VarId v) const
{
    if (linear_.coefficients().contains(v)) {
        return true;
    }
    return std::any_of(quad_.begin(), quad_.end(),
                       [v](const auto& kv) { return kv.first.first == v || kv.first.second == v; });
}

int QuadExpr::degree() const
{
    if (!quad_.empty()) {
        return 2;
    }
    return linear_.is_constant() ? 0 : 1;
}

QuadExpr operator+(QuadExpr a, const QuadExpr& b) { return a += b; }
QuadExpr operator-(QuadExpr a, const QuadExpr& b) { return a -= b; }
QuadExpr operator*(double s, QuadExpr a) { return a *= s; }

} // namespace maxpoly
