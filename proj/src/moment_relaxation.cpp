#include "maxpoly/moment_relaxation.hpp"

#include "maxpoly/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace maxpoly {

int Monomial::degree() const { return std::accumulate(exps.begin(), exps.end(), 0); }

bool GradLexLess::operator()(const Monomial& a, const Monomial& b) const
{
    const int da = a.degree();
    const int db = b.degree();
    if (da != db) {
        return da < db;
    }
    return std::lexicographical_compare(b.exps.begin(), b.exps.end(), a.exps.begin(), a.exps.end());
}

Monomial unit_monomial(int nvars) { return Monomial{std::vector<std::uint8_t>(static_cast<std::size_t>(nvars), 0)}; }

Monomial multiply(const Monomial& a, const Monomial& b)
{
    Monomial out = a;
    for (std::size_t i = 0; i < out.exps.size(); ++i) {
        out.exps[i] = static_cast<std::uint8_t>(out.exps[i] + b.exps[i]);
    }
    return out;
}

namespace {

void add_term(Polynomial& p, const Monomial& m, double c)
{
    if (c == 0.0) {
        return;
    }
    auto [it, inserted] = p.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0.0) {
            p.erase(it);
        }
    }
}

Monomial single(int nvars, VarId v, int power)
{
    Monomial m = unit_monomial(nvars);
    m.exps[static_cast<std::size_t>(v)] = static_cast<std::uint8_t>(power);
    return m;
}

// Normal form of one monomial, memoized per relaxation build.
class NormalForms {
public:
    explicit NormalForms(const QuadraticProgram& p) : p_(p), nvars_(p.num_vars()) {}

    const Polynomial& of(const Monomial& m)
    {
        auto it = cache_.find(m);
        if (it != cache_.end()) {
            return it->second;
        }
        Polynomial out;
        const int k = p_.num_x();
        int y_hit = -1;
        for (int v = k; v < nvars_; ++v) {
            if (m.exps[static_cast<std::size_t>(v)] >= 2) {
                y_hit = v;
                break;
            }
        }
        if (y_hit < 0) {
            out.emplace(m, 1.0);
        } else {
            // y^2 m' = m' - x^2 m'
            Monomial rest = m;
            rest.exps[static_cast<std::size_t>(y_hit)] = static_cast<std::uint8_t>(rest.exps[static_cast<std::size_t>(y_hit)] - 2);
            const Polynomial a = of(rest);
            const Polynomial b = of(multiply(rest, single(nvars_, y_hit - k, 2)));
            out = a;
            for (const auto& [mono, c] : b) {
                add_term(out, mono, -c);
            }
        }
        return cache_.emplace(m, std::move(out)).first->second;
    }

    Polynomial of(const Polynomial& q)
    {
        Polynomial out;
        for (const auto& [m, c] : q) {
            for (const auto& [mm, cc] : of(m)) {
                add_term(out, mm, c * cc);
            }
        }
        return out;
    }

private:
    const QuadraticProgram& p_;
    int nvars_;
    std::map<Monomial, Polynomial, GradLexLess> cache_;
};

void enumerate(const QuadraticProgram& p, int degree, std::size_t var, Monomial& cur, int used,
               std::vector<Monomial>& out)
{
    const auto nvars = static_cast<std::size_t>(p.num_vars());
    if (var == nvars) {
        out.push_back(cur);
        return;
    }
    const bool is_y = static_cast<int>(var) >= p.num_x();
    const int cap = is_y ? std::min(1, degree - used) : degree - used;
    for (int e = 0; e <= cap; ++e) {
        cur.exps[var] = static_cast<std::uint8_t>(e);
        enumerate(p, degree, var + 1, cur, used + e, out);
    }
    cur.exps[var] = 0;
}

} // namespace

Polynomial to_polynomial(const QuadExpr& e, int nvars)
{
    Polynomial out;
    add_term(out, unit_monomial(nvars), e.constant());
    for (const auto& [v, c] : e.linear().coefficients()) {
        add_term(out, single(nvars, v, 1), c);
    }
    for (const auto& [k, c] : e.quadratic()) {
        Monomial m = unit_monomial(nvars);
        m.exps[static_cast<std::size_t>(k.first)] += 1;
        m.exps[static_cast<std::size_t>(k.second)] += 1;
        add_term(out, m, c);
    }
    return out;
}

Polynomial multiply(const Polynomial& a, const Polynomial& b)
{
    Polynomial out;
    for (const auto& [ma, ca] : a) {
        for (const auto& [mb, cb] : b) {
            add_term(out, multiply(ma, mb), ca * cb);
        }
    }
    return out;
}

double evaluate(const Monomial& m, std::span<const double> values)
{
    double acc = 1.0;
    for (std::size_t i = 0; i < m.exps.size(); ++i) {
        for (int e = 0; e < m.exps[i]; ++e) {
            acc *= values[i];
        }
    }
    return acc;
}

double evaluate(const Polynomial& p, std::span<const double> values)
{
    double acc = 0.0;
    for (const auto& [m, c] : p) {
        acc += c * evaluate(m, values);
    }
    return acc;
}

Polynomial normal_form(const QuadraticProgram& p, const Polynomial& q)
{
    NormalForms nf(p);
    return nf.of(q);
}

bool is_normal(const QuadraticProgram& p, const Monomial& m)
{
    for (int v = p.num_x(); v < p.num_vars(); ++v) {
        if (m.exps[static_cast<std::size_t>(v)] > 1) {
            return false;
        }
    }
    return true;
}

MomentBasis monomial_basis(const QuadraticProgram& p, int degree)
{
    if (degree < 0) {
        throw DomainError("monomial_basis: degree must be >= 0");
    }
    MomentBasis b;
    b.degree = degree;
    Monomial cur = unit_monomial(p.num_vars());
    enumerate(p, degree, 0, cur, 0, b.monomials);
    std::sort(b.monomials.begin(), b.monomials.end(), GradLexLess{});
    for (std::size_t i = 0; i < b.monomials.size(); ++i) {
        b.index.emplace(b.monomials[i], static_cast<int>(i));
    }
    return b;
}

double MomentForm::evaluate(std::span<const double> moments) const
{
    double acc = constant;
    for (const auto& [k, c] : terms) {
        acc += c * moments[static_cast<std::size_t>(k)];
    }
    return acc;
}

std::vector<double> SdpBlock::dense(std::span<const double> moments) const
{
    const auto s = static_cast<std::size_t>(size);
    std::vector<double> m(s * s, 0.0);
    for (const auto& e : entries) {
        const double v = e.value.evaluate(moments);
        m[static_cast<std::size_t>(e.row) * s + static_cast<std::size_t>(e.col)] = v;
        m[static_cast<std::size_t>(e.col) * s + static_cast<std::size_t>(e.row)] = v;
    }
    return m;
}

SDPInstance build_relaxation(const QuadraticProgram& p, int order)
{
    if (order < 1) {
        throw DomainError("build_relaxation: order must be >= 1");
    }
    for (const auto& c : p.constraints) {
        if (c.expr.degree() > 2) {
            throw DomainError("build_relaxation: constraint degree exceeds 2");
        }
    }
    const int nvars = p.num_vars();
    SDPInstance s;
    s.n = p.n;
    s.symmetric = p.symmetric;
    s.order = order;
    for (const auto& v : p.variables) {
        s.variable_names.push_back(v.name);
        s.variable_is_y.push_back(v.is_y);
    }
    const MomentBasis all = monomial_basis(p, 2 * order);
    s.moments.assign(all.monomials.begin() + 1, all.monomials.end());
    for (std::size_t i = 0; i < s.moments.size(); ++i) {
        s.moment_index.emplace(s.moments[i], static_cast<int>(i));
    }
    s.basis = monomial_basis(p, order);

    NormalForms nf(p);
    const Monomial one = unit_monomial(nvars);
    auto to_form = [&](const Polynomial& q) {
        MomentForm f;
        for (const auto& [m, c] : q) {
            if (m == one) {
                f.constant += c;
                continue;
            }
            auto it = s.moment_index.find(m);
            if (it == s.moment_index.end()) {
                throw Error("build_relaxation: monomial outside the truncated moment vector");
            }
            f.terms.emplace_back(it->second, c);
        }
        std::sort(f.terms.begin(), f.terms.end());
        return f;
    };

    SdpBlock moment{"moment", static_cast<int>(s.basis.size()), {}};
    for (std::size_t i = 0; i < s.basis.size(); ++i) {
        for (std::size_t j = i; j < s.basis.size(); ++j) {
            MomentForm f = to_form(nf.of(multiply(s.basis.monomials[i], s.basis.monomials[j])));
            if (f.constant != 0.0 || !f.terms.empty()) {
                moment.entries.push_back({static_cast<int>(i), static_cast<int>(j), std::move(f)});
            }
        }
    }
    s.blocks.push_back(std::move(moment));

    const MomentBasis loc_basis = monomial_basis(p, order - 1);
    auto add_localizer = [&](const Polynomial& g, std::string label) {
        SdpBlock b{std::move(label), static_cast<int>(loc_basis.size()), {}};
        for (std::size_t i = 0; i < loc_basis.size(); ++i) {
            for (std::size_t j = i; j < loc_basis.size(); ++j) {
                const Monomial bij = multiply(loc_basis.monomials[i], loc_basis.monomials[j]);
                Polynomial prod;
                for (const auto& [m, c] : g) {
                    for (const auto& [mm, cc] : nf.of(multiply(m, bij))) {
                        add_term(prod, mm, c * cc);
                    }
                }
                MomentForm f = to_form(prod);
                if (f.constant != 0.0 || !f.terms.empty()) {
                    b.entries.push_back({static_cast<int>(i), static_cast<int>(j), std::move(f)});
                }
            }
        }
        s.blocks.push_back(std::move(b));
    };

    for (const auto& c : p.constraints) {
        if (c.kind == ConstraintKind::CircleEquality) {
            continue;
        }
        Polynomial e = to_polynomial(c.expr, nvars);
        add_term(e, one, -c.rhs); // e = expr - rhs
        Polynomial neg;
        for (const auto& [m, coef] : e) {
            neg.emplace(m, -coef);
        }
        switch (c.sense) {
        case Sense::GreaterEqual: add_localizer(e, "loc:" + c.tag); break;
        case Sense::LessEqual: add_localizer(neg, "loc:" + c.tag); break;
        case Sense::Equal:
            add_localizer(e, "loc:" + c.tag + ":+");
            add_localizer(neg, "loc:" + c.tag + ":-");
            break;
        }
    }
    s.objective = to_form(nf.of(to_polynomial(p.objective, nvars)));
    return s;
}

RelaxationStats stats(const SDPInstance& s)
{
    RelaxationStats r;
    r.num_moment_vars = static_cast<int>(s.moments.size());
    r.moment_matrix_size = s.blocks.empty() ? 0 : s.blocks.front().size;
    for (std::size_t b = 1; b < s.blocks.size(); ++b) {
        ++r.localizing_blocks;
        r.localizing_sizes.push_back(s.blocks[b].size);
    }
    for (const auto& b : s.blocks) {
        for (const auto& e : b.entries) {
            r.nonzero_entries += static_cast<long long>(e.value.terms.size()) + (e.value.constant != 0.0 ? 1 : 0);
        }
    }
    return r;
}

std::vector<double> dirac_moments(const SDPInstance& s, std::span<const double> point)
{
    if (point.size() != s.variable_names.size()) {
        throw DimensionMismatch("dirac_moments: point has wrong dimension");
    }
    std::vector<double> out;
    out.reserve(s.moments.size());
    for (const auto& m : s.moments) {
        out.push_back(evaluate(m, point));
    }
    return out;
}

namespace {

Eigen::MatrixXd to_eigen(const std::vector<double>& dense, int size)
{
    Eigen::MatrixXd m(size, size);
    for (int i = 0; i < size; ++i) {
        for (int j = 0; j < size; ++j) {
            m(i, j) = dense[static_cast<std::size_t>(i) * static_cast<std::size_t>(size) + static_cast<std::size_t>(j)];
        }
    }
    return m;
}

int numeric_rank(const Eigen::MatrixXd& m)
{
    if (m.rows() == 0) {
        return 0;
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = es.eigenvalues().cwiseAbs();
    const double top = ev.maxCoeff();
    if (top == 0.0) {
        return 0;
    }
    int r = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) > kRankTol * top) {
            ++r;
        }
    }
    return r;
}

} // namespace

double min_eigenvalue(const SdpBlock& b, std::span<const double> moments)
{
    const Eigen::MatrixXd m = to_eigen(b.dense(moments), b.size);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

Extraction extract(const SDPInstance& s, std::span<const double> moments)
{
    if (moments.size() != s.moments.size()) {
        throw DimensionMismatch("extract: expected " + std::to_string(s.moments.size()) + " moments, got " +
                                std::to_string(moments.size()));
    }
    Extraction e;
    e.upper_bound = s.objective.evaluate(moments);
    const SdpBlock& mb = s.blocks.front();
    const Eigen::MatrixXd m = to_eigen(mb.dense(moments), mb.size);
    if (!m.isApprox(m.transpose(), 1e-9) && (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
        throw ParseError("", "moment matrix is not symmetric");
    }
    int prev_size = 0;
    for (const auto& mono : s.basis.monomials) {
        if (mono.degree() < s.order) {
            ++prev_size;
        }
    }
    e.moment_matrix_rank = numeric_rank(m);
    e.previous_rank = numeric_rank(m.topLeftCorner(prev_size, prev_size));
    e.flat = e.moment_matrix_rank == e.previous_rank;
    e.certified = e.flat && e.moment_matrix_rank == 1;
    const int nvars = static_cast<int>(s.variable_names.size());
    for (int v = 0; v < nvars; ++v) {
        if (s.variable_is_y[static_cast<std::size_t>(v)]) {
            continue;
        }
        const auto it = s.moment_index.find(single(nvars, v, 1));
        e.candidate.x.push_back(moments[static_cast<std::size_t>(it->second)]);
    }
    return e;
}

Extraction extract_from_moment_matrix(const SDPInstance& s, std::span<const double> matrix)
{
    const auto size = static_cast<std::size_t>(s.blocks.front().size);
    if (matrix.size() != size * size) {
        throw DimensionMismatch("extract_from_moment_matrix: expected a " + std::to_string(size) + "x" +
                                std::to_string(size) + " matrix");
    }
    for (std::size_t i = 0; i < size; ++i) {
        for (std::size_t j = i + 1; j < size; ++j) {
            if (std::abs(matrix[i * size + j] - matrix[j * size + i]) > 1e-9) {
                throw ParseError("", "moment matrix is not symmetric at (" + std::to_string(i) + ", " +
                                         std::to_string(j) + ")");
            }
        }
    }
    // Read each moment from an entry whose form is exactly that moment.
    std::vector<double> moments(s.moments.size(), std::numeric_limits<double>::quiet_NaN());
    for (const auto& e : s.blocks.front().entries) {
        if (e.value.constant == 0.0 && e.value.terms.size() == 1 && e.value.terms[0].second == 1.0) {
            auto& slot = moments[static_cast<std::size_t>(e.value.terms[0].first)];
            if (std::isnan(slot)) {
                slot = matrix[static_cast<std::size_t>(e.row) * size + static_cast<std::size_t>(e.col)];
            }
        }
    }
    for (double v : moments) {
        if (std::isnan(v)) {
            throw ParseError("", "moment not recoverable from the moment matrix");
        }
    }
    for (const auto& e : s.blocks.front().entries) {
        const double expect = e.value.evaluate(moments);
        const double got = matrix[static_cast<std::size_t>(e.row) * size + static_cast<std::size_t>(e.col)];
        if (std::abs(expect - got) > 1e-6 * std::max(1.0, std::abs(expect))) {
            throw ParseError("", "moment matrix entry (" + std::to_string(e.row) + ", " + std::to_string(e.col) +
                                     ") inconsistent with the moment structure");
        }
    }
    return extract(s, moments);
}

} // namespace maxpoly
