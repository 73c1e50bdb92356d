#include "maxpoly/local_solver.hpp"

#include "maxpoly/counter_rng.hpp"
#include "maxpoly/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>
#include <tuple>

#include <json.hpp>

namespace maxpoly {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kActiveTol = 1e-6;

struct SparseQuad {
    std::vector<std::tuple<int, int, double>> quad;
    std::vector<std::pair<int, double>> lin;
    double constant = 0.0;

    SparseQuad() = default;
    explicit SparseQuad(const QuadExpr& e) : constant(e.constant())
    {
        for (const auto& [k, c] : e.quadratic()) {
            quad.emplace_back(k.first, k.second, c);
        }
        for (const auto& [v, c] : e.linear().coefficients()) {
            lin.emplace_back(v, c);
        }
    }

    double value(const std::vector<double>& z) const
    {
        double acc = constant;
        for (const auto& [v, c] : lin) {
            acc += c * z[static_cast<std::size_t>(v)];
        }
        for (const auto& [i, j, c] : quad) {
            acc += c * z[static_cast<std::size_t>(i)] * z[static_cast<std::size_t>(j)];
        }
        return acc;
    }

    void gradient(const std::vector<double>& z, std::vector<double>& g) const
    {
        std::fill(g.begin(), g.end(), 0.0);
        for (const auto& [v, c] : lin) {
            g[static_cast<std::size_t>(v)] += c;
        }
        for (const auto& [i, j, c] : quad) {
            const auto a = static_cast<std::size_t>(i);
            const auto b = static_cast<std::size_t>(j);
            if (a == b) {
                g[a] += 2.0 * c * z[a];
            } else {
                g[a] += c * z[b];
                g[b] += c * z[a];
            }
        }
    }

    Eigen::MatrixXd hessian(int dim) const
    {
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
        for (const auto& [i, j, c] : quad) {
            if (i == j) {
                h(i, i) += 2.0 * c;
            } else {
                h(i, j) += c;
                h(j, i) += c;
            }
        }
        return h;
    }
};

// y-eliminated view of a program: z = (x, sqrt(1 - x^2)).
struct Lifted {
    std::vector<double> z;
    std::vector<double> dphi;  // dy/dx
    std::vector<double> ddphi; // d2y/dx2
};

// General constraint in x-space: sign * (q - rhs) <= 0, or == 0 when equality.
struct XConstraint {
    SparseQuad q;
    double sign = 1.0;
    double rhs = 1.0;
    bool equality = false;
    std::size_t source = 0;
};

struct XBound {
    int var = 0;
    bool upper = false;
    double value = 0.0;
    std::size_t source = 0;
};

class XSpace {
public:
    XSpace(const QuadraticProgram& p, double clamp) : k_(p.num_x()), clamp_(clamp)
    {
        objective_ = SparseQuad(p.objective);
        lb_.assign(static_cast<std::size_t>(k_), 0.0);
        ub_.assign(static_cast<std::size_t>(k_), 1.0);
        for (std::size_t idx = 0; idx < p.constraints.size(); ++idx) {
            const auto& c = p.constraints[idx];
            if (c.kind == ConstraintKind::CircleEquality || c.kind == ConstraintKind::Nonneg) {
                continue;
            }
            if (c.kind == ConstraintKind::Box && c.expr.degree() == 1 && c.expr.quadratic().empty() &&
                c.expr.linear().coefficients().size() == 1) {
                const auto& [v, coef] = *c.expr.linear().coefficients().begin();
                if (v < k_ && coef != 0.0 && c.sense != Sense::Equal) {
                    const double bound = (c.rhs - c.expr.constant()) / coef;
                    const bool upper = (c.sense == Sense::LessEqual) == (coef > 0);
                    if (upper) {
                        ub_[static_cast<std::size_t>(v)] = std::min(ub_[static_cast<std::size_t>(v)], bound);
                    } else {
                        lb_[static_cast<std::size_t>(v)] = std::max(lb_[static_cast<std::size_t>(v)], bound);
                    }
                    bounds_.push_back({v, upper, bound, idx});
                    continue;
                }
            }
            XConstraint xc;
            xc.q = SparseQuad(c.expr);
            xc.rhs = c.rhs;
            xc.source = idx;
            xc.equality = c.sense == Sense::Equal;
            xc.sign = c.sense == Sense::GreaterEqual ? -1.0 : 1.0;
            cons_.push_back(std::move(xc));
        }
        for (int i = 0; i < k_; ++i) {
            lb_[static_cast<std::size_t>(i)] = std::max(lb_[static_cast<std::size_t>(i)], -1.0);
            ub_[static_cast<std::size_t>(i)] = std::min(ub_[static_cast<std::size_t>(i)], 1.0);
        }
    }

    int dim() const noexcept { return k_; }
    const std::vector<double>& lb() const noexcept { return lb_; }
    const std::vector<double>& ub() const noexcept { return ub_; }
    const std::vector<XConstraint>& constraints() const noexcept { return cons_; }
    const std::vector<XBound>& bounds() const noexcept { return bounds_; }
    const SparseQuad& objective() const noexcept { return objective_; }
    double clamp() const noexcept { return clamp_; }

    Lifted lift(const std::vector<double>& x) const
    {
        const auto k = static_cast<std::size_t>(k_);
        Lifted l;
        l.z.resize(2 * k);
        l.dphi.resize(k);
        l.ddphi.resize(k);
        const double cap = 1.0 - clamp_;
        for (std::size_t i = 0; i < k; ++i) {
            const double xc = std::clamp(x[i], -cap, cap);
            const double y = std::sqrt((1.0 - xc) * (1.0 + xc));
            l.z[i] = x[i];
            l.z[k + i] = y;
            l.dphi[i] = -xc / y;
            l.ddphi[i] = -1.0 / (y * y * y);
        }
        return l;
    }

    // Value and x-gradient of a quadratic in z.
    double value_grad(const SparseQuad& q, const Lifted& l, std::vector<double>* grad) const
    {
        const double v = q.value(l.z);
        if (grad) {
            const auto k = static_cast<std::size_t>(k_);
            scratch_.resize(2 * k);
            q.gradient(l.z, scratch_);
            grad->resize(k);
            for (std::size_t i = 0; i < k; ++i) {
                (*grad)[i] = scratch_[i] + scratch_[k + i] * l.dphi[i];
            }
        }
        return v;
    }

    Eigen::MatrixXd hessian(const SparseQuad& q, const Lifted& l) const
    {
        const int k = k_;
        const Eigen::MatrixXd hz = q.hessian(2 * k);
        std::vector<double> gz(static_cast<std::size_t>(2 * k));
        q.gradient(l.z, gz);
        Eigen::VectorXd d(k);
        for (int i = 0; i < k; ++i) {
            d(i) = l.dphi[static_cast<std::size_t>(i)];
        }
        const auto dm = d.asDiagonal();
        Eigen::MatrixXd h = hz.topLeftCorner(k, k);
        h += hz.topRightCorner(k, k) * dm;
        h += dm * hz.bottomLeftCorner(k, k);
        h += dm * hz.bottomRightCorner(k, k) * dm;
        for (int i = 0; i < k; ++i) {
            h(i, i) += gz[static_cast<std::size_t>(k + i)] * l.ddphi[static_cast<std::size_t>(i)];
        }
        return h;
    }

    // sign * (q - rhs)
    double cvalue(const XConstraint& c, const Lifted& l, std::vector<double>* grad) const
    {
        const double v = value_grad(c.q, l, grad);
        if (grad) {
            for (auto& g : *grad) {
                g *= c.sign;
            }
        }
        return c.sign * (v - c.rhs);
    }

    std::vector<double> project(std::vector<double> x, double cap_margin) const
    {
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = std::clamp(x[i], lb_[i], std::min(ub_[i], 1.0 - cap_margin));
        }
        return x;
    }

private:
    int k_;
    double clamp_;
    SparseQuad objective_;
    std::vector<double> lb_, ub_;
    std::vector<XConstraint> cons_;
    std::vector<XBound> bounds_;
    mutable std::vector<double> scratch_;
};

// ---------------------------------------------------------------------------
// Augmented Lagrangian (PHR) for min -f s.t. c <= 0, h = 0, lb <= x <= ub.

struct Multipliers {
    std::vector<double> m; // one per XConstraint (inequality: >= 0)
    double rho = 10.0;
};

double al_value(const XSpace& xs, const Multipliers& mult, const std::vector<double>& x, std::vector<double>* grad)
{
    const Lifted l = xs.lift(x);
    std::vector<double> g;
    double val = -xs.value_grad(xs.objective(), l, grad ? &g : nullptr);
    if (grad) {
        grad->assign(g.size(), 0.0);
        for (std::size_t i = 0; i < g.size(); ++i) {
            (*grad)[i] = -g[i];
        }
    }
    const auto& cons = xs.constraints();
    std::vector<double> cg;
    for (std::size_t j = 0; j < cons.size(); ++j) {
        const double c = xs.cvalue(cons[j], l, grad ? &cg : nullptr);
        double w = 0.0;
        if (cons[j].equality) {
            val += mult.m[j] * c + 0.5 * mult.rho * c * c;
            w = mult.m[j] + mult.rho * c;
        } else {
            const double t = std::max(0.0, c + mult.m[j] / mult.rho);
            val += 0.5 * mult.rho * t * t;
            w = mult.rho * t;
        }
        if (grad && w != 0.0) {
            for (std::size_t i = 0; i < cg.size(); ++i) {
                (*grad)[i] += w * cg[i];
            }
        }
    }
    return val;
}

double projected_grad_norm(const XSpace& xs, const std::vector<double>& x, const std::vector<double>& g)
{
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double hi = std::min(xs.ub()[i], 1.0 - xs.clamp());
        const double t = std::clamp(x[i] - g[i], xs.lb()[i], hi);
        m = std::max(m, std::abs(x[i] - t));
    }
    return m;
}

// Projected BFGS on the box.
std::vector<double> minimize_box(const XSpace& xs, const Multipliers& mult, std::vector<double> x, double tol,
                                 int max_iter)
{
    const int k = xs.dim();
    const double cap = xs.clamp();
    x = xs.project(std::move(x), cap);
    std::vector<double> g;
    double f = al_value(xs, mult, x, &g);
    Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(k, k);

    for (int it = 0; it < max_iter; ++it) {
        if (projected_grad_norm(xs, x, g) <= tol) {
            break;
        }
        std::vector<bool> fixed(static_cast<std::size_t>(k), false);
        for (int i = 0; i < k; ++i) {
            const auto u = static_cast<std::size_t>(i);
            const double hi = std::min(xs.ub()[u], 1.0 - cap);
            fixed[u] = (x[u] <= xs.lb()[u] && g[u] > 0.0) || (x[u] >= hi && g[u] < 0.0);
        }
        Eigen::VectorXd ge(k);
        for (int i = 0; i < k; ++i) {
            ge(i) = fixed[static_cast<std::size_t>(i)] ? 0.0 : g[static_cast<std::size_t>(i)];
        }
        Eigen::VectorXd d = -(hinv * ge);
        for (int i = 0; i < k; ++i) {
            if (fixed[static_cast<std::size_t>(i)]) {
                d(i) = 0.0;
            }
        }
        if (d.dot(ge) >= 0.0) {
            hinv.setIdentity();
            d = -ge;
        }
        // Keep trial steps modest: the feasible box has unit size.
        const double dn = d.lpNorm<Eigen::Infinity>();
        double alpha = dn > 0.25 ? 0.25 / dn : 1.0;

        std::vector<double> xn(static_cast<std::size_t>(k));
        std::vector<double> gn;
        double fn = f;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (int i = 0; i < k; ++i) {
                xn[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] + alpha * d(i);
            }
            xn = xs.project(std::move(xn), cap);
            double dec = 0.0;
            for (int i = 0; i < k; ++i) {
                dec += g[static_cast<std::size_t>(i)] * (xn[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i)]);
            }
            fn = al_value(xs, mult, xn, &gn);
            if (fn <= f + 1e-4 * dec && dec < 0.0) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            if (hinv.isIdentity()) {
                break;
            }
            hinv.setIdentity();
            continue;
        }
        Eigen::VectorXd s(k), yv(k);
        for (int i = 0; i < k; ++i) {
            s(i) = xn[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i)];
            yv(i) = gn[static_cast<std::size_t>(i)] - g[static_cast<std::size_t>(i)];
        }
        const double sy = s.dot(yv);
        if (sy > 1e-12 * s.norm() * yv.norm()) {
            const double r = 1.0 / sy;
            const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(k, k);
            hinv = (id - r * s * yv.transpose()) * hinv * (id - r * yv * s.transpose()) + r * s * s.transpose();
        }
        x = std::move(xn);
        g = std::move(gn);
        f = fn;
    }
    return x;
}

std::vector<double> constraint_values(const XSpace& xs, const std::vector<double>& x)
{
    const Lifted l = xs.lift(x);
    std::vector<double> out;
    out.reserve(xs.constraints().size());
    for (const auto& c : xs.constraints()) {
        out.push_back(xs.cvalue(c, l, nullptr));
    }
    return out;
}

double violation_of(const XSpace& xs, const std::vector<double>& cv)
{
    double v = 0.0;
    for (std::size_t j = 0; j < cv.size(); ++j) {
        v = std::max(v, xs.constraints()[j].equality ? std::abs(cv[j]) : std::max(0.0, cv[j]));
    }
    return v;
}

std::vector<double> augmented_lagrangian(const XSpace& xs, std::vector<double> x, const SolverConfig& cfg)
{
    Multipliers mult;
    mult.m.assign(xs.constraints().size(), 0.0);
    mult.rho = 10.0;
    double prev_violation = kInf;
    double tol = 1e-3;
    for (int outer = 0; outer < cfg.max_outer_iterations; ++outer) {
        x = minimize_box(xs, mult, std::move(x), tol, 400);
        const std::vector<double> cv = constraint_values(xs, x);
        const double violation = violation_of(xs, cv);
        for (std::size_t j = 0; j < cv.size(); ++j) {
            if (xs.constraints()[j].equality) {
                mult.m[j] += mult.rho * cv[j];
            } else {
                mult.m[j] = std::max(0.0, mult.m[j] + mult.rho * cv[j]);
            }
        }
        if (violation <= 0.1 * cfg.feasibility_tol && tol <= cfg.kkt_tol) {
            break;
        }
        if (violation > 0.25 * prev_violation) {
            mult.rho = std::min(mult.rho * 10.0, 1e10);
        }
        prev_violation = violation;
        tol = std::max(cfg.kkt_tol, tol * 0.1);
    }
    return x;
}

// ---------------------------------------------------------------------------
// Active-set KKT machinery shared by polish() and kkt_residual().

struct ActiveItem {
    bool is_bound = false;
    std::size_t index = 0; // XConstraint index or XBound index
    bool equality = false;
};

std::vector<ActiveItem> active_set(const XSpace& xs, const std::vector<double>& x)
{
    std::vector<ActiveItem> act;
    const std::vector<double> cv = constraint_values(xs, x);
    for (std::size_t j = 0; j < cv.size(); ++j) {
        if (xs.constraints()[j].equality || cv[j] > -kActiveTol) {
            act.push_back({false, j, xs.constraints()[j].equality});
        }
    }
    for (std::size_t b = 0; b < xs.bounds().size(); ++b) {
        const XBound& bd = xs.bounds()[b];
        const double gap = bd.upper ? bd.value - x[static_cast<std::size_t>(bd.var)]
                                    : x[static_cast<std::size_t>(bd.var)] - bd.value;
        if (gap < kActiveTol) {
            act.push_back({true, b, false});
        }
    }
    return act;
}

// Value and gradient of active item in c <= 0 form.
double active_value(const XSpace& xs, const ActiveItem& a, const Lifted& l, const std::vector<double>& x,
                    std::vector<double>& grad)
{
    const auto k = static_cast<std::size_t>(xs.dim());
    if (a.is_bound) {
        const XBound& b = xs.bounds()[a.index];
        grad.assign(k, 0.0);
        const auto v = static_cast<std::size_t>(b.var);
        grad[v] = b.upper ? 1.0 : -1.0;
        return b.upper ? x[v] - b.value : b.value - x[v];
    }
    return xs.cvalue(xs.constraints()[a.index], l, &grad);
}

Eigen::MatrixXd active_jacobian(const XSpace& xs, const std::vector<ActiveItem>& act, const Lifted& l,
                                const std::vector<double>& x, Eigen::VectorXd& values)
{
    const int k = xs.dim();
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(act.size()), k);
    values.resize(static_cast<Eigen::Index>(act.size()));
    std::vector<double> g;
    for (std::size_t r = 0; r < act.size(); ++r) {
        values(static_cast<Eigen::Index>(r)) = active_value(xs, act[r], l, x, g);
        for (int i = 0; i < k; ++i) {
            jac(static_cast<Eigen::Index>(r), i) = g[static_cast<std::size_t>(i)];
        }
    }
    return jac;
}

Eigen::VectorXd neg_objective_gradient(const XSpace& xs, const Lifted& l)
{
    std::vector<double> g;
    xs.value_grad(xs.objective(), l, &g);
    Eigen::VectorXd out(static_cast<Eigen::Index>(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i) {
        out(static_cast<Eigen::Index>(i)) = -g[i];
    }
    return out;
}

// Least-squares multipliers for grad + J^T lambda = 0; inequality multipliers
// are forced nonnegative by dropping the most negative one and refitting.
double fitted_stationarity(const Eigen::VectorXd& grad, const Eigen::MatrixXd& jac, std::vector<bool> equality)
{
    std::vector<int> rows(static_cast<std::size_t>(jac.rows()));
    for (int r = 0; r < jac.rows(); ++r) {
        rows[static_cast<std::size_t>(r)] = r;
    }
    while (true) {
        if (rows.empty()) {
            return grad.lpNorm<Eigen::Infinity>();
        }
        Eigen::MatrixXd jt(jac.cols(), static_cast<Eigen::Index>(rows.size()));
        for (std::size_t c = 0; c < rows.size(); ++c) {
            jt.col(static_cast<Eigen::Index>(c)) = jac.row(rows[c]).transpose();
        }
        const Eigen::VectorXd lambda = jt.completeOrthogonalDecomposition().solve(-grad);
        int worst = -1;
        double worst_val = 0.0;
        for (std::size_t c = 0; c < rows.size(); ++c) {
            const double lv = lambda(static_cast<Eigen::Index>(c));
            if (!equality[static_cast<std::size_t>(rows[c])] && lv < worst_val) {
                worst_val = lv;
                worst = static_cast<int>(c);
            }
        }
        if (worst < 0) {
            return (grad + jt * lambda).lpNorm<Eigen::Infinity>();
        }
        rows.erase(rows.begin() + worst);
    }
}

struct NewtonOutcome {
    bool converged = false;
    std::vector<double> x;
    Eigen::VectorXd lambda;
    int iterations = 0;
};

NewtonOutcome newton_kkt(const XSpace& xs, std::vector<double> x, const std::vector<ActiveItem>& act)
{
    const int k = xs.dim();
    const auto a = static_cast<Eigen::Index>(act.size());
    NewtonOutcome out;
    if (a > k) {
        return out;
    }
    Lifted l = xs.lift(x);
    Eigen::VectorXd cvals;
    Eigen::MatrixXd jac = active_jacobian(xs, act, l, x, cvals);
    if (a > 0) {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
        if (lu.rank() < a) {
            return out;
        }
    }
    Eigen::VectorXd grad = neg_objective_gradient(xs, l);
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(a);
    if (a > 0) {
        lambda = jac.transpose().completeOrthogonalDecomposition().solve(-grad);
    }

    for (int it = 0; it < 50; ++it) {
        out.iterations = it + 1;
        Eigen::MatrixXd hl = -xs.hessian(xs.objective(), l);
        for (Eigen::Index r = 0; r < a; ++r) {
            const ActiveItem& item = act[static_cast<std::size_t>(r)];
            if (!item.is_bound) {
                const XConstraint& c = xs.constraints()[item.index];
                hl += lambda(r) * c.sign * xs.hessian(c.q, l);
            }
        }
        Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(k + a, k + a);
        kkt.topLeftCorner(k, k) = hl;
        kkt.topRightCorner(k, a) = jac.transpose();
        kkt.bottomLeftCorner(a, k) = jac;
        Eigen::VectorXd rhs(k + a);
        rhs.head(k) = -(grad + jac.transpose() * lambda);
        rhs.tail(a) = -cvals;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
        if (lu.rank() < k + a) {
            return out;
        }
        const Eigen::VectorXd step = lu.solve(rhs);
        if (!step.allFinite()) {
            return out;
        }
        for (int i = 0; i < k; ++i) {
            x[static_cast<std::size_t>(i)] += step(i);
            if (std::abs(x[static_cast<std::size_t>(i)]) >= 1.0) {
                return out;
            }
        }
        lambda += step.tail(a);
        l = xs.lift(x);
        jac = active_jacobian(xs, act, l, x, cvals);
        grad = neg_objective_gradient(xs, l);
        const double stat = (grad + jac.transpose() * lambda).lpNorm<Eigen::Infinity>();
        const double feas = a > 0 ? cvals.lpNorm<Eigen::Infinity>() : 0.0;
        if (step.head(k).lpNorm<Eigen::Infinity>() <= 4e-16 || (stat <= 1e-14 && feas <= 1e-16)) {
            out.converged = feas <= 1e-13 && stat <= 1e-9;
            break;
        }
        if (it == 49) {
            out.converged = feas <= 1e-13 && stat <= 1e-9;
        }
    }
    out.x = std::move(x);
    out.lambda = std::move(lambda);
    return out;
}

} // namespace

// ---------------------------------------------------------------------------

std::vector<Assignment> initial_seeds(const QuadraticProgram& p, int count, std::uint64_t rng_seed)
{
    if (count < 1) {
        throw DomainError("initial_seeds: count must be >= 1");
    }
    const XSpace xs(p, 0.0);
    const int k = p.num_x();
    const double step = std::numbers::pi / (2.0 * (p.n - 1));
    Assignment base;
    base.x.resize(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        const int j = p.variables[static_cast<std::size_t>(i)].index;
        const int rank = j == 1 ? 0 : j / 2; // chain edges x_{2r}, x_{2r+1} share a slot
        const double angle = (2 * rank + 1) * step;
        base.x[static_cast<std::size_t>(i)] =
            std::clamp(std::sin(angle), xs.lb()[static_cast<std::size_t>(i)], xs.ub()[static_cast<std::size_t>(i)]);
    }
    std::vector<Assignment> seeds;
    seeds.reserve(static_cast<std::size_t>(count));
    seeds.push_back(base);
    for (int s = 1; s < count; ++s) {
        Assignment a = base;
        for (int i = 0; i < k; ++i) {
            const auto u = static_cast<std::size_t>(i);
            const double r = counter_uniform(rng_seed, static_cast<std::uint64_t>(s), u);
            a.x[u] = std::clamp(a.x[u] + 0.15 * (2.0 * r - 1.0), xs.lb()[u], xs.ub()[u]);
        }
        seeds.push_back(std::move(a));
    }
    return seeds;
}

PolishResult polish(const QuadraticProgram& p, const Assignment& a)
{
    PolishResult res{a, false, 0};
    EvaluationReport before;
    try {
        before = evaluate(p, a);
    } catch (const DomainError&) {
        return res;
    }
    if (before.max_violation > 1e-4) {
        return res;
    }
    const XSpace xs(p, 0.0);
    std::vector<ActiveItem> act = active_set(xs, a.x);
    NewtonOutcome nt;
    for (int round = 0; round < 4; ++round) {
        nt = newton_kkt(xs, a.x, act);
        res.iterations += nt.iterations;
        if (!nt.converged) {
            return res;
        }
        int worst = -1;
        double worst_val = -1e-9;
        for (std::size_t r = 0; r < act.size(); ++r) {
            const double lv = nt.lambda(static_cast<Eigen::Index>(r));
            if (!act[r].equality && lv < worst_val) {
                worst_val = lv;
                worst = static_cast<int>(r);
            }
        }
        if (worst < 0) {
            break;
        }
        act.erase(act.begin() + worst);
        if (round == 3) {
            return res;
        }
    }
    std::vector<double> x = nt.x;
    for (const auto& item : act) {
        if (item.is_bound) {
            const XBound& b = xs.bounds()[item.index];
            x[static_cast<std::size_t>(b.var)] = b.value;
        }
    }
    double moved = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        moved = std::max(moved, std::abs(x[i] - a.x[i]));
    }
    Assignment candidate{x, std::nullopt};
    const EvaluationReport after = evaluate(p, candidate);
    if (after.max_violation > 1e-12 || moved > 1e-2) {
        return res;
    }
    res.point = std::move(candidate);
    res.progressed = true;
    return res;
}

double kkt_residual(const QuadraticProgram& p, const Assignment& a)
{
    const EvaluationReport rep = evaluate(p, a);
    if (rep.max_violation > 1e-6) {
        throw DomainError("kkt_residual: point violates constraints by " + std::to_string(rep.max_violation));
    }
    const XSpace xs(p, 0.0);
    const std::vector<ActiveItem> act = active_set(xs, a.x);
    const Lifted l = xs.lift(a.x);
    Eigen::VectorXd vals;
    const Eigen::MatrixXd jac = active_jacobian(xs, act, l, a.x, vals);
    std::vector<bool> eq;
    for (const auto& item : act) {
        eq.push_back(item.equality);
    }
    return fitted_stationarity(neg_objective_gradient(xs, l), jac, eq);
}

SolveResult solve(const QuadraticProgram& p, const SolverConfig& config)
{
    if (config.starts < 1 || config.feasibility_tol <= 0 || config.kkt_tol <= 0 || config.x_interior_clamp <= 0) {
        throw DomainError("solve: invalid solver configuration");
    }
    const std::vector<Assignment> seeds = initial_seeds(p, config.starts, config.rng_seed);
    const XSpace xs(p, config.x_interior_clamp);

    struct Outcome {
        Assignment point;
        StartLog log;
    };
    std::vector<Outcome> outcomes(seeds.size());

    auto run_start = [&](std::size_t s) {
        const XSpace local(xs); // XSpace keeps scratch buffers
        std::vector<double> x = augmented_lagrangian(local, seeds[s].x, config);
        Outcome o;
        o.point = Assignment{x, std::nullopt};
        // Final points are evaluated unclamped.
        for (auto& v : o.point.x) {
            v = std::clamp(v, -1.0, 1.0);
        }
        const PolishResult pr = polish(p, o.point);
        if (pr.progressed) {
            o.point = pr.point;
            o.log.polished = true;
        }
        const EvaluationReport rep = evaluate(p, o.point);
        o.log.objective = rep.objective;
        o.log.max_violation = rep.max_violation;
        o.log.status = rep.max_violation <= config.feasibility_tol ? StartStatus::Feasible : StartStatus::Infeasible;
        outcomes[s] = std::move(o);
    };

    const int threads = std::max(1, std::min(config.threads, config.starts));
    if (threads == 1) {
        for (std::size_t s = 0; s < seeds.size(); ++s) {
            run_start(s);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t s = next++; s < seeds.size(); s = next++) {
                    run_start(s);
                }
            });
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    SolveResult r;
    r.n = p.n;
    r.symmetric = p.symmetric;
    r.config = config;
    double best_violation = kInf;
    for (std::size_t s = 0; s < outcomes.size(); ++s) {
        const Outcome& o = outcomes[s];
        r.starts.push_back(o.log);
        best_violation = std::min(best_violation, o.log.max_violation);
        if (o.log.status == StartStatus::Feasible && (r.winning_start < 0 || o.log.objective > r.objective)) {
            r.winning_start = static_cast<int>(s);
            r.objective = o.log.objective;
            r.best = o.point;
            r.max_violation = o.log.max_violation;
        }
    }
    if (r.winning_start < 0) {
        throw InfeasibleError("no start reached feasibility tolerance", best_violation);
    }
    try {
        r.kkt_residual = kkt_residual(p, r.best);
    } catch (const DomainError&) {
        r.kkt_residual = kInf;
    }
    return r;
}

std::vector<double> objective_gradient_x(const QuadraticProgram& p, const std::vector<double>& x)
{
    const XSpace xs(p, 0.0);
    std::vector<double> g;
    xs.value_grad(xs.objective(), xs.lift(x), &g);
    return g;
}

double objective_value_x(const QuadraticProgram& p, const std::vector<double>& x)
{
    const XSpace xs(p, 0.0);
    return xs.value_grad(xs.objective(), xs.lift(x), nullptr);
}

std::vector<double> constraint_gradient_x(const QuadraticProgram& p, std::size_t index, const std::vector<double>& x)
{
    const XSpace xs(p, 0.0);
    const SparseQuad q(p.constraints.at(index).expr);
    std::vector<double> g;
    xs.value_grad(q, xs.lift(x), &g);
    return g;
}

double constraint_value_x(const QuadraticProgram& p, std::size_t index, const std::vector<double>& x)
{
    const XSpace xs(p, 0.0);
    const SparseQuad q(p.constraints.at(index).expr);
    return xs.value_grad(q, xs.lift(x), nullptr);
}

// ---------------------------------------------------------------------------

std::string result_to_json(const SolveResult& r)
{
    using nlohmann::json;
    json j;
    j["version"] = "maxpoly-result/1";
    j["n"] = r.n;
    j["symmetric"] = r.symmetric;
    j["objective"] = r.objective;
    j["x"] = r.best.x;
    j["max_violation"] = r.max_violation;
    j["kkt_residual"] = std::isfinite(r.kkt_residual) ? json(r.kkt_residual) : json(nullptr);
    j["winning_start"] = r.winning_start;
    j["config"] = {{"starts", r.config.starts},
                   {"rng_seed", r.config.rng_seed},
                   {"max_outer_iterations", r.config.max_outer_iterations},
                   {"feasibility_tol", r.config.feasibility_tol},
                   {"kkt_tol", r.config.kkt_tol},
                   {"x_interior_clamp", r.config.x_interior_clamp}};
    json starts = json::array();
    for (const auto& s : r.starts) {
        starts.push_back({{"objective", s.objective},
                          {"max_violation", s.max_violation},
                          {"polished", s.polished},
                          {"status", s.status == StartStatus::Feasible ? "feasible" : "infeasible"}});
    }
    j["starts"] = starts;
    return j.dump(2);
}

SolveResult result_from_json(std::string_view text)
{
    using nlohmann::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("", e.what());
    }
    auto need = [&](const char* key) -> const json& {
        if (!j.is_object() || !j.contains(key)) {
            throw ParseError(std::string("/") + key, "missing field");
        }
        return j[key];
    };
    SolveResult r;
    try {
        if (need("version").get<std::string>() != "maxpoly-result/1") {
            throw ParseError("/version", "unsupported version");
        }
        r.n = need("n").get<int>();
        r.symmetric = need("symmetric").get<bool>();
        r.best.x = need("x").get<std::vector<double>>();
        r.objective = j.value("objective", 0.0);
        r.max_violation = j.value("max_violation", 0.0);
        r.winning_start = j.value("winning_start", -1);
        if (j.contains("kkt_residual") && j["kkt_residual"].is_number()) {
            r.kkt_residual = j["kkt_residual"].get<double>();
        } else {
            r.kkt_residual = kInf;
        }
        if (j.contains("config")) {
            const json& c = j["config"];
            r.config.starts = c.value("starts", r.config.starts);
            r.config.rng_seed = c.value("rng_seed", r.config.rng_seed);
            r.config.max_outer_iterations = c.value("max_outer_iterations", r.config.max_outer_iterations);
            r.config.feasibility_tol = c.value("feasibility_tol", r.config.feasibility_tol);
            r.config.kkt_tol = c.value("kkt_tol", r.config.kkt_tol);
            r.config.x_interior_clamp = c.value("x_interior_clamp", r.config.x_interior_clamp);
        }
    } catch (const json::type_error& e) {
        throw ParseError("", std::string("wrong type: ") + e.what());
    }
    if (r.n < 4 || r.n % 2 != 0) {
        throw ParseError("/n", "n must be even and >= 4");
    }
    const std::size_t expect = r.symmetric ? static_cast<std::size_t>((r.n - 2) / 2) : static_cast<std::size_t>(r.n - 3);
    if (r.best.x.size() != expect) {
        throw ParseError("/x", "expected " + std::to_string(expect) + " values");
    }
    return r;
}

} // namespace maxpoly
