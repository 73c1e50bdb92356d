#include "maxpoly/errors.hpp"
#include "maxpoly/formulation.hpp"
#include "maxpoly/local_solver.hpp"
#include "maxpoly/moment_relaxation.hpp"
#include "support/solutions.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <algorithm>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

using namespace maxpoly;

namespace {

QuadraticProgram program(int n, bool symmetric)
{
    BuildOptions o;
    o.symmetric = symmetric;
    return build_program(n, o);
}

long long binom(int a, int b)
{
    if (b < 0 || a < b) {
        return 0;
    }
    long long r = 1;
    for (int i = 1; i <= b; ++i) {
        r = r * (a - b + i) / i;
    }
    return r;
}

// Normal monomials of degree <= D over k x-variables and k y-variables with
// y exponents in {0,1}: choose j distinct y's, spread the rest over the x's.
long long count_normal(int k, int degree)
{
    long long total = 0;
    for (int d = 0; d <= degree; ++d) {
        for (int j = 0; j <= std::min(k, d); ++j) {
            total += binom(k, j) * binom(k - 1 + d - j, d - j);
        }
    }
    return total;
}

// Brute-force enumeration of exponent vectors by recursion on the variables.
long long brute_count(int k, int degree)
{
    const int nv = 2 * k;
    auto rec = [&](auto&& self, int var, int left) -> long long {
        if (var == nv) {
            return 1;
        }
        long long c = 0;
        const int cap = var >= k ? std::min(1, left) : left;
        for (int e = 0; e <= cap; ++e) {
            c += self(self, var + 1, left - e);
        }
        return c;
    };
    return rec(rec, 0, degree);
}

std::vector<double> point_values(const QuadraticProgram& p, const Assignment& a) { return variable_values(p, a); }

Polynomial random_poly(std::mt19937_64& gen, int nvars, int max_deg, int terms)
{
    Polynomial out;
    std::uniform_int_distribution<int> var(0, nvars - 1);
    std::uniform_int_distribution<int> deg(0, max_deg);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (int t = 0; t < terms; ++t) {
        Monomial m = unit_monomial(nvars);
        const int d = deg(gen);
        for (int i = 0; i < d; ++i) {
            m.exps[static_cast<std::size_t>(var(gen))] += 1;
        }
        out[m] += coef(gen);
    }
    return out;
}

struct Trip {
    int mat;
    int blk;
    int i;
    int j;
    double v;
    bool operator<(const Trip& o) const { return std::tie(mat, blk, i, j) < std::tie(o.mat, o.blk, o.i, o.j); }
};

// Minimal SDPA sparse reader.
struct Sdpa {
    int m = 0;
    int nblocks = 0;
    std::vector<int> sizes;
    std::vector<double> c;
    std::vector<Trip> trips;
};

Sdpa read_sdpa(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '"' && line[0] != '*') {
            lines.push_back(line);
        }
    }
    Sdpa s;
    s.m = std::stoi(lines.at(0));
    s.nblocks = std::stoi(lines.at(1));
    std::istringstream bs(lines.at(2));
    for (int b = 0; b < s.nblocks; ++b) {
        int v = 0;
        bs >> v;
        s.sizes.push_back(v);
    }
    std::istringstream cs(lines.at(3));
    for (int k = 0; k < s.m; ++k) {
        double v = 0;
        cs >> v;
        s.c.push_back(v);
    }
    for (std::size_t l = 4; l < lines.size(); ++l) {
        std::istringstream ts(lines[l]);
        Trip t{};
        ts >> t.mat >> t.blk >> t.i >> t.j >> t.v;
        s.trips.push_back(t);
    }
    return s;
}

} // namespace

TEST_CASE("graded-lex order")
{
    const int nv = 3;
    auto mono = [&](std::vector<std::uint8_t> e) { return Monomial{std::move(e)}; };
    const GradLexLess less;
    CHECK(less(unit_monomial(nv), mono({1, 0, 0})));
    CHECK(less(mono({1, 0, 0}), mono({0, 1, 0})));
    CHECK(less(mono({0, 0, 1}), mono({2, 0, 0})));
    CHECK(less(mono({2, 0, 0}), mono({1, 1, 0})));
    CHECK(less(mono({1, 1, 0}), mono({0, 2, 0})));
    CHECK_FALSE(less(mono({1, 1, 0}), mono({1, 1, 0})));
}

TEST_CASE("monomial_basis sizes")
{
    CHECK(monomial_basis(program(10, false), 2).size() == 113);
    CHECK(monomial_basis(program(12, false), 2).size() == 181);
    CHECK(monomial_basis(program(10, true), 2).size() == 41);
    CHECK(monomial_basis(program(10, true), 4).size() == 321);
    CHECK(monomial_basis(program(8, false), 1).size() == 11);
    CHECK(monomial_basis(program(8, true), 2).size() == 25);

    for (int n = 4; n <= 12; n += 2) {
        for (bool sym : {false, true}) {
            if (sym && n < 6) {
                continue;
            }
            const QuadraticProgram p = program(n, sym);
            for (int d = 1; d <= 3; ++d) {
                const MomentBasis b = monomial_basis(p, d);
                CHECK(static_cast<long long>(b.size()) == brute_count(p.num_x(), d));
                CHECK(b.monomials.front() == unit_monomial(p.num_vars()));
                for (std::size_t i = 0; i + 1 < b.size(); ++i) {
                    CHECK(GradLexLess{}(b.monomials[i], b.monomials[i + 1]));
                }
                for (const auto& m : b.monomials) {
                    CHECK(is_normal(p, m));
                }
            }
        }
    }
}

TEST_CASE("relaxation sizes")
{
    struct Row {
        int n;
        bool sym;
        int vars;
        int matrix;
    };
    for (const Row r : {Row{10, false, 2240, 113}, Row{12, false, 5640, 181}, Row{10, true, 320, 41},
                        Row{12, true, 680, 61}}) {
        CAPTURE(r.n);
        CAPTURE(r.sym);
        const RelaxationStats s = stats(build_relaxation(program(r.n, r.sym), 2));
        CHECK(s.num_moment_vars == r.vars);
        CHECK(s.moment_matrix_size == r.matrix);
    }
    // Closed-form count for full programs: m x's and m y's, degree <= 4.
    for (int n : {10, 12}) {
        const int m = n - 3;
        long long sum = 0;
        for (int k = 0; k <= 4; ++k) {
            for (int j = 0; j <= k; ++j) {
                sum += binom(m, j) * binom(m - 1 + k - j, k - j);
            }
        }
        CHECK(stats(build_relaxation(program(n, false), 2)).num_moment_vars == sum - 1);
        CHECK(sum == count_normal(m, 4));
    }
    const RelaxationStats d1 = stats(build_relaxation(program(10, false), 1));
    CHECK(d1.moment_matrix_size == 15);
    for (int sz : d1.localizing_sizes) {
        CHECK(sz == 1);
    }
    CHECK_THROWS_AS(build_relaxation(program(8, false), 0), DomainError);
}

TEST_CASE("localizing blocks")
{
    const QuadraticProgram p = program(10, false);
    const SDPInstance s = build_relaxation(p, 2);
    int expected = 0;
    for (const auto& c : p.constraints) {
        if (c.kind == ConstraintKind::CircleEquality) {
            continue;
        }
        expected += c.sense == Sense::Equal ? 2 : 1;
    }
    const RelaxationStats st = stats(s);
    CHECK(st.localizing_blocks == expected);
    CHECK(s.blocks.front().label == "moment");
    std::set<std::string> labels;
    for (const auto& b : s.blocks) {
        CHECK(labels.insert(b.label).second);
    }
    CHECK(labels.count("loc:pair:2:8:+") == 1);
    CHECK(labels.count("loc:pair:2:8:-") == 1);
    for (std::size_t b = 1; b < s.blocks.size(); ++b) {
        CHECK(s.blocks[b].size == 15);
    }
}

TEST_CASE("normal form is sound on the circle")
{
    std::mt19937_64 gen(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int n : {6, 8, 10}) {
        const QuadraticProgram p = program(n, false);
        const int nv = p.num_vars();
        const int k = p.num_x();
        for (int trial = 0; trial < 200; ++trial) {
            const Polynomial q = random_poly(gen, nv, 6, 12);
            const Polynomial r = normal_form(p, q);
            for (const auto& [m, c] : r) {
                CHECK(is_normal(p, m));
            }
            std::vector<double> vals(static_cast<std::size_t>(nv));
            for (int i = 0; i < k; ++i) {
                const double t = std::numbers::pi * u(gen);
                vals[static_cast<std::size_t>(i)] = std::cos(t);
                vals[static_cast<std::size_t>(k + i)] = std::sin(t);
            }
            CHECK(std::abs(evaluate(q, vals) - evaluate(r, vals)) <= 1e-12);
        }
    }
}

TEST_CASE("Dirac moments of feasible points satisfy every block")
{
    SolverConfig c;
    c.starts = 8;
    for (int n : {8, 10}) {
        for (bool sym : {false, true}) {
            const QuadraticProgram p = program(n, sym);
            const SolveResult r = solve(p, c);
            const std::vector<double> vals = point_values(p, r.best);
            const SDPInstance s = build_relaxation(p, 2);
            const std::vector<double> y = dirac_moments(s, vals);
            double worst = 0.0;
            for (const auto& b : s.blocks) {
                worst = std::min(worst, min_eigenvalue(b, y));
            }
            CHECK(worst >= -1e-9);
            CHECK(std::abs(s.objective.evaluate(y) - r.objective) <= 1e-12);
        }
    }
    // Random feasible points: interior of the n = 4 program.
    const QuadraticProgram p4 = build_program(4);
    const SDPInstance s4 = build_relaxation(p4, 2);
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> u(0.0, 0.5);
    for (int t = 0; t < 50; ++t) {
        const Assignment a{{u(gen)}, {}};
        const std::vector<double> y = dirac_moments(s4, point_values(p4, a));
        for (const auto& b : s4.blocks) {
            CHECK(min_eigenvalue(b, y) >= -1e-9);
        }
        CHECK(s4.objective.evaluate(y) == doctest::Approx(a.x[0]).epsilon(1e-15));
    }
    CHECK_THROWS_AS(dirac_moments(s4, std::vector<double>{0.1}), DimensionMismatch);
}

TEST_CASE("sigma-substituted program gives the same symmetric relaxation")
{
    for (int n : {8, 10}) {
        BuildOptions o;
        o.order_cut = false;
        const QuadraticProgram full = build_program(n, o);
        const SDPInstance a = build_relaxation(reduce_symmetric(full), 2);
        const SDPInstance b = build_relaxation(reduce_symmetric(substitute_sigma(full)), 2);
        CHECK(a.moments == b.moments);
        CHECK(a.objective == b.objective);
        auto blocks = [](const SDPInstance& s) {
            std::vector<std::pair<std::vector<BlockEntry>, int>> out;
            for (const auto& blk : s.blocks) {
                std::vector<BlockEntry> e = blk.entries;
                out.emplace_back(std::move(e), blk.size);
            }
            std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) {
                if (l.second != r.second) {
                    return l.second < r.second;
                }
                if (l.first.size() != r.first.size()) {
                    return l.first.size() < r.first.size();
                }
                for (std::size_t i = 0; i < l.first.size(); ++i) {
                    const auto& x = l.first[i].value;
                    const auto& y = r.first[i].value;
                    if (x.constant != y.constant) {
                        return x.constant < y.constant;
                    }
                    if (x.terms != y.terms) {
                        return x.terms < y.terms;
                    }
                }
                return false;
            });
            return out;
        };
        CHECK(blocks(a) == blocks(b));
        // Structural equality with the directly built symmetric program, too.
        CHECK(build_relaxation(program(n, true), 2).moments == a.moments);
    }
}

TEST_CASE("SDPA export round trip")
{
    for (int n : {8, 10}) {
        const SDPInstance s = build_relaxation(program(n, true), 2);
        const std::string text = export_sdpa(s);
        CHECK(text == export_sdpa(s));
        const Sdpa f = read_sdpa(text);
        CHECK(f.m == static_cast<int>(s.num_moment_vars()));
        CHECK(f.nblocks == static_cast<int>(s.blocks.size()));
        CHECK(f.sizes.front() == static_cast<int>(monomial_basis(program(n, true), 2).size()));
        const RelaxationStats st = stats(s);
        int sum = 0;
        int want = st.moment_matrix_size;
        for (int v : f.sizes) {
            sum += v;
        }
        for (int v : st.localizing_sizes) {
            want += v;
        }
        CHECK(sum == want);

        // Rebuild triplets from the instance independently of the writer.
        std::vector<Trip> expect;
        for (std::size_t b = 0; b < s.blocks.size(); ++b) {
            for (const auto& e : s.blocks[b].entries) {
                if (e.value.constant != 0.0) {
                    expect.push_back({0, static_cast<int>(b) + 1, e.row + 1, e.col + 1, -e.value.constant});
                }
                for (const auto& [k, c] : e.value.terms) {
                    expect.push_back({k + 1, static_cast<int>(b) + 1, e.row + 1, e.col + 1, c});
                }
            }
        }
        std::sort(expect.begin(), expect.end());
        REQUIRE(f.trips.size() == expect.size());
        for (std::size_t i = 0; i < expect.size(); ++i) {
            CHECK(f.trips[i].mat == expect[i].mat);
            CHECK(f.trips[i].blk == expect[i].blk);
            CHECK(f.trips[i].i == expect[i].i);
            CHECK(f.trips[i].j == expect[i].j);
            CHECK(f.trips[i].i <= f.trips[i].j);
            CHECK(f.trips[i].v == expect[i].v);
        }
        // c is the negated objective.
        for (const auto& [k, coef] : s.objective.terms) {
            CHECK(f.c[static_cast<std::size_t>(k)] == -coef);
        }
    }
    CHECK(read_sdpa(export_sdpa(build_relaxation(program(8, true), 2))).sizes.front() == 25);
}

TEST_CASE("sidecar json")
{
    const SDPInstance s = build_relaxation(program(8, true), 2);
    const auto j = nlohmann::json::parse(export_sidecar_json(s));
    CHECK(j["version"] == "maxpoly-moments/1");
    CHECK(j["moments"].size() == s.num_moment_vars());
    CHECK(j["moments"][0]["index"] == 1);
    CHECK(j["moments"][0]["monomial"] == "x1");
    CHECK(j["blocks"][0]["label"] == "moment");
    CHECK(export_sidecar_json(s) == export_sidecar_json(s));
}

TEST_CASE("extract")
{
    const QuadraticProgram p = program(8, false);
    const SDPInstance s = build_relaxation(p, 2);
    SolverConfig c;
    c.starts = 16;
    const SolveResult r = solve(p, c);

    SUBCASE("rank one at the octagon optimum")
    {
        const std::vector<double> y = dirac_moments(s, point_values(p, r.best));
        const Extraction e = extract(s, y);
        CHECK(e.moment_matrix_rank == 1);
        CHECK(e.previous_rank == 1);
        CHECK(e.flat);
        CHECK(e.certified);
        CHECK(std::abs(e.upper_bound - 0.72686848) <= 1e-6);
        CHECK(std::abs(e.candidate.x[0] - 0.26214172) <= 1e-6);
    }
    SUBCASE("average of a point and its mirror image has rank two")
    {
        const Assignment u{{0.26, 0.70, 0.64, 0.93, 0.89}, {}};
        const Assignment v = apply_sigma(u, 8);
        const std::vector<double> yu = dirac_moments(s, point_values(p, u));
        const std::vector<double> yv = dirac_moments(s, point_values(p, v));
        std::vector<double> y(yu.size());
        for (std::size_t i = 0; i < y.size(); ++i) {
            y[i] = 0.5 * (yu[i] + yv[i]);
        }
        const Extraction e = extract(s, y);
        CHECK(e.moment_matrix_rank == 2);
        CHECK_FALSE(e.certified);
        for (std::size_t i = 0; i < u.x.size(); ++i) {
            CHECK(e.candidate.x[i] == doctest::Approx(0.5 * (u.x[i] + v.x[i])));
        }
    }
    SUBCASE("zero moment vector")
    {
        const std::vector<double> y(s.num_moment_vars(), 0.0);
        const Extraction e = extract(s, y);
        CHECK(e.upper_bound == 0.0);
        for (double v : e.candidate.x) {
            CHECK(v == 0.0);
        }
        // y_i^2 reduces to 1 - x_i^2: rows 1, y_i and y_i y_j keep a unit diagonal.
        CHECK(e.moment_matrix_rank == 1 + p.num_x() + p.num_x() * (p.num_x() - 1) / 2);
        CHECK_FALSE(e.certified);
    }
    SUBCASE("input validation")
    {
        CHECK_THROWS_AS(extract(s, std::vector<double>(3, 0.0)), DimensionMismatch);
        const std::vector<double> y = dirac_moments(s, point_values(p, r.best));
        std::vector<double> dense = s.blocks.front().dense(y);
        const Extraction e = extract_from_moment_matrix(s, dense);
        CHECK(e.certified);
        CHECK(e.upper_bound == doctest::Approx(r.objective).epsilon(1e-12));
        const auto size = static_cast<std::size_t>(s.blocks.front().size);
        dense[1] += 1e-6;
        CHECK_THROWS_AS(extract_from_moment_matrix(s, dense), ParseError);
        dense[1] -= 1e-6;
        dense[size + 1] += 0.5; // (1,1) no longer equals x1^2's moment
        CHECK_THROWS_AS(extract_from_moment_matrix(s, dense), ParseError);
        CHECK_THROWS_AS(extract_from_moment_matrix(s, std::vector<double>(4, 0.0)), DimensionMismatch);
    }
}
