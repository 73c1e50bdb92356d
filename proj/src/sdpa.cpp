#include "maxpoly/certify.hpp"
#include "maxpoly/moment_relaxation.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>
#include <tuple>

namespace maxpoly {

namespace {

struct Triplet {
    int mat;
    int blk;
    int i;
    int j;
    double value;
};

std::string monomial_name(const SDPInstance& s, const Monomial& m)
{
    std::string out;
    for (std::size_t v = 0; v < m.exps.size(); ++v) {
        if (m.exps[v] == 0) {
            continue;
        }
        if (!out.empty()) {
            out += '*';
        }
        out += s.variable_names[v];
        if (m.exps[v] > 1) {
            out += '^' + std::to_string(m.exps[v]);
        }
    }
    return out.empty() ? "1" : out;
}

} // namespace

std::string export_sdpa(const SDPInstance& s)
{
    std::vector<Triplet> triplets;
    for (std::size_t b = 0; b < s.blocks.size(); ++b) {
        const int blk = static_cast<int>(b) + 1;
        for (const auto& e : s.blocks[b].entries) {
            if (e.value.constant != 0.0) {
                triplets.push_back({0, blk, e.row + 1, e.col + 1, -e.value.constant});
            }
            for (const auto& [k, c] : e.value.terms) {
                triplets.push_back({k + 1, blk, e.row + 1, e.col + 1, c});
            }
        }
    }
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return std::tie(a.mat, a.blk, a.i, a.j) < std::tie(b.mat, b.blk, b.i, b.j);
    });

    std::vector<double> c(s.moments.size(), 0.0);
    for (const auto& [k, coef] : s.objective.terms) {
        c[static_cast<std::size_t>(k)] = -coef;
    }

    std::ostringstream out;
    out << "\"maxpoly moment relaxation n=" << s.n << (s.symmetric ? " symmetric" : " full") << " order=" << s.order
        << '\n';
    out << "\"maximize area = " << shortest_decimal(s.objective.constant) << " - (c^T m); moments listed in sidecar\n";
    out << s.moments.size() << " = mDIM\n";
    out << s.blocks.size() << " = nBLOCK\n";
    for (std::size_t b = 0; b < s.blocks.size(); ++b) {
        out << (b ? " " : "") << s.blocks[b].size;
    }
    out << " = bLOCKsTRUCT\n";
    for (std::size_t k = 0; k < c.size(); ++k) {
        out << (k ? " " : "") << shortest_decimal(c[k]);
    }
    out << '\n';
    for (const auto& t : triplets) {
        out << t.mat << ' ' << t.blk << ' ' << t.i << ' ' << t.j << ' ' << shortest_decimal(t.value) << '\n';
    }
    return out.str();
}

std::string export_sidecar_json(const SDPInstance& s)
{
    using nlohmann::ordered_json;
    ordered_json j;
    j["version"] = "maxpoly-moments/1";
    j["n"] = s.n;
    j["symmetric"] = s.symmetric;
    j["order"] = s.order;
    j["variables"] = s.variable_names;
    j["objective_constant"] = s.objective.constant;
    ordered_json blocks = ordered_json::array();
    for (const auto& b : s.blocks) {
        blocks.push_back({{"label", b.label}, {"size", b.size}});
    }
    j["blocks"] = blocks;
    ordered_json moments = ordered_json::array();
    for (std::size_t k = 0; k < s.moments.size(); ++k) {
        ordered_json exps = ordered_json::object();
        for (std::size_t v = 0; v < s.moments[k].exps.size(); ++v) {
            if (s.moments[k].exps[v] != 0) {
                exps[s.variable_names[v]] = s.moments[k].exps[v];
            }
        }
        moments.push_back({{"index", k + 1}, {"monomial", monomial_name(s, s.moments[k])}, {"exponents", exps}});
    }
    j["moments"] = moments;
    return j.dump(2) + "\n";
}

} // namespace maxpoly
