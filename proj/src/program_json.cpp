#include "maxpoly/errors.hpp"
#include "maxpoly/formulation.hpp"

#include <json.hpp>

namespace maxpoly {

namespace {

using nlohmann::json;

constexpr std::string_view kVersion = "maxpoly-qp/1";

std::string_view sense_name(Sense s)
{
    switch (s) {
    case Sense::LessEqual: return "<=";
    case Sense::Equal: return "==";
    case Sense::GreaterEqual: return ">=";
    }
    return "?";
}

json expr_to_json(const QuadExpr& e)
{
    json q = json::array();
    for (const auto& [k, c] : e.quadratic()) {
        q.push_back({k.first, k.second, c});
    }
    json l = json::array();
    for (const auto& [v, c] : e.linear().coefficients()) {
        l.push_back({v, c});
    }
    return json{{"quadratic", q}, {"linear", l}, {"constant", e.constant()}};
}

// Field access with JSON-pointer error paths.
const json& field(const json& obj, const std::string& path, const char* key)
{
    if (!obj.is_object()) {
        throw ParseError(path, "expected an object");
    }
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw ParseError(path + "/" + key, "missing field");
    }
    return *it;
}

template <class T>
T typed(const json& j, const std::string& path)
{
    try {
        return j.get<T>();
    } catch (const json::exception& e) {
        throw ParseError(path, std::string("wrong type: ") + e.what());
    }
}

QuadExpr expr_from_json(const json& obj, const std::string& path, int nvars)
{
    QuadExpr e;
    auto check_var = [&](const json& v, const std::string& at) {
        const int id = typed<int>(v, at);
        if (id < 0 || id >= nvars) {
            throw ParseError(at, "variable id out of range");
        }
        return id;
    };
    const json& q = field(obj, path, "quadratic");
    if (!q.is_array()) {
        throw ParseError(path + "/quadratic", "expected an array");
    }
    for (std::size_t i = 0; i < q.size(); ++i) {
        const std::string at = path + "/quadratic/" + std::to_string(i);
        if (!q[i].is_array() || q[i].size() != 3) {
            throw ParseError(at, "expected [i, j, coefficient]");
        }
        e.add_quadratic(check_var(q[i][0], at + "/0"), check_var(q[i][1], at + "/1"), typed<double>(q[i][2], at + "/2"));
    }
    const json& l = field(obj, path, "linear");
    if (!l.is_array()) {
        throw ParseError(path + "/linear", "expected an array");
    }
    for (std::size_t i = 0; i < l.size(); ++i) {
        const std::string at = path + "/linear/" + std::to_string(i);
        if (!l[i].is_array() || l[i].size() != 2) {
            throw ParseError(at, "expected [i, coefficient]");
        }
        e.add_linear(check_var(l[i][0], at + "/0"), typed<double>(l[i][1], at + "/1"));
    }
    e.add_constant(typed<double>(field(obj, path, "constant"), path + "/constant"));
    return e;
}

} // namespace

std::string to_json(const QuadraticProgram& p)
{
    json j;
    j["version"] = kVersion;
    j["n"] = p.n;
    j["symmetric"] = p.symmetric;
    j["options"] = {{"relax_closing_edge", p.relax_closing_edge},
                    {"order_cut", p.order_cut},
                    {"include_bound_implied", p.include_bound_implied}};
    json vars = json::array();
    for (const auto& v : p.variables) {
        vars.push_back(v.name);
    }
    j["variables"] = vars;
    j["objective"] = expr_to_json(p.objective);
    json cons = json::array();
    for (const auto& c : p.constraints) {
        json cj = expr_to_json(c.expr);
        cj["kind"] = to_string(c.kind);
        cj["tag"] = c.tag;
        cj["sense"] = sense_name(c.sense);
        cj["rhs"] = c.rhs;
        cons.push_back(std::move(cj));
    }
    j["constraints"] = cons;
    return j.dump();
}

QuadraticProgram program_from_json(std::string_view text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("", e.what());
    }
    const std::string version = typed<std::string>(field(j, "", "version"), "/version");
    if (version != kVersion) {
        throw ParseError("/version", "unsupported version '" + version + "'");
    }
    QuadraticProgram p;
    p.n = typed<int>(field(j, "", "n"), "/n");
    if (p.n < 4 || p.n % 2 != 0) {
        throw ParseError("/n", "n must be even and >= 4");
    }
    p.symmetric = typed<bool>(field(j, "", "symmetric"), "/symmetric");
    const json& opts = field(j, "", "options");
    p.relax_closing_edge = typed<bool>(field(opts, "/options", "relax_closing_edge"), "/options/relax_closing_edge");
    p.order_cut = typed<bool>(field(opts, "/options", "order_cut"), "/options/order_cut");
    p.include_bound_implied =
        typed<bool>(field(opts, "/options", "include_bound_implied"), "/options/include_bound_implied");

    const json& vars = field(j, "", "variables");
    if (!vars.is_array() || vars.size() % 2 != 0) {
        throw ParseError("/variables", "expected an even-length array of names");
    }
    for (std::size_t i = 0; i < vars.size(); ++i) {
        const std::string at = "/variables/" + std::to_string(i);
        const auto name = typed<std::string>(vars[i], at);
        if (name.size() < 2 || (name[0] != 'x' && name[0] != 'y')) {
            throw ParseError(at, "variable names are x<i> or y<i>");
        }
        const bool is_y = name[0] == 'y';
        if (is_y != (i >= vars.size() / 2)) {
            throw ParseError(at, "x variables must precede y variables");
        }
        int idx = 0;
        try {
            idx = std::stoi(name.substr(1));
        } catch (const std::exception&) {
            throw ParseError(at, "bad variable subscript");
        }
        p.variables.push_back({name, is_y, idx});
    }
    const int nvars = p.num_vars();
    p.objective = expr_from_json(field(j, "", "objective"), "/objective", nvars);

    const json& cons = field(j, "", "constraints");
    if (!cons.is_array()) {
        throw ParseError("/constraints", "expected an array");
    }
    for (std::size_t i = 0; i < cons.size(); ++i) {
        const std::string at = "/constraints/" + std::to_string(i);
        QuadConstraint c;
        c.expr = expr_from_json(cons[i], at, nvars);
        const auto kind = typed<std::string>(field(cons[i], at, "kind"), at + "/kind");
        const auto parsed = constraint_kind_from_string(kind);
        if (!parsed) {
            throw ParseError(at + "/kind", "unknown constraint kind '" + kind + "'");
        }
        c.kind = *parsed;
        c.tag = typed<std::string>(field(cons[i], at, "tag"), at + "/tag");
        const auto sense = typed<std::string>(field(cons[i], at, "sense"), at + "/sense");
        if (sense == "<=") {
            c.sense = Sense::LessEqual;
        } else if (sense == "==") {
            c.sense = Sense::Equal;
        } else if (sense == ">=") {
            c.sense = Sense::GreaterEqual;
        } else {
            throw ParseError(at + "/sense", "expected <=, == or >=");
        }
        c.rhs = typed<double>(field(cons[i], at, "rhs"), at + "/rhs");
        p.constraints.push_back(std::move(c));
    }
    return p;
}

} // namespace maxpoly
