// maxpoly: build, solve, certify and relax largest-small-polygon programs.

#include "maxpoly/certify.hpp"
#include "maxpoly/errors.hpp"
#include "maxpoly/formulation.hpp"
#include "maxpoly/geometry.hpp"
#include "maxpoly/local_solver.hpp"
#include "maxpoly/moment_relaxation.hpp"
#include "maxpoly/reference_data.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

namespace {

using namespace maxpoly;
using nlohmann::ordered_json;

enum Exit { kOk = 0, kUsage = 2, kFailed = 3, kIo = 4 };

constexpr int kMaxN = 24;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check_n(int n, bool allow_large)
{
    if (n < 4 || n % 2 != 0) {
        throw UsageError("n must be an even integer >= 4 (got " + std::to_string(n) + ")");
    }
    if (n > kMaxN) {
        if (!allow_large) {
            throw UsageError("n > " + std::to_string(kMaxN) + " requires --allow-large");
        }
        std::cerr << "warning: n = " << n << " exceeds " << kMaxN << "; problem sizes grow quickly\n";
    }
}

int thread_count()
{
    if (const char* env = std::getenv("MAXPOLY_THREADS")) {
        try {
            const int t = std::stoi(env);
            if (t >= 1) {
                return t;
            }
        } catch (const std::exception&) {
        }
        std::cerr << "warning: ignoring MAXPOLY_THREADS=" << env << "\n";
    }
    return static_cast<int>(std::max(1u, std::min(8u, std::thread::hardware_concurrency())));
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text) || !out.flush()) {
        throw IoError("cannot write " + path);
    }
}

std::string fixed(double v, int digits = 8)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string sci(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

// A result file or a polygon file.
struct Candidate {
    int n = 0;
    std::optional<Assignment> assignment;
    std::optional<Polygon> polygon;
};

Candidate load_candidate(const std::string& path)
{
    const std::string text = read_file(path);
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw ParseError("", e.what());
    }
    Candidate c;
    if (j.is_object() && j.contains("vertices")) {
        c.polygon = polygon_from_json(text);
        c.n = static_cast<int>(c.polygon->size());
        return c;
    }
    const SolveResult r = result_from_json(text);
    c.n = r.n;
    c.assignment = r.best;
    return c;
}

struct BuildFlags {
    bool symmetric = false;
    bool relax_closing = false;
    bool order_cut = false;
    bool no_order_cut = false;
};

BuildOptions build_options(const BuildFlags& f)
{
    BuildOptions o;
    o.symmetric = f.symmetric;
    o.relax_closing_edge = f.relax_closing;
    if (f.order_cut) {
        o.order_cut = true;
    } else if (f.no_order_cut) {
        o.order_cut = false;
    }
    return o;
}

void add_build_flags(CLI::App* cmd, BuildFlags& f)
{
    cmd->add_flag("--symmetric", f.symmetric, "Symmetry-reduced program");
    cmd->add_flag("--relax-closing", f.relax_closing, "Closing-cycle constraint as <= 1 instead of = 1");
    auto* on = cmd->add_flag("--order-cut", f.order_cut, "Add x2 >= x3 (default: on for n = 8 only)");
    cmd->add_flag("--no-order-cut", f.no_order_cut, "Omit x2 >= x3")->excludes(on);
}

// --------------------------------------------------------------------------

int cmd_build(int n, const BuildFlags& flags, bool allow_large, const std::string& out_path)
{
    check_n(n, allow_large);
    const QuadraticProgram p = build_program(n, build_options(flags));
    const std::string text = to_json(p);
    if (out_path.empty()) {
        std::cout << text;
    } else {
        write_file(out_path, text);
        std::cout << "program n=" << n << (p.symmetric ? " symmetric" : " full") << ": " << p.num_vars()
                  << " variables, " << p.constraints.size() << " constraints -> " << out_path << "\n";
    }
    return kOk;
}

int cmd_solve(int n, const BuildFlags& flags, bool allow_large, int starts, std::uint64_t seed, bool json,
              const std::string& out_path)
{
    check_n(n, allow_large);
    if (starts < 1) {
        throw UsageError("--starts must be >= 1");
    }
    const QuadraticProgram p = build_program(n, build_options(flags));
    SolverConfig cfg;
    cfg.starts = starts;
    cfg.rng_seed = seed;
    cfg.threads = thread_count();
    SolveResult r;
    try {
        r = solve(p, cfg);
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << " (best violation " << sci(e.best_violation()) << ")\n";
        return kFailed;
    }
    const std::string text = result_to_json(r);
    if (!out_path.empty()) {
        write_file(out_path, text);
    }
    if (json) {
        std::cout << text;
        return kOk;
    }
    std::cout << "n = " << n << (r.symmetric ? " (symmetric)" : " (full)") << "\n";
    std::cout << "area          " << fixed(r.objective) << "\n";
    for (std::size_t i = 0; i < r.best.x.size(); ++i) {
        std::cout << "  " << std::left << std::setw(12) << p.variables[i].name << fixed(r.best.x[i]) << "\n";
    }
    std::cout << "max violation " << sci(r.max_violation) << "\n";
    std::cout << "KKT residual  " << sci(r.kkt_residual) << "\n";
    std::cout << "winning start " << r.winning_start << " of " << r.starts.size() << "\n";
    if (!out_path.empty()) {
        std::cout << "result -> " << out_path << "\n";
    }
    return kOk;
}

int cmd_certify(const std::string& path, bool json, const std::string& out_path)
{
    const Candidate c = load_candidate(path);
    Certificate cert;
    try {
        cert = c.polygon ? certify_polygon(*c.polygon) : certify(c.n, *c.assignment);
    } catch (const DomainError& e) {
        std::cerr << "uncertified: " << e.what() << "\n";
        return kFailed;
    } catch (const DimensionMismatch& e) {
        std::cerr << "uncertified: " << e.what() << "\n";
        return kFailed;
    }
    const std::string text = certificate_to_json(cert);
    if (!out_path.empty()) {
        write_file(out_path, text);
    }
    if (json) {
        std::cout << text;
    }
    if (!cert.certified_lower_bound) {
        std::cerr << "uncertified: " << cert.failure_reason << "\n";
        return kFailed;
    }
    if (!json) {
        std::cout << "n = " << cert.n << "\n";
        std::cout << "area enclosure     [" << shortest_decimal(cert.area.lo()) << ", " << shortest_decimal(cert.area.hi())
                  << "]\n";
        std::cout << "diameter^2         [" << shortest_decimal(cert.diameter_sq.lo()) << ", "
                  << shortest_decimal(cert.diameter_sq.hi()) << "]\n";
        std::cout << "bracket            " << fixed(*cert.certified_lower_bound) << " <= A*_" << cert.n
                  << " <= " << fixed(upper_bound_area(cert.n)) << "\n";
        if (!out_path.empty()) {
            std::cout << "certificate -> " << out_path << "\n";
        }
    }
    return kOk;
}

int cmd_relax(int n, const BuildFlags& flags, bool allow_large, int order, const std::string& sdpa_path,
              bool show_stats, bool json)
{
    check_n(n, allow_large);
    if (order < 1 || order > 3) {
        throw UsageError("--order must be 1, 2 or 3");
    }
    const QuadraticProgram p = build_program(n, build_options(flags));
    const SDPInstance s = build_relaxation(p, order);
    const RelaxationStats st = stats(s);
    if (!sdpa_path.empty()) {
        write_file(sdpa_path, export_sdpa(s));
        write_file(sdpa_path + ".json", export_sidecar_json(s));
    }
    if (json) {
        ordered_json j;
        j["n"] = n;
        j["symmetric"] = p.symmetric;
        j["order"] = order;
        j["moment_vars"] = st.num_moment_vars;
        j["moment_matrix"] = st.moment_matrix_size;
        j["localizing_blocks"] = st.localizing_blocks;
        j["localizing_sizes"] = st.localizing_sizes;
        j["nonzero_entries"] = st.nonzero_entries;
        std::cout << j.dump(2) << "\n";
        return kOk;
    }
    if (show_stats || sdpa_path.empty()) {
        std::cout << "moment vars: " << st.num_moment_vars << ", moment matrix: " << st.moment_matrix_size << "\n";
        std::cout << "localizing blocks: " << st.localizing_blocks;
        if (!st.localizing_sizes.empty()) {
            std::cout << " (size " << st.localizing_sizes.front() << " each)";
        }
        std::cout << "\nnonzero coefficients: " << st.nonzero_entries << "\n";
    }
    if (!sdpa_path.empty()) {
        std::cout << "sdpa -> " << sdpa_path << ", moments -> " << sdpa_path << ".json\n";
    }
    return kOk;
}

int cmd_render(const std::string& path, bool no_graph, const std::string& out_path)
{
    const Candidate c = load_candidate(path);
    const Polygon poly = c.polygon ? *c.polygon : assignment_to_polygon(c.n, *c.assignment);
    std::optional<DiameterGraph> g;
    if (!no_graph) {
        try {
            g = diameter_graph(poly);
        } catch (const NotSmallPolygon& e) {
            std::cerr << "warning: " << e.what() << "; drawing without chords\n";
        }
    }
    const std::string svg = render_svg(poly, g);
    if (out_path.empty()) {
        std::cout << svg;
    } else {
        write_file(out_path, svg);
        std::cout << "svg -> " << out_path << "\n";
    }
    return kOk;
}

double sigma_aware_distance(const ReferenceOptimum& ref, const std::vector<double>& x)
{
    auto dist = [&](const std::vector<double>& v) {
        double d = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            d = std::max(d, std::abs(v[i] - ref.x[i]));
        }
        return d;
    };
    double d = dist(x);
    if (!ref.symmetric && ref.n >= 6) {
        d = std::min(d, dist(apply_sigma(Assignment{x, std::nullopt}, ref.n).x));
    }
    return d;
}

int cmd_reproduce(bool json, int starts, std::uint64_t seed, const std::string& out_path)
{
    if (starts < 1) {
        throw UsageError("--starts must be >= 1");
    }
    ordered_json rows = ordered_json::array();
    bool all_pass = true;
    if (!json) {
        std::printf("%-4s %-9s %-12s %-12s %-10s %-10s %-7s %s\n", "n", "program", "area", "reference", "|diff|",
                    "x err", "time", "status");
    }
    for (const ReferenceOptimum& ref : reference_optima()) {
        BuildOptions o;
        o.symmetric = ref.symmetric;
        const QuadraticProgram p = build_program(ref.n, o);
        SolverConfig cfg;
        cfg.starts = starts;
        cfg.rng_seed = seed;
        cfg.threads = thread_count();
        const auto t0 = std::chrono::steady_clock::now();
        ordered_json row;
        row["n"] = ref.n;
        row["symmetric"] = ref.symmetric;
        row["reference_area"] = ref.area;
        row["tolerance"] = ref.area_tol;
        row["source"] = std::string(ref.source);
        bool pass = false;
        double area = std::nan("");
        double xerr = std::nan("");
        try {
            const SolveResult r = solve(p, cfg);
            area = r.objective;
            pass = std::abs(area - ref.area) <= ref.area_tol;
            if (!ref.x.empty()) {
                xerr = sigma_aware_distance(ref, r.best.x);
                pass = pass && xerr <= ref.x_tol;
                row["reference_x"] = ref.x;
            }
            row["area"] = area;
            row["x"] = r.best.x;
            row["x_error"] = ref.x.empty() ? ordered_json(nullptr) : ordered_json(xerr);
        } catch (const InfeasibleError& e) {
            row["area"] = nullptr;
            row["error"] = e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        row["pass"] = pass;
        all_pass = all_pass && pass;
        rows.push_back(row);
        if (!json) {
            std::printf("%-4d %-9s %-12s %-12s %-10s %-10s %-7s %s\n", ref.n, ref.symmetric ? "symmetric" : "full",
                        std::isnan(area) ? "-" : fixed(area).c_str(), fixed(ref.area).c_str(),
                        std::isnan(area) ? "-" : sci(std::abs(area - ref.area)).c_str(),
                        std::isnan(xerr) ? "-" : sci(xerr).c_str(), (fixed(secs, 2) + "s").c_str(),
                        pass ? "PASS" : "FAIL");
        }
    }
    ordered_json doc;
    doc["version"] = "maxpoly-reproduce/1";
    doc["reference_data"] = std::string(kReferenceDataVersion);
    doc["starts"] = starts;
    doc["rng_seed"] = seed;
    doc["rows"] = rows;
    doc["all_pass"] = all_pass;
    const std::string text = doc.dump(2) + "\n";
    if (!out_path.empty()) {
        write_file(out_path, text);
    }
    if (json) {
        std::cout << text;
    } else {
        std::cout << (all_pass ? "all rows pass\n" : "some rows FAILED\n");
    }
    return all_pass ? kOk : kFailed;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Largest small polygons: build, solve, certify and relax the even-n programs"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "maxpoly 1.0");

    int n = 0;
    bool allow_large = false;
    bool json = false;
    std::string out_path;
    BuildFlags flags;
    int starts = 64;
    std::uint64_t seed = 0;
    int order = 2;
    std::string sdpa_path;
    bool show_stats = false;
    std::string input;
    bool no_graph = false;

    auto* build = app.add_subcommand("build", "Write the quadratic program as JSON");
    build->add_option("n", n, "Number of vertices (even)")->required();
    add_build_flags(build, flags);
    build->add_flag("--allow-large", allow_large, "Permit n > 24");
    build->add_option("--out", out_path, "Output file (default: stdout)");

    auto* solve_cmd = app.add_subcommand("solve", "Multistart local solve");
    solve_cmd->add_option("n", n, "Number of vertices (even)")->required();
    add_build_flags(solve_cmd, flags);
    solve_cmd->add_flag("--allow-large", allow_large, "Permit n > 24");
    solve_cmd->add_option("--starts", starts, "Number of starts")->capture_default_str();
    solve_cmd->add_option("--seed", seed, "Seed for the perturbed starts")->capture_default_str();
    solve_cmd->add_flag("--json", json, "Print the result JSON");
    solve_cmd->add_option("--out", out_path, "Write the result JSON to this file");

    auto* certify_cmd = app.add_subcommand("certify", "Interval certification of a solved candidate");
    certify_cmd->add_option("file", input, "Result JSON or polygon JSON")->required();
    certify_cmd->add_flag("--json", json, "Print the certificate JSON");
    certify_cmd->add_option("--out", out_path, "Write the certificate JSON to this file");

    auto* relax = app.add_subcommand("relax", "Build the moment relaxation");
    relax->add_option("n", n, "Number of vertices (even)")->required();
    add_build_flags(relax, flags);
    relax->add_flag("--allow-large", allow_large, "Permit n > 24");
    relax->add_option("--order", order, "Relaxation order (1-3)")->capture_default_str();
    relax->add_option("--sdpa", sdpa_path, "Write SDPA sparse file here (sidecar: <path>.json)");
    relax->add_flag("--stats", show_stats, "Print sizes");
    relax->add_flag("--json", json, "Print sizes as JSON");

    auto* render = app.add_subcommand("render", "Draw a candidate as SVG");
    render->add_option("file", input, "Result JSON or polygon JSON")->required();
    render->add_flag("--no-graph", no_graph, "Omit diameter-graph chords");
    render->add_option("--out", out_path, "Output file (default: stdout)");

    auto* reproduce = app.add_subcommand("reproduce", "Re-run the reference optima and compare");
    reproduce->add_flag("--json", json, "Print rows as JSON");
    reproduce->add_option("--starts", starts, "Starts per row")->capture_default_str();
    reproduce->add_option("--seed", seed, "Seed for the perturbed starts")->capture_default_str();
    reproduce->add_option("--out", out_path, "Write the JSON rows to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*build) {
            return cmd_build(n, flags, allow_large, out_path);
        }
        if (*solve_cmd) {
            return cmd_solve(n, flags, allow_large, starts, seed, json, out_path);
        }
        if (*certify_cmd) {
            return cmd_certify(input, json, out_path);
        }
        if (*relax) {
            return cmd_relax(n, flags, allow_large, order, sdpa_path, show_stats, json);
        }
        if (*render) {
            return cmd_render(input, no_graph, out_path);
        }
        if (*reproduce) {
            return cmd_reproduce(json, starts, seed, out_path);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n" << app.help();
        return kUsage;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const ParseError& e) {
        std::cerr << "error: " << input << ": " << e.what() << "\n";
        return kIo;
    } catch (const maxpoly::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailed;
    }
    return kUsage;
}
