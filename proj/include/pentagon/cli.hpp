#pragma once

// Command-line front end. Reports go to JSON on stdout, sampled loops to CSV,
// animation frames to SVG.

#include <pentagon/phase.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace pentagon {

namespace io {

using nlohmann::json;

/// Writes content to path through a temporary sibling and a rename.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot open " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorCode::IoError, "cannot rename to " + path.string());
    }
}

inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline const char* csv_header = "t,alpha1,alpha2,alpha3,psi1,psi2,psi3,psi4,psi5,theta_dot,theta";

/// One row per sample; alpha is the continuous lift used by the loop.
inline std::string loop_csv(const ParametrizedLoop& loop, double theta0 = 0.0, bool degrees = false) {
    const Trajectory tr = reconstruct_motion(loop, theta0);
    const double k = degrees ? 180.0 / pi : 1.0;
    std::ostringstream os;
    os << csv_header << '\n';
    const auto& s = loop.samples();
    for (std::size_t i = 0; i < s.size(); ++i) {
        os << fmt17(s[i].t);
        for (double a : s[i].alpha) os << ',' << fmt17(k * a);
        for (double p : s[i].psi.psi) os << ',' << fmt17(k * p);
        os << ',' << fmt17(k * tr.theta_dot[i]) << ',' << fmt17(k * tr.theta[i]) << '\n';
    }
    return os.str();
}

inline void emit_loop_csv(const ParametrizedLoop& loop, const std::filesystem::path& path, bool degrees = false) {
    write_atomic(path, loop_csv(loop, 0.0, degrees));
}

struct CsvRow {
    double t;
    Vec3 alpha;
    std::array<double, 5> psi;
    double theta_dot;
    double theta;
};

inline std::vector<CsvRow> read_loop_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    if (line != csv_header) throw Error(ErrorCode::InvalidInput, "unexpected CSV header");
    std::vector<CsvRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::array<double, 11> v{};
        std::stringstream ss(line);
        std::string cell;
        for (double& x : v) {
            if (!std::getline(ss, cell, ',')) throw Error(ErrorCode::InvalidInput, "short CSV row");
            x = std::stod(cell);
        }
        rows.push_back({v[0], {v[1], v[2], v[3]}, {v[4], v[5], v[6], v[7], v[8]}, v[9], v[10]});
    }
    return rows;
}

inline const std::array<const char*, 5> vertex_colors{"green", "red", "blue", "black", "yellow"};

inline std::string frame_svg(const VertexConfig& v) {
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-2 -2 4 4\" width=\"400\" height=\"400\">\n"
       << "<g transform=\"scale(1,-1)\">\n<polygon fill=\"none\" stroke=\"gray\" stroke-width=\"0.02\" points=\"";
    for (std::size_t i = 0; i < 5; ++i)
        os << (i ? " " : "") << fmt17(v.z[i].real()) << ',' << fmt17(v.z[i].imag());
    os << "\"/>\n";
    for (std::size_t i = 0; i < 5; ++i)
        os << "<circle cx=\"" << fmt17(v.z[i].real()) << "\" cy=\"" << fmt17(v.z[i].imag())
           << "\" r=\"0.06\" fill=\"" << vertex_colors[i] << "\"/>\n";
    os << "</g>\n</svg>\n";
    return os.str();
}

/// count frames at t_k = k tau / (count - 1) of the zero-momentum motion.
inline std::vector<VertexConfig> motion_frames(const ParametrizedLoop& loop, int count, double theta0 = 0.0) {
    if (count < 2) throw Error(ErrorCode::InvalidInput, "frame count must be at least 2");
    require_closed(loop);
    std::vector<VertexConfig> out;
    double theta = theta0, t_prev = 0.0;
    for (int k = 0; k < count; ++k) {
        const double t = loop.tau() * k / (count - 1);
        if (k > 0) theta += phase_integral(loop, t_prev, t, 16);
        t_prev = t;
        const PsiShape psi = alpha_to_psi(TorusPoint::from(loop.state(t).alpha), 1e-8);
        out.push_back(vertices_from_shape(psi, theta));
    }
    return out;
}

inline void emit_frames(const std::vector<VertexConfig>& frames, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string());
    for (std::size_t k = 0; k < frames.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "frame_%04zu.svg", k);
        write_atomic(dir / name, frame_svg(frames[k]));
    }
}

inline json series_json(const FourierSeries& f) {
    return {{"omega", f.omega}, {"cos", f.cos_coeffs}, {"sin", f.sin_coeffs}};
}

}  // namespace io

namespace cli {

using nlohmann::json;

struct LoopOptions {
    std::string loop = "pentagram";
    double rtol = 1e-10;
    double atol = 1e-12;
    std::size_t samples = 0;  // 0 selects the loop's default
};

inline ParametrizedLoop build_loop(const LoopOptions& o) {
    if (o.loop == "convex" || o.loop == "convex_boundary") return convex_boundary_loop(o.samples ? o.samples : 4100);
    TraceOptions t;
    t.ode.rtol = o.rtol;
    t.ode.atol = o.atol;
    if (o.samples) t.samples = o.samples;
    if (o.loop == "pentagram") return pentagram_loop(t);
    if (o.loop == "pentagon") return pentagon_loop(t);
    throw Error(ErrorCode::InvalidInput, "unknown loop '" + o.loop + "'");
}

inline std::vector<double> parse_triple(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(cell, &used));
            if (used != cell.size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidInput, "not a number: '" + cell + "'");
        }
    }
    if (v.size() != 3) throw Error(ErrorCode::InvalidInput, "expected three comma-separated values");
    return v;
}

inline json shape_report(const PsiShape& s, bool degrees) {
    const double k = degrees ? 180.0 / pi : 1.0;
    const AlphaPoint a = psi_to_alpha(s);
    const VertexConfig v = vertices_from_shape(s, 0.0);
    json verts = json::array();
    for (const Complex& z : v.z) verts.push_back({z.real(), z.imag()});
    json psi = json::array(), alpha = json::array();
    for (double p : s.psi) psi.push_back(k * p);
    for (double x : a.vec()) alpha.push_back(k * x);
    const Canonical can = canonicalize(a);
    return {{"psi", psi},
            {"alpha", alpha},
            {"vertices", verts},
            {"inertia", inertia(a)},
            {"B", magnetic_B(a)},
            {"C", constraint_C(a)},
            {"angle_sum_class", angle_sum_class(s)},
            {"orbit_length", orbit(s, SymmetryGroup::D5plus).size()},
            {"orbit_length_d10", orbit(s, SymmetryGroup::D10).size()},
            {"convex", is_convex(s)},
            {"in_fundamental_region", FundamentalRegion::instance().contains(a)},
            {"canonical_element", {{"r", can.element.r}, {"v", can.element.v}, {"m", can.element.m}}}};
}

/// Runs one command line; returns the process exit status.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Equilateral pentagon shape space, optimal loops and geometric phase"};
    app.require_subcommand(1);
    bool degrees = false;
    app.add_flag("--degrees", degrees, "display angles in degrees");

    LoopOptions lo;
    auto add_loop_options = [&lo](CLI::App* sub) {
        sub->add_option("--loop", lo.loop, "pentagram, pentagon or convex")
            ->check(CLI::IsMember({"pentagram", "pentagon", "convex", "convex_boundary"}));
        sub->add_option("--rtol", lo.rtol, "integrator relative tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--atol", lo.atol, "integrator absolute tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--samples", lo.samples, "samples per period")->check(CLI::Range(2, 1 << 22));
    };

    auto* shape = app.add_subcommand("shape", "inspect one shape");
    std::string psi_arg, alpha_arg;
    auto* psi_opt = shape->add_option("--psi", psi_arg, "psi2,psi3,psi4 (psi4 snapped to the nearest solution)");
    auto* alpha_opt = shape->add_option("--alpha", alpha_arg, "alpha1,alpha2,alpha3 on the surface");
    psi_opt->excludes(alpha_opt);
    shape->require_option(1);

    auto* critical = app.add_subcommand("critical", "critical points of the moment of inertia");

    auto* trace = app.add_subcommand("trace", "trace a loop and write its samples as CSV");
    add_loop_options(trace);
    std::string csv_path;
    trace->add_option("--out", csv_path, "CSV output path")->required();

    auto* phase = app.add_subcommand("phase", "geometric phase report");
    add_loop_options(phase);

    auto* fourier = app.add_subcommand("fourier", "Fourier coefficients of psi5 or thetadot");
    add_loop_options(fourier);
    std::string signal = "psi5";
    int terms = -1;
    fourier->add_option("--signal", signal, "psi5 or theta_dot")->check(CLI::IsMember({"psi5", "theta_dot"}));
    fourier->add_option("--terms", terms, "truncation N")->check(CLI::Range(0, 1000));

    auto* frames = app.add_subcommand("frames", "SVG frames of the optimal motion");
    add_loop_options(frames);
    int count = 100;
    std::string frame_dir;
    frames->add_option("--count", count, "number of frames")->check(CLI::Range(2, 100000));
    frames->add_option("--dir", frame_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    const double k = degrees ? 180.0 / pi : 1.0;
    try {
        if (shape->parsed()) {
            PsiShape s;
            if (!psi_arg.empty()) {
                const auto v = parse_triple(psi_arg);
                const Psi4Solutions sol = solve_psi4(v[0], v[1]);
                if (sol.count() == 0) throw Error(ErrorCode::InvalidInput, "no closing psi4 for these psi2, psi3");
                double best = sol.values[0];
                for (int i = 1; i < sol.count(); ++i) {
                    const double cand = sol.values[static_cast<std::size_t>(i)];
                    if (std::abs(wrap_angle(cand - v[2])) < std::abs(wrap_angle(best - v[2]))) best = cand;
                }
                s = shape_from_psi234(v[0], v[1], best);
            } else {
                const auto v = parse_triple(alpha_arg);
                s = alpha_to_psi({v[0], v[1], v[2]}, 1e-8);
            }
            out << shape_report(s, degrees).dump(2) << '\n';
        } else if (critical->parsed()) {
            const CriticalStructure cs = inertia_critical_points();
            json pts = json::array();
            for (const CriticalPoint& c : cs.points) {
                json alpha = json::array();
                for (double x : c.point.vec()) alpha.push_back(k * x);
                pts.push_back({{"type", to_string(c.type)}, {"value", c.value}, {"alpha", alpha}});
            }
            out << json{{"points", pts},
                         {"minima", cs.minima},
                         {"saddles", cs.saddles},
                         {"maxima", cs.maxima},
                         {"euler_characteristic", cs.euler_characteristic()}}
                       .dump(2)
                << '\n';
        } else if (trace->parsed()) {
            const ParametrizedLoop loop = build_loop(lo);
            io::emit_loop_csv(loop, csv_path, degrees);
            const LoopResiduals r = loop.residuals();
            out << json{{"loop", to_string(loop.label())},
                        {"tau", loop.tau()},
                        {"rows", loop.samples().size()},
                        {"path", csv_path},
                        {"residuals", {{"closure", r.closure}, {"max_C", r.max_C}, {"max_B", r.max_B}}}}
                       .dump(2)
                << '\n';
        } else if (phase->parsed() || fourier->parsed()) {
            const ParametrizedLoop loop = build_loop(lo);
            const PhaseReport rep = geometric_phase(loop);
            const Trajectory tr = reconstruct_motion(loop, 0.0);
            FourierSeries f;
            if (fourier->parsed() && signal == "psi5")
                f = fourier_cosine_psi5(loop, terms < 0 ? 14 : terms);
            else
                f = fourier_theta_dot(loop, terms < 0 ? 10 : terms);
            json report{{"loop", to_string(loop.label())},
                        {"delta_theta", k * rep.delta_theta},
                        {"tau", loop.tau()},
                        {"omega", loop.omega()},
                        {"fourier", io::series_json(f)},
                        {"residuals",
                         {{"closure", rep.closure},
                          {"max_C", rep.max_C},
                          {"max_B", rep.max_B},
                          {"max_L", max_angular_momentum(loop, tr)}}}};
            if (fourier->parsed()) report["signal"] = signal;
            out << report.dump(2) << '\n';
        } else if (frames->parsed()) {
            const ParametrizedLoop loop = build_loop(lo);
            io::emit_frames(io::motion_frames(loop, count), frame_dir);
            out << json{{"loop", to_string(loop.label())}, {"frames", count}, {"dir", frame_dir}}.dump(2) << '\n';
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.is_input_error() ? 2 : 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}

}  // namespace cli

}  // namespace pentagon
