#include "hjb/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "hjb/errors.hpp"
#include "hjb/exact1d.hpp"
#include "hjb/grid.hpp"
#include "hjb/lemma_lab.hpp"
#include "hjb/matrix.hpp"
#include "hjb/parallel.hpp"
#include "hjb/report.hpp"
#include "hjb/value_direct.hpp"

namespace hjb {
namespace {

using json = nlohmann::ordered_json;

std::string short_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

json matrix_json(const SymMatrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.dim(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.dim(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("cannot parse " + what + " '" + text + "'");
        }
    }
    if (out.empty()) throw ConfigError("empty " + what);
    return out;
}

/// Everything a subcommand needs to echo its configuration and emit output.
struct Session {
    CLI::App* sub = nullptr;
    std::ostream& out;
    std::ostream& err;
    bool timing = false;

    Metadata metadata() const {
        Metadata m;
        m.command = sub->get_name();
        for (const CLI::Option* opt : sub->get_options()) {
            if (opt->get_lnames().empty()) continue;
            const std::string& name = opt->get_lnames().front();
            if (name == "help") continue;
            std::string value;
            if (opt->get_type_size() == 0) {
                value = opt->count() > 0 ? "true" : "false";
            } else if (opt->count() > 0) {
                const auto res = opt->reduced_results();
                for (std::size_t i = 0; i < res.size(); ++i) value += (i ? ";" : "") + res[i];
            } else {
                value = opt->get_default_str();
            }
            m.config.emplace_back(name, value);
        }
        return m;
    }

    /// Writes the document to `path` (or `out` when empty); the summary line
    /// goes to `out` when the document went to a file, otherwise to `err`.
    void emit(const std::string& document, const std::string& path, const std::string& summary) const {
        if (path.empty()) {
            out << document;
            if (!summary.empty()) err << summary << '\n';
        } else {
            std::ofstream f(path, std::ios::binary);
            if (!f) throw ConfigError("cannot open output file '" + path + "'");
            f << document;
            if (!f) throw ConfigError("failed writing '" + path + "'");
            if (!summary.empty()) out << summary << '\n';
        }
    }
};

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// ---------------------------------------------------------------- matrix

struct MatrixArgs {
    std::string x;
    bool inv = false;
    std::size_t probe = 0;
    std::size_t dim = 2;
    std::string box = "-10,10";
    std::uint64_t seed = 42;
    std::string out;
};

int cmd_matrix(const MatrixArgs& a, const Session& s) {
    json doc = json_envelope(s.metadata());
    std::string summary = "matrix";
    bool ok = true;
    if (a.x.empty() && a.probe == 0) throw ConfigError("matrix needs --x or --probe");
    if (!a.x.empty()) {
        const PositionVector x(parse_list(a.x, "--x"));
        const SymMatrix e = build_interaction_matrix(x);
        const SymMatrix root = x.size() == 2 ? sqrt_2d(x) : sqrt_psd_general(e);
        const double square_error = max_abs_entry_diff(root.squared(), e);
        doc["x"] = x.vec();
        doc["E"] = matrix_json(e);
        doc["sqrt_E"] = matrix_json(root);
        doc["sqrt_method"] = x.size() == 2 ? "closed-form" : "spectral";
        doc["square_error"] = square_error;
        doc["min_eigenvalue_E"] = min_eigenvalue(e);
        if (a.inv) {
            if (x.size() != 2) throw DimensionMismatch("--inv is only available for N = 2");
            const SymMatrix inv = inv_sqrt_2d(x);
            doc["inv_sqrt_E"] = matrix_json(inv);
            const auto product = inv * root;
            doc["inverse_error"] = max_abs_entry_diff(product, SquareMatrix::identity(2));
        }
        ok = ok && square_error <= 1e-10;
        summary += " N=" + std::to_string(x.size()) + " |sqrtE|=" + short_number(operator_norm(root)) +
                   " square_error=" + short_number(square_error);
    }
    if (a.probe > 0) {
        const auto range = parse_list(a.box, "--box");
        if (range.size() != 2) throw ConfigError("--box takes lo,hi");
        const RegularityConstants c = probe_constants(a.probe, Box::cube(a.dim, range[0], range[1]), a.seed);
        doc["constants"] = {{"L0", c.L0},
                            {"C0", c.C0},
                            {"L1", c.L1},
                            {"C1", c.C1},
                            {"root_bound_excess", c.root_bound_excess},
                            {"pairs", c.pairs}};
        const bool c1_ok = c.C1 <= std::sqrt(c.C0) + 1e-12 && (a.dim != 2 || c.C1 <= std::sqrt(2.0) + 1e-9);
        const bool root_ok = c.root_bound_excess <= 1e-10;
        doc["checks"] = {{"C1_le_sqrt_C0", c1_ok}, {"root_difference_bound", root_ok}};
        ok = ok && c1_ok && root_ok;
        summary += " L0=" + short_number(c.L0) + " C0=" + short_number(c.C0) + " L1=" + short_number(c.L1) +
                   " C1=" + short_number(c.C1);
    }
    doc["pass"] = ok;
    s.emit(doc.dump(2) + "\n", a.out, summary);
    return ok ? 0 : 3;
}

// ---------------------------------------------------------------- peakons

struct PeakonArgs {
    std::string q;
    std::string p;
    double t_end = 10.0;
    double step = 1e-5;
    double gap = kCollisionGap;
    std::size_t stride = 100;
    double h_tol = 1e-6;
    double p_tol = 1e-8;
    std::string format = "csv";
    std::string out;
};

int cmd_peakons(const PeakonArgs& a, const Session& s) {
    const auto q = parse_list(a.q, "--q");
    const auto p = parse_list(a.p, "--p");
    if (q.size() != p.size()) throw ConfigError("--q and --p need the same length");
    if (a.stride == 0) throw ConfigError("--stride must be positive");
    const Stopwatch clock;
    const PeakonFlow flow = peakon_flow(make_peakon_state(q, p), a.t_end, a.step, a.gap);

    const PeakonState& first = flow.states.front();
    double h_drift = 0.0;
    double p_drift = 0.0;
    double p0 = 0.0;
    for (double v : first.p) p0 += v;
    for (const auto& st : flow.states) {
        h_drift = std::max(h_drift, std::abs(st.h - first.h));
        double total = 0.0;
        for (double v : st.p) total += v;
        p_drift = std::max(p_drift, std::abs(total - p0));
    }
    const bool ok = h_drift <= a.h_tol && p_drift <= a.p_tol;
    const PeakonState& last = flow.states.back();

    std::string summary = "peakons N=" + std::to_string(q.size()) + " t_final=" + short_number(last.t) +
                          (flow.collided ? " collided" : "") + " H_drift=" + short_number(h_drift) +
                          " momentum_drift=" + short_number(p_drift);
    const Metadata meta = s.metadata();
    std::ostringstream doc;
    if (a.format == "csv") {
        PeakonFlow thinned;
        for (std::size_t i = 0; i < flow.states.size(); i += a.stride) thinned.states.push_back(flow.states[i]);
        if ((flow.states.size() - 1) % a.stride != 0) thinned.states.push_back(flow.states.back());
        write_peakon_csv(doc, thinned, meta);
    } else if (a.format == "json") {
        json j = json_envelope(meta);
        j["steps"] = flow.states.size() - 1;
        j["collided"] = flow.collided;
        j["collision_time"] = flow.collision_time ? json(*flow.collision_time) : json(nullptr);
        j["H0"] = first.h;
        j["H_drift"] = h_drift;
        j["momentum_drift"] = p_drift;
        j["final"] = {{"t", last.t}, {"q", last.q}, {"p", last.p}, {"H", last.h}};
        j["pass"] = ok;
        if (s.timing) j["runtime_s"] = clock.seconds();
        doc << j.dump(2) << "\n";
    } else {
        throw ConfigError("peakons --format must be csv or json");
    }
    s.emit(doc.str(), a.out, summary);
    return ok ? 0 : 3;
}

// ---------------------------------------------------------------- value

struct ValueArgs {
    std::string sigma = "sqrt-abs-1d";
    std::string g = "clamp";
    std::string y0;
    double t0 = 0.0;
    double T = 1.0;
    std::size_t pieces = 16;
    std::size_t population = 64;
    std::size_t elites = 8;
    std::size_t iterations = 60;
    std::size_t substeps = 4;
    std::size_t polish = 2000;
    double dpp = 0.0;
    std::uint64_t seed = 42;
    std::string trajectory;
    std::string out;
};

json control_json(const PiecewiseConstantControl& c) {
    return {{"t_start", c.t_start()}, {"t_end", c.t_end()}, {"values", c.values()}, {"l2_norm", c.l2_norm()}};
}

json diagnostics_json(const DirectDiagnostics& d) {
    return {{"iterations", d.iterations}, {"population", d.population}, {"evaluations", d.evaluations},
            {"seed", d.seed},             {"control_cap", d.control_cap}, {"cem_value", d.cem_value}};
}

int cmd_value(const ValueArgs& a, const Session& s) {
    const PositionVector y0(parse_list(a.y0, "--y0"));
    const SigmaField sigma = sigma_by_label(a.sigma, y0.size());
    const TerminalCost g = TerminalCost::parse(a.g);
    if (!(a.t0 <= a.T)) throw ConfigError("value needs t0 <= T");
    DirectOptions opt;
    opt.pieces = a.pieces;
    opt.population = a.population;
    opt.elites = a.elites;
    opt.iterations = a.iterations;
    opt.substeps = a.substeps;
    opt.polish_evaluations = a.polish;
    opt.seed = a.seed;

    const Stopwatch clock;
    const ValueEstimate est = estimate_value(sigma, g, y0, a.t0, a.T, opt);
    const double g_y0 = g(y0.coords());
    const bool bounds_ok = est.within_bounds(g_y0, g.bound());

    json doc = json_envelope(s.metadata());
    doc["value"] = est.value;
    doc["bound_check"] = {{"g_at_y0", g_y0}, {"g_bound", g.bound()}, {"pass", bounds_ok}};
    doc["control"] = est.control ? control_json(*est.control) : json(nullptr);
    doc["diagnostics"] = diagnostics_json(est.diagnostics);
    if (sigma.label == "sqrt-abs-1d" && g.describe() == TerminalCost::clamp_linear().describe()) {
        // terminal problem on [t0, T] is the initial problem at time T - t0
        try {
            const double exact = exact_u(y0[0], a.T - a.t0);
            doc["exact"] = {{"value", exact}, {"error", std::abs(est.value - exact)}};
        } catch (const NotCovered&) {
            doc["exact"] = nullptr;
        }
    }
    std::string summary = "value v=" + short_number(est.value) + " g(y0)=" + short_number(g_y0) +
                          (bounds_ok ? " bounds ok" : " BOUNDS VIOLATED");
    if (a.dpp > 0.0) {
        const DppResult d = dpp_check(sigma, g, y0, a.t0, a.dpp, a.T, opt);
        doc["dpp"] = {{"h", a.dpp},
                      {"residual", d.residual},
                      {"full_value", d.full_value},
                      {"split_value", d.split_value},
                      {"best_candidate", d.best_candidate},
                      {"candidate_values", d.candidate_values},
                      {"full_diagnostics", diagnostics_json(d.full.diagnostics)},
                      {"tail_diagnostics", diagnostics_json(d.best_tail.diagnostics)}};
        summary += " dpp_residual=" + short_number(d.residual);
    }
    if (s.timing) doc["runtime_s"] = clock.seconds();
    if (!a.trajectory.empty() && est.trajectory) {
        std::ofstream f(a.trajectory, std::ios::binary);
        if (!f) throw ConfigError("cannot open trajectory file '" + a.trajectory + "'");
        write_trajectory_csv(f, *est.trajectory, s.metadata());
    }
    s.emit(doc.dump(2) + "\n", a.out, summary);
    return bounds_ok ? 0 : 3;
}

// ---------------------------------------------------------------- grid

struct GridArgs {
    std::size_t dim = 1;
    std::string sigma;
    std::string g = "clamp";
    std::string domain = "-6,6";
    std::string nx = "301";
    std::size_t nt = 100;
    double T = 1.5;
    std::string scheme = "sl";
    std::string orientation = "initial";
    std::size_t radial = 0;
    std::size_t angular = 16;
    std::vector<std::string> reports;
    std::string format = "json";
    long slice = -1;
    std::string out;
};

struct GridChecks {
    double sup = 0.0;
    bool max_principle = true;
    double monotone_violation = 0.0;
};

GridChecks check_field(const ValueField& f, const TerminalCost& g, bool check_monotone) {
    GridChecks c;
    c.sup = f.sup_norm();
    constexpr double eps = 1e-9;
    c.max_principle = c.sup <= g.bound() + eps && f.min_value() >= g.lower() - eps && f.max_value() <= g.upper() + eps;
    if (check_monotone) {
        // moving one slice away from the data never increases the value
        for (std::size_t level = 0; level < f.nt(); ++level) {
            const std::size_t a = f.orientation() == Orientation::Initial ? level : f.nt() - level;
            const std::size_t b = f.orientation() == Orientation::Initial ? level + 1 : f.nt() - level - 1;
            for (std::size_t n = 0; n < f.nodes(); ++n)
                c.monotone_violation = std::max(c.monotone_violation, f.at(b, n) - f.at(a, n));
        }
    }
    return c;
}

int cmd_grid(const GridArgs& a, const Session& s) {
    if (a.dim == 0) throw ConfigError("--dim must be positive");
    const std::string label = a.sigma.empty() ? (a.dim == 1 ? "sqrt-abs-1d" : "peakon") : a.sigma;
    const SigmaField sigma = sigma_by_label(label, a.dim);
    if (sigma.dim != a.dim) throw ConfigError("sigma '" + label + "' does not act in dimension " + std::to_string(a.dim));
    const TerminalCost g = TerminalCost::parse(a.g);
    const auto range = parse_list(a.domain, "--domain");
    if (range.size() != 2) throw ConfigError("--domain takes lo,hi (applied on every axis)");
    const Box domain = Box::cube(a.dim, range[0], range[1]);
    std::vector<std::size_t> nx;
    for (double v : parse_list(a.nx, "--nx")) {
        if (v < 3 || v != std::floor(v)) throw ConfigError("--nx entries must be integers >= 3");
        nx.push_back(static_cast<std::size_t>(v));
    }
    const Orientation orientation = orientation_from_string(a.orientation);
    if (a.scheme != "sl" && a.scheme != "lf" && a.scheme != "both") throw ConfigError("--scheme must be sl, lf or both");
    if (a.nt == 0) throw ConfigError("--nt must be positive");

    struct Report {
        std::vector<double> x;
        double t;
    };
    std::vector<Report> reports;
    for (const auto& r : a.reports) {
        auto v = parse_list(r, "--report");
        if (v.size() != a.dim + 1) throw ConfigError("--report takes x1,...,xN,t");
        const double t = v.back();
        v.pop_back();
        if (t < 0.0 || t > a.T) throw ConfigError("--report time outside [0, T]");
        reports.push_back({v, t});
    }

    // report region: the box spanned by report points, or the middle half of the domain
    Box region = Box::cube(a.dim, 0.5 * range[0], 0.5 * range[1]);
    if (!reports.empty()) {
        std::vector<double> lo(a.dim, 1e300), hi(a.dim, -1e300);
        for (const auto& r : reports)
            for (std::size_t i = 0; i < a.dim; ++i) {
                lo[i] = std::min(lo[i], r.x[i]);
                hi[i] = std::max(hi[i], r.x[i]);
            }
        for (std::size_t i = 0; i < a.dim; ++i)
            if (!(lo[i] < hi[i])) {
                lo[i] -= 1e-9;
                hi[i] += 1e-9;
            }
        region = Box(lo, hi);
    }
    const DomainCheck margin = check_domain_margin(sigma, g, domain, region, a.T);
    if (!margin.ok) s.err << "warning: " << margin.warning << '\n';

    const double dt = a.T / static_cast<double>(a.nt);
    const ControlSampleSet samples = ControlSampleSet::for_problem(a.dim, g.bound(), dt, a.radial, a.angular);

    const Stopwatch clock;
    std::optional<ValueField> sl;
    std::optional<ValueField> lf;
    double sl_seconds = 0.0;
    if (a.scheme != "lf") {
        sl = solve_semi_lagrangian(sigma, g, domain, nx, a.nt, a.T, samples, orientation);
        sl_seconds = clock.seconds();
    }
    if (a.scheme != "sl") lf = solve_lax_friedrichs(sigma, g, domain, nx, a.nt, a.T, orientation);
    const double total_seconds = clock.seconds();
    const ValueField& field = sl ? *sl : *lf;

    const bool exact_available =
        label == "sqrt-abs-1d" && g.describe() == TerminalCost::clamp_linear().describe();
    // u(x, t) of the initial problem, read in the field's orientation
    auto exact_at = [&](double x, double t) {
        return exact_u(x, orientation == Orientation::Initial ? t : a.T - t);
    };

    Metadata meta = s.metadata();
    json doc = json_envelope(meta);
    json fields = json::array();
    bool ok = true;
    auto summarize = [&](const ValueField& f, const std::string& name, bool monotone) {
        const GridChecks c = check_field(f, g, monotone);
        const bool pass = c.max_principle && c.monotone_violation <= 0.0;
        ok = ok && pass;
        json j = {{"scheme", name},
                  {"min", f.min_value()},
                  {"max", f.max_value()},
                  {"sup_norm", c.sup},
                  {"g_bound", g.bound()},
                  {"max_principle", c.max_principle}};
        if (monotone) j["monotone_violation"] = c.monotone_violation;
        j["pass"] = pass;
        return j;
    };
    if (sl) fields.push_back(summarize(*sl, "semi-lagrangian", true));
    if (lf) fields.push_back(summarize(*lf, "lax-friedrichs", false));
    doc["fields"] = std::move(fields);
    if (sl && lf) {
        double d = 0.0;
        for (std::size_t i = 0; i < sl->values().size(); ++i) d = std::max(d, std::abs(sl->values()[i] - lf->values()[i]));
        doc["scheme_difference"] = d;
    }
    doc["domain_check"] = {{"required", margin.required}, {"available", margin.available}, {"ok", margin.ok}};

    json rep = json::array();
    std::string summary = "grid dim=" + std::to_string(a.dim) + " sup=" + short_number(field.sup_norm());
    for (const auto& r : reports) {
        json j = {{"x", r.x}, {"t", r.t}};
        if (sl) j["semi_lagrangian"] = sl->value_at(r.x, r.t);
        if (lf) j["lax_friedrichs"] = lf->value_at(r.x, r.t);
        const double v = field.value_at(r.x, r.t);
        summary += " v(";
        for (double xi : r.x) summary += short_number(xi) + ",";
        summary += short_number(r.t) + ")=" + short_number(v);
        if (exact_available) {
            try {
                const double e = exact_at(r.x[0], r.t);
                j["exact"] = e;
                j["error"] = std::abs(v - e);
                summary += " exact=" + short_number(e);
            } catch (const NotCovered&) {
                j["exact"] = nullptr;
            }
        }
        rep.push_back(std::move(j));
    }
    doc["reports"] = std::move(rep);

    // residual probe on an interior lattice of the report region
    {
        std::vector<ProbePoint> pts;
        const std::size_t per_axis = a.dim == 1 ? 17 : 5;
        std::size_t total = 1;
        for (std::size_t i = 0; i < a.dim; ++i) total *= per_axis;
        for (const double frac : {0.25, 0.5, 0.75}) {
            for (std::size_t n = 0; n < total; ++n) {
                ProbePoint p;
                std::size_t rest = n;
                for (std::size_t i = 0; i < a.dim; ++i) {
                    const double w = static_cast<double>(rest % per_axis) / static_cast<double>(per_axis - 1);
                    rest /= per_axis;
                    p.x.push_back(region.lo[i] + w * region.width(i));
                }
                p.t = frac * a.T;
                pts.push_back(std::move(p));
            }
        }
        std::function<double(std::span<const double>, double)> kink;
        if (exact_available)
            kink = [&](std::span<const double> x, double t) {
                return branch_boundary_distance(transform_A(x[0]), orientation == Orientation::Initial ? t : a.T - t);
            };
        const auto probes = pde_residual_probe(field, sigma, pts, kink, 0.25);
        double max_res = 0.0;
        double sum_res = 0.0;
        std::size_t used = 0;
        for (const auto& p : probes)
            if (p.valid && !p.near_kink) {
                max_res = std::max(max_res, std::abs(p.residual));
                sum_res += std::abs(p.residual);
                ++used;
            }
        doc["residual_probe"] = {{"points", probes.size()},
                                 {"used", used},
                                 {"max_abs", max_res},
                                 {"mean_abs", used ? sum_res / static_cast<double>(used) : 0.0}};
    }
    if (s.timing) doc["runtime_s"] = {{"semi_lagrangian", sl_seconds}, {"total", total_seconds}};
    doc["pass"] = ok;

    std::ostringstream body;
    if (a.format == "json") {
        body << doc.dump(2) << "\n";
    } else if (a.format == "csv") {
        write_field_csv(body, field, meta);
    } else if (a.format == "matrix") {
        const std::size_t k = a.slice < 0 ? (orientation == Orientation::Initial ? field.nt() : 0)
                                          : static_cast<std::size_t>(a.slice);
        write_field_matrix(body, field, k, meta);
    } else {
        throw ConfigError("grid --format must be json, csv or matrix");
    }
    summary += ok ? " checks ok" : " CHECK FAILED";
    s.emit(body.str(), a.out, summary);
    return ok ? 0 : 3;
}

// ---------------------------------------------------------------- exact1d

struct ExactArgs {
    std::vector<double> x;
    std::vector<double> t;
    std::string x_range;
    std::string format = "json";
    std::string out;
};

int cmd_exact1d(const ExactArgs& a, const Session& s) {
    std::vector<double> xs = a.x;
    if (!a.x_range.empty()) {
        const auto r = parse_list(a.x_range, "--x-range");
        if (r.size() != 3 || r[2] < 2 || r[0] >= r[1]) throw ConfigError("--x-range takes lo,hi,count with count >= 2");
        const auto n = static_cast<std::size_t>(r[2]);
        for (std::size_t i = 0; i < n; ++i)
            xs.push_back(i + 1 == n ? r[1] : r[0] + (r[1] - r[0]) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    if (xs.empty() || a.t.empty()) throw ConfigError("exact1d needs --x (or --x-range) and --t");
    const Metadata meta = s.metadata();
    std::ostringstream body;
    std::string summary;
    if (a.format == "json") {
        json doc = json_envelope(meta);
        json pts = json::array();
        for (const double t : a.t)
            for (const double x : xs) {
                const double y = transform_A(x);
                const auto v = exact_v(y, t);
                const double u = exact_u(x, t);
                json j = {{"x", x}, {"t", t}, {"u", u}, {"A_x", y}, {"branch", to_string(v.branch)}, {"v", v.value}};
                j["hopf_lax"] = t > 0.0 ? json(hopf_lax(y, t).value) : json(nullptr);
                pts.push_back(std::move(j));
                if (summary.empty()) summary = "exact1d u(" + short_number(x) + "," + short_number(t) + ")=" + short_number(u);
            }
        doc["points"] = std::move(pts);
        body << doc.dump(2) << "\n";
    } else if (a.format == "csv") {
        write_csv_header(body, meta, {"x", "t", "u"});
        for (const double t : a.t)
            for (const double x : xs) write_csv_row(body, {x, t, exact_u(x, t)});
        summary = "exact1d " + std::to_string(xs.size() * a.t.size()) + " values";
    } else {
        throw ConfigError("exact1d --format must be json or csv");
    }
    s.emit(body.str(), a.out, summary);
    return 0;
}

// ---------------------------------------------------------------- holder

struct HolderArgs {
    std::string function = "exact-u";
    double t = 3.0;
    double x0 = 0.0;
    std::string side = "left";
    double base = 1e-2;
    std::size_t levels = 20;
    std::vector<double> slope_times;
    double C = 1.0;
    double L = 1.0;
    std::string out;
};

int cmd_holder(const HolderArgs& a, const Session& s) {
    std::function<double(double)> f;
    if (a.function == "exact-u")
        f = [t = a.t](double x) { return exact_u(x, t); };
    else if (a.function == "sqrt-abs")
        f = [](double x) { return std::sqrt(std::abs(x)); };
    else if (a.function == "identity")
        f = [](double x) { return x; };
    else
        throw ConfigError("--function must be exact-u, sqrt-abs or identity");

    const HolderFit fit = holder_fit(f, a.x0, a.base, a.levels, side_from_string(a.side));
    json doc = json_envelope(s.metadata());
    doc["fit"] = {{"exponent", fit.exponent},
                  {"intercept", fit.intercept},
                  {"r2", fit.r2},
                  {"offsets", fit.offsets},
                  {"increments", fit.increments}};
    std::string summary = "holder exponent=" + short_number(fit.exponent) + " r2=" + short_number(fit.r2);
    bool ok = true;
    if (!a.slope_times.empty()) {
        std::vector<double> xs;
        for (std::size_t i = 0; i <= 8000; ++i) xs.push_back(-4.0 + 8.0 * static_cast<double>(i) / 8000.0);
        const auto checks = lipschitz_bound_check([](double x, double t) { return exact_u(x, t); }, xs, a.C, a.L,
                                                  a.slope_times);
        json arr = json::array();
        for (const auto& c : checks) {
            arr.push_back({{"t", c.t}, {"max_slope", c.max_slope}, {"bound", c.bound}, {"pass", c.ok}});
            ok = ok && c.ok;
        }
        doc["lipschitz_horizon"] = lipschitz_horizon(a.C, a.L);
        doc["slope_checks"] = std::move(arr);
        summary += ok ? " slopes ok" : " SLOPE BOUND FAILED";
    }
    doc["pass"] = ok;
    s.emit(doc.dump(2) + "\n", a.out, summary);
    return ok ? 0 : 3;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
    std::uint64_t seed = 42;
    std::size_t sequences = 20;
    std::size_t levels = 12;
    double scale = 0.1;
    std::size_t mesh = 64;
    std::size_t probe = 2000;
    std::string out;
};

int cmd_verify(const VerifyArgs& a, const Session& s) {
    VerifyOptions opt;
    opt.seed = a.seed;
    opt.sequences = a.sequences;
    opt.levels = a.levels;
    opt.scale = a.scale;
    opt.case_options.mesh = a.mesh;
    const Stopwatch clock;
    json lemma = verify_all(opt);

    json doc = json_envelope(s.metadata());
    doc["cases"] = lemma["cases"];
    bool ok = lemma["pass"].get<bool>();
    if (a.probe > 0) {
        const RegularityConstants c = probe_constants(a.probe, Box::cube(2, -10.0, 10.0), a.seed);
        const bool c1 = c.C1 <= std::sqrt(2.0) + 1e-9;
        const bool root = c.root_bound_excess <= 1e-10;
        doc["regularity"] = {{"L0", c.L0},   {"C0", c.C0}, {"L1", c.L1}, {"C1", c.C1},
                             {"root_bound_excess", c.root_bound_excess},  {"pairs", c.pairs},
                             {"C1_le_sqrt2", c1}, {"root_difference_bound", root}};
        ok = ok && c1 && root;
    }
    if (s.timing) doc["runtime_s"] = clock.seconds();
    doc["pass"] = ok;

    std::string summary = "verify";
    for (const auto& c : doc["cases"]) {
        bool case_ok = true;
        for (const auto& [name, claim] : c["claims"].items()) case_ok = case_ok && claim["pass"].get<bool>();
        summary += " case" + c["case"].get<std::string>() + (case_ok ? "=pass" : "=FAIL");
    }
    summary += ok ? " all claims pass" : " FAILED";
    s.emit(doc.dump(2) + "\n", a.out, summary);
    return ok ? 0 : 3;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Solvers and verification tools for u_t + 1/2 M(x) Du.Du = 0"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    unsigned threads = 0;
    bool timing = false;
    app.add_option("--threads", threads, "worker threads (0 = hardware)")->envname("HJB_THREADS");
    app.add_flag("--timing", timing, "include wall-clock runtimes in JSON output");

    MatrixArgs ma;
    auto* matrix = app.add_subcommand("matrix", "interaction matrix E(x), its root and regularity probes");
    matrix->add_option("--x", ma.x, "positions x1,...,xN");
    matrix->add_flag("--inv", ma.inv, "also print the inverse root (N = 2)");
    matrix->add_option("--probe", ma.probe, "number of sampled pairs for regularity constants");
    matrix->add_option("--dim", ma.dim, "dimension for --probe");
    matrix->add_option("--box", ma.box, "probe cube lo,hi");
    matrix->add_option("--seed", ma.seed);
    matrix->add_option("--out", ma.out, "output file (default stdout)");

    PeakonArgs pa;
    auto* peakons = app.add_subcommand("peakons", "multipeakon Hamiltonian flow");
    peakons->add_option("--q", pa.q, "initial positions")->required();
    peakons->add_option("--p", pa.p, "initial momenta")->required();
    peakons->add_option("--t-end", pa.t_end);
    peakons->add_option("--step", pa.step);
    peakons->add_option("--gap", pa.gap, "collision threshold");
    peakons->add_option("--stride", pa.stride, "write every k-th state");
    peakons->add_option("--h-tol", pa.h_tol, "allowed Hamiltonian drift");
    peakons->add_option("--p-tol", pa.p_tol, "allowed total momentum drift");
    peakons->add_option("--format", pa.format, "csv or json");
    peakons->add_option("--out", pa.out);

    ValueArgs va;
    auto* value = app.add_subcommand("value", "direct minimisation of the Bolza cost at one point");
    value->add_option("--sigma", va.sigma, "sqrt-abs-1d, peakon2, peakonN or peakon");
    value->add_option("--g", va.g, "terminal cost descriptor");
    value->add_option("--y0", va.y0, "initial point")->required();
    value->add_option("--t0", va.t0);
    value->add_option("--T", va.T);
    value->add_option("--pieces", va.pieces);
    value->add_option("--population", va.population);
    value->add_option("--elites", va.elites);
    value->add_option("--iterations", va.iterations);
    value->add_option("--substeps", va.substeps);
    value->add_option("--polish", va.polish, "coordinate search evaluation budget");
    value->add_option("--dpp", va.dpp, "also run the dynamic programming check with this h");
    value->add_option("--seed", va.seed);
    value->add_option("--trajectory", va.trajectory, "CSV file for the optimal trajectory");
    value->add_option("--out", va.out);

    GridArgs ga;
    auto* grid = app.add_subcommand("grid", "space-time grid solvers");
    grid->add_option("--dim", ga.dim);
    grid->add_option("--sigma", ga.sigma, "default sqrt-abs-1d in 1D, peakon otherwise");
    grid->add_option("--g", ga.g);
    grid->add_option("--domain", ga.domain, "lo,hi on every axis");
    grid->add_option("--nx", ga.nx, "nodes per axis (one value or one per axis)");
    grid->add_option("--nt", ga.nt);
    grid->add_option("--T", ga.T);
    grid->add_option("--scheme", ga.scheme, "sl, lf or both");
    grid->add_option("--orientation", ga.orientation, "initial or terminal");
    grid->add_option("--radial", ga.radial, "radial control levels (0 = default)");
    grid->add_option("--angular", ga.angular, "angular control samples (2D)");
    grid->add_option("--report", ga.reports, "point x1,...,xN,t to report (repeatable)");
    grid->add_option("--format", ga.format, "json, csv or matrix");
    grid->add_option("--slice", ga.slice, "slice for --format matrix (default: last computed)");
    grid->add_option("--out", ga.out);

    ExactArgs ea;
    auto* exact = app.add_subcommand("exact1d", "closed-form solution of the 1D problem");
    exact->add_option("--x", ea.x)->delimiter(',');
    exact->add_option("--t", ea.t)->delimiter(',');
    exact->add_option("--x-range", ea.x_range, "lo,hi,count");
    exact->add_option("--format", ea.format, "json or csv");
    exact->add_option("--out", ea.out);

    HolderArgs ha;
    auto* holder = app.add_subcommand("holder", "Holder exponent fits and Lipschitz bound checks");
    holder->add_option("--function", ha.function, "exact-u, sqrt-abs or identity");
    holder->add_option("--t", ha.t, "time slice for exact-u");
    holder->add_option("--x0", ha.x0);
    holder->add_option("--side", ha.side, "left, right or both");
    holder->add_option("--base", ha.base, "largest offset");
    holder->add_option("--levels", ha.levels);
    holder->add_option("--slope-times", ha.slope_times, "times for the Lipschitz bound check")->delimiter(',');
    holder->add_option("--C", ha.C);
    holder->add_option("--L", ha.L);
    holder->add_option("--out", ha.out);

    VerifyArgs ya;
    auto* verify = app.add_subcommand("verify", "replay the steering constructions and regularity probes");
    verify->add_option("--seed", ya.seed);
    verify->add_option("--sequences", ya.sequences, "sequences per case");
    verify->add_option("--levels", ya.levels, "perturbation sizes per sequence");
    verify->add_option("--scale", ya.scale, "largest perturbation (0 = trivial sequences)");
    verify->add_option("--mesh", ya.mesh);
    verify->add_option("--probe", ya.probe, "pairs for the regularity probe (0 = skip)");
    verify->add_option("--out", ya.out);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        set_thread_count(threads);
        const auto session = [&](CLI::App* sub) { return Session{sub, out, err, timing}; };
        if (matrix->parsed()) return cmd_matrix(ma, session(matrix));
        if (peakons->parsed()) return cmd_peakons(pa, session(peakons));
        if (value->parsed()) return cmd_value(va, session(value));
        if (grid->parsed()) return cmd_grid(ga, session(grid));
        if (exact->parsed()) return cmd_exact1d(ea, session(exact));
        if (holder->parsed()) return cmd_holder(ha, session(holder));
        if (verify->parsed()) return cmd_verify(ya, session(verify));
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 1;
    } catch (const InvariantFailure& e) {
        err << "invariant failure: " << e.what() << '\n';
        return 3;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

}  // namespace hjb
