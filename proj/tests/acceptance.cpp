// One pass/fail line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "hjb/dynamics.hpp"
#include "hjb/errors.hpp"
#include "hjb/exact1d.hpp"
#include "hjb/grid.hpp"
#include "hjb/lemma_lab.hpp"
#include "hjb/matrix.hpp"
#include "hjb/terminal_cost.hpp"
#include "hjb/value_direct.hpp"

using namespace hjb;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("[%s] criterion %d: %s | %s | %.2fs\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(),
                secs);
    std::fflush(stdout);
}

double elapsed(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// Every grid run goes through here so the maximum principle is always asserted.
double worst_sup_excess = -1e300;
ValueField checked(ValueField f, double g_bound) {
    worst_sup_excess = std::max(worst_sup_excess, f.sup_norm() - g_bound);
    if (f.sup_norm() > g_bound + 1e-9) throw InvariantFailure("maximum principle violated");
    return f;
}

}  // namespace

int main() {
    criterion(1, "matrix identities", [] {
        const auto start = std::chrono::steady_clock::now();
        std::mt19937_64 rng(20240601);
        std::uniform_real_distribution<double> u(-10.0, 10.0);
        double sq = 0.0, vs = 0.0;
        for (int i = 0; i < 10000; ++i) {
            const PositionVector x{u(rng), u(rng)};
            const SymMatrix e = build_interaction_matrix(x);
            const SymMatrix r = sqrt_2d(x);
            sq = std::max(sq, max_abs_entry_diff(r.squared(), e));
            vs = std::max(vs, max_abs_entry_diff(r, sqrt_psd_general(e)));
        }
        const double t = elapsed(start);
        return Outcome{sq <= 1e-12 && vs <= 1e-10 && t < 1.0,
                       "square " + fmt("%.2e", sq) + ", closed vs spectral " + fmt("%.2e", vs) + ", " +
                           fmt("%.3fs", t)};
    });

    criterion(2, "root Holder bound", [] {
        const auto c = probe_constants(10000, Box::cube(2, -10.0, 10.0), 42);
        return Outcome{c.root_bound_excess <= 1e-10 && c.C1 <= std::sqrt(2.0) + 1e-9,
                       "excess " + fmt("%.2e", c.root_bound_excess) + ", C1 " + fmt("%.12f", c.C1)};
    });

    criterion(3, "exact-solution regression", [] {
        const auto start = std::chrono::steady_clock::now();
        double worst = 0.0;
        for (int i = 0; i < 201; ++i)
            for (int j = 0; j < 81; ++j) {
                const double x = -4.0 + 8.0 * i / 200.0;
                const double t = 0.05 + 1.9 * j / 80.0;
                if (branch_boundary_distance(x, t) < 1e-6) continue;
                worst = std::max(worst, std::abs(hopf_lax(x, t).value - exact_v(x, t).value));
            }
        const double xs[] = {-3.0, 0.0, 1.0, -1.0};
        const double want[] = {-1.0, 0.0, 1.0 / 6.0, -0.5};
        bool exact_ok = true;
        double hl = 0.0;
        for (int k = 0; k < 4; ++k) {
            exact_ok = exact_ok && exact_v(xs[k], 1.0).value == want[k];
            hl = std::max(hl, std::abs(hopf_lax(xs[k], 1.0).value - want[k]));
        }
        const double t = elapsed(start);
        return Outcome{worst <= 1e-6 && exact_ok && hl <= 1e-6 && t < 10.0,
                       "grid " + fmt("%.2e", worst) + ", points " + (exact_ok ? "exact" : "MISMATCH") +
                           ", hopf-lax " + fmt("%.2e", hl)};
    });

    criterion(4, "transform consistency", [] {
        const double a = exact_u(-0.25, 3.0);
        const double b = late_time_u(-0.25, 3.0);
        const double d = std::max(std::abs(a - b), std::max(std::abs(a + 5.0 / 6.0), std::abs(b + 5.0 / 6.0)));
        return Outcome{d < 1e-12, "composition " + fmt("%.15f", a) + ", explicit " + fmt("%.15f", b)};
    });

    criterion(5, "grid convergence", [] {
        const auto start = std::chrono::steady_clock::now();
        const auto g = TerminalCost::clamp_linear();
        const Box dom = Box::cube(1, -6.0, 6.0);
        const double T = 1.5;
        const std::size_t levels[][2] = {{301, 100}, {601, 200}, {1201, 400}};
        std::vector<double> errs;
        double diff = 0.0;
        for (const auto& lv : levels) {
            const auto f = checked(solve_semi_lagrangian(sqrt_abs_1d(), g, dom, {lv[0]}, lv[1], T,
                                                         ControlSampleSet::for_problem(1, g.bound(), T / lv[1])),
                                   g.bound());
            double e = 0.0;
            for (std::size_t k = 0; k <= f.nt(); ++k)
                for (std::size_t i = 0; i < f.nodes(); ++i) {
                    const double x = f.coord(0, i);
                    if (x >= -2.0 && x <= 2.0 && f.time(k) <= 1.5) e = std::max(e, std::abs(f.at(k, i) - exact_u(x, f.time(k))));
                }
            errs.push_back(e);
            if (lv[0] == 1201) {
                const auto lf = checked(solve_lax_friedrichs(sqrt_abs_1d(), g, dom, {lv[0]}, lv[1], T), g.bound());
                for (std::size_t k = 0; k <= f.nt(); ++k)
                    for (std::size_t i = 0; i < f.nodes(); ++i) {
                        const double x = f.coord(0, i);
                        if (x >= -2.0 && x <= 2.0) diff = std::max(diff, std::abs(f.at(k, i) - lf.at(k, i)));
                    }
            }
        }
        const double t = elapsed(start);
        const bool ok = errs[1] < errs[0] && errs[2] < errs[1] && errs[2] < 0.05 && diff <= 0.05 && t < 60.0;
        return Outcome{ok, "errors " + fmt("%.4f", errs[0]) + " > " + fmt("%.4f", errs[1]) + " > " +
                               fmt("%.4f", errs[2]) + ", LF diff " + fmt("%.4f", diff)};
    });

    criterion(6, "maximum principle", [] {
        const auto start = std::chrono::steady_clock::now();
        const auto g = TerminalCost::clamp_linear();
        const double T = 1.0;
        const auto f = checked(solve_semi_lagrangian(peakon_sigma(2), g, Box::cube(2, -3.0, 3.0), {101}, 100, T,
                                                     ControlSampleSet::for_problem(2, g.bound(), T / 100)),
                               g.bound());
        const double t = elapsed(start);
        return Outcome{t < 120.0 && worst_sup_excess <= 1e-9,
                       "2D peakon 101^2 x 100 sup " + fmt("%.6f", f.sup_norm()) + ", worst excess over all runs " +
                           fmt("%.2e", worst_sup_excess) + ", 2D run " + fmt("%.2fs", t)};
    });

    criterion(7, "DPP residual", [] {
        const auto start = std::chrono::steady_clock::now();
        const auto g = TerminalCost::clamp_linear();
        double worst = 0.0;
        for (const double y : {-1.5, -0.5, 0.3, 1.0, 1.7}) {
            const auto d = dpp_check(sqrt_abs_1d(), g, PositionVector{y}, 0.2, 0.3, 1.0);
            worst = std::max(worst, d.residual);
        }
        const double t = elapsed(start);
        return Outcome{worst < 0.05 && t < 60.0, "max residual " + fmt("%.2e", worst)};
    });

    criterion(8, "direct vs exact", [] {
        const auto est = estimate_value(sqrt_abs_1d(), TerminalCost::clamp_linear(), PositionVector{1.0}, 0.0, 1.0);
        return Outcome{std::abs(est.value - 2.0 / 3.0) <= 0.02, "v(1,0) " + fmt("%.6f", est.value) + " vs 2/3"};
    });

    criterion(9, "lemma constructions", [] {
        const auto start = std::chrono::steady_clock::now();
        const auto report = verify_all();
        const double t = elapsed(start);
        std::string detail;
        for (const auto& c : report["cases"]) {
            detail += c["case"].get<std::string>() + ":";
            for (const auto* k : {"t_n_to_t0", "energy_to_zero", "state_equation", "endpoint"})
                detail += c["claims"][k]["pass"].get<bool>() ? "+" : "-";
            detail += " ";
        }
        return Outcome{report["pass"].get<bool>() && t < 30.0, detail + fmt("%.2fs", t)};
    });

    criterion(10, "regularity breakdown", [] {
        const auto late = holder_fit([](double x) { return exact_u(x, 3.0); }, 0.0, 1e-2, 20, Side::Left);
        const auto early = holder_fit([](double x) { return exact_u(x, 1.0); }, 0.0, 1e-2, 20, Side::Left);
        std::vector<double> xs;
        for (int i = 0; i <= 8000; ++i) xs.push_back(-4.0 + i * 1e-3);
        const std::vector<double> times{0.5, 1.0, 1.5, 1.9};
        const auto slopes = lipschitz_bound_check([](double x, double t) { return exact_u(x, t); }, xs, 1.0, 1.0, times);
        const bool slopes_ok = std::all_of(slopes.begin(), slopes.end(), [](const SlopeCheck& s) { return s.ok; });
        const bool ok = late.exponent >= 0.45 && late.exponent <= 0.55 && early.exponent >= 0.9 &&
                        early.exponent <= 1.05 && slopes_ok;
        return Outcome{ok, "t=3 exponent " + fmt("%.4f", late.exponent) + ", t=1 exponent " +
                               fmt("%.4f", early.exponent) + ", slopes " + (slopes_ok ? "within bound" : "EXCEEDED")};
    });

    criterion(11, "peakon simulator", [] {
        const auto flow = peakon_flow(make_peakon_state({-1.0, 1.0}, {1.0, -1.0}), 10.0, 1e-5);
        const auto& s0 = flow.states.front();
        double dh = 0.0, dp = 0.0;
        for (const auto& s : flow.states) {
            dh = std::max(dh, std::abs(s.h - s0.h));
            dp = std::max(dp, std::abs(s.p[0] + s.p[1] - s0.p[0] - s0.p[1]));
        }
        const auto one = peakon_flow(make_peakon_state({0.3}, {0.7}), 2.0, 1e-3);
        double e1 = 0.0;
        for (const auto& s : one.states)
            e1 = std::max({e1, std::abs(s.q[0] - (0.3 + 0.7 * s.t)), std::abs(s.p[0] - 0.7)});
        return Outcome{dh <= 1e-6 && dp <= 1e-8 && e1 <= 1e-12,
                       "H drift " + fmt("%.2e", dh) + ", momentum drift " + fmt("%.2e", dp) +
                           (flow.collision_time ? ", collision at t=" + fmt("%.5f", *flow.collision_time) : "") +
                           ", N=1 error " + fmt("%.2e", e1)};
    });

    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
