#include "hjb/lemma_lab.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>

#include "hjb/errors.hpp"
#include "hjb/parallel.hpp"

namespace hjb {

std::string to_string(LemmaCase c) {
    switch (c) {
        case LemmaCase::I: return "I";
        case LemmaCase::II: return "II";
        case LemmaCase::III: return "III";
    }
    return "?";
}

namespace {

// 8-point Gauss-Legendre on [-1, 1]
constexpr std::array<double, 4> kGaussNodes = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                               0.9602898564975363};
constexpr std::array<double, 4> kGaussWeights = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                                 0.1012285362903763};

template <typename F>
double gauss_panel(const F& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < kGaussNodes.size(); ++i)
        s += kGaussWeights[i] * (f(mid - half * kGaussNodes[i]) + f(mid + half * kGaussNodes[i]));
    return s * half;
}

bool on_diagonal(const PositionVector& y) { return y[0] == y[1]; }

void require_planar(const PositionVector& y0, const PositionVector& yn) {
    if (y0.size() != 2 || yn.size() != 2) throw DimensionMismatch("lemma constructions are for N = 2");
}

std::vector<double> mat_vec(const SymMatrix& m, std::span<const double> v) { return m.apply(v); }

double sup_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Case I closed form. Displacement d(t) = x(t) - y0 = e^{E(t)} (y_n - y0), zero at t >= tn.
struct CaseOne {
    PositionVector y0, yn;
    double t0, tn;

    double weight(double t) const {
        if (t >= tn) return 0.0;
        return std::exp(1.0 / (tn - t0) - 1.0 / (tn - t));
    }
    std::array<double, 2> displacement(double t) const {
        const double w = weight(t);
        return {w * (yn[0] - y0[0]), w * (yn[1] - y0[1])};
    }
    PositionVector state(double t) const {
        const double w = weight(t);
        return PositionVector{w * yn[0] + (1.0 - w) * y0[0], w * yn[1] + (1.0 - w) * y0[1]};
    }
    std::vector<double> control(double t) const {
        const double w = weight(t);
        // |a| ~ sqrt(w) / (tn - t)^2; below this it is zero to double precision
        if (w < 1e-200) return {0.0, 0.0};
        const double rho = w * std::abs(yn[0] - yn[1]);
        const auto d = displacement(t);
        const std::array<double, 2> toward{-d[0], -d[1]};
        auto a = apply_inv_sqrt_2d(rho, toward);
        const double s = 1.0 / ((tn - t) * (tn - t));
        a[0] *= s;
        a[1] *= s;
        return a;
    }
    double energy_density(double t) const {
        const auto a = control(t);
        return a[0] * a[0] + a[1] * a[1];
    }
    double energy(std::size_t panels) const {
        double total = 0.0;
        const double span = tn - t0;
        auto node = [&](std::size_t k) {
            const double r = 1.0 - static_cast<double>(k) / static_cast<double>(panels);
            return k == panels ? tn : tn - span * r * r * r;
        };
        for (std::size_t k = 0; k < panels; ++k)
            total += gauss_panel([&](double t) { return energy_density(t); }, node(k), node(k + 1));
        return total;
    }
};

}  // namespace

ConstructionRun lemma_case1(const PositionVector& y0, const PositionVector& yn, double t0,
                            const CaseOptions& options) {
    require_planar(y0, yn);
    if (!on_diagonal(y0)) throw DomainError("case I needs y0 on the diagonal");
    if (on_diagonal(yn)) throw DomainError("case I needs y_n off the diagonal");
    if (options.mesh == 0) throw ConfigError("case I needs a positive mesh size");

    const double delta = std::abs(y0[0] - yn[0]) + std::abs(y0[1] - yn[1]);
    const CaseOne c{y0, yn, t0, t0 + std::pow(delta, 0.25)};

    ConstructionRun run;
    run.which = LemmaCase::I;
    run.y0 = y0;
    run.yn = yn;
    run.t0 = t0;
    run.tn = c.tn;
    run.cost = c.energy(options.mesh);
    run.cost_refined = c.energy(2 * options.mesh);

    const auto end = c.state(c.tn);
    run.endpoint_error = euclidean_distance(end.coords(), y0.coords());

    const double span = c.tn - t0;
    for (std::size_t k = 0; k <= options.mesh; ++k) {
        const double r = 1.0 - static_cast<double>(k) / static_cast<double>(options.mesh);
        const double t = k == options.mesh ? c.tn : c.tn - span * r * r * r;
        run.times.push_back(t);
        run.states.push_back(c.state(t));
        run.max_control = std::max(run.max_control, euclidean_norm(c.control(t)));
    }

    // fourth-order central difference of the displacement on the local time scale (tn - t)^2
    const double t_last = c.tn - options.residual_cutoff;
    if (t_last > t0) {
        for (std::size_t i = 0; i <= options.residual_points; ++i) {
            const double t = t0 + (t_last - t0) * static_cast<double>(i) / static_cast<double>(options.residual_points);
            const double h = 1e-3 * (c.tn - t) * (c.tn - t);
            const auto m2 = c.displacement(t - 2 * h);
            const auto m1 = c.displacement(t - h);
            const auto p1 = c.displacement(t + h);
            const auto p2 = c.displacement(t + 2 * h);
            std::array<double, 2> xdot{};
            for (std::size_t j = 0; j < 2; ++j) xdot[j] = (m2[j] - 8.0 * m1[j] + 8.0 * p1[j] - p2[j]) / (12.0 * h);
            const auto rhs = mat_vec(sqrt_2d(c.state(t)), c.control(t));
            run.residual = std::max(run.residual, sup_diff(xdot, rhs));
        }
    }
    return run;
}

namespace {

// Straight path (1 - s) y_n + s y0; s = 1 reproduces y0 bit for bit.
PositionVector segment(const PositionVector& yn, const PositionVector& y0, double s) {
    return PositionVector{(1.0 - s) * yn[0] + s * y0[0], (1.0 - s) * yn[1] + s * y0[1]};
}

}  // namespace

ConstructionRun lemma_case2(const PositionVector& y0, const PositionVector& yn, double t0,
                            const CaseOptions& options) {
    require_planar(y0, yn);
    if (!on_diagonal(y0) || !on_diagonal(yn)) throw DomainError("case II needs y0 and y_n on the diagonal");
    if (y0[0] == yn[0]) throw DomainError("case II needs y_n != y0");

    const double gap = y0[0] - yn[0];
    const double sgn = gap > 0.0 ? 1.0 : -1.0;
    ConstructionRun run;
    run.which = LemmaCase::II;
    run.y0 = y0;
    run.yn = yn;
    run.t0 = t0;
    run.tn = t0 + std::sqrt(2.0) * std::abs(gap);
    const double span = run.tn - t0;
    run.cost = span;  // |a| = 1
    run.cost_refined = span;
    run.max_control = 1.0;

    const std::array<double, 2> control{sgn, 0.0};
    const std::array<double, 2> velocity{sgn / std::sqrt(2.0), sgn / std::sqrt(2.0)};
    const std::size_t points = std::max<std::size_t>(options.mesh, 1);
    for (std::size_t k = 0; k <= points; ++k) {
        const double s = static_cast<double>(k) / static_cast<double>(points);
        const auto x = segment(yn, y0, s);
        run.times.push_back(k == points ? run.tn : t0 + s * span);
        run.states.push_back(x);
        run.diagonal_gap = std::max(run.diagonal_gap, std::abs(x[0] - x[1]));
        const auto rhs = mat_vec(sqrt_2d(x), control);
        run.residual = std::max(run.residual, sup_diff(velocity, rhs));
    }
    run.endpoint_error = euclidean_distance(run.states.back().coords(), y0.coords());
    return run;
}

ConstructionRun lemma_case3(const PositionVector& y0, const PositionVector& yn, double t0,
                            const CaseOptions& options) {
    require_planar(y0, yn);
    if (on_diagonal(y0)) throw DomainError("case III needs y0 off the diagonal");
    const double dist = euclidean_distance(y0.coords(), yn.coords());
    if (dist == 0.0) throw DomainError("case III needs y_n != y0");
    const double margin = 0.5 * std::abs(y0[0] - y0[1]) / std::sqrt(2.0);
    const double gap0 = (y0[0] - y0[1]) / std::sqrt(2.0);
    const double gapn = (yn[0] - yn[1]) / std::sqrt(2.0);
    if (gap0 * gapn <= 0.0 || std::min(std::abs(gap0), std::abs(gapn)) < margin)
        throw DomainError("case III needs the segment [y_n, y0] to stay away from the diagonal");
    if (options.mesh == 0) throw ConfigError("case III needs a positive mesh size");

    const std::array<double, 2> velocity{(y0[0] - yn[0]) / dist, (y0[1] - yn[1]) / dist};
    ConstructionRun run;
    run.which = LemmaCase::III;
    run.y0 = y0;
    run.yn = yn;
    run.t0 = t0;
    run.tn = t0 + dist;
    const double span = run.tn - t0;

    auto control_at = [&](double s) { return mat_vec(inv_sqrt_2d(segment(yn, y0, s)), velocity); };
    auto energy = [&](std::size_t panels) {
        double total = 0.0;
        for (std::size_t k = 0; k < panels; ++k) {
            const double a = static_cast<double>(k) / static_cast<double>(panels);
            const double b = static_cast<double>(k + 1) / static_cast<double>(panels);
            total += gauss_panel(
                [&](double s) {
                    const auto c = control_at(s);
                    return c[0] * c[0] + c[1] * c[1];
                },
                a, b);
        }
        return total * span;
    };
    run.cost = energy(options.mesh);
    run.cost_refined = energy(2 * options.mesh);

    run.diagonal_gap = std::abs(y0[0] - y0[1]);
    for (std::size_t k = 0; k <= options.mesh; ++k) {
        const double s = static_cast<double>(k) / static_cast<double>(options.mesh);
        const auto x = segment(yn, y0, s);
        run.times.push_back(k == options.mesh ? run.tn : t0 + s * span);
        run.states.push_back(x);
        run.diagonal_gap = std::min(run.diagonal_gap, std::abs(x[0] - x[1]));
        const auto a = control_at(s);
        run.max_control = std::max(run.max_control, euclidean_norm(a));
        run.residual = std::max(run.residual, sup_diff(velocity, mat_vec(sqrt_2d(x), a)));
    }
    run.endpoint_error = euclidean_distance(run.states.back().coords(), y0.coords());
    return run;
}

namespace {

struct Fit {
    double slope = 0.0;
    double intercept = 0.0;
};

Fit loglog_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (xs[i] > 0.0 && ys[i] > 0.0) {
            lx.push_back(std::log(xs[i]));
            ly.push_back(std::log(ys[i]));
        }
    if (lx.size() < 2) return {};
    const double n = static_cast<double>(lx.size());
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    Fit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    return f;
}

struct Sequence {
    PositionVector y0;
    std::array<double, 2> direction;
    double t0;
};

Sequence draw_sequence(LemmaCase which, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> pos(-2.0, 2.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::acos(-1.0));
    Sequence s;
    s.t0 = unit(rng);
    switch (which) {
        case LemmaCase::I: {
            const double a = pos(rng);
            s.y0 = PositionVector{a, a};
            // keep the direction at least 0.1 rad away from the diagonal
            double th;
            do {
                th = angle(rng);
            } while (std::abs(std::cos(th) - std::sin(th)) < 0.15);
            s.direction = {std::cos(th), std::sin(th)};
            break;
        }
        case LemmaCase::II: {
            const double a = pos(rng);
            s.y0 = PositionVector{a, a};
            const double sgn = unit(rng) < 0.5 ? -1.0 : 1.0;
            s.direction = {sgn / std::sqrt(2.0), sgn / std::sqrt(2.0)};
            break;
        }
        case LemmaCase::III: {
            const double a = pos(rng);
            double b;
            do {
                b = pos(rng);
            } while (std::abs(a - b) < 0.5);
            s.y0 = PositionVector{a, b};
            const double th = angle(rng);
            s.direction = {std::cos(th), std::sin(th)};
            break;
        }
    }
    return s;
}

ConstructionRun run_case(LemmaCase which, const PositionVector& y0, const PositionVector& yn, double t0,
                         const CaseOptions& o) {
    switch (which) {
        case LemmaCase::I: return lemma_case1(y0, yn, t0, o);
        case LemmaCase::II: return lemma_case2(y0, yn, t0, o);
        case LemmaCase::III: return lemma_case3(y0, yn, t0, o);
    }
    throw DomainError("unknown case");
}

PositionVector perturb(const Sequence& s, double eps, LemmaCase which) {
    PositionVector yn{s.y0[0] + eps * s.direction[0], s.y0[1] + eps * s.direction[1]};
    // the diagonal must stay exactly diagonal in case II
    if (which == LemmaCase::II) yn[1] = yn[0];
    return yn;
}

}  // namespace

nlohmann::ordered_json verify_all(const VerifyOptions& options) {
    using json = nlohmann::ordered_json;
    if (options.sequences == 0 || options.levels < 2) throw ConfigError("verify needs sequences >= 1 and levels >= 2");
    if (!(options.scale >= 0.0)) throw ConfigError("verify needs a non-negative scale");

    const double expected_rate[3] = {0.25, 1.0, 1.0};
    constexpr double kRateTolerance = 0.05;
    constexpr double kEndpointTolerance = 1e-8;
    constexpr double kCostTarget = 1e-3;
    constexpr double kResidualTolerance = 1e-6;
    constexpr double kQuadratureTolerance = 1e-6;

    json report;
    report["schema"] = "hjb/1";
    report["command"] = "verify";
    report["config"] = {{"seed", options.seed},
                        {"sequences", options.sequences},
                        {"levels", options.levels},
                        {"scale", options.scale},
                        {"mesh", options.case_options.mesh},
                        {"residual_cutoff", options.case_options.residual_cutoff}};
    bool all_pass = true;
    json cases = json::array();

    for (const LemmaCase which : {LemmaCase::I, LemmaCase::II, LemmaCase::III}) {
        const auto idx = static_cast<std::size_t>(which);
        // one generator per case so each case is reproducible on its own
        std::mt19937_64 rng(options.seed + 1000003ULL * (idx + 1));
        std::vector<Sequence> seqs;
        for (std::size_t s = 0; s < options.sequences; ++s) seqs.push_back(draw_sequence(which, rng));

        struct SeqResult {
            double endpoint = 0.0, residual = 0.0, quad_change = 0.0, final_cost = 0.0, rate = 0.0, cost_rate = 0.0;
            bool monotone_tail = true;
        };
        std::vector<SeqResult> results(seqs.size());

        parallel_for(seqs.size(), [&](std::size_t s) {
            SeqResult& r = results[s];
            if (options.scale == 0.0) {
                // y_n = y0 throughout: stay put, zero time and zero energy
                r.rate = expected_rate[idx];
                return;
            }
            std::vector<double> eps, spans, costs;
            double e = options.scale;
            for (std::size_t k = 0; k < options.levels; ++k, e *= 0.25) {
                const auto yn = perturb(seqs[s], e, which);
                const auto run = run_case(which, seqs[s].y0, yn, seqs[s].t0, options.case_options);
                eps.push_back(euclidean_distance(yn.coords(), seqs[s].y0.coords()));
                spans.push_back(run.tn - run.t0);
                costs.push_back(run.cost);
                r.endpoint = std::max(r.endpoint, run.endpoint_error);
                r.residual = std::max(r.residual, run.residual);
                r.quad_change = std::max(r.quad_change, std::abs(run.cost_refined - run.cost));
            }
            r.final_cost = costs.back();
            r.rate = loglog_fit(eps, spans).slope;
            r.cost_rate = loglog_fit(eps, costs).slope;
            // energy decreases over the second half of the sequence
            for (std::size_t k = options.levels / 2; k + 1 < costs.size(); ++k)
                if (costs[k + 1] > costs[k]) r.monotone_tail = false;
        });

        double endpoint = 0.0, residual = 0.0, quad = 0.0, final_cost = 0.0, rate_dev = 0.0;
        double rate_min = 1e300, rate_max = -1e300, cost_rate_min = 1e300, cost_rate_max = -1e300;
        bool monotone = true;
        for (const auto& r : results) {
            endpoint = std::max(endpoint, r.endpoint);
            residual = std::max(residual, r.residual);
            quad = std::max(quad, r.quad_change);
            final_cost = std::max(final_cost, r.final_cost);
            rate_dev = std::max(rate_dev, std::abs(r.rate - expected_rate[idx]));
            rate_min = std::min(rate_min, r.rate);
            rate_max = std::max(rate_max, r.rate);
            cost_rate_min = std::min(cost_rate_min, r.cost_rate);
            cost_rate_max = std::max(cost_rate_max, r.cost_rate);
            monotone = monotone && r.monotone_tail;
        }
        // cases II and III land on y0 bit for bit
        const double endpoint_tol = which == LemmaCase::I ? kEndpointTolerance : 0.0;
        const bool c1 = rate_dev <= kRateTolerance;
        const bool c2 = final_cost < kCostTarget && monotone;
        const bool c3 = residual < kResidualTolerance && quad < kQuadratureTolerance;
        const bool c4 = endpoint <= endpoint_tol;
        all_pass = all_pass && c1 && c2 && c3 && c4;

        json entry;
        entry["case"] = to_string(which);
        entry["claims"] = {
            {"t_n_to_t0", {{"pass", c1}, {"expected_rate", expected_rate[idx]}, {"rate_min", rate_min},
                           {"rate_max", rate_max}, {"max_deviation", rate_dev}, {"tolerance", kRateTolerance}}},
            {"energy_to_zero", {{"pass", c2}, {"max_final_cost", final_cost}, {"target", kCostTarget},
                                {"monotone_tail", monotone}, {"cost_rate_min", cost_rate_min},
                                {"cost_rate_max", cost_rate_max}}},
            {"state_equation", {{"pass", c3}, {"max_residual", residual}, {"tolerance", kResidualTolerance},
                                {"max_quadrature_change", quad}, {"quadrature_tolerance", kQuadratureTolerance}}},
            {"endpoint", {{"pass", c4}, {"max_error", endpoint}, {"tolerance", endpoint_tol}}}};
        if (options.scale == 0.0) {
            entry["claims"]["t_n_to_t0"]["rate_min"] = nullptr;
            entry["claims"]["t_n_to_t0"]["rate_max"] = nullptr;
            entry["claims"]["energy_to_zero"]["cost_rate_min"] = nullptr;
            entry["claims"]["energy_to_zero"]["cost_rate_max"] = nullptr;
        }
        cases.push_back(std::move(entry));
    }
    report["cases"] = std::move(cases);
    report["pass"] = all_pass;
    return report;
}

}  // namespace hjb
