#include "hjb/value_direct.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hjb/errors.hpp"
#include "hjb/parallel.hpp"

namespace hjb {
namespace {

using Flat = std::vector<double>;

struct Problem {
    const SigmaField& sigma;
    const TerminalCost& g;
    const PositionVector& y0;
    double t0;
    double T;
    std::size_t pieces;
    std::size_t dim;
    double step;
    double cap;

    // clip every piece to |a_k| <= cap
    void project(Flat& z) const {
        for (std::size_t k = 0; k < pieces; ++k) {
            double n2 = 0.0;
            for (std::size_t i = 0; i < dim; ++i) n2 += z[k * dim + i] * z[k * dim + i];
            const double n = std::sqrt(n2);
            if (n > cap) {
                const double s = cap > 0.0 ? cap / n : 0.0;
                for (std::size_t i = 0; i < dim; ++i) z[k * dim + i] *= s;
            }
        }
    }

    PiecewiseConstantControl control(const Flat& z) const {
        std::vector<std::vector<double>> values(pieces, std::vector<double>(dim));
        for (std::size_t k = 0; k < pieces; ++k)
            for (std::size_t i = 0; i < dim; ++i) values[k][i] = z[k * dim + i];
        return PiecewiseConstantControl(t0, T, std::move(values));
    }

    double cost(const Flat& z) const {
        try {
            return bolza_cost(integrate_state(sigma, control(z), y0, step), g);
        } catch (const BlowUp&) {
            return std::numeric_limits<double>::infinity();
        }
    }
};

Flat flatten(const PiecewiseConstantControl& c) {
    Flat z;
    for (const auto& v : c.values()) z.insert(z.end(), v.begin(), v.end());
    return z;
}

}  // namespace

PiecewiseConstantControl refine_pieces(const PiecewiseConstantControl& control, std::size_t factor) {
    if (factor == 0) throw ConfigError("refinement factor must be positive");
    std::vector<std::vector<double>> values;
    values.reserve(control.pieces() * factor);
    for (const auto& v : control.values())
        for (std::size_t r = 0; r < factor; ++r) values.push_back(v);
    return PiecewiseConstantControl(control.t_start(), control.t_end(), std::move(values));
}

ValueEstimate estimate_value(const SigmaField& sigma, const TerminalCost& g, const PositionVector& y0, double t0,
                             double T, const DirectOptions& options) {
    if (y0.size() != sigma.dim) throw DimensionMismatch("initial point and sigma dimensions differ");
    if (t0 > T) throw DomainError("estimate_value needs t0 <= T");
    if (options.pieces == 0 || options.population < 2 || options.elites == 0 || options.elites > options.population ||
        options.substeps == 0)
        throw ConfigError("direct solver needs pieces >= 1, population >= 2, 1 <= elites <= population, substeps >= 1");

    ValueEstimate out;
    out.diagnostics.seed = options.seed;
    out.diagnostics.population = options.population;
    if (t0 == T) {
        out.value = g(y0.coords());
        return out;
    }

    const std::size_t dim = sigma.dim;
    const double horizon = T - t0;
    const double piece = horizon / static_cast<double>(options.pieces);
    const Problem prob{sigma,
                       g,
                       y0,
                       t0,
                       T,
                       options.pieces,
                       dim,
                       piece / static_cast<double>(options.substeps),
                       2.0 * std::sqrt(g.bound()) / std::sqrt(horizon)};
    out.diagnostics.control_cap = prob.cap;
    const std::size_t D = options.pieces * dim;

    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Flat best(D, 0.0);
    double best_cost = prob.cost(best);
    std::size_t evaluations = 1;

    Flat mean(D, 0.0);
    Flat spread(D, 0.5 * prob.cap);
    const double spread_floor = 1e-3 * prob.cap;

    std::vector<Flat> population(options.population, Flat(D));
    std::vector<double> costs(options.population);
    std::vector<std::size_t> order(options.population);

    for (std::size_t it = 0; it < options.iterations && prob.cap > 0.0; ++it) {
        for (std::size_t m = 0; m < options.population; ++m) {
            Flat& z = population[m];
            if (m == 0) {
                z = best;
            } else if (it == 0 && m == 1) {
                std::fill(z.begin(), z.end(), 0.0);
            } else if (it == 0 && m == 2 && options.warm_start) {
                z = flatten(*options.warm_start);
                if (z.size() != D) throw DimensionMismatch("warm start control has the wrong number of pieces");
            } else {
                for (std::size_t d = 0; d < D; ++d) z[d] = mean[d] + spread[d] * gauss(rng);
            }
            prob.project(z);
        }
        parallel_for(options.population, [&](std::size_t m) { costs[m] = prob.cost(population[m]); });
        evaluations += options.population;

        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });
        if (costs[order[0]] < best_cost) {
            best_cost = costs[order[0]];
            best = population[order[0]];
        }

        for (std::size_t d = 0; d < D; ++d) {
            double mu = 0.0;
            for (std::size_t e = 0; e < options.elites; ++e) mu += population[order[e]][d];
            mu /= static_cast<double>(options.elites);
            double var = 0.0;
            for (std::size_t e = 0; e < options.elites; ++e) {
                const double dv = population[order[e]][d] - mu;
                var += dv * dv;
            }
            var /= static_cast<double>(options.elites);
            mean[d] = mu;
            spread[d] = std::max(std::sqrt(var), spread_floor);
        }
        out.diagnostics.history.push_back(best_cost);
        out.diagnostics.iterations = it + 1;
    }
    out.diagnostics.cem_value = best_cost;

    // compass search, one coordinate at a time
    double delta = 0.25 * prob.cap;
    const double min_delta = 1e-7 * std::max(prob.cap, 1e-300);
    std::size_t polish = 0;
    while (prob.cap > 0.0 && delta > min_delta && polish < options.polish_evaluations) {
        bool improved = false;
        for (std::size_t d = 0; d < D && polish < options.polish_evaluations; ++d) {
            for (const double sign : {1.0, -1.0}) {
                Flat trial = best;
                trial[d] += sign * delta;
                prob.project(trial);
                const double c = prob.cost(trial);
                ++polish;
                if (c < best_cost) {
                    best_cost = c;
                    best = std::move(trial);
                    improved = true;
                    break;
                }
            }
        }
        if (!improved) delta *= 0.5;
    }
    evaluations += polish;

    out.value = best_cost;
    out.control = prob.control(best);
    out.trajectory = integrate_state(sigma, *out.control, y0, prob.step);
    out.diagnostics.evaluations = evaluations;
    return out;
}

namespace {

PiecewiseConstantControl restrict_control(const PiecewiseConstantControl& full, double t0, double t1,
                                          std::size_t pieces) {
    std::vector<std::vector<double>> values;
    const double len = (t1 - t0) / static_cast<double>(pieces);
    for (std::size_t k = 0; k < pieces; ++k) values.push_back(full.at(t0 + (static_cast<double>(k) + 0.5) * len));
    return PiecewiseConstantControl(t0, t1, std::move(values));
}

}  // namespace

DppResult dpp_check(const SigmaField& sigma, const TerminalCost& g, const PositionVector& y0, double t0, double h,
                    double T, const DirectOptions& options) {
    if (!(h > 0.0) || t0 + h > T + 1e-12) throw DomainError("dpp_check needs 0 < h <= T - t0");
    const double t1 = std::min(T, t0 + h);

    DppResult out;
    out.full = estimate_value(sigma, g, y0, t0, T, options);
    out.full_value = out.full.value;

    const std::size_t dim = sigma.dim;
    const double horizon = T - t0;
    const std::size_t head_pieces =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(static_cast<double>(options.pieces) * h / horizon)));

    std::vector<PiecewiseConstantControl> candidates;
    if (out.full.control) candidates.push_back(restrict_control(*out.full.control, t0, t1, head_pieces));
    candidates.push_back(PiecewiseConstantControl::zero(t0, t1, head_pieces, dim));
    const double cap = out.full.diagnostics.control_cap;
    if (cap > 0.0) {
        for (std::size_t i = 0; i < dim; ++i)
            for (const double frac : {0.25, 0.5, 1.0})
                for (const double sign : {1.0, -1.0}) {
                    std::vector<double> a(dim, 0.0);
                    a[i] = sign * frac * cap;
                    candidates.emplace_back(t0, t1, std::vector<std::vector<double>>(head_pieces, a));
                }
    }

    const double step = (t1 - t0) / static_cast<double>(head_pieces * options.substeps);
    out.candidate_values.assign(candidates.size(), 0.0);
    std::vector<ValueEstimate> tails(candidates.size());
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        const Trajectory head = integrate_state(sigma, candidates[c], y0, step);
        tails[c] = estimate_value(sigma, g, head.final_state(), t1, T, options);
        out.candidate_values[c] = head.final_cost() + tails[c].value;
    }
    const auto best = std::min_element(out.candidate_values.begin(), out.candidate_values.end());
    out.best_candidate = static_cast<std::size_t>(best - out.candidate_values.begin());
    out.split_value = *best;
    out.best_tail = std::move(tails[out.best_candidate]);
    out.residual = std::abs(out.full_value - out.split_value);
    return out;
}

}  // namespace hjb
