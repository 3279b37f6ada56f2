#pragma once

// Direct minimisation of the Bolza cost
//
//   v(y0, t0) = inf { 1/2 int_{t0}^T |a|^2 dt + g(x(T)) },  x' = sigma(x) a,
//
// over piecewise-constant controls.

#include <cstdint>
#include <optional>
#include <vector>

#include "hjb/dynamics.hpp"
#include "hjb/terminal_cost.hpp"

namespace hjb {

struct DirectOptions {
    std::size_t pieces = 16;      ///< M, control subintervals
    std::size_t population = 64;
    std::size_t elites = 8;
    std::size_t iterations = 60;
    std::uint64_t seed = 42;
    std::size_t substeps = 4;     ///< RK4 steps per control piece
    std::size_t polish_evaluations = 2000;
    /// Optional starting control (same horizon); it joins the initial population.
    std::optional<PiecewiseConstantControl> warm_start;
};

struct DirectDiagnostics {
    std::size_t iterations = 0;
    std::size_t population = 0;
    std::size_t evaluations = 0;
    std::uint64_t seed = 0;
    double control_cap = 0.0;     ///< per-piece |a_k| cap, so ||a||_L2 <= 2 sqrt(||g||_inf)
    double cem_value = 0.0;       ///< best value before coordinate polish
    std::vector<double> history;  ///< best value after each CEM iteration
};

struct ValueEstimate {
    double value = 0.0;
    /// Empty when t0 == T (value is g(y0)).
    std::optional<PiecewiseConstantControl> control;
    std::optional<Trajectory> trajectory;
    DirectDiagnostics diagnostics;

    /// value <= g(y0) + tol and value >= -||g||_inf - tol.
    bool within_bounds(double g_at_y0, double g_bound, double tol = 1e-9) const {
        return value <= g_at_y0 + tol && value >= -g_bound - tol;
    }
};

/// Cross-entropy search (Gaussian proposal per piece, elite refit, best kept)
/// followed by coordinate-wise compass refinement. The zero control is always
/// in the initial population, so value <= g(y0) up to round-off. Deterministic
/// for a fixed seed, independent of the worker count.
ValueEstimate estimate_value(const SigmaField& sigma, const TerminalCost& g, const PositionVector& y0, double t0,
                             double T, const DirectOptions& options = {});

/// Splits every piece into `factor` equal pieces (same function of time).
PiecewiseConstantControl refine_pieces(const PiecewiseConstantControl& control, std::size_t factor);

struct DppResult {
    double residual = 0.0;
    double full_value = 0.0;   ///< v(y0, t0)
    double split_value = 0.0;  ///< min over candidates of running cost on [t0, t0+h] + v(x(t0+h), t0+h)
    std::size_t best_candidate = 0;
    std::vector<double> candidate_values;
    ValueEstimate full;
    ValueEstimate best_tail;
};

/// Pointwise dynamic programming check. Candidates on [t0, t0+h] are the
/// restriction of the full optimal control, the zero control, and constant
/// controls along +-e_i at a few magnitudes; each tail value comes from
/// estimate_value with the same options.
DppResult dpp_check(const SigmaField& sigma, const TerminalCost& g, const PositionVector& y0, double t0, double h,
                    double T, const DirectOptions& options = {});

}  // namespace hjb
