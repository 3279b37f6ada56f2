#pragma once

// State equation x' = sigma(x) a(t), Bolza costs, and the multipeakon
// Hamiltonian flow.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hjb/matrix.hpp"
#include "hjb/terminal_cost.hpp"

namespace hjb {

/// A symmetric PSD root sigma(x) of a matrix field M(x) = sigma(x)^2.
struct SigmaField {
    std::size_t dim = 0;
    std::string label;
    std::function<SymMatrix(const PositionVector&)> eval;
    std::function<SymMatrix(const PositionVector&)> squared;
    /// Upper bound on max |x(t)|_inf over [t0, t0 + horizon] for trajectories
    /// started in |x|_inf <= start_radius with control L2 norm <= l2_radius.
    std::function<double(double start_radius, double l2_radius, double horizon)> reach;

    std::vector<double> apply(const PositionVector& x, std::span<const double> a) const {
        return eval(x).apply(a);
    }
};

/// sqrt(E(x)) for N peakons. N = 2 uses the closed form (label "peakon2"),
/// other N the spectral root (label "peakonN").
SigmaField peakon_sigma(std::size_t n);
/// sigma(x) = sqrt(|x|) in one dimension, M(x) = |x| (label "sqrt-abs-1d").
SigmaField sqrt_abs_1d();
/// Resolves "peakon2", "peakonN" (with dim), "peakon" (any dim) or "sqrt-abs-1d".
SigmaField sigma_by_label(const std::string& label, std::size_t dim);

/// Control that is constant on each of M uniform subintervals of [t_start, t_end].
class PiecewiseConstantControl {
public:
    PiecewiseConstantControl(double t_start, double t_end, std::vector<std::vector<double>> values);
    static PiecewiseConstantControl zero(double t_start, double t_end, std::size_t pieces, std::size_t dim);

    double t_start() const noexcept { return t_start_; }
    double t_end() const noexcept { return t_end_; }
    std::size_t pieces() const noexcept { return values_.size(); }
    std::size_t dim() const noexcept { return values_.front().size(); }
    double piece_length() const noexcept { return (t_end_ - t_start_) / static_cast<double>(values_.size()); }
    const std::vector<std::vector<double>>& values() const noexcept { return values_; }
    const std::vector<double>& piece(std::size_t k) const { return values_[k]; }
    std::size_t piece_index(double t) const;
    const std::vector<double>& at(double t) const { return values_[piece_index(t)]; }

    /// Exact ||a||_{L2}^2 = sum_k |a_k|^2 * piece_length.
    double l2_norm_squared() const;
    double l2_norm() const;

    /// Concatenation of this control on [t_start, t_end] with `next` on
    /// [t_end, next.t_end]; both must have equal piece lengths.
    PiecewiseConstantControl concatenate(const PiecewiseConstantControl& next) const;

private:
    double t_start_;
    double t_end_;
    std::vector<std::vector<double>> values_;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<PositionVector> states;
    /// 1/2 int_{t_start}^{t} |a|^2 at each sampled instant.
    std::vector<double> running_cost;

    const PositionVector& final_state() const { return states.back(); }
    double final_cost() const { return running_cost.back(); }
};

/// Fixed-step RK4 for x' = sigma(x) a(t) from (y0, control.t_start()). Steps
/// are aligned with control breakpoints, each piece taking ceil(piece/step)
/// equal steps. Non-unique near degenerate sets: this is one deterministic
/// selection. Throws BlowUp on a non-finite state.
Trajectory integrate_state(const SigmaField& sigma, const PiecewiseConstantControl& control,
                           const PositionVector& y0, double step);

/// running cost at T plus g(x(T)).
double bolza_cost(const Trajectory& traj, const TerminalCost& g);

/// Multipeakon phase-space state with H(q, p) = 1/2 E(q) p . p.
struct PeakonState {
    double t = 0.0;
    std::vector<double> q;
    std::vector<double> p;
    double h = 0.0;
};

double peakon_hamiltonian(std::span<const double> q, std::span<const double> p);
PeakonState make_peakon_state(std::vector<double> q, std::vector<double> p, double t = 0.0);

struct PeakonFlow {
    std::vector<PeakonState> states;
    bool collided = false;
    std::optional<double> collision_time;
};

inline constexpr double kCollisionGap = 1e-6;

/// RK4 for q' = dH/dp = E(q) p, p_i' = -dH/dq_i = sum_j p_i p_j sgn(q_i - q_j) e^{-|q_i - q_j|}.
/// Stops (collided = true) once min |q_i - q_j| < collision_gap. Throws BlowUp on
/// non-finite states and DomainError if the initial positions already collide.
PeakonFlow peakon_flow(const PeakonState& initial, double t_end, double step,
                       double collision_gap = kCollisionGap);

}  // namespace hjb
