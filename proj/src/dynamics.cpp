#include "hjb/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hjb/errors.hpp"

namespace hjb {

SigmaField peakon_sigma(std::size_t n) {
    if (n == 0) throw ConfigError("peakon sigma needs N >= 1");
    SigmaField s;
    s.dim = n;
    s.label = n == 2 ? "peakon2" : "peakonN";
    if (n == 2) {
        s.eval = [](const PositionVector& x) { return sqrt_2d(x); };
    } else {
        s.eval = [](const PositionVector& x) { return sqrt_psd_general(build_interaction_matrix(x)); };
    }
    s.squared = [](const PositionVector& x) { return build_interaction_matrix(x); };
    // ||E(x)|| <= N, so ||sqrt E(x)|| <= sqrt(N); |x(t') - x(t)| <= C1 r sqrt(t' - t).
    const double c1 = std::sqrt(static_cast<double>(n));
    s.reach = [c1](double r0, double l2, double horizon) { return r0 + c1 * l2 * std::sqrt(horizon); };
    return s;
}

SigmaField sqrt_abs_1d() {
    SigmaField s;
    s.dim = 1;
    s.label = "sqrt-abs-1d";
    s.eval = [](const PositionVector& x) {
        SymMatrix m(1);
        m.set(0, 0, std::sqrt(std::abs(x[0])));
        return m;
    };
    s.squared = [](const PositionVector& x) {
        SymMatrix m(1);
        m.set(0, 0, std::abs(x[0]));
        return m;
    };
    // d/dt sqrt|x| = a/2 sgn(x), so sqrt|x| grows by at most r sqrt(T) / 2.
    s.reach = [](double r0, double l2, double horizon) {
        const double root = std::sqrt(r0) + 0.5 * l2 * std::sqrt(horizon);
        return root * root;
    };
    return s;
}

SigmaField sigma_by_label(const std::string& label, std::size_t dim) {
    if (label == "sqrt-abs-1d") {
        if (dim != 1) throw ConfigError("sigma 'sqrt-abs-1d' is one-dimensional");
        return sqrt_abs_1d();
    }
    if (label == "peakon2") {
        if (dim != 2) throw ConfigError("sigma 'peakon2' needs dim 2");
        return peakon_sigma(2);
    }
    if (label == "peakonN" || label == "peakon") {
        if (label == "peakonN" && dim == 2) {
            // spectral route even for N = 2
            SigmaField s = peakon_sigma(2);
            s.label = "peakonN";
            s.eval = [](const PositionVector& x) { return sqrt_psd_general(build_interaction_matrix(x)); };
            return s;
        }
        return peakon_sigma(dim);
    }
    throw ConfigError("unknown sigma '" + label + "' (expected peakon2, peakonN, sqrt-abs-1d)");
}

PiecewiseConstantControl::PiecewiseConstantControl(double t_start, double t_end,
                                                   std::vector<std::vector<double>> values)
    : t_start_(t_start), t_end_(t_end), values_(std::move(values)) {
    if (!(t_start_ < t_end_)) throw DomainError("control needs t_start < t_end");
    if (values_.empty()) throw DomainError("control needs at least one piece");
    const std::size_t n = values_.front().size();
    if (n == 0) throw DomainError("control values must be non-empty vectors");
    for (const auto& v : values_) {
        if (v.size() != n) throw DimensionMismatch("control pieces have different dimensions");
        for (double a : v)
            if (!std::isfinite(a)) throw DomainError("control value is not finite");
    }
}

PiecewiseConstantControl PiecewiseConstantControl::zero(double t_start, double t_end, std::size_t pieces,
                                                        std::size_t dim) {
    return PiecewiseConstantControl(t_start, t_end,
                                    std::vector<std::vector<double>>(pieces, std::vector<double>(dim, 0.0)));
}

std::size_t PiecewiseConstantControl::piece_index(double t) const {
    const double rel = (t - t_start_) / piece_length();
    if (!(rel > 0.0)) return 0;
    const auto k = static_cast<std::size_t>(std::floor(rel));
    return std::min(k, values_.size() - 1);
}

double PiecewiseConstantControl::l2_norm_squared() const {
    double s = 0.0;
    for (const auto& v : values_)
        for (double a : v) s += a * a;
    return s * piece_length();
}

double PiecewiseConstantControl::l2_norm() const { return std::sqrt(l2_norm_squared()); }

PiecewiseConstantControl PiecewiseConstantControl::concatenate(const PiecewiseConstantControl& next) const {
    if (next.dim() != dim()) throw DimensionMismatch("cannot concatenate controls of different dimension");
    if (std::abs(next.t_start() - t_end_) > 1e-12 * std::max(1.0, std::abs(t_end_)))
        throw DomainError("concatenated control must start where the first ends");
    if (std::abs(next.piece_length() - piece_length()) > 1e-12 * piece_length())
        throw DomainError("concatenated controls need equal piece lengths");
    auto values = values_;
    values.insert(values.end(), next.values().begin(), next.values().end());
    return PiecewiseConstantControl(t_start_, next.t_end(), std::move(values));
}

namespace {

void axpy(std::vector<double>& out, const std::vector<double>& base, double h, const std::vector<double>& k) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = base[i] + h * k[i];
}

bool finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double a) { return std::isfinite(a); });
}

}  // namespace

Trajectory integrate_state(const SigmaField& sigma, const PiecewiseConstantControl& control,
                           const PositionVector& y0, double step) {
    if (y0.size() != sigma.dim || control.dim() != sigma.dim)
        throw DimensionMismatch("state, control and sigma dimensions differ");
    const double piece = control.piece_length();
    if (!(step > 0.0)) throw DomainError("integration step must be positive");
    if (step > piece * (1.0 + 1e-12)) throw DomainError("integration step exceeds the control piece length");

    const auto substeps = static_cast<std::size_t>(std::ceil(piece / step - 1e-9));
    const double h = piece / static_cast<double>(substeps);
    const std::size_t n = sigma.dim;

    Trajectory traj;
    const std::size_t total = control.pieces() * substeps;
    traj.times.reserve(total + 1);
    traj.states.reserve(total + 1);
    traj.running_cost.reserve(total + 1);
    traj.times.push_back(control.t_start());
    traj.states.push_back(y0);
    traj.running_cost.push_back(0.0);

    std::vector<double> x = y0.vec();
    std::vector<double> tmp(n);
    double cost = 0.0;
    for (std::size_t k = 0; k < control.pieces(); ++k) {
        const auto& a = control.piece(k);
        double a2 = 0.0;
        for (double v : a) a2 += v * v;
        const double t_piece = control.t_start() + static_cast<double>(k) * piece;
        for (std::size_t s = 0; s < substeps; ++s) {
            const auto k1 = sigma.apply(PositionVector(x), a);
            axpy(tmp, x, 0.5 * h, k1);
            const auto k2 = sigma.apply(PositionVector(tmp), a);
            axpy(tmp, x, 0.5 * h, k2);
            const auto k3 = sigma.apply(PositionVector(tmp), a);
            axpy(tmp, x, h, k3);
            const auto k4 = sigma.apply(PositionVector(tmp), a);
            for (std::size_t i = 0; i < n; ++i) x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if (!finite(x))
                throw BlowUp("state became non-finite at t = " + std::to_string(t_piece + (s + 1) * h));
            // the running cost integrand is constant on the piece, so RK4 is exact
            cost += 0.5 * a2 * h;
            traj.times.push_back(s + 1 == substeps ? t_piece + piece : t_piece + static_cast<double>(s + 1) * h);
            traj.states.emplace_back(x);
            traj.running_cost.push_back(cost);
        }
    }
    traj.times.back() = control.t_end();
    return traj;
}

double bolza_cost(const Trajectory& traj, const TerminalCost& g) {
    return traj.final_cost() + g(traj.final_state().coords());
}

double peakon_hamiltonian(std::span<const double> q, std::span<const double> p) {
    if (q.size() != p.size()) throw DimensionMismatch("q and p differ in size");
    double h = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        h += 0.5 * p[i] * p[i];
        for (std::size_t j = i + 1; j < q.size(); ++j) h += p[i] * p[j] * std::exp(-std::abs(q[i] - q[j]));
    }
    return h;
}

PeakonState make_peakon_state(std::vector<double> q, std::vector<double> p, double t) {
    PeakonState s;
    s.t = t;
    s.h = peakon_hamiltonian(q, p);
    s.q = std::move(q);
    s.p = std::move(p);
    return s;
}

namespace {

double min_gap(const std::vector<double>& q) {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < q.size(); ++i)
        for (std::size_t j = i + 1; j < q.size(); ++j) gap = std::min(gap, std::abs(q[i] - q[j]));
    return gap;
}

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// z = (q, p); returns (dH/dp, -dH/dq).
std::vector<double> peakon_rhs(const std::vector<double>& z, std::size_t n) {
    std::vector<double> out(2 * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double qdot = 0.0;
        double pdot = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double d = z[i] - z[j];
            const double e = std::exp(-std::abs(d));
            qdot += e * z[n + j];
            pdot += z[n + i] * z[n + j] * sgn(d) * e;
        }
        out[i] = qdot;
        out[n + i] = pdot;
    }
    return out;
}

}  // namespace

PeakonFlow peakon_flow(const PeakonState& initial, double t_end, double step, double collision_gap) {
    const std::size_t n = initial.q.size();
    if (n == 0 || initial.p.size() != n) throw DimensionMismatch("peakon state needs q and p of equal, positive size");
    if (!(step > 0.0)) throw DomainError("peakon step must be positive");
    if (n >= 2 && min_gap(initial.q) < collision_gap)
        throw DomainError("initial peakon positions collide (min gap below collision threshold)");

    PeakonFlow flow;
    flow.states.push_back(make_peakon_state(initial.q, initial.p, initial.t));

    std::vector<double> z(2 * n);
    std::copy(initial.q.begin(), initial.q.end(), z.begin());
    std::copy(initial.p.begin(), initial.p.end(), z.begin() + static_cast<std::ptrdiff_t>(n));
    std::vector<double> tmp(2 * n);

    const auto steps = static_cast<std::size_t>(std::ceil((t_end - initial.t) / step - 1e-9));
    for (std::size_t s = 0; s < steps; ++s) {
        const double t0 = initial.t + static_cast<double>(s) * step;
        const double h = std::min(step, t_end - t0);
        if (!(h > 0.0)) break;
        const auto k1 = peakon_rhs(z, n);
        axpy(tmp, z, 0.5 * h, k1);
        const auto k2 = peakon_rhs(tmp, n);
        axpy(tmp, z, 0.5 * h, k2);
        const auto k3 = peakon_rhs(tmp, n);
        axpy(tmp, z, h, k3);
        const auto k4 = peakon_rhs(tmp, n);
        for (std::size_t i = 0; i < 2 * n; ++i) z[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (!finite(z)) throw BlowUp("peakon state became non-finite at t = " + std::to_string(t0 + h));

        std::vector<double> q(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(n));
        std::vector<double> p(z.begin() + static_cast<std::ptrdiff_t>(n), z.end());
        const double gap = n >= 2 ? min_gap(q) : std::numeric_limits<double>::infinity();
        const double t_next = s + 1 == steps ? t_end : t0 + h;
        bool order_changed = false;
        const auto& prev = flow.states.back().q;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (sgn(prev[i] - prev[j]) != sgn(q[i] - q[j])) order_changed = true;
        if (gap < collision_gap || order_changed) {
            flow.collided = true;
            flow.collision_time = t_next;
            break;
        }
        flow.states.push_back(make_peakon_state(std::move(q), std::move(p), t_next));
    }
    return flow;
}

}  // namespace hjb
