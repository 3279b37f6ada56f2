#include "hjb/exact1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hjb/errors.hpp"

namespace hjb {

double transform_A(double x) { return std::copysign(2.0 * std::sqrt(std::abs(x)), x); }

double transform_A_inv(double y) { return std::copysign(0.25 * y * y, y); }

double exact_v0(double y) {
    if (y <= -2.0) return -1.0;
    if (y >= 2.0) return 1.0;
    return 0.25 * y * std::abs(y);
}

namespace {

double golden_section(const std::function<double(double)>& f, double a, double b, double& arg) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - r * (b - a);
    double d = a + r * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > 1e-13 * std::max(1.0, std::abs(a) + std::abs(b))) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if (fc <= fd) {
        arg = c;
        return fc;
    }
    arg = d;
    return fd;
}

}  // namespace

HopfLaxResult hopf_lax(const std::function<double(double)>& v0, double v0_bound, double x, double t,
                       std::size_t coarse_points) {
    if (!(t > 0.0)) throw DomainError("hopf_lax needs t > 0; at t = 0 the value is v0(x)");
    if (coarse_points < 3) throw ConfigError("hopf_lax needs at least 3 coarse points");
    auto objective = [&](double y) { return v0(y) + (x - y) * (x - y) / (2.0 * t); };

    const double radius = std::sqrt(4.0 * t * v0_bound);
    HopfLaxResult best{objective(x), x};
    if (radius == 0.0) return best;

    const double lo = x - radius;
    const double step = 2.0 * radius / static_cast<double>(coarse_points - 1);
    std::vector<double> ys(coarse_points);
    std::vector<double> fs(coarse_points);
    for (std::size_t i = 0; i < coarse_points; ++i) {
        ys[i] = i + 1 == coarse_points ? x + radius : lo + static_cast<double>(i) * step;
        fs[i] = objective(ys[i]);
    }
    best = {std::numeric_limits<double>::infinity(), 0.0};
    for (std::size_t i = 0; i < coarse_points; ++i) {
        const bool left_ok = i == 0 || fs[i] <= fs[i - 1];
        const bool right_ok = i + 1 == coarse_points || fs[i] <= fs[i + 1];
        if (!left_ok || !right_ok) continue;
        double arg = ys[i];
        double val = fs[i];
        const double a = ys[i == 0 ? 0 : i - 1];
        const double b = ys[std::min(i + 1, coarse_points - 1)];
        double refined_arg = arg;
        const double refined = golden_section(objective, a, b, refined_arg);
        if (refined < val) {
            val = refined;
            arg = refined_arg;
        }
        if (val < best.value) best = {val, arg};
    }
    return best;
}

HopfLaxResult hopf_lax(double x, double t) { return hopf_lax(exact_v0, 1.0, x, t); }

std::string to_string(Branch b) {
    switch (b) {
        case Branch::Left: return "left";
        case Branch::Parabola: return "parabola";
        case Branch::Inner: return "inner";
        case Branch::Right: return "right";
        case Branch::Cap: return "cap";
        case Branch::LateTime: return "late-time";
    }
    return "?";
}

double branch_formula(Branch b, double x, double t) {
    switch (b) {
        case Branch::Left: return -1.0;
        case Branch::Parabola:
        case Branch::LateTime: return (x + 2.0) * (x + 2.0) / (2.0 * t) - 1.0;
        case Branch::Inner: return x * x / (2.0 * (t - 2.0));
        case Branch::Right: return x * x / (2.0 * (t + 2.0));
        case Branch::Cap: return 1.0;
    }
    return 0.0;
}

PiecewiseSolution1D exact_v(double x, double t) {
    if (!std::isfinite(x) || !std::isfinite(t) || t < 0.0) throw NotCovered("exact_v needs finite x and t >= 0");
    Branch b;
    if (t < 2.0) {
        if (x <= -2.0)
            b = Branch::Left;
        else if (x <= 0.0)
            b = t >= x + 2.0 ? Branch::Parabola : Branch::Inner;
        else
            b = t >= 0.5 * x * x - 2.0 ? Branch::Right : Branch::Cap;
    } else {
        if (!(x > -2.0 && x <= 0.0))
            throw NotCovered("v(x, t) for t >= 2 is only known for x in (-2, 0]; got x = " + std::to_string(x) +
                             ", t = " + std::to_string(t));
        b = Branch::LateTime;
    }
    return {b, branch_formula(b, x, t)};
}

double branch_boundary_distance(double x, double t) {
    double d = std::min(std::abs(x + 2.0), std::abs(x));
    if (t < 2.0) {
        d = std::min(d, std::abs(x - (t - 2.0)));
        d = std::min(d, std::abs(x - std::sqrt(2.0 * (t + 2.0))));
    }
    return d;
}

double late_time_u(double x, double t) { return (-2.0 * x - 4.0 * std::sqrt(-x) + 2.0) / t - 1.0; }

double exact_u(double x, double t) {
    const double value = exact_v(transform_A(x), t).value;
    if (t >= 2.0 && x > -1.0 && x <= 0.0) {
        const double explicit_value = late_time_u(x, t);
        if (std::abs(explicit_value - value) > 1e-12)
            throw InvariantFailure("late-time formula disagrees with v(A(x), t) at x = " + std::to_string(x));
    }
    return value;
}

Side side_from_string(const std::string& s) {
    if (s == "left") return Side::Left;
    if (s == "right") return Side::Right;
    if (s == "both") return Side::Both;
    throw ConfigError("side must be left, right or both, got '" + s + "'");
}

std::string to_string(Side s) {
    switch (s) {
        case Side::Left: return "left";
        case Side::Right: return "right";
        case Side::Both: return "both";
    }
    return "?";
}

HolderFit holder_fit(const std::function<double(double)>& f, double x0, double base_offset, std::size_t levels,
                     Side side) {
    if (levels < 4) throw ConfigError("holder_fit needs at least 4 levels");
    if (!(base_offset > 0.0)) throw ConfigError("holder_fit needs a positive base offset");
    HolderFit fit;
    const double f0 = f(x0);
    std::vector<double> lx;
    std::vector<double> ly;
    double h = base_offset;
    for (std::size_t k = 0; k < levels; ++k, h *= 0.5) {
        double inc = 0.0;
        if (side != Side::Right) inc = std::max(inc, std::abs(f(x0 - h) - f0));
        if (side != Side::Left) inc = std::max(inc, std::abs(f(x0 + h) - f0));
        if (!(inc > 0.0) || !std::isfinite(inc)) continue;
        fit.offsets.push_back(h);
        fit.increments.push_back(inc);
        lx.push_back(std::log(h));
        ly.push_back(std::log(inc));
    }
    if (lx.size() < 2) throw DomainError("holder_fit: fewer than two nonzero increments");
    const double n = static_cast<double>(lx.size());
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    fit.exponent = sxy / sxx;
    fit.intercept = my - fit.exponent * mx;
    fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

double lipschitz_horizon(double C, double L) {
    if (!(C > 0.0) || !(L > 0.0)) throw ConfigError("lipschitz_horizon needs C > 0 and L > 0");
    return 2.0 / (L * C);
}

namespace {

SlopeCheck slope_check(double t, double max_slope, double C, double T, double eps) {
    if (!(t < T)) throw DomainError("slope bound needs t < T = " + std::to_string(T));
    SlopeCheck c;
    c.t = t;
    c.max_slope = max_slope;
    c.bound = (1.0 + eps) * C * T / (T - t);
    c.ok = max_slope <= c.bound;
    return c;
}

}  // namespace

std::vector<SlopeCheck> lipschitz_bound_check(const std::function<double(double, double)>& f,
                                              std::span<const double> xs, double C, double L,
                                              std::span<const double> times, double eps) {
    if (xs.size() < 2) throw ConfigError("slope check needs at least two nodes");
    const double T = lipschitz_horizon(C, L);
    std::vector<SlopeCheck> out;
    for (const double t : times) {
        double m = 0.0;
        double prev = f(xs[0], t);
        for (std::size_t i = 1; i < xs.size(); ++i) {
            const double cur = f(xs[i], t);
            m = std::max(m, std::abs(cur - prev) / (xs[i] - xs[i - 1]));
            prev = cur;
        }
        out.push_back(slope_check(t, m, C, T, eps));
    }
    return out;
}

std::vector<SlopeCheck> lipschitz_bound_check(const ValueField& field, double C, double L,
                                              std::span<const double> times, double eps) {
    if (field.dim() != 1) throw DimensionMismatch("slope check on a field needs a 1D grid");
    const double T = lipschitz_horizon(C, L);
    const double h = field.spacing(0);
    std::vector<SlopeCheck> out;
    for (const double t : times) {
        if (t < 0.0 || t > field.T()) throw DomainError("slope check time outside the field");
        const auto k = static_cast<std::size_t>(std::lround(t / field.dt()));
        const auto s = field.slice(std::min(k, field.nt()));
        double m = 0.0;
        for (std::size_t i = 1; i < s.size(); ++i) m = std::max(m, std::abs(s[i] - s[i - 1]) / h);
        out.push_back(slope_check(t, m, C, T, eps));
    }
    return out;
}

}  // namespace hjb
