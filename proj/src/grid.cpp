#include "hjb/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hjb/errors.hpp"
#include "hjb/parallel.hpp"

namespace hjb {

std::string to_string(Orientation o) { return o == Orientation::Initial ? "initial" : "terminal"; }

Orientation orientation_from_string(const std::string& s) {
    if (s == "initial") return Orientation::Initial;
    if (s == "terminal") return Orientation::Terminal;
    throw ConfigError("orientation must be 'initial' or 'terminal', got '" + s + "'");
}

ValueField::ValueField(Box domain, std::vector<std::size_t> nx, std::size_t nt, double T, Orientation orientation)
    : domain_(std::move(domain)), nx_(std::move(nx)), nt_(nt), T_(T), orientation_(orientation) {
    if (nx_.size() == 1 && domain_.dim() > 1) nx_.assign(domain_.dim(), nx_.front());
    if (nx_.size() != domain_.dim()) throw ConfigError("need one node count per domain axis");
    for (auto n : nx_)
        if (n < 3) throw ConfigError("grid needs at least 3 nodes per axis");
    if (nt_ == 0) throw ConfigError("grid needs nt >= 1");
    if (!(T_ > 0.0)) throw ConfigError("grid needs T > 0");
    nodes_ = 1;
    for (auto n : nx_) nodes_ *= n;
    values_.assign((nt_ + 1) * nodes_, 0.0);
}

std::vector<std::size_t> ValueField::multi_index(std::size_t node) const {
    std::vector<std::size_t> idx(dim());
    for (std::size_t a = 0; a < dim(); ++a) {
        idx[a] = node % nx_[a];
        node /= nx_[a];
    }
    return idx;
}

std::size_t ValueField::flat_index(std::span<const std::size_t> idx) const {
    std::size_t flat = 0;
    for (std::size_t a = dim(); a-- > 0;) flat = flat * nx_[a] + idx[a];
    return flat;
}

std::vector<double> ValueField::node_point(std::size_t node) const {
    std::vector<double> x(dim());
    for (std::size_t a = 0; a < dim(); ++a) {
        x[a] = coord(a, node % nx_[a]);
        node /= nx_[a];
    }
    return x;
}

double ValueField::interpolate(std::size_t k, std::span<const double> x) const {
    const std::size_t n = dim();
    if (x.size() != n) throw DimensionMismatch("interpolation point has the wrong dimension");
    const double* base = values_.data() + k * nodes_;

    std::size_t i0[8];
    double w[8];
    std::size_t stride[8];
    if (n > 8) throw DimensionMismatch("grid interpolation supports up to 8 dimensions");
    std::size_t s = 1;
    for (std::size_t a = 0; a < n; ++a) {
        const double h = spacing(a);
        double pos = (x[a] - domain_.lo[a]) / h;
        pos = std::clamp(pos, 0.0, static_cast<double>(nx_[a] - 1));
        std::size_t i = static_cast<std::size_t>(pos);
        if (i > nx_[a] - 2) i = nx_[a] - 2;
        i0[a] = i;
        w[a] = pos - static_cast<double>(i);
        stride[a] = s;
        s *= nx_[a];
    }
    // nested lerps, reducing one axis at a time; exact on constant data
    double corner[256];
    const std::size_t corners = std::size_t{1} << n;
    for (std::size_t c = 0; c < corners; ++c) {
        std::size_t off = 0;
        for (std::size_t a = 0; a < n; ++a) off += (i0[a] + ((c >> a) & 1U)) * stride[a];
        corner[c] = base[off];
    }
    std::size_t count = corners;
    for (std::size_t a = 0; a < n; ++a) {
        count >>= 1;
        for (std::size_t c = 0; c < count; ++c) {
            const double lo = corner[2 * c];
            const double hi = corner[2 * c + 1];
            corner[c] = lo + w[a] * (hi - lo);
        }
    }
    return corner[0];
}

double ValueField::value_at(std::span<const double> x, double t) const {
    if (t < 0.0 || t > T_ * (1.0 + 1e-12)) throw DomainError("time outside the field");
    const auto k = static_cast<std::size_t>(std::lround(t / dt()));
    return interpolate(std::min(k, nt_), x);
}

double ValueField::sup_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double ValueField::min_value() const { return *std::min_element(values_.begin(), values_.end()); }
double ValueField::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

ValueField ValueField::reoriented() const {
    ValueField out(domain_, nx_, nt_, T_,
                   orientation_ == Orientation::Initial ? Orientation::Terminal : Orientation::Initial);
    for (std::size_t k = 0; k <= nt_; ++k) {
        const auto src = slice(k);
        std::copy(src.begin(), src.end(), out.slice(nt_ - k).begin());
    }
    return out;
}

ControlSampleSet ControlSampleSet::for_problem(std::size_t dim, double g_bound, double dt,
                                               std::size_t radial_levels, std::size_t angular) {
    ControlSampleSet s;
    s.dim = dim;
    s.radial_levels = radial_levels != 0 ? radial_levels : (dim == 1 ? 32 : 8);
    s.angular = angular;
    s.max_radius = 2.0 * std::sqrt(g_bound) / std::sqrt(dt);
    return s;
}

double ControlSampleSet::radius(std::size_t level) const {
    const double f = static_cast<double>(level) / static_cast<double>(radial_levels);
    return max_radius * f * f;
}

std::vector<std::vector<double>> ControlSampleSet::samples() const {
    std::vector<std::vector<double>> out;
    out.emplace_back(dim, 0.0);
    if (max_radius <= 0.0) return out;
    const double pi = std::acos(-1.0);
    for (std::size_t k = 1; k <= radial_levels; ++k) {
        const double r = radius(k);
        if (dim == 2) {
            for (std::size_t j = 0; j < angular; ++j) {
                const double th = 2.0 * pi * static_cast<double>(j) / static_cast<double>(angular);
                out.push_back({r * std::cos(th), r * std::sin(th)});
            }
        } else {
            for (std::size_t a = 0; a < dim; ++a)
                for (const double sign : {1.0, -1.0}) {
                    std::vector<double> v(dim, 0.0);
                    v[a] = sign * r;
                    out.push_back(std::move(v));
                }
        }
    }
    return out;
}

DomainCheck check_domain_margin(const SigmaField& sigma, const TerminalCost& g, const Box& domain,
                                const Box& report_region, double T) {
    DomainCheck c;
    double start = 0.0;
    for (std::size_t a = 0; a < report_region.dim(); ++a)
        start = std::max({start, std::abs(report_region.lo[a]), std::abs(report_region.hi[a])});
    c.required = sigma.reach(start, 2.0 * std::sqrt(g.bound()), T);
    c.available = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < domain.dim(); ++a) c.available = std::min({c.available, -domain.lo[a], domain.hi[a]});
    c.ok = c.required <= c.available;
    if (!c.ok)
        c.warning = "domain may be too small: characteristics from the report region can reach |x| = " +
                    std::to_string(c.required) + " but the domain only covers |x| <= " + std::to_string(c.available);
    return c;
}

namespace {

// Level j of the sweep (j steps away from the data) lives in slice j
// (initial) or nt - j (terminal); the arithmetic is the same either way.
std::size_t slice_for_level(const ValueField& f, std::size_t level) {
    return f.orientation() == Orientation::Initial ? level : f.nt() - level;
}

void fill_data_slice(ValueField& f, const TerminalCost& g) {
    auto s = f.slice(f.data_slice());
    parallel_for(f.nodes(), [&](std::size_t node) {
        const auto x = f.node_point(node);
        s[node] = g(x);
    });
}

std::vector<SymMatrix> node_matrices(const ValueField& f, const std::function<SymMatrix(const PositionVector&)>& m) {
    std::vector<SymMatrix> out(f.nodes());
    parallel_for(f.nodes(), [&](std::size_t node) { out[node] = m(PositionVector(f.node_point(node))); });
    return out;
}

double golden_min(const std::function<double(double)>& f, double a, double b, int iterations, double& arg) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int i = 0; i < iterations; ++i) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
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

ValueField solve_semi_lagrangian(const SigmaField& sigma, const TerminalCost& g, const Box& domain,
                                 std::vector<std::size_t> nx, std::size_t nt, double T,
                                 const ControlSampleSet& samples, Orientation orientation) {
    if (domain.dim() != sigma.dim) throw DimensionMismatch("domain and sigma dimensions differ");
    if (samples.dim != sigma.dim) throw DimensionMismatch("control samples and sigma dimensions differ");
    ValueField field(domain, std::move(nx), nt, T, orientation);
    const std::size_t n = field.dim();
    const double dt = field.dt();
    fill_data_slice(field, g);

    const auto sig = node_matrices(field, sigma.eval);
    const auto controls = samples.samples();
    // local refinement step: half the innermost radial spacing, or half the gap at the argmin level
    auto local_step = [&](double r) {
        if (samples.max_radius <= 0.0) return 0.0;
        std::size_t k = 1;
        while (k < samples.radial_levels && samples.radius(k) < r * (1.0 - 1e-12)) ++k;
        const double lo = samples.radius(k - 1);
        const double hi = samples.radius(std::min(k + 1, samples.radial_levels));
        return 0.5 * std::max(samples.radius(k) - lo, hi - samples.radius(k));
    };

    for (std::size_t level = 0; level < nt; ++level) {
        const std::size_t prev = slice_for_level(field, level);
        const std::size_t next = slice_for_level(field, level + 1);
        const auto prev_values = field.slice(prev);
        auto next_values = field.slice(next);

        parallel_for(field.nodes(), [&](std::size_t node) {
            const auto y = field.node_point(node);
            const SymMatrix& s = sig[node];
            std::vector<double> foot(n);
            auto candidate = [&](std::span<const double> a) {
                const auto v = s.apply(a);
                double a2 = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    foot[i] = y[i] + dt * v[i];
                    a2 += a[i] * a[i];
                }
                return 0.5 * dt * a2 + field.interpolate(prev, foot);
            };

            // a = 0 reads the node value itself
            double best = prev_values[node];
            std::size_t best_idx = 0;
            for (std::size_t c = 1; c < controls.size(); ++c) {
                const double v = candidate(controls[c]);
                if (v < best) {
                    best = v;
                    best_idx = c;
                }
            }

            if (samples.max_radius > 0.0) {
                const auto& a_best = controls[best_idx];
                const double r_best = euclidean_norm(a_best);
                const double h = local_step(r_best);
                if (n == 1) {
                    double arg = 0.0;
                    const double v = golden_min([&](double a) { return candidate(std::span<const double>(&a, 1)); },
                                                a_best[0] - 2.0 * h, a_best[0] + 2.0 * h, 40, arg);
                    if (v < best) best = v;
                } else if (n == 2) {
                    std::vector<double> a(2);
                    for (int i = -2; i <= 2; ++i)
                        for (int j = -2; j <= 2; ++j) {
                            if (i == 0 && j == 0) continue;
                            a[0] = a_best[0] + 0.5 * h * i;
                            a[1] = a_best[1] + 0.5 * h * j;
                            const double v = candidate(a);
                            if (v < best) best = v;
                        }
                } else {
                    std::vector<double> a;
                    for (std::size_t ax = 0; ax < n; ++ax)
                        for (const double off : {-h, -0.5 * h, 0.5 * h, h}) {
                            a = a_best;
                            a[ax] += off;
                            const double v = candidate(a);
                            if (v < best) best = v;
                        }
                }
            }
            next_values[node] = best;
        });
    }
    return field;
}

ValueField solve_lax_friedrichs(const SigmaField& sigma, const TerminalCost& g, const Box& domain,
                                std::vector<std::size_t> nx, std::size_t nt, double T, Orientation orientation) {
    if (domain.dim() != sigma.dim) throw DimensionMismatch("domain and sigma dimensions differ");
    ValueField field(domain, std::move(nx), nt, T, orientation);
    const std::size_t n = field.dim();
    const double dt = field.dt();
    fill_data_slice(field, g);
    const auto mats = node_matrices(field, sigma.squared);

    std::vector<double> inv_dx(n);
    std::vector<std::size_t> stride(n);
    std::size_t s = 1;
    for (std::size_t a = 0; a < n; ++a) {
        inv_dx[a] = 1.0 / field.spacing(a);
        stride[a] = s;
        s *= field.nx()[a];
    }

    std::vector<double> cfl(field.nodes());
    for (std::size_t level = 0; level < nt; ++level) {
        const auto prev = field.slice(slice_for_level(field, level));
        auto next = field.slice(slice_for_level(field, level + 1));
        parallel_for(field.nodes(), [&](std::size_t node) {
            const auto idx = field.multi_index(node);
            const SymMatrix& m = mats[node];
            std::vector<double> pm(n), pp(n), pbar(n), pmax(n);
            const double u = prev[node];
            for (std::size_t a = 0; a < n; ++a) {
                // ghost nodes copy the boundary value
                const double left = idx[a] > 0 ? prev[node - stride[a]] : u;
                const double right = idx[a] + 1 < field.nx()[a] ? prev[node + stride[a]] : u;
                pm[a] = (u - left) * inv_dx[a];
                pp[a] = (right - u) * inv_dx[a];
                pbar[a] = 0.5 * (pm[a] + pp[a]);
                pmax[a] = std::max(std::abs(pm[a]), std::abs(pp[a]));
            }
            const auto mp = m.apply(pbar);
            double h = 0.0;
            for (std::size_t a = 0; a < n; ++a) h += 0.5 * mp[a] * pbar[a];
            double courant = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                double theta = 0.0;
                for (std::size_t j = 0; j < n; ++j) theta += std::abs(m(k, j)) * pmax[j];
                h -= 0.5 * theta * (pp[k] - pm[k]);
                courant += theta * inv_dx[k];
            }
            cfl[node] = courant;
            next[node] = u - dt * h;
        });
        const double worst = *std::max_element(cfl.begin(), cfl.end());
        if (dt * worst > 1.0) {
            const long required = static_cast<long>(std::ceil(T * worst * 1.01));
            throw CflViolation("Lax-Friedrichs CFL violated at step " + std::to_string(level) + ": dt * sum theta/dx = " +
                                   std::to_string(dt * worst) + " > 1; use nt >= " + std::to_string(required),
                               required);
        }
    }
    return field;
}

std::vector<ResidualProbe> pde_residual_probe(
    const ValueField& field, const SigmaField& sigma, const std::vector<ProbePoint>& points,
    const std::function<double(std::span<const double>, double)>& kink_distance, double kink_tube) {
    const std::size_t n = field.dim();
    const double dt = field.dt();
    std::vector<ResidualProbe> out;
    out.reserve(points.size());
    for (const auto& pt : points) {
        ResidualProbe r;
        r.point = pt;
        if (pt.x.size() != n) throw DimensionMismatch("probe point has the wrong dimension");
        bool inside = true;
        for (std::size_t a = 0; a < n; ++a) {
            const double margin = 2.0 * field.spacing(a);
            if (pt.x[a] < field.domain().lo[a] + margin || pt.x[a] > field.domain().hi[a] - margin) inside = false;
        }
        const auto k = static_cast<std::size_t>(std::lround(pt.t / dt));
        if (k < 1 || k + 1 > field.nt()) inside = false;
        r.valid = inside;
        if (kink_distance) r.near_kink = kink_distance(pt.x, pt.t) < kink_tube;
        if (!inside) {
            out.push_back(std::move(r));
            continue;
        }
        const double ut = (field.interpolate(k + 1, pt.x) - field.interpolate(k - 1, pt.x)) / (2.0 * dt);
        std::vector<double> grad(n);
        std::vector<double> xp = pt.x;
        for (std::size_t a = 0; a < n; ++a) {
            const double h = field.spacing(a);
            xp[a] = pt.x[a] + h;
            const double up = field.interpolate(k, xp);
            xp[a] = pt.x[a] - h;
            const double um = field.interpolate(k, xp);
            xp[a] = pt.x[a];
            grad[a] = (up - um) / (2.0 * h);
        }
        const auto mg = sigma.squared(PositionVector(pt.x)).apply(grad);
        double ham = 0.0;
        for (std::size_t a = 0; a < n; ++a) ham += 0.5 * mg[a] * grad[a];
        r.residual = field.orientation() == Orientation::Initial ? ut + ham : ut - ham;
        out.push_back(std::move(r));
    }
    return out;
}

ValueField sample_field(const std::function<double(std::span<const double>, double)>& f, const Box& domain,
                        std::vector<std::size_t> nx, std::size_t nt, double T, Orientation orientation) {
    ValueField field(domain, std::move(nx), nt, T, orientation);
    for (std::size_t k = 0; k <= nt; ++k) {
        const double t = field.time(k);
        auto s = field.slice(k);
        parallel_for(field.nodes(), [&](std::size_t node) { s[node] = f(field.node_point(node), t); });
    }
    return field;
}

}  // namespace hjb
