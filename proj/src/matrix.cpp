#include "hjb/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "hjb/errors.hpp"

namespace hjb {

PositionVector::PositionVector(std::vector<double> coords) : coords_(std::move(coords)) {
    if (coords_.empty()) throw DomainError("position vector must have at least one coordinate");
    if (!all_finite()) throw DomainError("position vector has a non-finite coordinate");
}

PositionVector::PositionVector(std::initializer_list<double> coords)
    : PositionVector(std::vector<double>(coords)) {}

bool PositionVector::all_finite() const noexcept {
    return std::all_of(coords_.begin(), coords_.end(), [](double v) { return std::isfinite(v); });
}

double euclidean_norm(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DimensionMismatch("distance between vectors of different size");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

SquareMatrix SquareMatrix::identity(std::size_t n) {
    SquareMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

SymMatrix SymMatrix::identity(std::size_t n) {
    SymMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1.0);
    return m;
}

SymMatrix SymMatrix::from_square(const SquareMatrix& m) {
    const std::size_t n = m.dim();
    SymMatrix out(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            if (m(i, j) != m(j, i)) throw DomainError("matrix is not symmetric");
            if (!std::isfinite(m(i, j))) throw DomainError("matrix has a non-finite entry");
            out.set(i, j, m(i, j));
        }
    }
    return out;
}

std::vector<double> SymMatrix::apply(std::span<const double> v) const {
    if (v.size() != n_) throw DimensionMismatch("matrix-vector dimension mismatch");
    std::vector<double> out(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n_; ++j) s += data_[i * n_ + j] * v[j];
        out[i] = s;
    }
    return out;
}

SymMatrix SymMatrix::squared() const {
    SymMatrix out(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i; j < n_; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n_; ++k) s += (*this)(i, k) * (*this)(k, j);
            out.set(i, j, s);
        }
    }
    return out;
}

SquareMatrix SymMatrix::as_square() const {
    SquareMatrix out(n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) out(i, j) = (*this)(i, j);
    return out;
}

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("matrix difference dimension mismatch");
    SymMatrix out(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = i; j < a.dim(); ++j) out.set(i, j, a(i, j) - b(i, j));
    return out;
}

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("matrix sum dimension mismatch");
    SymMatrix out(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = i; j < a.dim(); ++j) out.set(i, j, a(i, j) + b(i, j));
    return out;
}

SymMatrix operator*(double s, const SymMatrix& a) {
    SymMatrix out(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = i; j < a.dim(); ++j) out.set(i, j, s * a(i, j));
    return out;
}

SquareMatrix operator*(const SymMatrix& a, const SymMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("matrix product dimension mismatch");
    const std::size_t n = a.dim();
    SquareMatrix out(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += a(i, k) * b(k, j);
            out(i, j) = s;
        }
    return out;
}

double max_abs_entry_diff(const SymMatrix& a, const SymMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("matrix comparison dimension mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

double max_abs_entry_diff(const SquareMatrix& a, const SquareMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("matrix comparison dimension mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

SymEigen jacobi_eigen(const SymMatrix& m, double tol) {
    const std::size_t n = m.dim();
    SquareMatrix a = m.as_square();
    SquareMatrix v = SquareMatrix::identity(n);

    double fro = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) fro += a(i, j) * a(i, j);
    fro = std::sqrt(fro);
    const double threshold = fro > 0.0 ? tol * fro : tol;

    constexpr int kMaxSweeps = 100;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) off += a(i, j) * a(i, j);
        if (std::sqrt(off) <= threshold) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                // A <- J^T A J with J the (p,q) rotation.
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    SymEigen out;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = a(i, i);
    out.vectors = std::move(v);
    return out;
}

double min_eigenvalue(const SymMatrix& m) {
    const auto eig = jacobi_eigen(m);
    return *std::min_element(eig.values.begin(), eig.values.end());
}

double operator_norm(const SymMatrix& m) {
    if (m.dim() == 0) return 0.0;
    const auto eig = jacobi_eigen(m);
    double r = 0.0;
    for (double l : eig.values) r = std::max(r, std::abs(l));
    return r;
}

double operator_norm(const SquareMatrix& m) {
    const std::size_t n = m.dim();
    if (n == 0) return 0.0;
    SymMatrix gram(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += m(k, i) * m(k, j);
            gram.set(i, j, s);
        }
    const auto eig = jacobi_eigen(gram);
    double r = 0.0;
    for (double l : eig.values) r = std::max(r, l);
    return std::sqrt(r);
}

SymMatrix build_interaction_matrix(const PositionVector& x) {
    const std::size_t n = x.size();
    SymMatrix e(n);
    for (std::size_t i = 0; i < n; ++i) {
        e.set(i, i, 1.0);
        for (std::size_t j = i + 1; j < n; ++j) e.set(i, j, std::exp(-std::abs(x[i] - x[j])));
    }
    return e;
}

SymMatrix sqrt_2d(const PositionVector& x) {
    if (x.size() != 2) throw DimensionMismatch("sqrt_2d requires N = 2, got N = " + std::to_string(x.size()));
    const double rho = std::abs(x[0] - x[1]);
    const double plus = std::sqrt(1.0 + std::exp(-rho));
    const double minus = std::sqrt(-std::expm1(-rho));
    SymMatrix r(2);
    r.set(0, 0, 0.5 * (plus + minus));
    r.set(1, 1, 0.5 * (plus + minus));
    r.set(0, 1, 0.5 * (plus - minus));
    return r;
}

SymMatrix sqrt_psd_general(const SymMatrix& m, double psd_clamp) {
    const std::size_t n = m.dim();
    const auto eig = jacobi_eigen(m);
    std::vector<double> root(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double l = eig.values[k];
        if (l < -psd_clamp)
            throw NotPositiveSemidefinite("eigenvalue " + std::to_string(l) + " below -" + std::to_string(psd_clamp));
        root[k] = l > 0.0 ? std::sqrt(l) : 0.0;
    }
    SymMatrix r(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += eig.vectors(i, k) * root[k] * eig.vectors(j, k);
            r.set(i, j, s);
        }
    return r;
}

SymMatrix inv_sqrt_2d(const PositionVector& x, double degenerate_gap) {
    if (x.size() != 2) throw DimensionMismatch("inv_sqrt_2d requires N = 2, got N = " + std::to_string(x.size()));
    const double rho = std::abs(x[0] - x[1]);
    if (!(rho > degenerate_gap))
        throw DegenerateMatrix("sqrt(E(x)) is singular: |x1 - x2| = " + std::to_string(rho));
    const double inv_plus = 1.0 / std::sqrt(1.0 + std::exp(-rho));
    const double inv_minus = 1.0 / std::sqrt(-std::expm1(-rho));
    SymMatrix r(2);
    r.set(0, 0, 0.5 * (inv_plus + inv_minus));
    r.set(1, 1, 0.5 * (inv_plus + inv_minus));
    r.set(0, 1, 0.5 * (inv_plus - inv_minus));
    return r;
}

std::vector<double> apply_inv_sqrt_2d(double rho, std::span<const double> w) {
    if (w.size() != 2) throw DimensionMismatch("apply_inv_sqrt_2d requires a 2-vector");
    const double plus = std::sqrt(1.0 + std::exp(-rho));
    const double minus = std::sqrt(-std::expm1(-rho));
    const double sum_term = (w[0] + w[1]) / plus;
    const double diff = w[0] - w[1];
    double diff_term = 0.0;
    if (diff != 0.0) {
        if (minus == 0.0) throw DegenerateMatrix("w has a component along the kernel of sqrt(E) at rho = 0");
        diff_term = diff / minus;
    }
    return {0.5 * (sum_term + diff_term), 0.5 * (sum_term - diff_term)};
}

namespace {

SymMatrix root_of(const PositionVector& x, const SymMatrix& e) {
    return x.size() == 2 ? sqrt_2d(x) : sqrt_psd_general(e);
}

}  // namespace

RegularityConstants probe_constants(std::size_t samples, const Box& box, std::uint64_t seed) {
    const std::size_t n = box.dim();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    auto uniform_point = [&] {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = box.lo[i] + unit(rng) * box.width(i);
        return x;
    };

    RegularityConstants out;
    bool have_excess = false;
    for (std::size_t s = 0; s < samples; ++s) {
        std::vector<double> x = uniform_point();
        std::vector<double> y;
        const std::size_t mode = s % 3;
        if (mode == 0) {
            y = uniform_point();
        } else {
            if (mode == 2 && n >= 2) {
                // pin x to a collision hyperplane x_i = x_j
                const std::size_t i = static_cast<std::size_t>(unit(rng) * n) % n;
                std::size_t j = static_cast<std::size_t>(unit(rng) * (n - 1)) % (n - 1);
                if (j >= i) ++j;
                x[j] = x[i];
            }
            const double h = std::ldexp(1.0, -static_cast<int>(unit(rng) * 30.0));
            std::vector<double> dir(n);
            for (auto& d : dir) d = gauss(rng);
            const double len = euclidean_norm(dir);
            y = x;
            if (len > 0.0)
                for (std::size_t i = 0; i < n; ++i) y[i] += h * dir[i] / len;
        }

        const PositionVector px(x);
        const PositionVector py(y);
        const SymMatrix ex = build_interaction_matrix(px);
        const SymMatrix ey = build_interaction_matrix(py);
        const SymMatrix rx = root_of(px, ex);
        const SymMatrix ry = root_of(py, ey);

        out.C0 = std::max({out.C0, operator_norm(ex), operator_norm(ey)});
        out.C1 = std::max({out.C1, operator_norm(rx), operator_norm(ry)});
        ++out.pairs;

        const double dist = euclidean_distance(x, y);
        if (dist == 0.0) continue;
        const double e_gap = operator_norm(ex - ey);
        const double r_gap = operator_norm(rx - ry);
        out.L0 = std::max(out.L0, e_gap / dist);
        out.L1 = std::max(out.L1, r_gap / std::sqrt(dist));
        const double excess = r_gap - std::sqrt(e_gap);
        if (!have_excess || excess > out.root_bound_excess) out.root_bound_excess = excess;
        have_excess = true;
    }
    return out;
}

}  // namespace hjb
