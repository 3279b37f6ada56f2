#pragma once

// Peakon interaction matrix E(x) and its symmetric positive semi-definite
// square root.
//
// E(x)_ij = exp(-|x_i - x_j|) is symmetric PSD for every x and singular on the
// collision set {x_i = x_j}. The square root is only 1/2-Holder in x, which is
// what makes the state equation x' = sqrt(E(x)) a(t) non-Lipschitz.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "hjb/box.hpp"

namespace hjb {

/// A point in R^N (peakon positions).
class PositionVector {
public:
    PositionVector() = default;
    explicit PositionVector(std::vector<double> coords);
    PositionVector(std::initializer_list<double> coords);

    std::size_t size() const noexcept { return coords_.size(); }
    double operator[](std::size_t i) const { return coords_[i]; }
    double& operator[](std::size_t i) { return coords_[i]; }
    std::span<const double> coords() const noexcept { return coords_; }
    const std::vector<double>& vec() const noexcept { return coords_; }

    bool all_finite() const noexcept;

private:
    std::vector<double> coords_;
};

double euclidean_distance(std::span<const double> a, std::span<const double> b);
double euclidean_norm(std::span<const double> a);

/// Dense square matrix, row-major. Used for products that need not be symmetric.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

    static SquareMatrix identity(std::size_t n);

    std::size_t dim() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// Symmetric matrix. Writes through set() keep entries(i,j) == entries(j,i) bit-exactly.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

    static SymMatrix identity(std::size_t n);
    /// Throws DomainError if m is not exactly symmetric or has non-finite entries.
    static SymMatrix from_square(const SquareMatrix& m);

    std::size_t dim() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    void set(std::size_t i, std::size_t j, double v) {
        data_[i * n_ + j] = v;
        data_[j * n_ + i] = v;
    }

    std::vector<double> apply(std::span<const double> v) const;
    /// A * A, which is symmetric term by term.
    SymMatrix squared() const;
    SquareMatrix as_square() const;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator*(double s, const SymMatrix& a);
SquareMatrix operator*(const SymMatrix& a, const SymMatrix& b);

double max_abs_entry_diff(const SymMatrix& a, const SymMatrix& b);
double max_abs_entry_diff(const SquareMatrix& a, const SquareMatrix& b);

/// Spectral decomposition m = V diag(values) V^T; columns of vectors are eigenvectors.
struct SymEigen {
    std::vector<double> values;
    SquareMatrix vectors;
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below
/// tol * ||m||_F (or below tol when m is zero).
SymEigen jacobi_eigen(const SymMatrix& m, double tol = 1e-13);

double min_eigenvalue(const SymMatrix& m);
/// Operator (spectral) norm.
double operator_norm(const SymMatrix& m);
double operator_norm(const SquareMatrix& m);

inline constexpr double kPsdClamp = 1e-10;
inline constexpr double kDegenerateGap = 1e-12;

/// E(x)_ij = exp(-|x_i - x_j|).
SymMatrix build_interaction_matrix(const PositionVector& x);

/// Closed-form root for N = 2, with rho = |x_1 - x_2|:
///   1/2 [[s+ + s-, s+ - s-], [s+ - s-, s+ + s-]],  s+- = sqrt(1 +- e^-rho).
SymMatrix sqrt_2d(const PositionVector& x);

/// Spectral root; eigenvalues in [-psd_clamp, 0) are clamped to zero, anything
/// more negative throws NotPositiveSemidefinite.
SymMatrix sqrt_psd_general(const SymMatrix& m, double psd_clamp = kPsdClamp);

/// Explicit inverse of sqrt_2d, defined when |x_1 - x_2| > degenerate_gap.
SymMatrix inv_sqrt_2d(const PositionVector& x, double degenerate_gap = kDegenerateGap);

/// sqrt(E)^{-1} w for N = 2 written in terms of rho, evaluated without forming
/// the matrix. The (w_1 - w_2) / sqrt(1 - e^-rho) term is taken as 0 when both
/// numerator and rho vanish, which is the limit along trajectories that approach
/// the diagonal with w_1 - w_2 proportional to rho.
std::vector<double> apply_inv_sqrt_2d(double rho, std::span<const double> w);

/// Empirical regularity constants of x -> E(x) and x -> sqrt(E(x)).
struct RegularityConstants {
    double L0 = 0.0;  ///< max ||E(x)-E(y)|| / |x-y|
    double C0 = 0.0;  ///< max ||E(x)||
    double L1 = 0.0;  ///< max ||sqrt E(x) - sqrt E(y)|| / sqrt|x-y|
    double C1 = 0.0;  ///< max ||sqrt E(x)||
    /// max over pairs of ||sqrt E(x) - sqrt E(y)|| - sqrt(||E(x) - E(y)||); should be <= 0.
    double root_bound_excess = 0.0;
    std::size_t pairs = 0;
};

/// Samples `samples` pairs in `box` (half uniform, half local pairs at dyadic
/// separations, some pinned to the collision set). Pairs with x == y
/// contribute zero ratios. Deterministic for a fixed seed.
RegularityConstants probe_constants(std::size_t samples, const Box& box, std::uint64_t seed);

}  // namespace hjb
