#pragma once

// Closed forms for the one-dimensional problem
//
//   u_t + 1/2 |x| u_x^2 = 0,   u(x, 0) = g(x) = clamp(x, -1, 1),
//
// solved through y = A(x) = 2 sign(x) sqrt|x|, which turns it into
// v_t + 1/2 v_y^2 = 0 with v(y, 0) = v0(y) = g(A^{-1}(y)), u(x, t) = v(A(x), t).

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hjb/grid.hpp"

namespace hjb {

double transform_A(double x);
double transform_A_inv(double y);

/// v0(y) = g(A^{-1}(y)): -1 for y <= -2, y|y|/4 on (-2, 2), 1 for y >= 2.
double exact_v0(double y);

struct HopfLaxResult {
    double value = 0.0;
    double argmin = 0.0;
};

/// min_y v0(y) + (x - y)^2 / (2t) over |y - x| <= sqrt(4 t ||v0||_inf): coarse
/// bracketing, golden-section refinement in every bracket, smallest argmin on
/// ties. Throws DomainError for t <= 0.
HopfLaxResult hopf_lax(const std::function<double(double)>& v0, double v0_bound, double x, double t,
                       std::size_t coarse_points = 2001);
HopfLaxResult hopf_lax(double x, double t);

enum class Branch {
    Left,       // x <= -2, 0 <= t < 2
    Parabola,   // -2 < x <= 0, t >= x + 2
    Inner,      // -2 < x <= 0, t < x + 2
    Right,      // x > 0, t >= x^2/2 - 2
    Cap,        // x > 0, t < x^2/2 - 2
    LateTime,   // -2 < x <= 0, t >= 2
};

std::string to_string(Branch b);

struct PiecewiseSolution1D {
    Branch branch;
    double value;
};

/// Branch-dispatched closed form for v. Covered: all x for 0 <= t < 2, and
/// x in (-2, 0] for t >= 2. Throws NotCovered elsewhere.
PiecewiseSolution1D exact_v(double x, double t);
/// Evaluates one branch formula regardless of region (for continuity checks).
double branch_formula(Branch b, double x, double t);
/// Distance in x from the branch boundaries of v at time t (and from x = 0,
/// where A is not differentiable).
double branch_boundary_distance(double x, double t);

/// u(x, t) = v(A(x), t). For x in (-1, 0] and t >= 2 the result is
/// cross-checked against the explicit late-time form; a mismatch above 1e-12
/// throws InvariantFailure.
double exact_u(double x, double t);
/// (-2x - 4 sqrt(-x) + 2) / t - 1 for x in (-1, 0], t >= 2.
double late_time_u(double x, double t);

enum class Side { Left, Right, Both };
Side side_from_string(const std::string& s);
std::string to_string(Side s);

struct HolderFit {
    double exponent = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::vector<double> offsets;     ///< h_k = base * 2^-k actually used
    std::vector<double> increments;  ///< |f(x0 +- h_k) - f(x0)|
};

/// Least-squares slope of log|f(x0 +- h) - f(x0)| against log h over
/// h = base_offset * 2^-k, k < levels. Side::Both takes the larger of the two
/// one-sided increments. Zero increments are dropped; fewer than two usable
/// offsets throws DomainError.
HolderFit holder_fit(const std::function<double(double)>& f, double x0, double base_offset, std::size_t levels,
                     Side side = Side::Both);

/// T = 2 / (L C).
double lipschitz_horizon(double C, double L);

struct SlopeCheck {
    double t = 0.0;
    double max_slope = 0.0;
    double bound = 0.0;  ///< (1 + eps) C T / (T - t)
    bool ok = false;
};

inline constexpr double kSlopeSlack = 0.05;

/// Max difference quotient of f(., t) over the sorted nodes xs for each t,
/// against (1 + eps) C T / (T - t) with T = 2 / (L C). Every t must be < T.
std::vector<SlopeCheck> lipschitz_bound_check(const std::function<double(double, double)>& f,
                                              std::span<const double> xs, double C, double L,
                                              std::span<const double> times, double eps = kSlopeSlack);
/// Same check on the slices of a 1D field nearest to each time.
std::vector<SlopeCheck> lipschitz_bound_check(const ValueField& field, double C, double L,
                                              std::span<const double> times, double eps = kSlopeSlack);

}  // namespace hjb
