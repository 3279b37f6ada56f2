#pragma once

// Replays the three explicit steering constructions that move the N = 2 state
// from y_n to y0 in time t_n - t0 with vanishing control energy:
//
//   I   y0 on the diagonal, y_n off it:  t_n = t0 + (|dy^1| + |dy^2|)^{1/4},
//       x(t) = y0 + e^{E(t)} (y_n - y0),  E(t) = 1/(t_n - t0) - 1/(t_n - t),
//       a(t) = (t_n - t)^{-2} sqrt(E(x))^{-1} (y0 - x)
//   II  both on the diagonal:  t_n = t0 + sqrt2 |dy^1|, a = sgn (1, 0)
//   III y0 off the diagonal:   t_n = t0 + |dy|, a = sqrt(E(x))^{-1} dy / |dy|

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "hjb/matrix.hpp"

namespace hjb {

enum class LemmaCase { I, II, III };
std::string to_string(LemmaCase c);

struct ConstructionRun {
    LemmaCase which = LemmaCase::I;
    PositionVector y0;
    PositionVector yn;
    double t0 = 0.0;
    double tn = 0.0;
    double cost = 0.0;            ///< int_{t0}^{tn} |a|^2
    double cost_refined = 0.0;    ///< same integral on the doubled mesh (case I) or panel count (III)
    double endpoint_error = 0.0;  ///< |x(tn) - y0|
    double residual = 0.0;        ///< max |x'(t) - sqrt(E(x)) a(t)| over checked times
    double max_control = 0.0;     ///< max |a(t)| on the sample mesh
    double diagonal_gap = 0.0;    ///< max |x^1 - x^2| (case II) or min (case III) along the path
    std::vector<double> times;
    std::vector<PositionVector> states;
};

struct CaseOptions {
    std::size_t mesh = 64;             ///< graded panels (case I) or uniform panels (case III)
    double residual_cutoff = 1e-4;     ///< case I residual checked for t <= tn - cutoff
    std::size_t residual_points = 200;
};

/// Throws DomainError unless y0^1 = y0^2, y_n^1 != y_n^2.
ConstructionRun lemma_case1(const PositionVector& y0, const PositionVector& yn, double t0,
                            const CaseOptions& options = {});
/// Throws DomainError unless both points are on the diagonal and differ.
ConstructionRun lemma_case2(const PositionVector& y0, const PositionVector& yn, double t0,
                            const CaseOptions& options = {});
/// Throws DomainError unless y0^1 != y0^2 and the segment [y_n, y0] keeps a
/// distance of at least half of dist(y0, diagonal) from the diagonal.
ConstructionRun lemma_case3(const PositionVector& y0, const PositionVector& yn, double t0,
                            const CaseOptions& options = {});

struct VerifyOptions {
    std::uint64_t seed = 42;
    std::size_t sequences = 20;  ///< per case
    std::size_t levels = 12;     ///< perturbation sizes scale * 4^-k
    double scale = 0.1;
    CaseOptions case_options{};
};

/// Runs every case along randomized shrinking sequences and checks
/// endpoint, energy decay, state-equation residual and t_n rates.
nlohmann::ordered_json verify_all(const VerifyOptions& options = {});

}  // namespace hjb
