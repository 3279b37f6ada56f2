#include <doctest.h>

#include <cmath>
#include <random>

#include "hjb/errors.hpp"
#include "hjb/matrix.hpp"

using namespace hjb;

namespace {

double frob_diff(const SymMatrix& a, const SymMatrix& b) { return operator_norm(a - b); }

}  // namespace

TEST_CASE("interaction matrix closed values") {
    const auto e0 = build_interaction_matrix(PositionVector{0.0, 0.0});
    CHECK(e0(0, 0) == 1.0);
    CHECK(e0(0, 1) == 1.0);
    CHECK(e0(1, 1) == 1.0);

    const auto e1 = build_interaction_matrix(PositionVector{0.0, std::log(2.0)});
    CHECK(e1(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(e1(1, 0) == e1(0, 1));

    const auto e3 = build_interaction_matrix(PositionVector{0.0, 1.0, 3.0});
    CHECK(e3(0, 1) == doctest::Approx(std::exp(-1.0)));
    CHECK(e3(0, 2) == doctest::Approx(std::exp(-3.0)));
    CHECK(e3(1, 2) == doctest::Approx(std::exp(-2.0)));
}

TEST_CASE("interaction matrix is unit-diagonal PSD with entries in (0, 1]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int n = 1; n <= 5; ++n)
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<double> x(n);
            for (auto& v : x) v = u(rng);
            const auto e = build_interaction_matrix(PositionVector(x));
            for (int i = 0; i < n; ++i) {
                CHECK(e(i, i) == 1.0);
                for (int j = 0; j < n; ++j) {
                    CHECK(e(i, j) > 0.0);
                    CHECK(e(i, j) <= 1.0);
                    CHECK(e(i, j) == e(j, i));
                }
            }
            CHECK(min_eigenvalue(e) >= -1e-12);
        }
}

TEST_CASE("sqrt_2d oracles") {
    SUBCASE("coincident points give ones/sqrt2") {
        for (double a : {-3.0, 0.0, 2.5}) {
            const auto r = sqrt_2d(PositionVector{a, a});
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) CHECK(r(i, j) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
        }
    }
    SUBCASE("x = (0, ln 2)") {
        const PositionVector x{0.0, std::log(2.0)};
        const auto r = sqrt_2d(x);
        CHECK(r(0, 0) == doctest::Approx(0.965926).epsilon(1e-6));
        CHECK(r(0, 1) == doctest::Approx(0.258819).epsilon(1e-6));
        CHECK(max_abs_entry_diff(r.squared(), build_interaction_matrix(x)) < 1e-12);
    }
    SUBCASE("far apart tends to identity") {
        const auto r = sqrt_2d(PositionVector{0.0, 60.0});
        CHECK(max_abs_entry_diff(r, SymMatrix::identity(2)) < 1e-12);
    }
    SUBCASE("wrong dimension") { CHECK_THROWS_AS(sqrt_2d(PositionVector{0.0, 1.0, 2.0}), DimensionMismatch); }
}

TEST_CASE("sqrt_2d squares to E and is PSD on random points") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int k = 0; k < 2000; ++k) {
        const PositionVector x{u(rng), u(rng)};
        const auto r = sqrt_2d(x);
        CHECK(max_abs_entry_diff(r.squared(), build_interaction_matrix(x)) < 1e-12);
        CHECK(min_eigenvalue(r) >= -1e-12);
        CHECK(frob_diff(r, sqrt_psd_general(build_interaction_matrix(x))) < 1e-10);
    }
}

TEST_CASE("sqrt_psd_general") {
    CHECK(max_abs_entry_diff(sqrt_psd_general(SymMatrix::identity(4)), SymMatrix::identity(4)) < 1e-15);

    const SymMatrix ones(3, 1.0);
    const auto r = sqrt_psd_general(ones);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(r(i, j) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
    CHECK(max_abs_entry_diff(r.squared(), ones) < 1e-12);

    SymMatrix bad(2, 0.0);
    bad.set(0, 0, 1.0);
    bad.set(1, 1, -1e-3);
    CHECK_THROWS_AS(sqrt_psd_general(bad), NotPositiveSemidefinite);

    SymMatrix tiny(2, 0.0);
    tiny.set(0, 0, 1.0);
    tiny.set(1, 1, -1e-12);
    CHECK_NOTHROW(sqrt_psd_general(tiny));
}

TEST_CASE("jacobi eigen reconstructs a random symmetric matrix") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    SymMatrix m(5);
    for (int i = 0; i < 5; ++i)
        for (int j = i; j < 5; ++j) m.set(i, j, g(rng));
    const auto eig = jacobi_eigen(m);
    SquareMatrix rebuilt(5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            for (int k = 0; k < 5; ++k)
                rebuilt(i, j) += eig.vectors(i, k) * eig.values[k] * eig.vectors(j, k);
    CHECK(max_abs_entry_diff(rebuilt, m.as_square()) < 1e-12);
}

TEST_CASE("inv_sqrt_2d") {
    const PositionVector x{0.0, 1.0};
    CHECK(max_abs_entry_diff(inv_sqrt_2d(x) * sqrt_2d(x), SquareMatrix::identity(2)) < 1e-10);
    CHECK_THROWS_AS(inv_sqrt_2d(PositionVector{0.0, 0.0}), DegenerateMatrix);
    CHECK(max_abs_entry_diff(inv_sqrt_2d(PositionVector{0.0, 50.0}), SymMatrix::identity(2)) < 1e-10);

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    std::uniform_real_distribution<double> gap(1e-3, 3.0);
    for (int k = 0; k < 1000; ++k) {
        const double a = u(rng);
        const PositionVector y{a, a + (k % 2 ? 1.0 : -1.0) * gap(rng)};
        CHECK(max_abs_entry_diff(inv_sqrt_2d(y) * sqrt_2d(y), SquareMatrix::identity(2)) < 1e-8);
    }
}

TEST_CASE("apply_inv_sqrt_2d matches the matrix form and its diagonal limit") {
    const PositionVector x{0.3, 1.1};
    const std::vector<double> w{0.7, -0.2};
    const auto direct = inv_sqrt_2d(x).apply(w);
    const auto fn = apply_inv_sqrt_2d(0.8, w);
    CHECK(fn[0] == doctest::Approx(direct[0]).epsilon(1e-13));
    CHECK(fn[1] == doctest::Approx(direct[1]).epsilon(1e-13));
    const auto limit = apply_inv_sqrt_2d(0.0, std::vector<double>{1.0, 1.0});
    CHECK(limit[0] == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK_THROWS_AS(apply_inv_sqrt_2d(0.0, std::vector<double>{1.0, 0.0}), DegenerateMatrix);
}

TEST_CASE("probe_constants") {
    const auto c = probe_constants(3000, Box::cube(2, -10.0, 10.0), 7);
    CHECK(c.C1 <= std::sqrt(2.0) + 1e-9);
    CHECK(c.C1 <= std::sqrt(c.C0) + 1e-12);
    CHECK(c.C0 <= 2.0 + 1e-12);
    CHECK(std::isfinite(c.L1));
    CHECK(c.L1 > 0.0);
    CHECK(c.root_bound_excess <= 1e-10);

    const auto again = probe_constants(3000, Box::cube(2, -10.0, 10.0), 7);
    CHECK(again.L0 == c.L0);
    CHECK(again.L1 == c.L1);

    // one degenerate pair: everything stays zero
    const auto tiny = probe_constants(2, Box::cube(1, 0.0, 1.0), 1);
    CHECK(tiny.C1 == doctest::Approx(1.0));
    CHECK(tiny.L0 == 0.0);
}

TEST_CASE("position vector validation") {
    CHECK_THROWS(PositionVector(std::vector<double>{}));
    CHECK_THROWS(PositionVector{0.0, std::nan("")});
}
