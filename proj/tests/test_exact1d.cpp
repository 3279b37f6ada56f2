#include <doctest.h>

#include <cmath>
#include <random>

#include "hjb/errors.hpp"
#include "hjb/exact1d.hpp"

using namespace hjb;

TEST_CASE("A transform") {
    CHECK(transform_A(0.0) == 0.0);
    CHECK(transform_A_inv(0.0) == 0.0);
    CHECK(transform_A(1.0) == 2.0);
    CHECK(transform_A_inv(2.0) == 1.0);
    CHECK(transform_A(-0.25) == -1.0);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(rng);
        CHECK(std::abs(transform_A_inv(transform_A(x)) - x) <= 1e-14 * std::max(1.0, std::abs(x)));
        CHECK(transform_A(-x) == -transform_A(x));
        CHECK(transform_A_inv(-x) == -transform_A_inv(x));
    }
}

TEST_CASE("v0 is g after the transform") {
    for (double x = -4.0; x <= 4.0; x += 0.01) {
        const double g = std::clamp(x, -1.0, 1.0);
        CHECK(exact_v0(transform_A(x)) == doctest::Approx(g).epsilon(1e-14));
        CHECK(exact_u(x, 0.0) == doctest::Approx(g).epsilon(1e-14));
    }
}

TEST_CASE("exact_v point values") {
    CHECK(exact_v(-3.0, 1.0).value == -1.0);
    CHECK(exact_v(-3.0, 1.0).branch == Branch::Left);
    CHECK(exact_v(-1.0, 1.0).value == -0.5);
    CHECK(exact_v(-1.0, 1.0).branch == Branch::Parabola);
    CHECK(branch_formula(Branch::Inner, -1.0, 1.0) == -0.5);
    CHECK(exact_v(0.0, 1.0).value == 0.0);
    CHECK(exact_v(0.0, 1.0).branch == Branch::Inner);
    CHECK(exact_v(1.0, 1.0).value == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK(exact_v(3.0, 0.1).branch == Branch::Cap);
    CHECK(exact_v(-1.0, 3.0).value == doctest::Approx(-5.0 / 6.0));
    CHECK(exact_v(-1.0, 3.0).branch == Branch::LateTime);
    CHECK_THROWS_AS(exact_v(1.0, 3.0), NotCovered);
    CHECK_THROWS_AS(exact_v(-3.0, 2.5), NotCovered);
    CHECK_THROWS_AS(exact_v(0.0, -1.0), NotCovered);
}

TEST_CASE("branch continuity across boundaries") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> ut(0.0, 1.999);
    for (int i = 0; i < 10000; ++i) {
        const double t = ut(rng);
        switch (i % 4) {
            case 0: CHECK(std::abs(branch_formula(Branch::Left, -2.0, t) - branch_formula(Branch::Parabola, -2.0, t)) < 1e-12);
                    break;
            case 1: {
                const double x = t - 2.0;  // t = x + 2
                CHECK(std::abs(branch_formula(Branch::Parabola, x, t) - branch_formula(Branch::Inner, x, t)) < 1e-12);
                break;
            }
            case 2: CHECK(std::abs(branch_formula(Branch::Inner, 0.0, t) - branch_formula(Branch::Right, 0.0, t)) < 1e-12);
                    break;
            case 3: {
                const double x = std::sqrt(2.0 * (t + 2.0));  // t = x^2/2 - 2
                CHECK(std::abs(branch_formula(Branch::Right, x, t) - branch_formula(Branch::Cap, x, t)) < 1e-12);
                break;
            }
        }
    }
}

TEST_CASE("exact_u") {
    CHECK(exact_u(1.0, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(std::abs(exact_u(-0.25, 3.0) + 5.0 / 6.0) < 1e-12);
    CHECK(std::abs(late_time_u(-0.25, 3.0) + 5.0 / 6.0) < 1e-12);
    for (double x = -0.99; x <= 0.0; x += 0.01)
        for (const double t : {2.0, 2.5, 4.0}) CHECK(std::abs(exact_u(x, t) - late_time_u(x, t)) < 1e-12);
    CHECK_THROWS_AS(exact_u(0.5, 3.0), NotCovered);
}

TEST_CASE("Hopf-Lax") {
    CHECK(hopf_lax(-3.0, 1.0).value == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(hopf_lax(1.0, 1.0).value - 1.0 / 6.0) < 1e-9);
    CHECK(std::abs(hopf_lax(-1.0, 1.0).value + 0.5) < 1e-9);
    CHECK(std::abs(hopf_lax(0.0, 1.0).value) < 1e-9);
    for (const double x : {-3.0, -1.0, 0.0, 0.7, 2.5}) CHECK(std::abs(hopf_lax(x, 1e-8).value - exact_v0(x)) < 1e-3);
    CHECK_THROWS_AS(hopf_lax(0.0, 0.0), DomainError);

    // brute force over a fine y grid
    double brute = 1e300;
    for (double y = -1.0; y <= 3.0; y += 1e-5) brute = std::min(brute, exact_v0(y) + (1.0 - y) * (1.0 - y) / 2.0);
    CHECK(std::abs(hopf_lax(1.0, 1.0).value - brute) < 1e-9);

}

TEST_CASE("Hopf-Lax matches the closed form on a grid") {
    double worst = 0.0;
    for (int i = 0; i <= 100; i += 5)
        for (int j = 0; j <= 80; j += 4) {
            const double x = -4.0 + 8.0 * i / 200.0 * 2.0;
            const double t = 0.05 + 1.9 * j / 80.0;
            if (branch_boundary_distance(x, t) < 1e-6) continue;
            worst = std::max(worst, std::abs(hopf_lax(x, t).value - exact_v(x, t).value));
        }
    CHECK(worst < 1e-6);
}

TEST_CASE("Holder fits") {
    const auto lin = holder_fit([](double x) { return x; }, 0.3, 0.1, 12);
    CHECK(lin.exponent == doctest::Approx(1.0).epsilon(0.01));
    CHECK(lin.r2 > 0.999);
    const auto sq = holder_fit([](double x) { return std::sqrt(std::abs(x)); }, 0.0, 0.1, 12);
    CHECK(sq.exponent >= 0.49);
    CHECK(sq.exponent <= 0.51);
    const auto late = holder_fit([](double x) { return exact_u(x, 3.0); }, 0.0, 1e-2, 20, Side::Left);
    CHECK(late.exponent >= 0.45);
    CHECK(late.exponent <= 0.55);
    const auto early = holder_fit([](double x) { return exact_u(x, 1.0); }, 0.0, 1e-2, 20, Side::Left);
    CHECK(early.exponent >= 0.9);
    CHECK(early.exponent <= 1.05);
    for (std::size_t i = 1; i < late.offsets.size(); ++i) CHECK(late.offsets[i] == late.offsets[i - 1] / 2.0);
    CHECK_THROWS_AS(holder_fit([](double) { return 1.0; }, 0.0, 0.1, 8), DomainError);
    CHECK_THROWS_AS(holder_fit([](double x) { return x; }, 0.0, 0.1, 3), ConfigError);
}

TEST_CASE("Lipschitz horizon and slope bound") {
    CHECK(lipschitz_horizon(1.0, 1.0) == 2.0);
    CHECK(lipschitz_horizon(2.0, 0.5) == 2.0);
    CHECK_THROWS_AS(lipschitz_horizon(0.0, 1.0), ConfigError);
    std::vector<double> xs;
    for (int i = 0; i <= 8000; ++i) xs.push_back(-4.0 + i * 1e-3);
    const std::vector<double> times{0.5, 1.0, 1.5, 1.9};
    const auto checks = lipschitz_bound_check([](double x, double t) { return exact_u(x, t); }, xs, 1.0, 1.0, times);
    for (const auto& c : checks) {
        CHECK(c.ok);
        CHECK(c.max_slope <= 1.05 * 2.0 / (2.0 - c.t));
    }
    CHECK(checks[1].bound == doctest::Approx(2.1));
    CHECK(checks[3].max_slope <= 21.0);
    CHECK_THROWS_AS(lipschitz_bound_check([](double x, double) { return x; }, xs, 1.0, 1.0, std::vector<double>{2.0}),
                    DomainError);
}
