#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "hjb/errors.hpp"
#include "hjb/exact1d.hpp"
#include "hjb/parallel.hpp"
#include "hjb/terminal_cost.hpp"
#include "hjb/value_direct.hpp"

using namespace hjb;

TEST_CASE("terminal cost builtins") {
    const auto g = TerminalCost::clamp_linear();
    CHECK(g(std::vector<double>{-3.0}) == -1.0);
    CHECK(g(std::vector<double>{0.25}) == 0.25);
    CHECK(g(std::vector<double>{7.0}) == 1.0);
    CHECK(g.bound() == 1.0);
    CHECK(g.lower() == -1.0);
    CHECK(g.upper() == 1.0);

    const auto c = TerminalCost::constant(-0.4);
    CHECK(c(std::vector<double>{1.0, 2.0}) == -0.4);
    CHECK(c.bound() == doctest::Approx(0.4));

    const auto b = TerminalCost::gaussian_bump(2.0, 0.5, {1.0, 0.0});
    CHECK(b(std::vector<double>{1.0, 0.0}) == -2.0);
    CHECK(b.bound() == 2.0);
    CHECK(b(std::vector<double>{100.0, 0.0}) == doctest::Approx(0.0));
}

TEST_CASE("terminal cost parsing round trip") {
    for (const std::string text : {"clamp", "clamp:slope=2,cap=0.5", "const:0.25", "bump:height=1,width=0.7,center=0;1"}) {
        const auto g = TerminalCost::parse(text);
        const auto h = TerminalCost::parse(g.describe());
        CHECK(g.describe() == h.describe());
    }
    CHECK_THROWS_AS(TerminalCost::parse("nonsense"), ConfigError);
    CHECK_THROWS_AS(TerminalCost::parse("clamp:slope=abc"), ConfigError);
    CHECK_THROWS_AS(TerminalCost::parse("table:/no/such/file.csv"), ConfigError);
}

TEST_CASE("tabulated cost interpolates and extends by constants") {
    const auto t = TerminalCost::tabulated({-1.0, 0.0, 2.0}, {1.0, -1.0, 3.0});
    CHECK(t(std::vector<double>{-5.0}) == 1.0);
    CHECK(t(std::vector<double>{-0.5}) == doctest::Approx(0.0));
    CHECK(t(std::vector<double>{1.0}) == doctest::Approx(1.0));
    CHECK(t(std::vector<double>{9.0}) == 3.0);
    CHECK(t.bound() == 3.0);

    const std::string path = "hjb_test_table.csv";
    {
        std::ofstream f(path);
        f << "# x,g\n-1,1\n0,-1\n2,3\n";
    }
    const auto p = TerminalCost::parse("table:" + path);
    CHECK(p(std::vector<double>{1.0}) == doctest::Approx(1.0));
    std::remove(path.c_str());
}

TEST_CASE("constant cost: value equals the constant with zero control") {
    const auto g = TerminalCost::constant(0.3);
    const auto est = estimate_value(peakon_sigma(2), g, PositionVector{0.2, -0.1}, 0.0, 1.0);
    CHECK(std::abs(est.value - 0.3) < 1e-9);
    REQUIRE(est.control.has_value());
    CHECK(est.control->l2_norm() == 0.0);
}

TEST_CASE("empty horizon returns g exactly") {
    const auto g = TerminalCost::clamp_linear();
    const auto est = estimate_value(sqrt_abs_1d(), g, PositionVector{0.37}, 1.0, 1.0);
    CHECK(est.value == 0.37);
    CHECK_FALSE(est.control.has_value());
}

TEST_CASE("value bounds -||g|| <= v <= g(y0)") {
    const auto g = TerminalCost::gaussian_bump(1.0, 0.8, {0.5, -0.5});
    DirectOptions opt;
    opt.iterations = 20;
    for (const auto& y : {PositionVector{0.0, 0.0}, PositionVector{1.0, -1.0}, PositionVector{-2.0, 2.0}}) {
        const auto est = estimate_value(peakon_sigma(2), g, y, 0.0, 1.0, opt);
        CHECK(est.within_bounds(g(y.coords()), g.bound()));
        CHECK(est.value <= g(y.coords()) + 1e-9);
        CHECK(est.value >= -g.bound() - 1e-9);
        REQUIRE(est.control.has_value());
        CHECK(est.control->l2_norm() <= 2.0 * std::sqrt(g.bound()) + 1e-12);
    }
}

TEST_CASE("1D problem: v(1, 0) with T = 1 is u(1, 1) = 2/3") {
    const auto est = estimate_value(sqrt_abs_1d(), TerminalCost::clamp_linear(), PositionVector{1.0}, 0.0, 1.0);
    CHECK(std::abs(est.value - 2.0 / 3.0) < 0.02);
    CHECK(est.diagnostics.seed == 42);
    CHECK(est.diagnostics.population == 64);
    CHECK(est.diagnostics.iterations == 60);
}

TEST_CASE("5x5 sample against the exact solution") {
    const auto sigma = sqrt_abs_1d();
    const auto g = TerminalCost::clamp_linear();
    const double T = 1.5;
    for (const double y : {-2.0, -1.0, 0.0, 1.0, 2.0})
        for (const double t0 : {0.0, 0.375, 0.75, 1.125, 1.5}) {
            const auto est = estimate_value(sigma, g, PositionVector{y}, t0, T);
            CHECK(std::abs(est.value - exact_u(y, T - t0)) < 0.05);
        }
}

TEST_CASE("determinism for a fixed seed and any worker count") {
    const auto g = TerminalCost::clamp_linear();
    DirectOptions opt;
    opt.iterations = 10;
    set_thread_count(1);
    const auto a = estimate_value(peakon_sigma(2), g, PositionVector{0.4, -0.3}, 0.0, 1.0, opt);
    set_thread_count(4);
    const auto b = estimate_value(peakon_sigma(2), g, PositionVector{0.4, -0.3}, 0.0, 1.0, opt);
    set_thread_count(0);
    CHECK(a.value == b.value);
    CHECK(a.control->values() == b.control->values());
    CHECK(a.diagnostics.history == b.diagnostics.history);
}

TEST_CASE("monotone enrichment: doubling the pieces does not raise the value") {
    const auto sigma = sqrt_abs_1d();
    const auto g = TerminalCost::clamp_linear();
    for (const double y : {-0.5, 0.3, 1.2}) {
        DirectOptions coarse;
        coarse.pieces = 8;
        const auto c = estimate_value(sigma, g, PositionVector{y}, 0.0, 1.0, coarse);
        DirectOptions fine;
        fine.pieces = 16;
        fine.warm_start = refine_pieces(*c.control, 2);
        const auto f = estimate_value(sigma, g, PositionVector{y}, 0.0, 1.0, fine);
        CHECK(f.value <= c.value + 1e-6);
    }
}

TEST_CASE("refine_pieces keeps the control as a function of time") {
    const PiecewiseConstantControl c(0.0, 1.0, {{1.0}, {-2.0}});
    const auto r = refine_pieces(c, 3);
    CHECK(r.pieces() == 6);
    CHECK(r.at(0.2)[0] == 1.0);
    CHECK(r.at(0.8)[0] == -2.0);
    CHECK(r.l2_norm_squared() == doctest::Approx(c.l2_norm_squared()));
}

TEST_CASE("dynamic programming check") {
    SUBCASE("constant cost") {
        const auto d = dpp_check(peakon_sigma(2), TerminalCost::constant(-0.2), PositionVector{0.1, 0.4}, 0.0, 0.3, 1.0);
        CHECK(d.residual < 1e-9);
    }
    SUBCASE("full horizon") {
        const auto d = dpp_check(sqrt_abs_1d(), TerminalCost::clamp_linear(), PositionVector{0.8}, 0.0, 1.0, 1.0);
        CHECK(d.residual < 1e-6);
    }
    SUBCASE("peakon2 with the product clamp") {
        DirectOptions opt;
        opt.iterations = 30;
        const auto d = dpp_check(peakon_sigma(2), TerminalCost::clamp_linear(), PositionVector{0.3, -0.4}, 0.0, 0.4,
                                 1.0, opt);
        CHECK(d.residual < 0.05);
    }
    SUBCASE("1D problem") {
        const auto d = dpp_check(sqrt_abs_1d(), TerminalCost::clamp_linear(), PositionVector{-0.5}, 0.2, 0.3, 1.0);
        CHECK(d.residual < 0.05);
    }
    SUBCASE("bad h") {
        CHECK_THROWS_AS(dpp_check(sqrt_abs_1d(), TerminalCost::clamp_linear(), PositionVector{0.0}, 0.5, 0.6, 1.0),
                        DomainError);
    }
}
