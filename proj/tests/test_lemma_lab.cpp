#include <doctest.h>

#include <cmath>

#include "hjb/errors.hpp"
#include "hjb/lemma_lab.hpp"

using namespace hjb;

TEST_CASE("case I reaches the diagonal with small energy") {
    const PositionVector y0{0.0, 0.0};
    const PositionVector yn{0.01, -0.01};
    const auto run = lemma_case1(y0, yn, 0.0);
    CHECK(run.tn == doctest::Approx(std::pow(0.02, 0.25)).epsilon(1e-14));
    CHECK(run.tn == doctest::Approx(0.37606).epsilon(1e-4));
    CHECK(run.endpoint_error < 1e-8);
    CHECK(run.residual < 1e-6);
    CHECK(std::abs(run.cost - run.cost_refined) < 1e-6);
    CHECK(run.times.front() == 0.0);
    CHECK(run.times.back() == doctest::Approx(run.tn));

    double prev = run.cost;
    for (const double s : {0.5, 0.25, 0.125, 0.0625}) {
        const auto r = lemma_case1(y0, PositionVector{0.01 * s, -0.01 * s}, 0.0);
        CHECK(r.cost < prev);
        prev = r.cost;
    }
}

TEST_CASE("case II moves along the diagonal") {
    const auto run = lemma_case2(PositionVector{0.0, 0.0}, PositionVector{0.1, 0.1}, 0.5);
    CHECK(run.tn == doctest::Approx(0.5 + std::sqrt(2.0) * 0.1).epsilon(1e-14));
    CHECK(run.diagonal_gap == 0.0);
    CHECK(run.endpoint_error == 0.0);
    CHECK(run.cost == doctest::Approx(std::sqrt(2.0) * 0.1).epsilon(1e-12));
}

TEST_CASE("case III straight segment off the diagonal") {
    const PositionVector y0{1.0, -1.0};
    const PositionVector yn{1.05, -0.98};
    const auto run = lemma_case3(y0, yn, 0.0);
    CHECK(run.tn == doctest::Approx(std::hypot(0.05, 0.02)).epsilon(1e-14));
    CHECK(run.tn == doctest::Approx(0.05385).epsilon(1e-4));
    CHECK(run.endpoint_error == 0.0);
    CHECK(run.residual < 1e-10);
    CHECK(run.diagonal_gap > 1.0);
}

TEST_CASE("preconditions") {
    CHECK_THROWS_AS(lemma_case1(PositionVector{0.0, 0.1}, PositionVector{0.01, -0.01}, 0.0), DomainError);
    CHECK_THROWS_AS(lemma_case1(PositionVector{0.0, 0.0}, PositionVector{0.01, 0.01}, 0.0), DomainError);
    CHECK_THROWS_AS(lemma_case2(PositionVector{0.0, 0.0}, PositionVector{0.0, 0.0}, 0.0), DomainError);
    CHECK_THROWS_AS(lemma_case2(PositionVector{0.0, 0.0}, PositionVector{0.1, 0.0}, 0.0), DomainError);
    CHECK_THROWS_AS(lemma_case3(PositionVector{0.0, 0.0}, PositionVector{0.1, 0.0}, 0.0), DomainError);
    CHECK_THROWS_AS(lemma_case3(PositionVector{0.1, -0.1}, PositionVector{-0.1, 0.1}, 0.0), DomainError);
    CHECK_THROWS_AS(lemma_case1(PositionVector{0.0, 0.0, 0.0}, PositionVector{0.1, 0.0, 0.0}, 0.0), DomainError);
}

TEST_CASE("verify_all default passes") {
    const auto report = verify_all();
    CHECK(report["schema"] == "hjb/1");
    CHECK(report["pass"] == true);
    REQUIRE(report["cases"].size() == 3);
    for (const auto& c : report["cases"]) {
        for (const auto* claim : {"t_n_to_t0", "energy_to_zero", "state_equation", "endpoint"}) {
            INFO(c["case"].get<std::string>() << " " << claim);
            CHECK(c["claims"][claim]["pass"] == true);
        }
    }
    CHECK(report.dump() == verify_all().dump());
}

TEST_CASE("verify_all with zero scale") {
    VerifyOptions opt;
    opt.scale = 0.0;
    const auto report = verify_all(opt);
    CHECK(report["pass"] == true);
    for (const auto& c : report["cases"]) CHECK(c["claims"]["t_n_to_t0"]["rate_min"].is_null());
}
