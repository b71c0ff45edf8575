#include <doctest.h>

#include <cmath>

#include "inertia/problems.hpp"
#include "test_support.hpp"

using namespace inertia;

TEST_CASE("catalog: power-gamma closed form constants") {
    auto p = catalog("power-gamma", {{"gamma", 4.0}, {"alpha", 5.0}});
    // c = (2/(gamma(gamma-2)))(alpha - gamma/(gamma-2)) = 0.75, theta = 1
    CHECK(p.smooth.value_at({1.0}) == doctest::Approx(0.75).epsilon(1e-14));
    auto [x, v] = p.closed_form->at(2.0);
    CHECK(x[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(v[0] == doctest::Approx(-0.25).epsilon(1e-14));
    CHECK(p.closed_form->alpha == 5.0);
    CHECK(*p.known_min_value == 0.0);
    CHECK((*p.known_minimizer)[0] == 0.0);
}

TEST_CASE("catalog: exp-decay at alpha 3 is e^(-2x) with x(t) = ln t") {
    auto p = catalog("exp-decay", {{"alpha", 3.0}});
    CHECK(p.smooth.value_at({0.0}) == doctest::Approx(1.0).epsilon(1e-14));
    auto [x, v] = p.closed_form->at(std::exp(1.0));
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(v[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    // value along the trajectory is 1/t^2
    for (double t : {1.0, 2.0, 10.0, 100.0}) {
        auto [xt, vt] = p.closed_form->at(t);
        (void)vt;
        CHECK(p.smooth.value_at(xt) == doctest::Approx(1.0 / (t * t)).epsilon(1e-12));
    }
    CHECK(p.argmin_known_empty);
    CHECK(*p.known_min_value == 0.0);
}

TEST_CASE("catalog: zero problem") {
    auto p = catalog("zero", {{"dim", 3.0}});
    CHECK(value(p, {4.0, -1.0, 7.0}).value == 0.0);
    CHECK(*p.known_min_value == 0.0);
    CHECK(gap(p, {1.0, 1.0, 1.0}) == 0.0);
}

TEST_CASE("value operation") {
    auto q = catalog("quadratic", {{"dim", 2.0}});
    CHECK(value(q, {3.0, 4.0}).value == doctest::Approx(12.5).epsilon(1e-15));
    auto pg = catalog("power-gamma", {{"gamma", 4.0}, {"alpha", 5.0}});
    CHECK(value(pg, {1.0}).value == doctest::Approx(0.75).epsilon(1e-15));
    CHECK_THROWS_AS(value(q, {1.0}), std::invalid_argument);  // dimension mismatch
}

TEST_CASE("gap operation") {
    auto q = catalog("quadratic", {{"dim", 2.0}});
    CHECK(gap(q, {0.0, 0.0}) == 0.0);
    auto pg = catalog("power-gamma", {{"gamma", 4.0}, {"alpha", 5.0}});
    CHECK(gap(pg, {0.5}) == doctest::Approx(0.046875).epsilon(1e-14));
    CompositeProblem bare;
    bare.id = "bare";
    bare.smooth.dimension = 1;
    bare.smooth.value_at = [](const Vec& x) { return x[0]; };
    bare.smooth.gradient_at = [](const Vec&) { return Vec{1.0}; };
    CHECK_THROWS_AS(gap(bare, {1.0}), std::invalid_argument);  // no reference minimum
    CHECK(gap(bare, {1.0}, 0.5) == doctest::Approx(0.5));
    // tiny negative slack is floored at zero
    CHECK(gap(bare, {1.0}, 1.0 + 1e-13) == 0.0);
}

TEST_CASE("soft threshold") {
    CHECK(soft_threshold(1.0, Vec{3.0})[0] == 2.0);
    CHECK(soft_threshold(1.0, Vec{-0.5})[0] == 0.0);
    const Vec p = soft_threshold(0.25, Vec{1.0, -2.0});
    CHECK(p[0] == doctest::Approx(0.75));
    CHECK(p[1] == doctest::Approx(-1.75));
    CHECK_THROWS_AS(soft_threshold(-1.0, Vec{1.0}), std::invalid_argument);
}

TEST_CASE("catalog rejects invalid parameters naming the constraint") {
    CHECK_THROWS_WITH_AS(catalog("nope"), doctest::Contains("unknown problem family"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(catalog("power-gamma", {{"gamma", 2.0}, {"alpha", 5.0}}),
                         doctest::Contains("gamma > 2"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(catalog("power-gamma", {{"gamma", 4.0}, {"alpha", 1.5}}),
                         doctest::Contains("alpha > gamma/(gamma-2)"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(catalog("exp-decay", {{"alpha", 0.5}}), doctest::Contains("alpha >= 1"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(catalog("inverse-power", {{"theta", -1.0}}),
                         doctest::Contains("theta > 0"), std::invalid_argument);
}

TEST_CASE("closed-form trajectories satisfy the flow equation") {
    struct Case {
        const char* family;
        std::map<std::string, double> params;
    };
    const Case cases[] = {
        {"power-gamma", {{"gamma", 4.0}, {"alpha", 5.0}}},
        {"power-gamma", {{"gamma", 3.0}, {"alpha", 4.0}}},
        {"exp-decay", {{"alpha", 3.0}}},
        {"exp-decay", {{"alpha", 1.5}}},
        {"inverse-power", {{"theta", 2.0}, {"alpha", 3.0}}},
        {"inverse-power", {{"theta", 0.7}, {"alpha", 2.0}}},
    };
    const double t0 = 1.0;
    for (const auto& c : cases) {
        auto p = catalog(c.family, c.params);
        REQUIRE(p.closed_form.has_value());
        for (int i = 0; i < 50; ++i) {
            const double t = t0 * std::pow(1000.0, i / 49.0);
            CHECK(testsupport::ode_residual(p, p.closed_form->alpha, t) <= 1e-8);
        }
    }
}

TEST_CASE("gradients agree with finite differences on random points") {
    Rng rng(42);
    auto check_problem = [&](const CompositeProblem& p, auto sampler) {
        for (int i = 0; i < 100; ++i) {
            const Vec x = sampler();
            const Vec g = p.smooth.gradient_at(x);
            const Vec fd = testsupport::fd_gradient(p.smooth.value_at, x);
            for (std::size_t j = 0; j < g.size(); ++j)
                CHECK(std::abs(g[j] - fd[j]) <= 1e-5 * (1.0 + std::abs(g[j])));
        }
    };
    check_problem(catalog("quadratic", {{"dim", 4.0}, {"spread", 10.0}}),
                  [&] { return rng.normal_vec(4); });
    check_problem(catalog("power-gamma", {{"gamma", 4.0}, {"alpha", 5.0}}),
                  [&] { return Vec{4.0 * rng.uniform() - 2.0}; });
    check_problem(catalog("exp-decay", {{"alpha", 3.0}}),
                  [&] { return Vec{4.0 * rng.uniform() - 1.0}; });
    check_problem(catalog("inverse-power", {{"theta", 2.0}, {"alpha", 3.0}}),
                  [&] { return Vec{0.5 + 3.5 * rng.uniform()}; });
    check_problem(catalog("lasso", {{"m", 10.0}, {"n", 20.0}, {"seed", 3.0}}),
                  [&] { return rng.normal_vec(20); });
    check_problem(catalog("box-qp", {{"dim", 6.0}, {"seed", 1.0}}),
                  [&] { return rng.normal_vec(6); });
}

TEST_CASE("prox operators are nonexpansive and satisfy the threshold bound") {
    Rng rng(7);
    for (const char* family : {"lasso", "box-qp"}) {
        auto p = family == std::string("lasso")
                     ? catalog("lasso", {{"m", 10.0}, {"n", 20.0}, {"seed", 5.0}})
                     : catalog("box-qp", {{"dim", 20.0}, {"seed", 5.0}});
        const auto& prox = p.nonsmooth->prox_at;
        for (int i = 0; i < 100; ++i) {
            const double gamma = 0.01 + 2.0 * rng.uniform();
            const Vec x = scale(3.0, rng.normal_vec(p.dim()));
            const Vec y = scale(3.0, rng.normal_vec(p.dim()));
            const double lhs = norm2(sub(prox(gamma, x), prox(gamma, y)));
            CHECK(lhs <= norm2(sub(x, y)) * (1.0 + 1e-12));
        }
    }
    // soft-threshold optimality in closed form: every component moves by at
    // most gamma*lambda, and surviving components move by exactly that much
    auto lasso = catalog("lasso", {{"m", 10.0}, {"n", 20.0}, {"seed", 5.0}});
    const double lam = lasso.nonsmooth->value_at(Vec(20, 1.0)).value / 20.0;
    for (int i = 0; i < 20; ++i) {
        const double gamma = 0.1 + rng.uniform();
        const Vec x = scale(2.0, rng.normal_vec(20));
        const Vec pr = lasso.nonsmooth->prox_at(gamma, x);
        for (std::size_t j = 0; j < x.size(); ++j) {
            CHECK(std::abs(x[j] - pr[j]) <= gamma * lam * (1.0 + 1e-12));
            if (pr[j] != 0.0)
                CHECK(x[j] - pr[j] == doctest::Approx(gamma * lam * (pr[j] > 0 ? 1.0 : -1.0))
                                          .epsilon(1e-12));
        }
    }
}

TEST_CASE("composite value adds the nonsmooth term") {
    auto lasso = catalog("lasso", {{"m", 10.0}, {"n", 20.0}, {"seed", 5.0}});
    const double lam = lasso.nonsmooth->value_at(Vec(20, 1.0)).value / 20.0;
    Rng rng(31);
    for (int i = 0; i < 20; ++i) {
        const Vec x = rng.normal_vec(20);
        double l1 = 0.0;
        for (double xi : x) l1 += std::abs(xi);
        const ExtReal full = value(lasso, x);
        REQUIRE_FALSE(full.infinite);
        CHECK(full.value ==
              doctest::Approx(lasso.smooth.value_at(x) + lam * l1).epsilon(1e-12));
    }
}

TEST_CASE("power-gamma value along the trajectory is c t^(-2 gamma/(gamma-2))") {
    for (double g : {3.0, 4.0, 6.0}) {
        const double alpha = 5.0;
        auto p = catalog("power-gamma", {{"gamma", g}, {"alpha", alpha}});
        const double c = 2.0 / (g * (g - 2.0)) * (alpha - g / (g - 2.0));
        const double rate = 2.0 * g / (g - 2.0);
        for (int i = 0; i < 50; ++i) {
            const double t = std::pow(1000.0, i / 49.0);
            auto [x, v] = p.closed_form->at(t);
            (void)v;
            const double expected = c * std::pow(t, -rate);
            CHECK(p.smooth.value_at(x) == doctest::Approx(expected).epsilon(1e-10));
        }
    }
}

TEST_CASE("known minimizers are stationary for the smooth part") {
    auto check = [](const CompositeProblem& p) {
        REQUIRE(p.known_minimizer.has_value());
        CHECK(norm2(p.smooth.gradient_at(*p.known_minimizer)) <= 1e-8);
    };
    check(catalog("zero"));
    check(catalog("quadratic", {{"dim", 5.0}, {"spread", 100.0}}));
    check(catalog("power-gamma", {{"gamma", 4.0}, {"alpha", 5.0}}));
    check(smooth_surrogate(catalog("lasso", {{"m", 20.0}, {"n", 50.0}, {"seed", 7.0}})));
    check(smooth_surrogate(catalog("box-qp", {{"dim", 8.0}, {"seed", 3.0}})));
}

TEST_CASE("strong convexity lower bound holds on sampled pairs") {
    Rng rng(11);
    for (auto p : {catalog("quadratic", {{"dim", 3.0}, {"spread", 4.0}}),
                   smooth_surrogate(catalog("box-qp", {{"dim", 5.0}, {"seed", 2.0}}))}) {
        REQUIRE(p.smooth.strong_convexity_modulus.has_value());
        const double mu = *p.smooth.strong_convexity_modulus;
        for (int i = 0; i < 50; ++i) {
            const Vec x = rng.normal_vec(p.dim());
            const Vec y = rng.normal_vec(p.dim());
            const Vec d = sub(y, x);
            const double lhs = p.smooth.value_at(y);
            const double rhs = p.smooth.value_at(x) + dot(p.smooth.gradient_at(x), d) +
                               0.5 * mu * dot(d, d);
            CHECK(lhs >= rhs - 1e-9 * (1.0 + std::abs(lhs)));
        }
    }
}

TEST_CASE("box-qp indicator uses an explicit infinity marker") {
    auto p = catalog("box-qp", {{"dim", 3.0}, {"seed", 0.0}});
    CHECK_FALSE(value(p, {0.5, -0.5, 0.0}).infinite);
    CHECK(value(p, {1.5, 0.0, 0.0}).infinite);
    const Vec proj = p.nonsmooth->prox_at(1.0, {2.0, -3.0, 0.25});
    CHECK(proj[0] == 1.0);
    CHECK(proj[1] == -1.0);
    CHECK(proj[2] == 0.25);
}

TEST_CASE("smooth surrogate of the lasso attains zero") {
    auto lasso = catalog("lasso", {{"m", 20.0}, {"n", 50.0}, {"seed", 7.0}});
    auto s = smooth_surrogate(lasso);
    CHECK_FALSE(s.nonsmooth.has_value());
    REQUIRE(s.known_minimizer.has_value());
    CHECK(s.smooth.value_at(*s.known_minimizer) <= 1e-16);
    CHECK(*s.known_min_value == 0.0);
    // same instance regenerates identically from its seed
    auto again = catalog("lasso", {{"m", 20.0}, {"n", 50.0}, {"seed", 7.0}});
    CHECK(again.smooth.value_at(Vec(50, 0.1)) == lasso.smooth.value_at(Vec(50, 0.1)));
}
