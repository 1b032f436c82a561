#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "prophet/distributions.hpp"

using namespace prophet;

namespace {

std::vector<Distribution> builtins()
{
    return {uniform01(), exponential(1.0), exponential(3.5), bounded_pareto(2.0, 100.0),
            smooth({{{0.0, 0.5}, {1.0, 0.5}}, 1e-3})};
}

} // namespace

TEST_CASE("closed-form quantiles")
{
    CHECK(uniform01().quantile(0.25) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(std::abs(exponential(1).quantile(1 - std::exp(-1.0)) - 1.0) <= 1e-12);
    const auto p = bounded_pareto(2, 100);
    CHECK(std::abs(p.cdf(p.quantile(0.9)) - 0.9) <= 1e-9);
    // Truncated Pareto CDF, written out independently.
    const double x = 3.0;
    const double expected = (1 - std::pow(x, -2.0)) / (1 - std::pow(100.0, -2.0));
    CHECK(std::abs(p.cdf(x) - expected) <= 1e-14);
}

TEST_CASE("invalid parameters are rejected")
{
    CHECK_THROWS_AS(exponential(0), std::invalid_argument);
    CHECK_THROWS_AS(exponential(-1), std::invalid_argument);
    CHECK_THROWS_AS(bounded_pareto(0, 10), std::invalid_argument);
    CHECK_THROWS_AS(bounded_pareto(2, 1), std::invalid_argument);
    CHECK_THROWS_AS(smooth({{{1.0, 1.0}}, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(smooth({{{1.0, 0.4}}, 1e-3}), std::invalid_argument);
    CHECK_THROWS_AS(scaled(uniform01(), 0), std::invalid_argument);
    CHECK_THROWS_AS(parse_distribution("normal:0,1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_distribution("exponential:abc"), std::invalid_argument);
    CHECK_THROWS_AS(parse_distribution("bounded-pareto:2"), std::invalid_argument);
}

TEST_CASE("smooth: single atom is continuous and strictly increasing near the atom")
{
    const double w = 1e-6;
    const auto d = smooth({{{1.0, 1.0}}, 2 * w});
    double prev = d.cdf(1 - w);
    for (int i = 1; i <= 100; ++i) {
        const double x = 1 - w + 2 * w * i / 100;
        const double c = d.cdf(x);
        CHECK(c > prev);
        prev = c;
    }
    CHECK(d.cdf(1 - 2 * w) == 0.0);
    CHECK(d.cdf(1 + 2 * w) == 1.0);
    // No jump at the support edges.
    CHECK(std::abs(d.cdf(1 - w + 1e-15) - d.cdf(1 - w)) < 1e-6);
}

TEST_CASE("smooth: two atoms")
{
    const auto d = smooth({{{0.0, 0.5}, {1.0, 0.5}}, 1e-3});
    const double x = d.quantile(0.75);
    CHECK(x > 1 - 1e-3);
    CHECK(x < 1 + 1e-3);
    CHECK(d.quantile(0.0) >= 0.0);
}

TEST_CASE("threshold_from_quantile")
{
    CHECK(threshold_from_quantile(uniform01(), 0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::abs(threshold_from_quantile(exponential(1), std::exp(-1.0)) - 1.0) <= 1e-12);
    CHECK(std::abs(threshold_from_quantile(uniform01(), 1.0 / 100) - 0.99) <= 1e-15);
    CHECK(threshold_from_quantile(uniform01(), 0.0) == std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(threshold_from_quantile(uniform01(), 1.5), std::invalid_argument);
}

TEST_CASE("thresholds fall as the acceptance quantile rises")
{
    for (const auto& d : builtins()) {
        double prev = std::numeric_limits<double>::infinity();
        for (int i = 1; i <= 400; ++i) {
            const double x = threshold_from_quantile(d, i / 400.0);
            REQUIRE(x <= prev);
            prev = x;
        }
    }
}

TEST_CASE("prophet_value_exact: closed forms")
{
    CHECK(std::abs(prophet_value_exact(uniform01(), 1) - 0.5) <= 1e-10);
    CHECK(std::abs(prophet_value_exact(uniform01(), 2) - 2.0 / 3) <= 1e-10);
    for (long n : {5L, 100L, 1000L})
        CHECK(std::abs(prophet_value_exact(uniform01(), n) - double(n) / (n + 1)) <= 1e-9);
    // E[max of n Exp(1)] is the harmonic number H_n.
    for (long n : {1L, 3L, 50L, 1000L}) {
        double h = 0;
        for (long i = 1; i <= n; ++i)
            h += 1.0 / i;
        CHECK(std::abs(prophet_value_exact(exponential(1), n) - h) <= 1e-8 * h);
    }
}

TEST_CASE("prophet_value_exact matches Monte Carlo")
{
    for (const auto& d : {exponential(1.0), bounded_pareto(2, 100), uniform01()}) {
        const long n = 3;
        Rng rng(11);
        double mean = 0, m2 = 0;
        const int trials = 100000;
        for (int t = 1; t <= trials; ++t) {
            double best = 0;
            for (long j = 0; j < n; ++j)
                best = std::max(best, d.sample(rng));
            const double delta = best - mean;
            mean += delta / t;
            m2 += delta * (best - mean);
        }
        const double se = std::sqrt(m2 / (trials - 1) / trials);
        CHECK(std::abs(prophet_value_exact(d, n) - mean) <= 3 * se);
    }
}

TEST_CASE("scale covariance")
{
    for (const auto& d : {exponential(1.0), bounded_pareto(2, 100)}) {
        for (double c : {0.25, 2.0, 8.0}) {
            const auto sd = scaled(d, c);
            const double base = prophet_value_exact(d, 50);
            // Power-of-two factors commute exactly with every floating-point step.
            CHECK(prophet_value_exact(sd, 50) == c * base);
            for (double q : {0.01, 0.3, 0.9})
                CHECK(threshold_from_quantile(sd, q) == c * threshold_from_quantile(d, q));
        }
        CHECK(std::abs(prophet_value_exact(scaled(d, 3.0), 50) - 3 * prophet_value_exact(d, 50)) <=
              1e-12 * prophet_value_exact(d, 50));
    }
}

TEST_CASE("descriptors round-trip")
{
    for (const auto& d : builtins()) {
        const auto j = d.descriptor();
        REQUIRE(j.contains("name"));
        REQUIRE(j.contains("params"));
        const auto back = from_descriptor(j);
        CHECK(back.descriptor() == j);
        for (double u : {0.1, 0.5, 0.95})
            CHECK(back.quantile(u) == d.quantile(u));
    }
    CHECK(parse_distribution("exponential:2").descriptor() == exponential(2).descriptor());
    CHECK(parse_distribution("bounded-pareto:2,100").descriptor() == bounded_pareto(2, 100).descriptor());
    CHECK(parse_distribution("uniform01").descriptor()["name"] == "uniform01");
}
