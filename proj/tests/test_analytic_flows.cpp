#include <doctest.h>

#include "vmad/gmm.hpp"
#include "vmad/math_util.hpp"
#include "vmad/quadrature.hpp"
#include "vmad/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <numbers>

using namespace vmad;

namespace {

GMMSpec two_comp_1d() {
    GMMSpec g;
    g.weights = {0.3, 0.7};
    g.means = {Vec{-2.0}, Vec{1.5}};
    g.variances = {0.5, 1.0};
    return g;
}

GMMSpec symmetric_2d(double m) {
    GMMSpec g;
    g.weights = {0.5, 0.5};
    g.means = {Vec{-m, 0.0}, Vec{m, 0.0}};
    g.variances = {1.0, 1.0};
    return g;
}

GMMSpec separated_1d() {
    GMMSpec g;
    g.weights = {0.5, 0.5};
    g.means = {Vec{-4.0}, Vec{4.0}};
    g.variances = {0.25, 0.25};
    return g;
}

} // namespace

TEST_SUITE("analytic_flows") {

TEST_CASE("path marginal log density, standard normal at t=0.5") {
    const GMMSpec p = GMMSpec::standard_normal(1);
    // t^2 + (1-t)^2 = 0.5 at t = 0.5.
    const double expected = -0.5 * std::log(2.0 * std::numbers::pi * 0.5);
    CHECK(path_marginal_log_density(p, 0.5, Vec{0.0}) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("symmetric mixture density is even") {
    const GMMSpec g = symmetric_2d(2.0);
    for (double t : {0.2, 0.5, 0.8}) {
        const Vec x{1.3, -0.4};
        const Vec mx{-1.3, -0.4}; // mirrored in the symmetry axis x1 -> -x1
        CHECK(path_marginal_log_density(g, t, x) ==
              doctest::Approx(path_marginal_log_density(g, t, mx)).epsilon(1e-13));
    }
}

TEST_CASE("1-D density matches trapezoid convolution to 1e-6") {
    const GMMSpec g = two_comp_1d();
    for (double t : {0.25, 0.5, 0.8}) {
        for (double x : {-2.0, 0.0, 1.0, 3.0}) {
            const double closed = std::exp(path_marginal_log_density(g, t, Vec{x}));
            const double quad = quad_path_marginal_density_1d(g, t, x);
            CHECK(std::abs(closed - quad) < 1e-6);
        }
    }
}

TEST_CASE("score of the standard normal marginal is -x/(t^2+(1-t)^2)") {
    const GMMSpec p = GMMSpec::standard_normal(2);
    const double t = 0.3;
    const double c = t * t + (1.0 - t) * (1.0 - t);
    const Vec x{1.5, -0.7};
    const Vec s = path_marginal_score(p, t, x);
    CHECK(s[0] == doctest::Approx(-x[0] / c).epsilon(1e-13));
    CHECK(s[1] == doctest::Approx(-x[1] / c).epsilon(1e-13));
}

TEST_CASE("score matches central differences of the log density") {
    const GMMSpec g = symmetric_2d(1.5);
    const double h = 1e-5;
    for (double t : {0.3, 0.7}) {
        const Vec x{0.8, -1.1};
        const Vec s = path_marginal_score(g, t, x);
        for (std::size_t k = 0; k < 2; ++k) {
            Vec hi = x, lo = x;
            hi[k] += h;
            lo[k] -= h;
            const double fd =
                (path_marginal_log_density(g, t, hi) - path_marginal_log_density(g, t, lo)) /
                (2.0 * h);
            CHECK(std::abs(s[k] - fd) / std::max(std::abs(fd), 1e-3) < 1e-5);
        }
    }
}

TEST_CASE("symmetric mixture score vanishes at the symmetry point") {
    const GMMSpec g = symmetric_2d(2.0);
    const Vec s = path_marginal_score(g, 0.4, Vec{0.0, 0.0});
    CHECK(std::abs(s[0]) < 1e-14);
    CHECK(std::abs(s[1]) < 1e-14); // x2 component: means share x2 = 0
}

TEST_CASE("posterior mean of the standard normal is x t/(t^2+(1-t)^2)") {
    const GMMSpec p = GMMSpec::standard_normal(2);
    const double t = 0.6;
    const double c = t * t + (1.0 - t) * (1.0 - t);
    const Vec x{2.0, -1.0};
    const Vec mu = posterior_mean(p, t, x);
    CHECK(mu[0] == doctest::Approx(x[0] * t / c).epsilon(1e-13));
    CHECK(mu[1] == doctest::Approx(x[1] * t / c).epsilon(1e-13));
}

TEST_CASE("posterior mean matches Bayes-rule quadrature to 1e-6") {
    const GMMSpec g = two_comp_1d();
    for (double t : {0.25, 0.5, 0.9}) {
        for (double x : {-2.0, -0.5, 0.0, 1.0, 2.5}) {
            const double closed = posterior_mean(g, t, Vec{x})[0];
            const double quad = quad_posterior_mean_1d(g, t, x);
            CHECK(std::abs(closed - quad) < 1e-6);
        }
    }
}

TEST_CASE("responsibility concentration pulls the posterior mean to the component mean") {
    const GMMSpec g = separated_1d();
    const double t = 0.9;
    // At x = t * m_i the right component dominates for well-separated means.
    for (double m : {-4.0, 4.0}) {
        const double mu = posterior_mean(g, t, Vec{t * m})[0];
        CHECK(std::abs(mu - m) < 0.05);
    }
}

TEST_CASE("oracle velocity of the standard normal") {
    const GMMSpec p = GMMSpec::standard_normal(2);
    const Vec v = oracle_velocity(p, 0.75, Vec{1.0, 0.0});
    CHECK(v[0] == doctest::Approx(0.8).epsilon(1e-13)); // (2t-1)/(t^2+(1-t)^2) = 0.5/0.625
    CHECK(v[1] == doctest::Approx(0.0));
    // Coefficient (2t-1) vanishes at t = 0.5.
    const Vec v_mid = oracle_velocity(p, 0.5, Vec{3.1, -2.2});
    CHECK(std::abs(v_mid[0]) < 1e-14);
    CHECK(std::abs(v_mid[1]) < 1e-14);
}

TEST_CASE("oracle velocity matches a self-normalized importance-sampling estimate") {
    // E[y - x0 | x_t = x]: draw y ~ mixture, solve x0 = (x - t y)/(1-t),
    // weight by the N(0,I) kernel at that x0.
    const GMMSpec g = symmetric_2d(1.5);
    const double t = 0.6;
    const Vec x{0.9, 0.3};
    const Vec closed = oracle_velocity(g, t, x);

    RngState rng = RngState::seeded(2024);
    const std::size_t n = 1000000;
    Vec num(2, 0.0);
    double den = 0.0;
    std::vector<Vec> f_samples;
    std::vector<double> weights;
    f_samples.reserve(n);
    weights.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec y = g.sample(rng);
        Vec x0(2), f(2);
        double log_w = 0.0;
        for (std::size_t k = 0; k < 2; ++k) {
            x0[k] = (x[k] - t * y[k]) / (1.0 - t);
            log_w += -0.5 * x0[k] * x0[k];
            f[k] = y[k] - x0[k];
        }
        const double w = std::exp(log_w);
        den += w;
        for (std::size_t k = 0; k < 2; ++k) num[k] += w * f[k];
        f_samples.push_back(f);
        weights.push_back(w);
    }
    Vec est(2);
    for (std::size_t k = 0; k < 2; ++k) est[k] = num[k] / den;
    // Delta-method standard error of the self-normalized estimator.
    for (std::size_t k = 0; k < 2; ++k) {
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double wn = weights[i] / den;
            var += wn * wn * (f_samples[i][k] - est[k]) * (f_samples[i][k] - est[k]);
        }
        const double se = std::sqrt(var);
        CHECK(std::abs(est[k] - closed[k]) <= 3.0 * se + 1e-9);
    }
}

TEST_CASE("conditional path score") {
    const Vec s = conditional_path_score(Vec{0.0, 0.0}, 0.5, Vec{1.0, 0.0});
    CHECK(s[0] == doctest::Approx(-4.0)); // (0 - 1)/0.25
    CHECK(s[1] == doctest::Approx(0.0));
    // Zero at the Gaussian mode x = t y.
    const Vec y{2.0, -1.0};
    const Vec s0 = conditional_path_score(y, 0.7, Vec{1.4, -0.7});
    CHECK(std::abs(s0[0]) < 1e-14);
    CHECK(std::abs(s0[1]) < 1e-14);
}

TEST_CASE("conditional path score matches finite differences of log N(x; ty, (1-t)^2 I)") {
    const Vec y{1.0, -0.5};
    const double t = 0.4, h = 1e-6;
    const Vec x{0.3, 0.9};
    const double var = (1.0 - t) * (1.0 - t);
    auto logn = [&](const Vec& q) {
        double acc = 0.0;
        for (std::size_t k = 0; k < 2; ++k) {
            const double d = q[k] - t * y[k];
            acc += -0.5 * d * d / var - 0.5 * std::log(2.0 * std::numbers::pi * var);
        }
        return acc;
    };
    const Vec s = conditional_path_score(y, t, x);
    for (std::size_t k = 0; k < 2; ++k) {
        Vec hi = x, lo = x;
        hi[k] += h;
        lo[k] -= h;
        CHECK(std::abs(s[k] - (logn(hi) - logn(lo)) / (2.0 * h)) < 1e-6);
    }
}

TEST_CASE("velocity-mean consistency and Tweedie form") {
    const GMMSpec g = two_comp_1d();
    RngState rng = RngState::seeded(31);
    for (int rep = 0; rep < 50; ++rep) {
        const double t = 0.02 + 0.96 * rng.next_unit();
        const Vec x{4.0 * rng.next_normal()};
        const Vec mu = posterior_mean(g, t, x);
        const Vec v = oracle_velocity(g, t, x);
        // x + (1-t) v = mu, machine precision.
        CHECK(x[0] + (1.0 - t) * v[0] == doctest::Approx(mu[0]).epsilon(1e-13));
        // mu = x/t + ((1-t)^2/t) score.
        const Vec s = path_marginal_score(g, t, x);
        CHECK(mu[0] ==
              doctest::Approx(x[0] / t + (1.0 - t) * (1.0 - t) / t * s[0]).epsilon(1e-13));
    }
}

TEST_CASE("posterior contraction along the noise-free path point") {
    // Evaluated at x = t*y, the posterior mean reaches y at rate (1-t)^2.
    const GMMSpec g = separated_1d();
    const double y = 4.1; // near the +4 component
    double prev_err = 1.0;
    for (double t : {0.9, 0.99, 0.999}) {
        const double err = std::abs(posterior_mean(g, t, Vec{t * y})[0] - y);
        const double budget = (1.0 - t) * (1.0 - t) / t;
        CHECK(err <= 10.0 * budget);
        CHECK(err < prev_err);
        prev_err = err;
    }
}

TEST_CASE("mean-difference identity across two laws") {
    const GMMSpec p = GMMSpec::standard_normal(1);
    const GMMSpec q = two_comp_1d();
    RngState rng = RngState::seeded(77);
    for (int rep = 0; rep < 40; ++rep) {
        const double t = 0.05 + 0.9 * rng.next_unit();
        const Vec x{3.0 * rng.next_normal()};
        const double lhs = posterior_mean(q, t, x)[0] - posterior_mean(p, t, x)[0];
        const double rhs = (1.0 - t) * (1.0 - t) / t *
                           (path_marginal_score(q, t, x)[0] - path_marginal_score(p, t, x)[0]);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("interior-time preconditions") {
    const GMMSpec p = GMMSpec::standard_normal(1);
    const Vec x{0.0};
    CHECK_THROWS_AS(path_marginal_log_density(p, 0.0, x), std::invalid_argument);
    CHECK_THROWS_AS(path_marginal_log_density(p, 1.0, x), std::invalid_argument);
    CHECK_THROWS_AS(path_marginal_score(p, -0.1, x), std::invalid_argument);
    CHECK_THROWS_AS(posterior_mean(p, 0.0, x), std::invalid_argument);
    CHECK_THROWS_AS(oracle_velocity(p, 1.0, x), std::invalid_argument);
    CHECK_THROWS_AS(conditional_path_score(x, 1.0, x), std::invalid_argument);
}

TEST_CASE("GMMSpec JSON round trip and validation") {
    const GMMSpec g = two_comp_1d();
    const GMMSpec back = GMMSpec::from_json(g.to_json());
    CHECK(back.weights == g.weights);
    CHECK(back.means == g.means);
    CHECK(back.variances == g.variances);

    GMMSpec bad = g;
    bad.weights = {0.5, 0.6};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = g;
    bad.variances[0] = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = g;
    bad.means[1] = Vec{1.0, 2.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

} // TEST_SUITE
