#pragma once

#include "vmad/gmm.hpp"
#include "vmad/rng.hpp"
#include "vmad/velocity_field.hpp"

#include <json.hpp>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace vmad {

// Outcome of one numerical verification. Exact algebraic identities carry
// std_error = 0 and a relative tolerance; Monte Carlo checks pass at three
// standard errors of the coupled estimator.
struct CheckReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double tolerance = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
    bool pass = false;
    std::string detail;
    std::vector<std::pair<std::string, double>> extras;

    nlohmann::json to_json() const;
    double extra(const std::string& key) const; // throws if missing
};

// ||y - mu_p(x_t)||^2 = (1-t)^2 ||v_p(t, x_t) - (y - x0)||^2 on random
// (x0, y, t) triples; exact algebra, worst relative error reported.
CheckReport check_residual_identity(const GMMSpec& gmm, std::size_t n, RngState& rng);

// Closed-form posterior mean against Bayes-rule quadrature at the probe
// points (1-D mixtures only). Absolute tolerance 1e-6.
CheckReport check_tweedie(const GMMSpec& gmm, double t, std::span<const double> probes);

// Population decomposition: t^2 E_q ||v_p - (Y - X0)||^2 equals the
// weighted denoising term plus the Fisher term. Coupled Monte Carlo
// estimate of LHS - RHS must sit within 3 standard errors of zero.
CheckReport check_decomposition(const GMMSpec& p, const GMMSpec& q, double t, std::size_t n,
                                RngState& rng);

// q = p control: the implied Fisher estimate (LHS minus denoising)/(1-t)^2
// must be within 3 standard errors of zero.
CheckReport check_decomposition_null(const GMMSpec& p, double t, std::size_t n, RngState& rng);

// One-sided late-time bound (t^2/(1-t)^2) D_q(t) <= d on a grid of times,
// Monte Carlo with 3-SE slack.
CheckReport check_late_time_bound(const GMMSpec& q, std::span<const double> t_grid,
                                  std::size_t n, RngState& rng);

// Fixed-y quantile correspondence: Q_alpha of the velocity residual norm
// equals ((1-t)/t) times Q_alpha of the score gap, plus the per-seed
// pathwise identity at 1e-10.
CheckReport check_quantile_bridge(const GMMSpec& p, const Vec& y, double t,
                                  std::span<const double> alphas, std::size_t k_mc,
                                  RngState& rng);

// Learned-field quantile lower bound on the squared residual for a fixed y.
CheckReport check_learned_bridge(const VelocityField& field, const GMMSpec& p, const Vec& y,
                                 double t, double alpha, double beta, std::size_t k_mc,
                                 RngState& rng);

// Pr(min over K of Z > tau) = Pr(Z > tau)^K with Z ~ U(0,1) and
// tau = 1 - exceedance; empirical frequency against a 99% binomial CI.
CheckReport check_min_tail(double exceedance, std::size_t k, std::size_t trials, RngState& rng);

// Std of the K-path average shrinks like K^{-1/2}: log-log slope within
// -0.5 +- 0.1. Degenerate (constant) samplers are reported as such.
using ScalarSampler = std::function<double(RngState&)>;
CheckReport check_concentration(const ScalarSampler& sampler, std::span<const std::size_t> ks,
                                std::size_t repeats, RngState& rng);

// (t^2/(1-t)^2) ||yhat - y||^2 = t^2 ||v - (y - x0)||^2 with
// yhat = x_t + (1-t) v(x_t, t); exact for any field.
CheckReport check_endpoint_weight_identity(const VelocityField& field, const GMMSpec& p,
                                           std::size_t samples, RngState& rng);

// Max deviation across M simultaneous K-averages grows no faster than
// sqrt(log M): ratios across M in `ms` within 2 sqrt(log-ratio) slack.
CheckReport check_uniform_control(std::span<const std::size_t> ms, std::size_t k,
                                  std::size_t repeats, RngState& rng);

// Canonical suite used by the CLI. An empty selection runs everything;
// otherwise a check runs when its name equals or starts with a selector.
std::vector<CheckReport> run_default_checks(std::span<const std::string> selection,
                                            std::uint64_t seed);
std::vector<std::string> default_check_names();

nlohmann::json reports_to_json(std::span<const CheckReport> reports);
std::string reports_table(std::span<const CheckReport> reports);

} // namespace vmad
