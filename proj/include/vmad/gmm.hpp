#pragma once

#include "vmad/rng.hpp"

#include <json.hpp>
#include <vector>

namespace vmad {

// Isotropic Gaussian mixture over R^d. Serves as the closed-form data law
// behind the oracle velocity field: along the affine path
// x_t = (1-t) x0 + t y with x0 ~ N(0,I) and y ~ mixture, every path
// marginal, score, posterior mean, and velocity below is exact.
struct GMMSpec {
    std::vector<double> weights;   // positive, sum to 1
    std::vector<Vec> means;        // one per component, shared dimension
    std::vector<double> variances; // per-component isotropic sigma_i^2

    std::size_t dim() const { return means.empty() ? 0 : means.front().size(); }
    std::size_t components() const { return weights.size(); }

    // Throws std::invalid_argument when weights do not sum to 1 (1e-12),
    // any variance is nonpositive, or means disagree on dimension.
    void validate() const;

    // {"weights":[...], "means":[[...]], "variances":[...]}
    nlohmann::json to_json() const;
    static GMMSpec from_json(const nlohmann::json& j);

    static GMMSpec standard_normal(std::size_t dim);

    Vec sample(RngState& rng) const;
};

// log r_t(x) for the path marginal r_t = sum_i w_i N(t m_i, (t^2 s_i^2 + (1-t)^2) I).
double path_marginal_log_density(const GMMSpec& gmm, double t, const Vec& x);

// grad_x log r_t(x): responsibility-weighted Gaussian scores, computed in
// log space so extreme t stays stable.
Vec path_marginal_score(const GMMSpec& gmm, double t, const Vec& x);

// Posterior mean mu_r(x) = E[y | x_t = x] via the Tweedie identity
// mu = x/t + ((1-t)^2/t) * score. t in (0,1); t = 0 is singular.
Vec posterior_mean(const GMMSpec& gmm, double t, const Vec& x);

// Oracle marginal velocity v(t,x) = E[y - x0 | x_t = x] = (mu(x) - x)/(1-t).
Vec oracle_velocity(const GMMSpec& gmm, double t, const Vec& x);

// Score of the Dirac-target path marginal N(t y, (1-t)^2 I):
// s(x) = (t y - x)/(1-t)^2.
Vec conditional_path_score(const Vec& y, double t, const Vec& x);

} // namespace vmad
