#pragma once

#include "vmad/gmm.hpp"

#include <functional>

namespace vmad {

// Trapezoid rule with `nodes` equally spaced points on [a, b].
double trapezoid(const std::function<double(double)>& f, double a, double b, std::size_t nodes);

// Independent 1-D oracles for the closed forms in gmm.hpp, computed by
// direct integration of p(y) * N(x - t*y; 0, (1-t)^2) over y on [-12, 12]
// with 20001 nodes. Truncation error is negligible for unit-scale mixtures.
double quad_path_marginal_density_1d(const GMMSpec& gmm, double t, double x);
double quad_posterior_mean_1d(const GMMSpec& gmm, double t, double x);

// Data-space mixture density at y (1-D).
double gmm_density_1d(const GMMSpec& gmm, double y);

} // namespace vmad
