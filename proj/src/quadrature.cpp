#include "vmad/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vmad {

namespace {

constexpr double kLo = -12.0;
constexpr double kHi = 12.0;
constexpr std::size_t kNodes = 20001;

double normal_pdf(double x, double mean, double var) {
    const double d = x - mean;
    return std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

} // namespace

double trapezoid(const std::function<double(double)>& f, double a, double b, std::size_t nodes) {
    if (nodes < 2) throw std::invalid_argument("trapezoid: need at least 2 nodes");
    const double h = (b - a) / static_cast<double>(nodes - 1);
    double acc = 0.5 * (f(a) + f(b));
    for (std::size_t i = 1; i + 1 < nodes; ++i) acc += f(a + h * static_cast<double>(i));
    return acc * h;
}

double gmm_density_1d(const GMMSpec& gmm, double y) {
    if (gmm.dim() != 1) throw std::invalid_argument("gmm_density_1d: mixture must be 1-D");
    double acc = 0.0;
    for (std::size_t i = 0; i < gmm.components(); ++i)
        acc += gmm.weights[i] * normal_pdf(y, gmm.means[i][0], gmm.variances[i]);
    return acc;
}

double quad_path_marginal_density_1d(const GMMSpec& gmm, double t, double x) {
    const double var = (1.0 - t) * (1.0 - t);
    return trapezoid(
        [&](double y) { return gmm_density_1d(gmm, y) * normal_pdf(x - t * y, 0.0, var); }, kLo,
        kHi, kNodes);
}

double quad_posterior_mean_1d(const GMMSpec& gmm, double t, double x) {
    const double var = (1.0 - t) * (1.0 - t);
    const double num = trapezoid(
        [&](double y) { return y * gmm_density_1d(gmm, y) * normal_pdf(x - t * y, 0.0, var); },
        kLo, kHi, kNodes);
    const double den = quad_path_marginal_density_1d(gmm, t, x);
    return num / den;
}

} // namespace vmad
