#include "vmad/gmm.hpp"

#include "vmad/math_util.hpp"

#include <json.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vmad {

namespace {

void require_interior_time(double t, const char* where) {
    if (!(t > 0.0) || !(t < 1.0))
        throw std::invalid_argument(std::string(where) + ": t must lie in (0, 1)");
}

// Per-component log N(x; t*m_i, c_i I) with c_i = t^2 s_i^2 + (1-t)^2,
// plus log w_i.
std::vector<double> component_log_terms(const GMMSpec& gmm, double t, const Vec& x,
                                        std::vector<double>* covs) {
    const std::size_t d = gmm.dim();
    if (x.size() != d) throw std::invalid_argument("gmm: point dimension mismatch");
    std::vector<double> logs(gmm.components());
    if (covs) covs->resize(gmm.components());
    for (std::size_t i = 0; i < gmm.components(); ++i) {
        const double c = t * t * gmm.variances[i] + (1.0 - t) * (1.0 - t);
        if (covs) (*covs)[i] = c;
        double sq = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double diff = x[k] - t * gmm.means[i][k];
            sq += diff * diff;
        }
        logs[i] = std::log(gmm.weights[i]) -
                  0.5 * static_cast<double>(d) * std::log(2.0 * std::numbers::pi * c) -
                  0.5 * sq / c;
    }
    return logs;
}

} // namespace

void GMMSpec::validate() const {
    if (weights.empty() || weights.size() != means.size() || weights.size() != variances.size())
        throw std::invalid_argument("GMMSpec: weights/means/variances must be nonempty and equally sized");
    double total = 0.0;
    for (double w : weights) {
        if (!(w > 0.0)) throw std::invalid_argument("GMMSpec: weights must be positive");
        total += w;
    }
    if (std::abs(total - 1.0) >= 1e-12)
        throw std::invalid_argument("GMMSpec: weights must sum to 1");
    const std::size_t d = means.front().size();
    if (d == 0) throw std::invalid_argument("GMMSpec: dimension must be >= 1");
    for (const auto& m : means)
        if (m.size() != d) throw std::invalid_argument("GMMSpec: means must share one dimension");
    for (double v : variances)
        if (!(v > 0.0)) throw std::invalid_argument("GMMSpec: variances must be positive");
}

nlohmann::json GMMSpec::to_json() const {
    return nlohmann::json{{"weights", weights}, {"means", means}, {"variances", variances}};
}

GMMSpec GMMSpec::from_json(const nlohmann::json& j) {
    GMMSpec spec;
    spec.weights = j.at("weights").get<std::vector<double>>();
    spec.means = j.at("means").get<std::vector<Vec>>();
    spec.variances = j.at("variances").get<std::vector<double>>();
    spec.validate();
    return spec;
}

GMMSpec GMMSpec::standard_normal(std::size_t dim) {
    GMMSpec spec;
    spec.weights = {1.0};
    spec.means = {Vec(dim, 0.0)};
    spec.variances = {1.0};
    return spec;
}

Vec GMMSpec::sample(RngState& rng) const {
    // Component by inverse CDF on the weights, then m_i + s_i * z.
    const double u = rng.next_unit();
    std::size_t pick = components() - 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < components(); ++i) {
        acc += weights[i];
        if (u < acc) {
            pick = i;
            break;
        }
    }
    Vec z = sample_standard_normal(dim(), rng);
    const double s = std::sqrt(variances[pick]);
    for (std::size_t k = 0; k < dim(); ++k) z[k] = means[pick][k] + s * z[k];
    return z;
}

double path_marginal_log_density(const GMMSpec& gmm, double t, const Vec& x) {
    require_interior_time(t, "path_marginal_log_density");
    const auto logs = component_log_terms(gmm, t, x, nullptr);
    return log_sum_exp(logs);
}

Vec path_marginal_score(const GMMSpec& gmm, double t, const Vec& x) {
    require_interior_time(t, "path_marginal_score");
    std::vector<double> covs;
    const auto logs = component_log_terms(gmm, t, x, &covs);
    const double log_total = log_sum_exp(logs);
    Vec score(gmm.dim(), 0.0);
    for (std::size_t i = 0; i < gmm.components(); ++i) {
        const double resp = std::exp(logs[i] - log_total);
        for (std::size_t k = 0; k < gmm.dim(); ++k)
            score[k] += resp * (t * gmm.means[i][k] - x[k]) / covs[i];
    }
    return score;
}

Vec posterior_mean(const GMMSpec& gmm, double t, const Vec& x) {
    require_interior_time(t, "posterior_mean");
    Vec mu = path_marginal_score(gmm, t, x);
    const double shrink = (1.0 - t) * (1.0 - t) / t;
    for (std::size_t k = 0; k < mu.size(); ++k) mu[k] = x[k] / t + shrink * mu[k];
    return mu;
}

Vec oracle_velocity(const GMMSpec& gmm, double t, const Vec& x) {
    if (t >= 1.0) throw std::invalid_argument("oracle_velocity: t must be < 1");
    Vec v = posterior_mean(gmm, t, x);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = (v[k] - x[k]) / (1.0 - t);
    return v;
}

Vec conditional_path_score(const Vec& y, double t, const Vec& x) {
    if (t >= 1.0) throw std::invalid_argument("conditional_path_score: t must be < 1");
    require_interior_time(t, "conditional_path_score");
    if (y.size() != x.size())
        throw std::invalid_argument("conditional_path_score: dimension mismatch");
    const double inv = 1.0 / ((1.0 - t) * (1.0 - t));
    Vec s(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) s[k] = (t * y[k] - x[k]) * inv;
    return s;
}

} // namespace vmad
