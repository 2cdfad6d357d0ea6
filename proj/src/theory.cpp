#include "vmad/theory.hpp"

#include "vmad/math_util.hpp"
#include "vmad/quadrature.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace vmad {

namespace {

constexpr double kExactTol = 1e-10;   // relative, for algebraic identities
constexpr double kZ99 = 2.5758293035489004; // two-sided 99% normal quantile

double rel_gap(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-30});
    return std::abs(a - b) / scale;
}

double interior_time(RngState& rng) {
    return 0.02 + 0.96 * rng.next_unit();
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

} // namespace

nlohmann::json CheckReport::to_json() const {
    nlohmann::json extra_obj = nlohmann::json::object();
    for (const auto& [k, v] : extras) extra_obj[k] = v;
    return nlohmann::json{{"name", name},         {"lhs", lhs},
                          {"rhs", rhs},           {"tolerance", tolerance},
                          {"std_error", std_error}, {"samples", samples},
                          {"pass", pass},         {"detail", detail},
                          {"extras", extra_obj}};
}

double CheckReport::extra(const std::string& key) const {
    for (const auto& [k, v] : extras)
        if (k == key) return v;
    throw std::invalid_argument("CheckReport: no extra named '" + key + "'");
}

CheckReport check_residual_identity(const GMMSpec& gmm, std::size_t n, RngState& rng) {
    if (n == 0) throw std::invalid_argument("check_residual_identity: n must be >= 1");
    gmm.validate();
    const std::size_t d = gmm.dim();
    CheckReport report;
    report.name = "residual_identity";
    report.tolerance = kExactTol;
    report.samples = n;
    double worst = 0.0;
    for (std::size_t it = 0; it < n; ++it) {
        const Vec y = gmm.sample(rng);
        const Vec x0 = sample_standard_normal(d, rng);
        const double t = interior_time(rng);
        Vec x_t(d);
        for (std::size_t k = 0; k < d; ++k) x_t[k] = (1.0 - t) * x0[k] + t * y[k];
        const Vec mu = posterior_mean(gmm, t, x_t);
        const Vec v = oracle_velocity(gmm, t, x_t);
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double a = y[k] - mu[k];
            const double b = v[k] - (y[k] - x0[k]);
            lhs += a * a;
            rhs += b * b;
        }
        rhs *= (1.0 - t) * (1.0 - t);
        const double rel = rel_gap(lhs, rhs);
        if (rel >= worst) {
            worst = rel;
            report.lhs = lhs;
            report.rhs = rhs;
        }
    }
    report.pass = worst < report.tolerance;
    report.extras.emplace_back("max_rel_error", worst);
    report.detail = "max relative error " + fmt(worst) + " over " + std::to_string(n) + " triples";
    return report;
}

CheckReport check_tweedie(const GMMSpec& gmm, double t, std::span<const double> probes) {
    if (gmm.dim() != 1)
        throw std::invalid_argument("check_tweedie: quadrature oracle requires a 1-D mixture");
    CheckReport report;
    report.name = "tweedie";
    report.tolerance = 1e-6; // absolute
    report.samples = probes.size();
    double worst = 0.0;
    for (double x : probes) {
        const double closed = posterior_mean(gmm, t, Vec{x})[0];
        const double quad = quad_posterior_mean_1d(gmm, t, x);
        const double err = std::abs(closed - quad);
        if (err >= worst) {
            worst = err;
            report.lhs = closed;
            report.rhs = quad;
        }
    }
    report.pass = worst < report.tolerance;
    report.extras.emplace_back("max_abs_error", worst);
    report.detail = "t=" + fmt(t) + ", max |closed - quadrature| = " + fmt(worst);
    return report;
}

namespace {

struct DecompSamples {
    std::vector<double> lhs;     // t^2 ||v_p - (Y - X0)||^2
    std::vector<double> denoise; // (t/(1-t))^2 ||Y - mu_q(X_t)||^2
    std::vector<double> fisher;  // (1-t)^2 ||s_q - s_p||^2
};

DecompSamples draw_decomposition(const GMMSpec& p, const GMMSpec& q, double t, std::size_t n,
                                 RngState& rng) {
    if (p.dim() != q.dim())
        throw std::invalid_argument("check_decomposition: p and q must share one dimension");
    const std::size_t d = p.dim();
    const double w_den = t * t / ((1.0 - t) * (1.0 - t));
    const double w_fis = (1.0 - t) * (1.0 - t);
    DecompSamples s;
    s.lhs.resize(n);
    s.denoise.resize(n);
    s.fisher.resize(n);
    for (std::size_t it = 0; it < n; ++it) {
        const Vec y = q.sample(rng);
        const Vec x0 = sample_standard_normal(d, rng);
        Vec x_t(d);
        for (std::size_t k = 0; k < d; ++k) x_t[k] = (1.0 - t) * x0[k] + t * y[k];
        const Vec v = oracle_velocity(p, t, x_t);
        const Vec mu_q = posterior_mean(q, t, x_t);
        const Vec s_q = path_marginal_score(q, t, x_t);
        const Vec s_p = path_marginal_score(p, t, x_t);
        double a = 0.0, b = 0.0, c = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double rv = v[k] - (y[k] - x0[k]);
            const double rm = y[k] - mu_q[k];
            const double rs = s_q[k] - s_p[k];
            a += rv * rv;
            b += rm * rm;
            c += rs * rs;
        }
        s.lhs[it] = t * t * a;
        s.denoise[it] = w_den * b;
        s.fisher[it] = w_fis * c;
    }
    return s;
}

} // namespace

CheckReport check_decomposition(const GMMSpec& p, const GMMSpec& q, double t, std::size_t n,
                                RngState& rng) {
    if (n < 10000) throw std::invalid_argument("check_decomposition: need n >= 10^4");
    const auto s = draw_decomposition(p, q, t, n, rng);
    std::vector<double> diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = s.lhs[i] - s.denoise[i] - s.fisher[i];

    CheckReport report;
    report.name = "decomposition";
    report.samples = n;
    report.lhs = mean(s.lhs);
    report.rhs = mean(s.denoise) + mean(s.fisher);
    report.std_error = std_error(diff);
    report.tolerance = 3.0 * report.std_error;
    report.pass = std::abs(mean(diff)) <= report.tolerance;
    report.extras.emplace_back("denoise_term", mean(s.denoise));
    report.extras.emplace_back("fisher_term", mean(s.fisher));
    report.extras.emplace_back("diff", mean(diff));
    report.detail = "t=" + fmt(t) + ", |LHS-RHS|=" + fmt(std::abs(mean(diff))) + " vs 3SE=" +
                    fmt(report.tolerance);
    return report;
}

CheckReport check_decomposition_null(const GMMSpec& p, double t, std::size_t n, RngState& rng) {
    const auto s = draw_decomposition(p, p, t, n, rng);
    const double inv_wf = 1.0 / ((1.0 - t) * (1.0 - t));
    std::vector<double> fisher_implied(n);
    for (std::size_t i = 0; i < n; ++i)
        fisher_implied[i] = (s.lhs[i] - s.denoise[i]) * inv_wf;

    CheckReport report;
    report.name = "decomposition_null";
    report.samples = n;
    report.lhs = mean(s.fisher);      // direct term: exactly zero when q = p
    report.rhs = mean(fisher_implied); // implied from LHS - denoising
    report.std_error = std_error(fisher_implied);
    // Floor absorbs pure rounding noise: both estimates are identically
    // zero in exact arithmetic here.
    report.tolerance = 3.0 * report.std_error + 1e-12;
    report.pass = std::abs(report.lhs) <= 3.0 * std_error(s.fisher) + 1e-12 &&
                  std::abs(report.rhs) <= report.tolerance;
    report.detail = "q=p control at t=" + fmt(t) + ": implied Fisher " + fmt(report.rhs) +
                    " within 3SE=" + fmt(3.0 * report.std_error);
    return report;
}

CheckReport check_late_time_bound(const GMMSpec& q, std::span<const double> t_grid,
                                  std::size_t n, RngState& rng) {
    q.validate();
    const std::size_t d = q.dim();
    CheckReport report;
    report.name = "late_time_bound";
    report.samples = n;
    report.rhs = static_cast<double>(d);
    report.pass = true;
    double worst = -1.0;
    for (double t : t_grid) {
        if (!(t > 0.0) || !(t < 1.0))
            throw std::invalid_argument("check_late_time_bound: t grid must lie in (0,1)");
        const double w = t * t / ((1.0 - t) * (1.0 - t));
        std::vector<double> weighted(n);
        for (std::size_t it = 0; it < n; ++it) {
            const Vec y = q.sample(rng);
            const Vec x0 = sample_standard_normal(d, rng);
            Vec x_t(d);
            for (std::size_t k = 0; k < d; ++k) x_t[k] = (1.0 - t) * x0[k] + t * y[k];
            const Vec mu = posterior_mean(q, t, x_t);
            weighted[it] = w * squared_distance(y, mu);
        }
        const double est = mean(weighted);
        const double se = std_error(weighted);
        const bool ok = est <= static_cast<double>(d) + 3.0 * se;
        report.pass = report.pass && ok;
        report.extras.emplace_back("weighted_t" + fmt(t), est);
        report.extras.emplace_back("se_t" + fmt(t), se);
        if (est > worst) {
            worst = est;
            report.lhs = est;
            report.std_error = se;
        }
    }
    report.tolerance = 3.0 * report.std_error;
    report.detail = "max weighted denoising " + fmt(report.lhs) + " vs bound d=" + fmt(report.rhs);
    return report;
}

CheckReport check_quantile_bridge(const GMMSpec& p, const Vec& y, double t,
                                  std::span<const double> alphas, std::size_t k_mc,
                                  RngState& rng) {
    p.validate();
    if (!(t > 0.0) || !(t < 1.0))
        throw std::invalid_argument("check_quantile_bridge: t must lie in (0, 1)");
    if (y.size() != p.dim())
        throw std::invalid_argument("check_quantile_bridge: y dimension mismatch");
    const std::size_t d = p.dim();
    const double ratio = (1.0 - t) / t;

    std::vector<double> res(k_mc), gap(k_mc);
    double pathwise_worst = 0.0;
    for (std::size_t it = 0; it < k_mc; ++it) {
        const Vec x0 = sample_standard_normal(d, rng);
        Vec x_t(d);
        for (std::size_t k = 0; k < d; ++k) x_t[k] = (1.0 - t) * x0[k] + t * y[k];
        const Vec v = oracle_velocity(p, t, x_t);
        const Vec s_cond = conditional_path_score(y, t, x_t);
        const Vec s_marg = path_marginal_score(p, t, x_t);
        double r2 = 0.0, g2 = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double rv = v[k] - (y[k] - x0[k]);
            const double gs = s_cond[k] - s_marg[k];
            r2 += rv * rv;
            g2 += gs * gs;
        }
        res[it] = std::sqrt(r2);
        gap[it] = std::sqrt(g2);
        // Pathwise: (1-t) res = ((1-t)^2 / t) gap, i.e. res = ratio * gap.
        pathwise_worst = std::max(pathwise_worst, rel_gap(res[it], ratio * gap[it]));
    }

    std::vector<double> res_sorted = res, gap_sorted = gap;
    std::sort(res_sorted.begin(), res_sorted.end());
    std::sort(gap_sorted.begin(), gap_sorted.end());

    CheckReport report;
    report.name = "quantile_bridge";
    report.samples = k_mc;
    report.pass = pathwise_worst < kExactTol;
    report.extras.emplace_back("pathwise_max_rel_error", pathwise_worst);
    const double fn = static_cast<double>(k_mc);
    for (double alpha : alphas) {
        const std::size_t rank = order_statistic_rank(k_mc, alpha);
        const double q_res = res_sorted[rank - 1];
        const double q_gap = gap_sorted[rank - 1];
        // Order-statistic CI half width at +-3 sqrt(n a (1-a)) ranks.
        const auto spread = static_cast<std::size_t>(
            std::ceil(3.0 * std::sqrt(fn * alpha * (1.0 - alpha))));
        const std::size_t lo = rank > spread ? rank - spread : 1;
        const std::size_t hi = std::min(k_mc, rank + spread);
        const double tol = 0.5 * (res_sorted[hi - 1] - res_sorted[lo - 1]) + 1e-12;
        const bool ok = std::abs(q_res - ratio * q_gap) <= tol;
        report.pass = report.pass && ok;
        report.extras.emplace_back("q_res_a" + fmt(alpha), q_res);
        report.extras.emplace_back("q_gap_scaled_a" + fmt(alpha), ratio * q_gap);
        if (report.lhs == 0.0) {
            report.lhs = q_res;
            report.rhs = ratio * q_gap;
            report.tolerance = tol;
        }
    }
    report.detail = "t=" + fmt(t) + ", ratio (1-t)/t=" + fmt(ratio) + ", pathwise max rel err " +
                    fmt(pathwise_worst);
    return report;
}

CheckReport check_learned_bridge(const VelocityField& field, const GMMSpec& p, const Vec& y,
                                 double t, double alpha, double beta, std::size_t k_mc,
                                 RngState& rng) {
    if (!(alpha > 0.0) || !(beta > 0.0) || !(alpha + beta < 1.0))
        throw std::invalid_argument("check_learned_bridge: need alpha, beta > 0 with alpha+beta < 1");
    p.validate();
    const std::size_t d = p.dim();
    std::vector<double> loss_sq(k_mc), score_gap(k_mc), approx_tail(k_mc);
    const double t_over = t / (1.0 - t);
    for (std::size_t it = 0; it < k_mc; ++it) {
        const Vec x0 = sample_standard_normal(d, rng);
        Vec x_t(d);
        for (std::size_t k = 0; k < d; ++k) x_t[k] = (1.0 - t) * x0[k] + t * y[k];
        const Vec v_theta = field(x_t, t);
        const Vec v_p = oracle_velocity(p, t, x_t);
        const Vec s_cond = conditional_path_score(y, t, x_t);
        const Vec s_marg = path_marginal_score(p, t, x_t);
        double l2 = 0.0, g2 = 0.0, u2 = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double lv = v_theta[k] - (y[k] - x0[k]);
            const double gs = s_cond[k] - s_marg[k];
            const double uv = v_theta[k] - v_p[k];
            l2 += lv * lv;
            g2 += gs * gs;
            u2 += uv * uv;
        }
        loss_sq[it] = l2;
        score_gap[it] = std::sqrt(g2);
        approx_tail[it] = t_over * std::sqrt(u2);
    }
    const double q_loss = empirical_quantile(loss_sq, alpha + beta);
    const double q_gap = empirical_quantile(score_gap, alpha);
    const double q_tail = empirical_quantile(approx_tail, 1.0 - beta);
    const double gap_minus_tail = std::max(0.0, q_gap - q_tail);
    const double bound = ((1.0 - t) * (1.0 - t)) / (t * t) * gap_minus_tail * gap_minus_tail;

    CheckReport report;
    report.name = "learned_bridge";
    report.samples = k_mc;
    report.lhs = q_loss;
    report.rhs = bound;
    report.tolerance = 1e-12 * std::max(1.0, bound);
    report.pass = q_loss >= bound - report.tolerance;
    report.extras.emplace_back("q_score_gap", q_gap);
    report.extras.emplace_back("q_approx_tail", q_tail);
    report.detail = "t=" + fmt(t) + ", alpha=" + fmt(alpha) + ", beta=" + fmt(beta) +
                    ": Q(loss^2)=" + fmt(q_loss) + " >= bound " + fmt(bound);
    return report;
}

CheckReport check_min_tail(double exceedance, std::size_t k, std::size_t trials, RngState& rng) {
    if (!(exceedance > 0.0) || !(exceedance < 1.0))
        throw std::invalid_argument("check_min_tail: exceedance must lie in (0,1)");
    if (k == 0) throw std::invalid_argument("check_min_tail: k must be >= 1");
    if (trials < 10000) throw std::invalid_argument("check_min_tail: need trials >= 10^4");
    const double tau = 1.0 - exceedance; // Z ~ U(0,1): Pr(Z > tau) = exceedance
    std::size_t count = 0;
    for (std::size_t it = 0; it < trials; ++it) {
        double min_v = 2.0;
        for (std::size_t j = 0; j < k; ++j) min_v = std::min(min_v, rng.next_unit());
        if (min_v > tau) ++count;
    }
    const double target = std::pow(exceedance, static_cast<double>(k));
    const double observed = static_cast<double>(count) / static_cast<double>(trials);
    const double ci = kZ99 * std::sqrt(target * (1.0 - target) / static_cast<double>(trials));

    CheckReport report;
    report.name = "min_tail";
    report.samples = trials;
    report.lhs = observed;
    report.rhs = target;
    report.std_error = std::sqrt(target * (1.0 - target) / static_cast<double>(trials));
    report.tolerance = ci;
    report.pass = std::abs(observed - target) <= ci;
    report.detail = "r=" + fmt(exceedance) + ", K=" + std::to_string(k) + ": observed " +
                    fmt(observed) + " vs r^K=" + fmt(target) + " (99% CI " + fmt(ci) + ")";
    return report;
}

CheckReport check_concentration(const ScalarSampler& sampler, std::span<const std::size_t> ks,
                                std::size_t repeats, RngState& rng) {
    if (ks.size() < 2) throw std::invalid_argument("check_concentration: need >= 2 K values");
    for (std::size_t i = 1; i < ks.size(); ++i)
        if (ks[i] <= ks[i - 1])
            throw std::invalid_argument("check_concentration: K list must be increasing");
    if (repeats < 100) throw std::invalid_argument("check_concentration: need repeats >= 100");
    std::vector<double> log_k, log_std;
    bool degenerate = false;
    CheckReport report;
    report.name = "concentration";
    report.samples = repeats;
    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
        std::vector<double> avgs(repeats);
        for (std::size_t rep = 0; rep < repeats; ++rep) {
            RngState stream = rng.split(ki * repeats + rep);
            double acc = 0.0;
            for (std::size_t j = 0; j < ks[ki]; ++j) acc += sampler(stream);
            avgs[rep] = acc / static_cast<double>(ks[ki]);
        }
        const double sd = sample_stddev(avgs);
        report.extras.emplace_back("std_K" + std::to_string(ks[ki]), sd);
        if (sd <= 0.0) {
            degenerate = true;
        } else {
            log_k.push_back(std::log(static_cast<double>(ks[ki])));
            log_std.push_back(std::log(sd));
        }
    }
    if (degenerate) {
        report.pass = true;
        report.detail = "degenerate: zero variance across repeats, slope check skipped";
        report.extras.emplace_back("degenerate", 1.0);
        return report;
    }
    const double slope = fit_slope(log_k, log_std);
    report.lhs = slope;
    report.rhs = -0.5;
    report.tolerance = 0.1;
    report.pass = std::abs(slope + 0.5) < 0.1;
    report.detail = "fitted log-log slope " + fmt(slope) + " (target -0.5 +- 0.1)";
    return report;
}

CheckReport check_endpoint_weight_identity(const VelocityField& field, const GMMSpec& p,
                                           std::size_t samples, RngState& rng) {
    p.validate();
    const std::size_t d = p.dim();
    CheckReport report;
    report.name = "endpoint_weight";
    report.tolerance = kExactTol;
    report.samples = samples;
    double worst = 0.0;
    for (std::size_t it = 0; it < samples; ++it) {
        const Vec y = p.sample(rng);
        const Vec x0 = sample_standard_normal(d, rng);
        const double t = interior_time(rng);
        Vec x_t(d);
        for (std::size_t k = 0; k < d; ++k) x_t[k] = (1.0 - t) * x0[k] + t * y[k];
        const Vec v = field(x_t, t);
        double endpoint = 0.0, residual = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double yhat = x_t[k] + (1.0 - t) * v[k];
            const double r = v[k] - (y[k] - x0[k]);
            endpoint += (yhat - y[k]) * (yhat - y[k]);
            residual += r * r;
        }
        const double lhs = t * t / ((1.0 - t) * (1.0 - t)) * endpoint;
        const double rhs = t * t * residual;
        const double rel = rel_gap(lhs, rhs);
        if (rel >= worst) {
            worst = rel;
            report.lhs = lhs;
            report.rhs = rhs;
        }
    }
    report.pass = worst < report.tolerance;
    report.extras.emplace_back("max_rel_error", worst);
    report.detail = "max relative error " + fmt(worst) + " over " + std::to_string(samples) +
                    " triples";
    return report;
}

CheckReport check_uniform_control(std::span<const std::size_t> ms, std::size_t k,
                                  std::size_t repeats, RngState& rng) {
    if (ms.size() < 2) throw std::invalid_argument("check_uniform_control: need >= 2 M values");
    CheckReport report;
    report.name = "uniform_control";
    report.samples = repeats;
    std::vector<double> max_devs;
    for (std::size_t mi = 0; mi < ms.size(); ++mi) {
        if (ms[mi] < 2) throw std::invalid_argument("check_uniform_control: M must be >= 2");
        std::vector<double> devs(repeats);
        for (std::size_t rep = 0; rep < repeats; ++rep) {
            RngState stream = rng.split(mi * repeats + rep);
            double worst = 0.0;
            for (std::size_t est = 0; est < ms[mi]; ++est) {
                double acc = 0.0;
                for (std::size_t j = 0; j < k; ++j) {
                    const double z = stream.next_normal();
                    acc += z * z; // mean-1 samples
                }
                worst = std::max(worst, std::abs(acc / static_cast<double>(k) - 1.0));
            }
            devs[rep] = worst;
        }
        max_devs.push_back(mean(devs));
        report.extras.emplace_back("maxdev_M" + std::to_string(ms[mi]), max_devs.back());
    }
    report.pass = true;
    for (std::size_t a = 0; a < ms.size(); ++a) {
        for (std::size_t b = a + 1; b < ms.size(); ++b) {
            const double ratio = max_devs[b] / max_devs[a];
            const double allowed = 2.0 * std::sqrt(std::log(static_cast<double>(ms[b])) /
                                                   std::log(static_cast<double>(ms[a])));
            report.pass = report.pass && ratio <= allowed;
            if (a == 0 && b == ms.size() - 1) {
                report.lhs = ratio;
                report.rhs = allowed;
            }
        }
    }
    report.detail = "max-deviation growth across M stays within 2 sqrt(log-ratio)";
    return report;
}

namespace {

GMMSpec mixture_2d() {
    GMMSpec g;
    g.weights = {0.4, 0.6};
    g.means = {Vec{-2.0, 0.0}, Vec{2.0, 0.0}};
    g.variances = {0.5, 1.5};
    return g;
}

GMMSpec mixture_1d() {
    GMMSpec g;
    g.weights = {0.3, 0.7};
    g.means = {Vec{-2.0}, Vec{1.5}};
    g.variances = {0.5, 1.0};
    return g;
}

GMMSpec gauss_1d(double mean) {
    GMMSpec g;
    g.weights = {1.0};
    g.means = {Vec{mean}};
    g.variances = {1.0};
    return g;
}

GMMSpec late_time_q_1d() {
    GMMSpec g;
    g.weights = {0.5, 0.5};
    g.means = {Vec{-1.5}, Vec{2.0}};
    g.variances = {0.8, 0.5};
    return g;
}

GMMSpec late_time_q_2d() {
    GMMSpec g;
    g.weights = {0.5, 0.5};
    g.means = {Vec{-2.0, 0.0}, Vec{2.0, 1.0}};
    g.variances = {1.0, 0.6};
    return g;
}

struct SuiteEntry {
    std::string name;
    std::uint64_t stream; // fixed per entry so subsets reproduce full-run numbers
    std::function<CheckReport(RngState&)> run;
};

std::vector<SuiteEntry> build_suite() {
    const std::vector<double> probes = {-4, -3, -2, -1, 0, 1, 2, 3, 4};
    const std::vector<double> alphas = {0.1, 0.5, 0.9};
    const std::vector<double> late_grid = {0.5, 0.9, 0.99, 0.999};
    const std::vector<std::size_t> conc_ks = {4, 16, 64, 256};
    const std::vector<std::size_t> ms = {10, 100, 1000};

    std::vector<SuiteEntry> suite;
    std::uint64_t id = 0;
    auto add = [&](std::string name, std::function<CheckReport(RngState&)> run) {
        suite.push_back({std::move(name), id++, std::move(run)});
    };

    add("residual_identity_gauss", [](RngState& r) {
        auto rep = check_residual_identity(GMMSpec::standard_normal(2), 1000, r);
        rep.name = "residual_identity_gauss";
        return rep;
    });
    add("residual_identity_mixture", [](RngState& r) {
        auto rep = check_residual_identity(mixture_2d(), 1000, r);
        rep.name = "residual_identity_mixture";
        return rep;
    });
    for (double t : {0.25, 0.5, 0.9}) {
        add("tweedie_t" + fmt(t * 100), [t, probes](RngState&) {
            auto rep = check_tweedie(mixture_1d(), t, probes);
            rep.name = "tweedie_t" + fmt(t * 100);
            return rep;
        });
    }
    for (double t : {0.25, 0.5, 0.75}) {
        add("decomposition_t" + fmt(t * 100), [t](RngState& r) {
            auto rep = check_decomposition(gauss_1d(0.0), gauss_1d(3.0), t, 100000, r);
            rep.name = "decomposition_t" + fmt(t * 100);
            return rep;
        });
    }
    add("decomposition_null", [](RngState& r) {
        return check_decomposition_null(gauss_1d(0.0), 0.5, 100000, r);
    });
    add("late_time_d1", [late_grid](RngState& r) {
        auto rep = check_late_time_bound(late_time_q_1d(), late_grid, 100000, r);
        rep.name = "late_time_d1";
        return rep;
    });
    add("late_time_d2", [late_grid](RngState& r) {
        auto rep = check_late_time_bound(late_time_q_2d(), late_grid, 100000, r);
        rep.name = "late_time_d2";
        return rep;
    });
    for (double t : {0.5, 0.75}) {
        add("quantile_bridge_t" + fmt(t * 100), [t, alphas](RngState& r) {
            auto rep = check_quantile_bridge(GMMSpec::standard_normal(2), Vec{2.0, 2.0}, t,
                                             alphas, 100000, r);
            rep.name = "quantile_bridge_t" + fmt(t * 100);
            return rep;
        });
    }
    add("learned_bridge_oracle", [](RngState& r) {
        const GMMSpec p = GMMSpec::standard_normal(2);
        auto rep = check_learned_bridge(gmm_oracle_field(p), p, Vec{2.0, 2.0}, 0.5, 0.3, 0.3,
                                        100000, r);
        rep.name = "learned_bridge_oracle";
        return rep;
    });
    add("learned_bridge_perturbed", [](RngState& r) {
        const GMMSpec p = GMMSpec::standard_normal(2);
        auto field = offset_field(gmm_oracle_field(p), Vec{0.3, -0.2});
        auto rep = check_learned_bridge(field, p, Vec{2.0, 2.0}, 0.5, 0.3, 0.3, 100000, r);
        rep.name = "learned_bridge_perturbed";
        return rep;
    });
    const std::vector<std::pair<double, std::size_t>> tail_cases = {{0.1, 3}, {0.3, 5}, {0.5, 1}};
    for (auto [r_exc, k_min] : tail_cases) {
        add("min_tail_r" + fmt(r_exc * 100) + "_k" + std::to_string(k_min),
            [r_exc = r_exc, k_min = k_min](RngState& r) {
                auto rep = check_min_tail(r_exc, k_min, 1000000, r);
                rep.name = "min_tail_r" + fmt(r_exc * 100) + "_k" + std::to_string(k_min);
                return rep;
            });
    }
    add("concentration", [conc_ks](RngState& r) {
        ScalarSampler z = [](RngState& s) {
            double acc = 0.0;
            for (int i = 0; i < 3; ++i) {
                const double v = s.next_normal();
                acc += v * v;
            }
            return acc;
        };
        return check_concentration(z, conc_ks, 300, r);
    });
    add("endpoint_weight", [](RngState& r) {
        return check_endpoint_weight_identity(gmm_oracle_field(mixture_2d()), mixture_2d(), 1000,
                                              r);
    });
    add("uniform_control", [ms](RngState& r) { return check_uniform_control(ms, 16, 100, r); });
    return suite;
}

} // namespace

std::vector<std::string> default_check_names() {
    std::vector<std::string> names;
    for (const auto& e : build_suite()) names.push_back(e.name);
    return names;
}

std::vector<CheckReport> run_default_checks(std::span<const std::string> selection,
                                            std::uint64_t seed) {
    const auto suite = build_suite();
    auto selected = [&](const std::string& name) {
        if (selection.empty()) return true;
        for (const auto& s : selection)
            if (name == s || name.rfind(s, 0) == 0) return true;
        return false;
    };
    bool any = selection.empty();
    for (const auto& e : suite) any = any || selected(e.name);
    if (!any) throw std::invalid_argument("verify: no check matches the given selection");

    const RngState master = RngState::seeded(seed);
    std::vector<CheckReport> reports;
    for (const auto& e : suite) {
        if (!selected(e.name)) continue;
        RngState stream = master.split(e.stream);
        reports.push_back(e.run(stream));
    }
    return reports;
}

nlohmann::json reports_to_json(std::span<const CheckReport> reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) arr.push_back(r.to_json());
    return arr;
}

std::string reports_table(std::span<const CheckReport> reports) {
    std::ostringstream os;
    char line[256];
    std::snprintf(line, sizeof line, "%-28s %14s %14s %12s %12s %6s\n", "check", "lhs", "rhs",
                  "std_error", "tolerance", "pass");
    os << line;
    for (const auto& r : reports) {
        std::snprintf(line, sizeof line, "%-28s %14.6g %14.6g %12.4g %12.4g %6s\n",
                      r.name.c_str(), r.lhs, r.rhs, r.std_error, r.tolerance,
                      r.pass ? "PASS" : "FAIL");
        os << line;
    }
    return os.str();
}

} // namespace vmad
