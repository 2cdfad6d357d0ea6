#include "vmad/math_util.hpp"

#include "vmad/version.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace vmad {

std::size_t order_statistic_rank(std::size_t n, double alpha) {
    if (n == 0) throw std::invalid_argument("order_statistic: empty list");
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument("order_statistic: alpha must be in (0, 1]");
    // The nudge keeps ceil() from overshooting when alpha*n lands a hair
    // above an integer (0.3 * 10 -> 3.0000000000000004).
    auto rank = static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(n) - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, n);
    return rank;
}

double order_statistic(std::span<const double> values, double alpha) {
    const std::size_t rank = order_statistic_rank(values.size(), alpha);
    std::vector<double> tmp(values.begin(), values.end());
    std::nth_element(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(rank - 1), tmp.end());
    return tmp[rank - 1];
}

double log_sum_exp(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("log_sum_exp: empty list");
    const double m = *std::max_element(values.begin(), values.end());
    if (!std::isfinite(m)) return m; // all -inf, or a stray +-inf dominates
    double acc = 0.0;
    for (double v : values) acc += std::exp(v - m);
    return m + std::log(acc);
}

double mean(std::span<const double> values) {
    if (values.empty()) return 0.0;
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) return 0.0;
    const double m = mean(values);
    double acc = 0.0;
    for (double v : values) acc += (v - m) * (v - m);
    return acc / static_cast<double>(n - 1);
}

double sample_stddev(std::span<const double> values) {
    return std::sqrt(sample_variance(values));
}

double std_error(std::span<const double> values) {
    if (values.empty()) return 0.0;
    return sample_stddev(values) / std::sqrt(static_cast<double>(values.size()));
}

double empirical_quantile(std::span<const double> values, double alpha) {
    return order_statistic(values, alpha);
}

double fit_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_slope: need two equally sized lists with n >= 2");
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_slope: degenerate x values");
    return sxy / sxx;
}

double squared_norm(std::span<const double> v) {
    double acc = 0.0;
    for (double c : v) acc += c * c;
    return acc;
}

double norm(std::span<const double> v) {
    return std::sqrt(squared_norm(v));
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("squared_distance: size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf);
}

} // namespace vmad
