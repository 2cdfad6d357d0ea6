#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace vmad {

// ceil(alpha*K)-th smallest of `values` (1-based rank), alpha in (0, 1].
// alpha <= 1/K selects the minimum, alpha = 1 the maximum.
double order_statistic(std::span<const double> values, double alpha);

// Rank actually selected by order_statistic for a list of size n.
std::size_t order_statistic_rank(std::size_t n, double alpha);

// log(sum_i exp(v_i)), overflow-safe.
double log_sum_exp(std::span<const double> values);

double mean(std::span<const double> values);
// Unbiased sample variance (n-1 denominator); 0 for n < 2.
double sample_variance(std::span<const double> values);
double sample_stddev(std::span<const double> values);
// Standard error of the sample mean.
double std_error(std::span<const double> values);

// Empirical quantile at level alpha: the ceil(alpha*n)-th order statistic.
double empirical_quantile(std::span<const double> values, double alpha);

// Least-squares slope of y against x.
double fit_slope(std::span<const double> x, std::span<const double> y);

double squared_norm(std::span<const double> v);
double norm(std::span<const double> v);
double squared_distance(std::span<const double> a, std::span<const double> b);

} // namespace vmad
