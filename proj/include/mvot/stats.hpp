#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace mvot::stats {

// Upper regularized incomplete gamma Q(a, x).
double gamma_q(double a, double x);

// Survival function of the chi-square distribution: P(X >= stat | df).
double chi_square_sf(double stat, int df);

// Chi-square uniformity p-value for observed bin counts against expected
// counts (same length, expected > 0).
double chi_square_uniformity_p(std::span<const std::uint64_t> observed,
                               std::span<const double> expected);

// Two-sample Kolmogorov-Smirnov p-value (asymptotic).
double ks_two_sample_p(std::vector<double> a, std::vector<double> b);

// Wilson score interval for a binomial proportion at confidence z (1.96 ~ 95%).
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.959963985);

double mean(std::span<const double> xs);
double sample_stddev(std::span<const double> xs);
double pearson_correlation(std::span<const double> xs, std::span<const double> ys);

// p-th percentile (0..100) by linear interpolation on a copy.
double percentile(std::vector<double> xs, double p);

// Trapezoidal area under (x, y) points sorted by x ascending.
double trapezoid_area(std::span<const std::pair<double, double>> points);

} // namespace mvot::stats
