#pragma once

#include <span>

namespace bbspline {

double normal_pdf(double x) noexcept;
double normal_cdf(double x) noexcept;
// Upper tail 1 - Phi(x), accurate for large x.
double normal_sf(double x) noexcept;
// Phi^{-1}(p) for p in (0, 1).
double normal_quantile(double p);

// Moments of a standard normal Z restricted to (a, b]; a may be -inf and b
// may be +inf.
struct TruncatedMoments {
  double prob;    // P(a < Z <= b)
  double first;   // E[Z 1(a < Z <= b)]
  double second;  // E[Z^2 1(a < Z <= b)]
};
TruncatedMoments standard_normal_moments(double a, double b) noexcept;

// sup_x |F_n(x) - Phi(x)| for the empirical distribution of the sample.
double ks_distance_to_normal(std::span<const double> sample);

// Density of Beta(a, b) at x in [0, 1], normalized through log-gamma.
double beta_density(double x, double a, double b);

double sample_mean(std::span<const double> v);
// Population variance n^{-1} sum (v - mean)^2.
double population_variance(std::span<const double> v);
// Unbiased sample standard deviation; 0 for fewer than two values.
double sample_sd(std::span<const double> v);

}  // namespace bbspline
