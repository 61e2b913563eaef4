#include "bbspline/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "bbspline/error.hpp"

namespace bbspline {

double normal_pdf(double x) noexcept {
  if (!std::isfinite(x)) return 0.0;
  return std::exp(-0.5 * x * x) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_sf(double x) noexcept { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "normal_quantile: p must lie in (0, 1)");
  }
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

TruncatedMoments standard_normal_moments(double a, double b) noexcept {
  // Probabilities from whichever tail keeps precision.
  auto mass = [](double lo, double hi) {
    if (lo >= 0.0) return normal_sf(lo) - normal_sf(hi);
    if (hi <= 0.0) return normal_cdf(hi) - normal_cdf(lo);
    return 1.0 - normal_cdf(lo) - normal_sf(hi);
  };
  // x phi(x) -> 0 at +-inf.
  auto xphi = [](double x) { return std::isfinite(x) ? x * normal_pdf(x) : 0.0; };
  TruncatedMoments out{};
  if (!(a < b)) return out;
  out.prob = std::max(0.0, mass(a, b));
  out.first = normal_pdf(a) - normal_pdf(b);
  out.second = out.prob + xphi(a) - xphi(b);
  return out;
}

double ks_distance_to_normal(std::span<const double> sample) {
  if (sample.empty()) throw Error(ErrorCode::kInvalidArgument, "KS distance of an empty sample");
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = normal_cdf(s[i]);
    d = std::max(d, std::max((i + 1) / n - f, f - i / n));
  }
  return d;
}

double beta_density(double x, double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw Error(ErrorCode::kInvalidArgument, "beta parameters must be positive");
  if (x < 0.0 || x > 1.0) return 0.0;
  if (x == 0.0) return a < 1.0 ? std::numeric_limits<double>::infinity() : (a == 1.0 ? b : 0.0);
  if (x == 1.0) return b < 1.0 ? std::numeric_limits<double>::infinity() : (b == 1.0 ? a : 0.0);
  const double log_norm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
  return std::exp(log_norm + (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x));
}

double sample_mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

double population_variance(std::span<const double> v) {
  if (v.empty()) return 0.0;
  const double mu = sample_mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - mu) * (x - mu);
  return acc / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double mu = sample_mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - mu) * (x - mu);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

}  // namespace bbspline
