#include "bbspline/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "bbspline/error.hpp"
#include "bbspline/stats.hpp"

namespace bbspline {
namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::kInvalidArgument, "alpha must lie in (0, 1)");
}

bool all_equal(std::span<const double> v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
}

}  // namespace

const char* to_string(VarianceSource source) noexcept {
  return source == VarianceSource::kQuantized ? "quantized" : "centered";
}

TestResult quantization_test(const SpectralQuantities& sq, std::span<const double> z,
                             std::span<const double> f_star_grid, double alpha, TestOptions options) {
  check_alpha(alpha);
  const int n = sq.n();
  if (static_cast<int>(z.size()) != n || static_cast<int>(f_star_grid.size()) != n) {
    throw Error(ErrorCode::kDimensionMismatch, "z and f_star must both have length n = " + std::to_string(n));
  }
  std::vector<double> w(z.begin(), z.end());
  for (int i = 0; i < n; ++i) w[i] -= f_star_grid[i];

  const std::span<const double> var_sample = options.variance == VarianceSource::kQuantized
                                                 ? z
                                                 : std::span<const double>(w);
  if (all_equal(var_sample)) {
    throw Error(ErrorCode::kDegenerateVariance, "all values identical: tau_hat^2 = 0 and the test is undefined");
  }
  const double tau_sq = population_variance(var_sample);
  // Residuals of an exact fit are rounding noise, not variance.
  double z_energy = 0.0;
  for (double v : z) z_energy += v * v;
  z_energy /= n;
  if (!(tau_sq > 1e-24 * z_energy)) {
    throw Error(ErrorCode::kDegenerateVariance, "tau_hat^2 is zero to rounding; the test is undefined");
  }
  if (!(sq.s_n() > 0.0)) throw Error(ErrorCode::kDegenerateVariance, "s_n = 0; the test is undefined");

  TestResult out;
  out.n = n;
  out.m = sq.m();
  out.alpha = alpha;
  out.lambda = sq.lambda();
  out.trace_A = sq.trace_A();
  out.s_n = sq.s_n();
  out.variance_source = options.variance;
  out.nT = quadratic_form(sq, w);
  out.tau_sq_hat = tau_sq;
  out.standardized = (out.nT - sq.trace_A() * tau_sq) / (sq.s_n() * tau_sq);
  out.critical_value = normal_quantile(1.0 - alpha / 2.0);
  out.p_value = std::clamp(2.0 * normal_sf(std::abs(out.standardized)), 0.0, 1.0);
  out.reject = std::abs(out.standardized) >= out.critical_value;
  return out;
}

TestResult quantization_test(std::span<const double> z, std::span<const double> f_star_grid, int m,
                             double lambda, double alpha, TestOptions options) {
  return quantization_test(build_spectral(static_cast<int>(z.size()), m, lambda), z, f_star_grid, alpha,
                           options);
}

LinearFit fit_linear_on_grid(std::span<const double> z) {
  const std::size_t n = z.size();
  if (n < 3) throw Error(ErrorCode::kTooFewPoints, "linear fit needs n >= 3");
  const double nn = static_cast<double>(n);
  const double xbar = (nn + 1.0) / (2.0 * nn);
  const double zbar = sample_mean(z);
  double sxz = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = (i + 1) / nn - xbar;
    sxz += dx * (z[i] - zbar);
    sxx += dx * dx;
  }
  LinearFit out{};
  out.slope = sxz / sxx;
  out.intercept = zbar - out.slope * xbar;
  return out;
}

std::vector<double> linear_residuals(std::span<const double> z) {
  const auto line = fit_linear_on_grid(z);
  const double nn = static_cast<double>(z.size());
  std::vector<double> w(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) w[i] = z[i] - (line.intercept + line.slope * (i + 1) / nn);
  return w;
}

TestResult linearity_test(const SpectralQuantities& sq, std::span<const double> z, double alpha) {
  const auto line = fit_linear_on_grid(z);
  const int n = static_cast<int>(z.size());
  std::vector<double> f_tilde(n);
  for (int i = 0; i < n; ++i) f_tilde[i] = line.intercept + line.slope * (i + 1) / static_cast<double>(n);
  auto out = quantization_test(sq, z, f_tilde, alpha, TestOptions{VarianceSource::kCentered});
  out.null_kind = "linear";
  out.linear_slope = line.slope;
  out.linear_intercept = line.intercept;
  return out;
}

TestResult linearity_test(std::span<const double> z, int m, double lambda, double alpha) {
  if (z.size() < 3) throw Error(ErrorCode::kTooFewPoints, "linearity test needs n >= 3");
  return linearity_test(build_spectral(static_cast<int>(z.size()), m, lambda), z, alpha);
}

Theorem2Diagnostic theorem2_diagnostic(std::span<const double> f0_grid, double sigma, std::span<const double> t) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sigma must be positive");
  if (t.empty()) throw Error(ErrorCode::kInvalidArgument, "thresholds are empty");
  if (f0_grid.empty()) throw Error(ErrorCode::kInvalidArgument, "f0 grid is empty");
  const double inf = std::numeric_limits<double>::infinity();
  double g1 = 0.0;
  double g2 = 0.0;
  for (double f : f0_grid) {
    // y = f + sigma Z: E[y^2 1(Z in I)] = f^2 P + 2 f sigma E[Z 1] + sigma^2 E[Z^2 1].
    const auto lo = standard_normal_moments(-inf, (t.front() - f) / sigma);
    const auto hi = standard_normal_moments((t.back() - f) / sigma, inf);
    g1 += f * f * lo.prob + 2.0 * f * sigma * lo.first + sigma * sigma * lo.second;
    g2 += f * f * hi.prob + 2.0 * f * sigma * hi.first + sigma * sigma * hi.second;
  }
  const double n = static_cast<double>(f0_grid.size());
  Theorem2Diagnostic out{};
  const double mesh = mesh_C_k(t);
  out.C_k_sq = mesh * mesh;
  out.G1 = std::max(0.0, g1 / n);
  out.G2 = std::max(0.0, g2 / n);
  out.G_total = out.C_k_sq + out.G1 + out.G2;
  return out;
}

double separation_rate(const SpectralQuantities& sq, double tau_sq, std::span<const double> t) {
  const double n = sq.n();
  const double mesh = mesh_C_k(t);
  return std::sqrt(sq.s_n() * tau_sq / n + sq.lambda() + std::pow(n, -2.0 * sq.m()) + mesh * mesh);
}

double null_quantized_variance(const Quantizer& q, double sigma) {
  const auto p = gaussian_cell_probabilities(0.0, sigma, q.thresholds());
  double first = 0.0;
  double second = 0.0;
  for (int j = 0; j < q.k(); ++j) {
    first += q.marks()[j] * p[j];
    second += q.marks()[j] * q.marks()[j] * p[j];
  }
  return std::max(0.0, second - first * first);
}

ConditionReport check_conditions(const Quantizer& q, double sigma, int n, double lambda, int m) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sigma must be positive");
  if (n < 2) throw Error(ErrorCode::kTooFewPoints, "n must be >= 2");
  if (!(lambda > 0.0)) throw Error(ErrorCode::kInvalidPenalty, "lambda must be positive");
  ConditionReport out;
  out.condition_b = q.satisfies_condition_b();
  const auto p = gaussian_cell_probabilities(0.0, sigma, q.thresholds());
  double resid = 0.0;
  for (int j = 0; j < q.k(); ++j) resid += q.marks()[j] * p[j];
  out.condition_c_residual = resid;
  out.condition_c = std::abs(resid) <= 1e-10;
  const double t1 = q.thresholds().front();
  const double tk = q.thresholds().back();
  out.r2_edge_sq = std::min(t1 * t1, tk * tk);
  out.r2_threshold = 8.0 * sigma * sigma * std::log(static_cast<double>(n));
  out.r2_edges = out.r2_edge_sq > out.r2_threshold;
  out.n_h_sq = n * std::pow(lambda, 1.0 / m);
  out.tau_sq = null_quantized_variance(q, sigma);
  return out;
}

}  // namespace bbspline
