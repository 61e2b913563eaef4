#pragma once

#include <optional>
#include <span>
#include <string>

#include "bbspline/quantizer.hpp"
#include "bbspline/spectral.hpp"

namespace bbspline {

// Which sample the null variance tau_k^2 is estimated from.
//   kQuantized: tau_hat^2 = n^{-1} sum z_i^2 - zbar^2 on the raw quantized z.
//   kCentered:  the same formula on w = z - f_star (used by the linearity
//               test, where z carries the fitted linear trend).
enum class VarianceSource { kQuantized, kCentered };

const char* to_string(VarianceSource source) noexcept;

struct TestResult {
  double nT = 0.0;  // n T = w^T A w with w = z - f_star on the grid
  double tau_sq_hat = 0.0;
  double standardized = 0.0;  // (nT - tr(A) tau^2) / (s_n tau^2)
  double p_value = 1.0;       // 2 (1 - Phi(|standardized|))
  bool reject = false;        // |standardized| >= z_{1 - alpha/2}
  double alpha = 0.0;
  double lambda = 0.0;
  double critical_value = 0.0;
  double trace_A = 0.0;
  double s_n = 0.0;
  int n = 0;
  int m = 0;
  VarianceSource variance_source = VarianceSource::kQuantized;
  std::string null_kind = "function";
  // Filled by linearity_test.
  std::optional<double> linear_slope;
  std::optional<double> linear_intercept;
  // Optional provenance of z; callers that quantized attach it here.
  std::optional<Quantizer> quantizer;
};

struct TestOptions {
  VarianceSource variance = VarianceSource::kQuantized;
};

// Throws kDegenerateVariance when tau_hat^2 = 0, kInvalidArgument for alpha
// outside (0, 1), kInvalidPenalty for lambda <= 0.
TestResult quantization_test(const SpectralQuantities& sq, std::span<const double> z,
                             std::span<const double> f_star_grid, double alpha, TestOptions options = {});
TestResult quantization_test(std::span<const double> z, std::span<const double> f_star_grid, int m,
                             double lambda, double alpha, TestOptions options = {});

struct LinearFit {
  double slope;
  double intercept;
};
// Ordinary least squares of z_i on x_i = i/n, i = 1..n.
LinearFit fit_linear_on_grid(std::span<const double> z);
// z minus its least-squares line.
std::vector<double> linear_residuals(std::span<const double> z);

// Tests H0: f is linear by centering at the least-squares line. The null
// variance is estimated from the residuals.
TestResult linearity_test(const SpectralQuantities& sq, std::span<const double> z, double alpha);
TestResult linearity_test(std::span<const double> z, int m, double lambda, double alpha);

struct Theorem2Diagnostic {
  double C_k_sq;   // mesh_C_k(t)^2
  double G1;       // int_{-inf}^{t_1} z^2 pbar(z) dz
  double G2;       // int_{t_{k-1}}^{inf} z^2 pbar(z) dz
  double G_total;  // C_k_sq + G1 + G2
};

// pbar is the design-averaged Gaussian density n^{-1} sum_i phi((z - f0_i)/sigma)/sigma.
// Closed-form truncated second moments; no quadrature.
Theorem2Diagnostic theorem2_diagnostic(std::span<const double> f0_grid, double sigma, std::span<const double> t);

// delta_{n,k} = sqrt(n^{-1} s_n tau^2 + lambda + n^{-2m} + C_k(t)^2).
double separation_rate(const SpectralQuantities& sq, double tau_sq, std::span<const double> t);

// Var(Q(sigma eps)) for eps ~ N(0, 1).
double null_quantized_variance(const Quantizer& q, double sigma);

struct ConditionReport {
  bool condition_b = false;
  double condition_c_residual = 0.0;  // sum_j mu_j P(sigma eps in R_j)
  bool condition_c = false;           // |residual| <= 1e-10
  double r2_edge_sq = 0.0;            // min(t_1^2, t_{k-1}^2)
  double r2_threshold = 0.0;          // 8 sigma^2 log n
  bool r2_edges = false;
  double n_h_sq = 0.0;                // n lambda^{1/m}; should diverge with n
  double tau_sq = 0.0;                // null variance of the quantized sample
};

ConditionReport check_conditions(const Quantizer& q, double sigma, int n, double lambda, int m);

}  // namespace bbspline
