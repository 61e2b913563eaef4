#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bbspline/kernel.hpp"
#include "bbspline/spectral.hpp"

namespace bbspline {

enum class FitSource { kRaw, kQuantized };

const char* to_string(FitSource source) noexcept;

// Periodic smoothing spline on the design i/n, i = 1..n:
//   f_hat = sum_i theta_i K(i/n, .),  theta = (Sigma + lambda I)^{-1} v / n.
// Vector index 0 corresponds to the design point 1/n.
struct FitResult {
  std::vector<double> theta;
  std::vector<double> fitted_grid;  // f_hat(i/n) = [Sigma (Sigma + lambda I)^{-1} v]_i
  double lambda = 0.0;
  int n = 0;
  int m = 0;
  FitSource source = FitSource::kRaw;
  std::shared_ptr<const CirculantEigenvalues> spectrum;
};

inline constexpr int kMinFitPoints = 4;

// Solves the penalized least-squares problem in the Fourier eigenbasis.
// Throws kInvalidPenalty for lambda <= 0 and kTooFewPoints for n < 4.
FitResult fit(std::span<const double> values, int m, double lambda, FitSource source = FitSource::kRaw);
FitResult fit(std::shared_ptr<const CirculantEigenvalues> spectrum, std::span<const double> values,
              double lambda, FitSource source = FitSource::kRaw);

// f_hat(x) = sum_i theta_i K(i/n, x); periodic in x.
double evaluate(const FitResult& fit, double x);
std::vector<double> evaluate(const FitResult& fit, std::span<const double> x);

// Candidate penalties log-spaced over [lo, hi], inclusive.
std::vector<double> log_spaced_grid(double lo, double hi, int count);
// 40 points over [1e-8, 1e2].
std::vector<double> default_lambda_grid();

struct GcvSelection {
  double lambda_hat = 0.0;
  std::size_t index = 0;
  std::vector<double> grid;
  std::vector<double> scores;
  std::vector<std::string> warnings;
};

// GCV(lambda) = n ||(I - S) z||^2 / (n - tr S)^2 with S = Sigma (Sigma + lambda I)^{-1},
// from the power spectrum |zhat_l|^2 of the data.
double gcv_score(const CirculantEigenvalues& eig, std::span<const double> power, double lambda);

// Argmin over the grid; scores within a relative 1e-12 of the minimum count as
// ties and go to the largest lambda. Throws kConfiguration on an empty or
// non-positive grid.
GcvSelection gcv_select(std::span<const double> values, int m, std::span<const double> grid);
GcvSelection gcv_select(const CirculantEigenvalues& eig, std::span<const double> values,
                        std::span<const double> grid);

// lambda_GCV / log(n), the penalty used for testing.
double gcv_log_scaled(std::span<const double> values, int m, std::span<const double> grid);
double gcv_log_scaled(const CirculantEigenvalues& eig, std::span<const double> values,
                      std::span<const double> grid);

// ||f_hat - f_target||^2 in L2[0,1], where f_target = sum_i target_theta_i K(i/n, .)
// lives on the same design (empty target means the zero function). Exact via
//   ||sum_i d_i K(i/n, .)||^2 = n d^T Omega d = n sum_l lam_d_l |dhat_l|^2.
double l2_distance_sq(const FitResult& fit, std::span<const double> target_theta = {});

struct GapBound {
  double lhs;  // ||f_bb - f_ss||^2
  double rhs;  // n^{-1} sum (z_i - y_i)^2
};

// Both fits must share n, m and lambda (kDimensionMismatch otherwise).
GapBound theorem1_gap_bound(const FitResult& fit_bb, const FitResult& fit_ss, std::span<const double> y,
                            std::span<const double> z);

}  // namespace bbspline
