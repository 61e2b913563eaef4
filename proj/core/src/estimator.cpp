#include "bbspline/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bbspline/dft.hpp"
#include "bbspline/error.hpp"

namespace bbspline {
namespace {

void check_penalty(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::kInvalidPenalty, "penalty lambda must be positive and finite");
  }
}

void check_size(std::size_t n, int min_n) {
  if (n < static_cast<std::size_t>(min_n)) {
    throw Error(ErrorCode::kTooFewPoints,
                "need at least " + std::to_string(min_n) + " points, got " + std::to_string(n));
  }
}

void check_grid(std::span<const double> grid) {
  if (grid.empty()) throw Error(ErrorCode::kConfiguration, "lambda grid is empty");
  for (double g : grid) {
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw Error(ErrorCode::kConfiguration, "lambda grid entries must be positive and finite");
    }
  }
}

}  // namespace

const char* to_string(FitSource source) noexcept {
  return source == FitSource::kRaw ? "raw" : "quantized";
}

FitResult fit(std::shared_ptr<const CirculantEigenvalues> spectrum, std::span<const double> values,
              double lambda, FitSource source) {
  check_penalty(lambda);
  check_size(values.size(), kMinFitPoints);
  if (!spectrum || spectrum->n != static_cast<int>(values.size())) {
    throw Error(ErrorCode::kDimensionMismatch, "spectrum does not match the number of values");
  }
  const int n = spectrum->n;
  const auto& lam_c = spectrum->lam_c;

  auto vhat = unitary_dft(values);
  std::vector<std::complex<double>> theta_hat(n), grid_hat(n);
  for (int l = 0; l < n; ++l) {
    const double denom = lambda + lam_c[l];
    theta_hat[l] = vhat[l] / (n * denom);
    grid_hat[l] = vhat[l] * (lam_c[l] / denom);
  }

  FitResult out;
  out.theta = unitary_idft_real(theta_hat);
  out.fitted_grid = unitary_idft_real(grid_hat);
  out.lambda = lambda;
  out.n = n;
  out.m = spectrum->m;
  out.source = source;
  out.spectrum = std::move(spectrum);
  return out;
}

FitResult fit(std::span<const double> values, int m, double lambda, FitSource source) {
  check_penalty(lambda);
  check_size(values.size(), kMinFitPoints);
  auto eig = std::make_shared<const CirculantEigenvalues>(
      eigenvalues_from_series(static_cast<int>(values.size()), m));
  return fit(std::move(eig), values, lambda, source);
}

double evaluate(const FitResult& fit, double x) {
  const KernelSpec& spec = kernel_spec(fit.m);
  double acc = 0.0;
  const double n = fit.n;
  for (int i = 0; i < fit.n; ++i) acc += fit.theta[i] * spec.K_diff((i + 1) / n - x);
  return acc;
}

std::vector<double> evaluate(const FitResult& fit, std::span<const double> x) {
  const KernelSpec& spec = kernel_spec(fit.m);
  const double n = fit.n;
  std::vector<double> out(x.size());
  for (std::size_t q = 0; q < x.size(); ++q) {
    double acc = 0.0;
    for (int i = 0; i < fit.n; ++i) acc += fit.theta[i] * spec.K_diff((i + 1) / n - x[q]);
    out[q] = acc;
  }
  return out;
}

std::vector<double> log_spaced_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1) {
    throw Error(ErrorCode::kConfiguration, "log grid needs 0 < lo <= hi and count >= 1");
  }
  std::vector<double> grid(count);
  if (count == 1) {
    grid[0] = lo;
    return grid;
  }
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < count; ++i) grid[i] = std::pow(10.0, a + (b - a) * i / (count - 1));
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

std::vector<double> default_lambda_grid() { return log_spaced_grid(1e-8, 1e2, 40); }

double gcv_score(const CirculantEigenvalues& eig, std::span<const double> power, double lambda) {
  const int n = eig.n;
  double rss = 0.0;
  double trace = 0.0;
  for (int l = 0; l < n; ++l) {
    const double denom = lambda + eig.lam_c[l];
    const double shrink = lambda / denom;
    rss += shrink * shrink * power[l];
    trace += eig.lam_c[l] / denom;
  }
  const double dof = n - trace;
  return n * rss / (dof * dof);
}

GcvSelection gcv_select(const CirculantEigenvalues& eig, std::span<const double> values,
                        std::span<const double> grid) {
  check_grid(grid);
  if (static_cast<int>(values.size()) != eig.n) {
    throw Error(ErrorCode::kDimensionMismatch, "spectrum does not match the number of values");
  }
  const auto power = power_spectrum(values);
  GcvSelection out;
  out.grid.assign(grid.begin(), grid.end());
  out.scores.resize(grid.size());
  bool near_interpolation = false;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    out.scores[g] = gcv_score(eig, power, grid[g]);
    double trace = 0.0;
    for (int l = 0; l < eig.n; ++l) trace += eig.lam_c[l] / (grid[g] + eig.lam_c[l]);
    if (eig.n - trace < 1e-6 * eig.n) near_interpolation = true;
  }
  if (near_interpolation) {
    out.warnings.emplace_back("smoother trace within 1e-6 n of n on part of the grid; GCV is unstable there");
  }
  if (*std::min_element(grid.begin(), grid.end()) < 1e-8) {
    out.warnings.emplace_back("lambda grid extends below 1e-8 (near interpolation)");
  }

  double best = out.scores[0];
  for (double s : out.scores) {
    if (std::isfinite(s)) best = std::isfinite(best) ? std::min(best, s) : s;
  }
  if (!std::isfinite(best)) throw Error(ErrorCode::kConfiguration, "GCV score is not finite on the whole grid");
  const double tie = best + 1e-12 * std::abs(best);
  bool found = false;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (std::isfinite(out.scores[g]) && out.scores[g] <= tie) {
      if (!found || grid[g] > out.lambda_hat) {
        out.lambda_hat = grid[g];
        out.index = g;
        found = true;
      }
    }
  }
  return out;
}

GcvSelection gcv_select(std::span<const double> values, int m, std::span<const double> grid) {
  check_grid(grid);
  check_size(values.size(), kMinFitPoints);
  const auto eig = eigenvalues_from_series(static_cast<int>(values.size()), m);
  return gcv_select(eig, values, grid);
}

double gcv_log_scaled(const CirculantEigenvalues& eig, std::span<const double> values,
                      std::span<const double> grid) {
  if (values.size() < 3) throw Error(ErrorCode::kTooFewPoints, "gcv_log_scaled needs n >= 3");
  return gcv_select(eig, values, grid).lambda_hat / std::log(static_cast<double>(values.size()));
}

double gcv_log_scaled(std::span<const double> values, int m, std::span<const double> grid) {
  if (values.size() < 3) throw Error(ErrorCode::kTooFewPoints, "gcv_log_scaled needs n >= 3");
  return gcv_select(values, m, grid).lambda_hat / std::log(static_cast<double>(values.size()));
}

double l2_distance_sq(const FitResult& fit, std::span<const double> target_theta) {
  if (!fit.spectrum) throw Error(ErrorCode::kInvalidArgument, "fit carries no spectrum");
  const int n = fit.n;
  if (!target_theta.empty() && static_cast<int>(target_theta.size()) != n) {
    throw Error(ErrorCode::kDimensionMismatch, "target coefficients do not match the fit's grid");
  }
  std::vector<double> diff(fit.theta);
  if (!target_theta.empty()) {
    for (int i = 0; i < n; ++i) diff[i] -= target_theta[i];
  }
  const auto power = power_spectrum(diff);
  double acc = 0.0;
  for (int l = 0; l < n; ++l) acc += fit.spectrum->lam_d[l] * power[l];
  return n * acc;
}

GapBound theorem1_gap_bound(const FitResult& fit_bb, const FitResult& fit_ss, std::span<const double> y,
                            std::span<const double> z) {
  if (fit_bb.n != fit_ss.n || fit_bb.m != fit_ss.m || fit_bb.lambda != fit_ss.lambda) {
    throw Error(ErrorCode::kDimensionMismatch, "fits must share n, m and lambda");
  }
  if (static_cast<int>(y.size()) != fit_bb.n || static_cast<int>(z.size()) != fit_bb.n) {
    throw Error(ErrorCode::kDimensionMismatch, "samples do not match the fits' grid");
  }
  GapBound out{};
  out.lhs = l2_distance_sq(fit_bb, fit_ss.theta);
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) acc += (z[i] - y[i]) * (z[i] - y[i]);
  out.rhs = acc / static_cast<double>(y.size());
  return out;
}

}  // namespace bbspline
