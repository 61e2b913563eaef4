#include "bbspline/spectral.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bbspline/dft.hpp"
#include "bbspline/error.hpp"

namespace bbspline {
namespace {

// Bernoulli numbers B_2, B_4, B_6, B_8 over (2j)!.
constexpr double kEulerMaclaurin[] = {
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
};

// Rising factorial p (p+1) ... (p+r-1).
double rising(double p, int r) {
  double out = 1.0;
  for (int i = 0; i < r; ++i) out *= p + i;
  return out;
}

struct TailSum {
  double value;
  double error;
};

// sum_{k >= k0} (n k + a)^{-p} with num_terms explicit terms.
TailSum lattice_sum(int n, double a, int p, int k0, int num_terms) {
  const double nn = n;
  const int kend = k0 + num_terms;
  const double u = nn * kend + a;
  // Remainder from k = kend on, smallest terms first.
  double tail = std::pow(u, 1.0 - p) / (nn * (p - 1)) + 0.5 * std::pow(u, -p);
  for (int j = 1; j <= 3; ++j) {
    const int r = 2 * j - 1;
    tail += kEulerMaclaurin[j - 1] * std::pow(nn, r) * rising(p, r) * std::pow(u, -p - r);
  }
  const double err = std::abs(kEulerMaclaurin[3] * std::pow(nn, 7) * rising(p, 7) * std::pow(u, -p - 7));
  double sum = tail;
  for (int k = kend - 1; k >= k0; --k) sum += std::pow(nn * k + a, -p);
  return {sum, err};
}

void fill_series(int n, int p, int num_terms, std::vector<double>& lam, std::vector<double>& err) {
  lam.assign(n, 0.0);
  err.assign(n, 0.0);
  const double scale = std::pow(2.0 * std::numbers::pi, -p);
  {
    const TailSum s = lattice_sum(n, 0.0, p, 1, num_terms);
    lam[0] = 2.0 * scale * s.value;
    err[0] = 2.0 * scale * s.error;
  }
  for (int l = 1; l < n; ++l) {
    // Only l <= n/2 is computed; the rest follows from l -> n - l.
    if (l > n - l) {
      lam[l] = lam[n - l];
      err[l] = err[n - l];
      continue;
    }
    const TailSum below = lattice_sum(n, -static_cast<double>(l), p, 1, num_terms);
    const TailSum above = lattice_sum(n, static_cast<double>(l), p, 0, num_terms);
    lam[l] = scale * (below.value + above.value);
    err[l] = scale * (below.error + above.error);
  }
}

void check_grid(int n) {
  if (n < 2) {
    throw Error(ErrorCode::kTooFewPoints, "circulant spectrum needs n >= 2, got " + std::to_string(n));
  }
}

}  // namespace

CirculantEigenvalues eigenvalues_from_series(int n, int m, int num_terms) {
  check_grid(n);
  if (m < 1 || m > kMaxSplineOrder) {
    throw Error(ErrorCode::kUnsupportedOrder, "spline order m = " + std::to_string(m) + " unsupported");
  }
  if (num_terms < 1) throw Error(ErrorCode::kInvalidArgument, "num_terms must be >= 1");
  CirculantEigenvalues out;
  out.n = n;
  out.m = m;
  fill_series(n, 2 * m, num_terms, out.lam_c, out.err_c);
  fill_series(n, 4 * m, num_terms, out.lam_d, out.err_d);
  return out;
}

std::vector<double> sigma_row(int n, const KernelSpec& spec) {
  check_grid(n);
  std::vector<double> row(n);
  for (int l = 0; l < n; ++l) row[l] = spec.K(0.0, static_cast<double>(l) / n) / n;
  return row;
}

std::vector<double> omega_row(int n, const KernelSpec& spec) {
  check_grid(n);
  std::vector<double> row(n);
  for (int l = 0; l < n; ++l) row[l] = spec.K2(0.0, static_cast<double>(l) / n) / n;
  return row;
}

SpectralQuantities::SpectralQuantities(const CirculantEigenvalues& eig, double lambda)
    : n_(eig.n), m_(eig.m), lambda_(lambda), lam_c_(eig.lam_c), lam_d_(eig.lam_d) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::kInvalidPenalty, "penalty lambda must be positive and finite");
  }
  if (static_cast<int>(lam_c_.size()) != n_ || static_cast<int>(lam_d_.size()) != n_) {
    throw Error(ErrorCode::kDimensionMismatch, "eigenvalue arrays do not match n");
  }
  xi_.resize(n_);
  for (int l = 0; l < n_; ++l) {
    const double denom = lambda + lam_c_[l];
    xi_[l] = lam_d_[l] / (denom * denom);
    trace_A_ += xi_[l];
    trace_A2_ += xi_[l] * xi_[l];
  }
  // Rounding can push an all-equal spectrum marginally negative.
  s_n_sq_ = std::max(0.0, 2.0 * (trace_A2_ - trace_A_ * trace_A_ / n_));
  s_n_ = std::sqrt(s_n_sq_);
  h_ = std::pow(lambda, 1.0 / (2.0 * m_));
}

SpectralQuantities build_spectral(const CirculantEigenvalues& eig, double lambda) {
  return SpectralQuantities(eig, lambda);
}

SpectralQuantities build_spectral(int n, int m, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::kInvalidPenalty, "penalty lambda must be positive and finite");
  }
  return SpectralQuantities(eigenvalues_from_series(n, m), lambda);
}

double quadratic_form(const SpectralQuantities& sq, std::span<const double> v) {
  if (static_cast<int>(v.size()) != sq.n()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "quadratic_form: vector length " + std::to_string(v.size()) + " != n = " +
                    std::to_string(sq.n()));
  }
  const auto power = power_spectrum(v);
  double acc = 0.0;
  for (int l = 0; l < sq.n(); ++l) acc += sq.xi()[l] * power[l];
  return acc;
}

}  // namespace bbspline
