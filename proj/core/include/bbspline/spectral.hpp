#pragma once

#include <span>
#include <vector>

#include "bbspline/kernel.hpp"

namespace bbspline {

// Eigenvalues of the symmetric circulant matrices
//   Sigma = [K(i/n, i'/n) / n],  Omega = [K2(i/n, i'/n) / n],
// indexed by frequency l = 0..n-1 in the basis documented in dft.hpp.
struct CirculantEigenvalues {
  int n = 0;
  int m = 0;
  std::vector<double> lam_c;
  std::vector<double> lam_d;
  // Per-frequency absolute error estimates. For the series path this is the
  // first omitted Euler-Maclaurin term; for the row path the largest
  // imaginary residue of the transform.
  std::vector<double> err_c;
  std::vector<double> err_d;
};

inline constexpr int kDefaultSeriesTerms = 64;

// Lattice sums
//   lam_c[0] = 2 sum_{k>=1} (2 pi k n)^{-2m},
//   lam_c[l] = sum_{k>=1} (2 pi (k n - l))^{-2m} + sum_{k>=0} (2 pi (k n + l))^{-2m},
// and the same with exponent 4m for lam_d. Each series keeps num_terms
// explicit terms and closes the remainder with an Euler-Maclaurin tail
// (integral, half term and three derivative corrections). This is the
// production path used by build_spectral.
CirculantEigenvalues eigenvalues_from_series(int n, int m, int num_terms = kDefaultSeriesTerms);

// Independent oracle: forms the first rows c_l = K(0, l/n)/n and
// d_l = K2(0, l/n)/n from the Bernoulli closed form and transforms them with
// a direct O(n^2) DFT, all in binary128 arithmetic. Double precision is not
// enough here: lam_d at high frequencies sits ~17 orders of magnitude below
// the row entries.
CirculantEigenvalues eigenvalues_from_row(int n, const KernelSpec& spec);

// First rows of Sigma and Omega in double precision.
std::vector<double> sigma_row(int n, const KernelSpec& spec);
std::vector<double> omega_row(int n, const KernelSpec& spec);

// Scalars shared by the estimator and the test for a fixed (n, m, lambda).
// Immutable once built.
class SpectralQuantities {
 public:
  SpectralQuantities(const CirculantEigenvalues& eig, double lambda);

  int n() const noexcept { return n_; }
  int m() const noexcept { return m_; }
  double lambda() const noexcept { return lambda_; }
  const std::vector<double>& lam_c() const noexcept { return lam_c_; }
  const std::vector<double>& lam_d() const noexcept { return lam_d_; }
  // xi_l = lam_d_l / (lambda + lam_c_l)^2, the eigenvalues of
  // A = (Sigma + lambda I)^{-1} Omega (Sigma + lambda I)^{-1}.
  const std::vector<double>& xi() const noexcept { return xi_; }
  double trace_A() const noexcept { return trace_A_; }
  double trace_A2() const noexcept { return trace_A2_; }
  // s_n^2 = 2 sum_{i != i'} a_{i,i'}^2 = 2 (tr A^2 - (tr A)^2 / n); every
  // diagonal entry of a circulant equals tr(A)/n.
  double s_n_sq() const noexcept { return s_n_sq_; }
  double s_n() const noexcept { return s_n_; }
  // h = lambda^{1/(2m)}.
  double h() const noexcept { return h_; }

 private:
  int n_;
  int m_;
  double lambda_;
  std::vector<double> lam_c_;
  std::vector<double> lam_d_;
  std::vector<double> xi_;
  double trace_A_ = 0.0;
  double trace_A2_ = 0.0;
  double s_n_sq_ = 0.0;
  double s_n_ = 0.0;
  double h_ = 0.0;
};

// Throws Error(kInvalidPenalty) for lambda <= 0 or non-finite.
SpectralQuantities build_spectral(int n, int m, double lambda);
SpectralQuantities build_spectral(const CirculantEigenvalues& eig, double lambda);

// v^T A v = sum_l xi_l |vhat_l|^2 in O(n log n).
double quadratic_form(const SpectralQuantities& sq, std::span<const double> v);

}  // namespace bbspline
