#pragma once

#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace bbspline {

using Rational = boost::multiprecision::cpp_rational;

inline constexpr int kMaxSplineOrder = 8;
// K uses B_{2m} and the tensor kernel uses B_{4m}.
inline constexpr int kMaxBernoulliOrder = 4 * kMaxSplineOrder;

// Bernoulli number B_n with the B_1 = -1/2 convention.
const Rational& bernoulli_number(int order);

// Exact coefficients of the Bernoulli polynomial B_n, ascending powers of x.
const std::vector<Rational>& bernoulli_coefficients(int order);

// B_n(x) by Horner's scheme on the exact coefficients rounded to double.
// Throws Error(kUnsupportedOrder) for order outside [0, kMaxBernoulliOrder].
double bernoulli_poly(int order, double x);

// Maps u into [0, 1). Exact integers go to 0.
double wrap_unit(double u) noexcept;

// Reproducing kernel of the periodic Sobolev space of order m,
//   K(x, y)    = (-1)^(m-1) B_{2m}((x - y) mod 1) / (2m)!
//   K2(x, y)   = int_0^1 K(x, u) K(u, y) du = -B_{4m}((x - y) mod 1) / (4m)!
// Both are symmetric and 1-periodic in each argument.
class KernelSpec {
 public:
  explicit KernelSpec(int m);

  int m() const noexcept { return m_; }
  const Rational& scale_K() const noexcept { return scale_K_; }
  const Rational& scale_K2() const noexcept { return scale_K2_; }

  // Coefficients of the scaled polynomials, ascending powers, rounded once
  // from the exact rational products.
  const std::vector<double>& K_coefficients() const noexcept { return k_coeffs_; }
  const std::vector<double>& K2_coefficients() const noexcept { return k2_coeffs_; }
  const std::vector<Rational>& K_coefficients_exact() const noexcept { return k_exact_; }
  const std::vector<Rational>& K2_coefficients_exact() const noexcept { return k2_exact_; }

  double K(double x, double y) const noexcept;
  double K2(double x, double y) const noexcept;

  // K and K2 as functions of the wrapped difference u = (x - y) mod 1.
  double K_diff(double u) const noexcept;
  double K2_diff(double u) const noexcept;

 private:
  int m_;
  Rational scale_K_;
  Rational scale_K2_;
  std::vector<Rational> k_exact_;
  std::vector<Rational> k2_exact_;
  std::vector<double> k_coeffs_;
  std::vector<double> k2_coeffs_;
};

// Shared immutable instance for order m; thread-safe.
const KernelSpec& kernel_spec(int m);

double kernel_K(const KernelSpec& spec, double x, double y) noexcept;
double kernel_K2(const KernelSpec& spec, double x, double y) noexcept;

}  // namespace bbspline
