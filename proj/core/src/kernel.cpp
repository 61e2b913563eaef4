#include "bbspline/kernel.hpp"

#include <array>
#include <cmath>
#include <string>

#include "bbspline/error.hpp"

namespace bbspline {
namespace {

using boost::multiprecision::cpp_int;

cpp_int binomial(int n, int k) {
  cpp_int r = 1;
  for (int i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

struct BernoulliTable {
  std::array<Rational, kMaxBernoulliOrder + 1> numbers;
  std::array<std::vector<Rational>, kMaxBernoulliOrder + 1> polys;

  BernoulliTable() {
    // sum_{k=0}^{n} C(n+1, k) B_k = 0 for n >= 1.
    numbers[0] = 1;
    for (int n = 1; n <= kMaxBernoulliOrder; ++n) {
      Rational acc = 0;
      for (int k = 0; k < n; ++k) acc += Rational(binomial(n + 1, k)) * numbers[k];
      numbers[n] = -acc / Rational(n + 1);
    }
    // B_n(x) = sum_k C(n, k) B_k x^(n-k).
    for (int n = 0; n <= kMaxBernoulliOrder; ++n) {
      std::vector<Rational> c(n + 1);
      for (int k = 0; k <= n; ++k) c[n - k] = Rational(binomial(n, k)) * numbers[k];
      polys[n] = std::move(c);
    }
  }
};

const BernoulliTable& table() {
  static const BernoulliTable t;
  return t;
}

void check_order(int order) {
  if (order < 0 || order > kMaxBernoulliOrder) {
    throw Error(ErrorCode::kUnsupportedOrder,
                "Bernoulli order " + std::to_string(order) + " outside [0, " +
                    std::to_string(kMaxBernoulliOrder) + "]");
  }
}

double horner(const std::vector<double>& c, double x) noexcept {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Rational factorial(int n) {
  cpp_int r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return Rational(r);
}

std::vector<Rational> scaled(const std::vector<Rational>& c, const Rational& s) {
  std::vector<Rational> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i] * s;
  return out;
}

std::vector<double> to_double(const std::vector<Rational>& c) {
  std::vector<double> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].convert_to<double>();
  return out;
}

}  // namespace

const Rational& bernoulli_number(int order) {
  check_order(order);
  return table().numbers[order];
}

const std::vector<Rational>& bernoulli_coefficients(int order) {
  check_order(order);
  return table().polys[order];
}

double bernoulli_poly(int order, double x) {
  check_order(order);
  static const auto rounded = [] {
    std::array<std::vector<double>, kMaxBernoulliOrder + 1> r;
    for (int n = 0; n <= kMaxBernoulliOrder; ++n) r[n] = to_double(table().polys[n]);
    return r;
  }();
  return horner(rounded[order], x);
}

double wrap_unit(double u) noexcept {
  double r = u - std::floor(u);
  // u slightly below an integer can round up to exactly 1.
  if (r >= 1.0) r = 0.0;
  return r;
}

KernelSpec::KernelSpec(int m) : m_(m) {
  if (m < 1 || m > kMaxSplineOrder) {
    throw Error(ErrorCode::kUnsupportedOrder,
                "spline order m = " + std::to_string(m) + " outside [1, " +
                    std::to_string(kMaxSplineOrder) + "]");
  }
  scale_K_ = Rational((m - 1) % 2 == 0 ? 1 : -1) / factorial(2 * m);
  scale_K2_ = Rational(-1) / factorial(4 * m);
  k_exact_ = scaled(bernoulli_coefficients(2 * m), scale_K_);
  k2_exact_ = scaled(bernoulli_coefficients(4 * m), scale_K2_);
  k_coeffs_ = to_double(k_exact_);
  k2_coeffs_ = to_double(k2_exact_);
}

double KernelSpec::K_diff(double u) const noexcept { return horner(k_coeffs_, wrap_unit(u)); }

double KernelSpec::K2_diff(double u) const noexcept { return horner(k2_coeffs_, wrap_unit(u)); }

double KernelSpec::K(double x, double y) const noexcept { return K_diff(x - y); }

double KernelSpec::K2(double x, double y) const noexcept { return K2_diff(x - y); }

const KernelSpec& kernel_spec(int m) {
  if (m < 1 || m > kMaxSplineOrder) {
    throw Error(ErrorCode::kUnsupportedOrder, "spline order m = " + std::to_string(m) + " unsupported");
  }
  static const auto specs = [] {
    std::vector<KernelSpec> v;
    for (int k = 1; k <= kMaxSplineOrder; ++k) v.emplace_back(k);
    return v;
  }();
  return specs[m - 1];
}

double kernel_K(const KernelSpec& spec, double x, double y) noexcept { return spec.K(x, y); }

double kernel_K2(const KernelSpec& spec, double x, double y) noexcept { return spec.K2(x, y); }

}  // namespace bbspline
