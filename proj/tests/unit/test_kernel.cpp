#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <gtest/gtest.h>

#include "bbspline/error.hpp"
#include "bbspline/kernel.hpp"

namespace bbspline {
namespace {

TEST(Bernoulli, ValuesFromRecurrence) {
  EXPECT_NEAR(bernoulli_poly(4, 0.0), -1.0 / 30.0, 1e-15);
  EXPECT_NEAR(bernoulli_poly(4, 0.5), 7.0 / 240.0, 1e-15);
  EXPECT_NEAR(bernoulli_poly(1, 0.0), -0.5, 1e-15);
  EXPECT_EQ(bernoulli_number(4), Rational(-1, 30));
  EXPECT_EQ(bernoulli_number(8), Rational(-1, 30));
  EXPECT_EQ(bernoulli_number(12), Rational(-691, 2730));
  EXPECT_EQ(bernoulli_number(3), Rational(0));
}

TEST(Bernoulli, MatchesExplicitPolynomial) {
  for (double x : {0.0, 0.1, 0.37, 0.5, 0.99}) {
    const double b4 = std::pow(x, 4) - 2 * std::pow(x, 3) + x * x - 1.0 / 30.0;
    EXPECT_NEAR(bernoulli_poly(4, x), b4, 1e-15);
    const double b2 = x * x - x + 1.0 / 6.0;
    EXPECT_NEAR(bernoulli_poly(2, x), b2, 1e-15);
  }
}

TEST(Bernoulli, OrderOutOfRange) {
  EXPECT_THROW(bernoulli_poly(-1, 0.2), Error);
  try {
    bernoulli_poly(kMaxBernoulliOrder + 1, 0.2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnsupportedOrder);
  }
}

TEST(Bernoulli, HalfArgumentIdentity) {
  // B_n(1/2) = (2^{1-n} - 1) B_n
  for (int order : {2, 4, 8, 16}) {
    const double bn = bernoulli_number(order).convert_to<double>();
    EXPECT_NEAR(bernoulli_poly(order, 0.5), (std::pow(2.0, 1 - order) - 1.0) * bn, 1e-13 * std::abs(bn) + 1e-15);
  }
}

TEST(Kernel, SpecExamples) {
  const KernelSpec k2(2);
  EXPECT_NEAR(k2.K(0.4, 0.4), 1.0 / 720.0, 1e-17);
  EXPECT_NEAR(k2.K(0.25, 0.75), -7.0 / 5760.0, 1e-17);
  EXPECT_DOUBLE_EQ(k2.K(0.3, 1.3), k2.K(0.3, 0.3));
  EXPECT_NEAR(k2.K2(0.1, 0.1), (1.0 / 30.0) / 40320.0, 1e-20);
  const double b8_half = (std::pow(2.0, -7) - 1.0) * (-1.0 / 30.0);
  EXPECT_NEAR(k2.K2(0.0, 0.5), -b8_half / 40320.0, 1e-20);
  const KernelSpec k1(1);
  EXPECT_NEAR(k1.K2(0.2, 0.2), 1.0 / 720.0, 1e-17);
  EXPECT_EQ(k2.scale_K(), Rational(-1, 24));
  EXPECT_EQ(k2.scale_K2(), Rational(-1, 40320));
}

TEST(Kernel, SymmetricAndPeriodic) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int m = 1; m <= 4; ++m) {
    const auto& k = kernel_spec(m);
    for (int rep = 0; rep < 50; ++rep) {
      const double x = u(gen), y = u(gen);
      EXPECT_NEAR(k.K(x, y), k.K(y, x), 1e-14);
      EXPECT_NEAR(k.K(x + 1.0, y), k.K(x, y), 1e-13);
      EXPECT_NEAR(k.K2(x, y - 2.0), k.K2(x, y), 1e-13);
    }
  }
}

TEST(Kernel, UnsupportedOrder) {
  EXPECT_THROW(KernelSpec{0}, Error);
  EXPECT_THROW(KernelSpec{kMaxSplineOrder + 1}, Error);
  EXPECT_NO_THROW(KernelSpec{kMaxSplineOrder});
}

TEST(Kernel, WrapUnit) {
  EXPECT_EQ(wrap_unit(1.0), 0.0);
  EXPECT_EQ(wrap_unit(-1.0), 0.0);
  EXPECT_EQ(wrap_unit(0.0), 0.0);
  EXPECT_NEAR(wrap_unit(-0.25), 0.75, 1e-16);
  EXPECT_NEAR(wrap_unit(2.5), 0.5, 1e-16);
  EXPECT_LT(wrap_unit(-1e-18), 1.0);
}

// Trapezoid rule on the periodic integrand is spectrally accurate here.
double trapezoid(int points, auto&& f) {
  double acc = 0.0;
  for (int j = 0; j < points; ++j) acc += f(j / static_cast<double>(points));
  return acc / points;
}

TEST(Kernel, TensorMatchesQuadrature) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int m : {1, 2}) {
    const auto& k = kernel_spec(m);
    for (int rep = 0; rep < 20; ++rep) {
      const double x = u(gen), y = u(gen);
      const double quad = trapezoid(10000, [&](double s) { return k.K(x, s) * k.K(s, y); });
      EXPECT_NEAR(quad, k.K2(x, y), 1e-8) << "m=" << m;
    }
  }
}

// K(x, .) is a polynomial on [0, x] and on [x, 1]; 20-point Gauss-Legendre on
// each piece integrates it exactly.
double piecewise_gauss(double x, auto&& f) {
  using boost::math::quadrature::gauss;
  return gauss<double, 20>::integrate(f, 0.0, x) + gauss<double, 20>::integrate(f, x, 1.0);
}

TEST(Kernel, ZeroMean) {
  for (int m : {1, 2, 3}) {
    const auto& k = kernel_spec(m);
    for (double x : {0.13, 0.5, 0.77}) {
      EXPECT_NEAR(piecewise_gauss(x, [&](double s) { return k.K(x, s); }), 0.0, 1e-15);
      EXPECT_NEAR(trapezoid(10000, [&](double s) { return k.K(x, s); }), 0.0, m == 1 ? 1e-9 : 1e-10);
    }
  }
}

TEST(Kernel, TensorMatchesPiecewiseGauss) {
  for (int m : {1, 2}) {
    const auto& k = kernel_spec(m);
    for (auto [x, y] : {std::pair{0.1, 0.6}, std::pair{0.3, 0.35}, std::pair{0.0, 0.5}}) {
      const double a = std::min(x, y), b = std::max(x, y);
      using boost::math::quadrature::gauss;
      auto f = [&](double s) { return k.K(x, s) * k.K(s, y); };
      const double v = gauss<double, 20>::integrate(f, 0.0, a) + gauss<double, 20>::integrate(f, a, b) +
                       gauss<double, 20>::integrate(f, b, 1.0);
      EXPECT_NEAR(v, k.K2(x, y), 1e-16);
    }
  }
}

TEST(Kernel, FourierSeriesAgreement) {
  // K(x, y) = 2 sum_k cos(2 pi k (x - y)) / (2 pi k)^{2m}, truncated at J terms.
  const double two_pi = 2.0 * std::acos(-1.0);
  const int J = 200000;
  for (int m : {1, 2, 3}) {
    const auto& k = kernel_spec(m);
    const double tail = 2.0 / (std::pow(two_pi, 2 * m) * (2 * m - 1) * std::pow(J, 2 * m - 1));
    for (double d : {0.0, 0.1, 0.45}) {
      double series = 0.0;
      for (int j = J; j >= 1; --j) series += 2.0 * std::cos(two_pi * j * d) / std::pow(two_pi * j, 2 * m);
      EXPECT_NEAR(k.K_diff(d), series, 2.0 * tail + 1e-15);
    }
  }
}

TEST(Kernel, MercerPositivity) {
  for (int m : {1, 2, 3}) {
    const auto& k = kernel_spec(m);
    for (int n : {8, 31, 64}) {
      Eigen::MatrixXd gram(n, n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) gram(i, j) = k.K((i + 1.0) / n, (j + 1.0) / n);
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
      EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12) << "m=" << m << " n=" << n;
    }
  }
}

TEST(Kernel, ExactCoefficientsConsistent) {
  for (int m = 1; m <= kMaxSplineOrder; ++m) {
    const KernelSpec k(m);
    ASSERT_EQ(k.K_coefficients().size(), k.K_coefficients_exact().size());
    for (std::size_t i = 0; i < k.K_coefficients().size(); ++i) {
      EXPECT_EQ(k.K_coefficients()[i], k.K_coefficients_exact()[i].convert_to<double>());
    }
  }
}

}  // namespace
}  // namespace bbspline
