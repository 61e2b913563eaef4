#include <string>

#include <boost/multiprecision/float128.hpp>

#include "bbspline/error.hpp"
#include "bbspline/spectral.hpp"

extern "C" {
#include <quadmath.h>
}

namespace bbspline {
namespace {

using quad = __float128;

quad to_quad(const Rational& r) {
  return r.convert_to<boost::multiprecision::float128>().backend().value();
}

std::vector<quad> to_quad(const std::vector<Rational>& c) {
  std::vector<quad> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = to_quad(c[i]);
  return out;
}

quad horner(const std::vector<quad>& c, quad x) {
  quad acc = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

// Real and imaginary parts of sum_j row_j exp(2 pi i j l / n).
void transform(const std::vector<quad>& row, const std::vector<quad>& cos_table,
               const std::vector<quad>& sin_table, std::vector<double>& re, std::vector<double>& im) {
  const int n = static_cast<int>(row.size());
  re.assign(n, 0.0);
  im.assign(n, 0.0);
  for (int l = 0; l < n; ++l) {
    quad acc_re = 0;
    quad acc_im = 0;
    long long idx = 0;
    for (int j = 0; j < n; ++j) {
      acc_re += row[j] * cos_table[idx];
      acc_im += row[j] * sin_table[idx];
      idx += l;
      if (idx >= n) idx -= n;
    }
    re[l] = static_cast<double>(acc_re);
    im[l] = static_cast<double>(acc_im);
  }
}

}  // namespace

CirculantEigenvalues eigenvalues_from_row(int n, const KernelSpec& spec) {
  if (n < 2) {
    throw Error(ErrorCode::kTooFewPoints, "circulant spectrum needs n >= 2, got " + std::to_string(n));
  }
  const auto kc = to_quad(spec.K_coefficients_exact());
  const auto kd = to_quad(spec.K2_coefficients_exact());
  const quad nq = n;
  const quad two_pi = 2 * acosq(static_cast<quad>(-1));

  std::vector<quad> row_c(n), row_d(n), cos_table(n), sin_table(n);
  for (int l = 0; l < n; ++l) {
    // K(0, l/n) = K_diff((-l/n) mod 1); B_{2m}(1 - x) = B_{2m}(x).
    const quad x = static_cast<quad>(l) / nq;
    row_c[l] = horner(kc, x) / nq;
    row_d[l] = horner(kd, x) / nq;
    const quad angle = two_pi * static_cast<quad>(l) / nq;
    cos_table[l] = cosq(angle);
    sin_table[l] = sinq(angle);
  }

  CirculantEigenvalues out;
  out.n = n;
  out.m = spec.m();
  std::vector<double> im_c, im_d;
  transform(row_c, cos_table, sin_table, out.lam_c, im_c);
  transform(row_d, cos_table, sin_table, out.lam_d, im_d);
  out.err_c.resize(n);
  out.err_d.resize(n);
  for (int l = 0; l < n; ++l) {
    out.err_c[l] = std::abs(im_c[l]);
    out.err_d[l] = std::abs(im_d[l]);
  }
  return out;
}

}  // namespace bbspline
