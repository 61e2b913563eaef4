#include "bbspline/dft.hpp"

#include <cmath>

#include <unsupported/Eigen/FFT>

#include "bbspline/error.hpp"

namespace bbspline {

// Eigen::FFT caches plans internally and is not safe to share across threads,
// so each call owns its engine.

std::vector<std::complex<double>> unitary_dft(std::span<const double> v) {
  const auto n = static_cast<Eigen::Index>(v.size());
  std::vector<std::complex<double>> out(v.size());
  if (n == 0) return out;
  Eigen::FFT<double> fft;
  fft.fwd(out.data(), v.data(), n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto& c : out) c *= scale;
  return out;
}

std::vector<double> unitary_idft_real(std::span<const std::complex<double>> vhat) {
  const auto n = static_cast<Eigen::Index>(vhat.size());
  std::vector<double> out(vhat.size());
  if (n == 0) return out;
  // Eigen's complex-to-real inverse may scribble on its input.
  std::vector<std::complex<double>> buf(vhat.begin(), vhat.end());
  std::vector<std::complex<double>> tmp(vhat.size());
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  fft.inv(tmp.data(), buf.data(), n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = tmp[i].real() * scale;
  return out;
}

std::vector<double> power_spectrum(std::span<const double> v) {
  const auto vhat = unitary_dft(v);
  std::vector<double> out(vhat.size());
  for (std::size_t i = 0; i < vhat.size(); ++i) out[i] = std::norm(vhat[i]);
  return out;
}

std::vector<double> apply_circulant(std::span<const double> v, std::span<const double> multiplier) {
  if (v.size() != multiplier.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "apply_circulant: vector and spectrum lengths differ");
  }
  auto vhat = unitary_dft(v);
  for (std::size_t i = 0; i < vhat.size(); ++i) vhat[i] *= multiplier[i];
  return unitary_idft_real(vhat);
}

}  // namespace bbspline
