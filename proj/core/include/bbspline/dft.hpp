#pragma once

#include <complex>
#include <span>
#include <vector>

namespace bbspline {

// Discrete Fourier transform conventions used throughout the library.
//
// The forward transform is unitary:
//   vhat_r = n^{-1/2} sum_{j=0}^{n-1} v_j exp(-2 pi i j r / n),
// so that vhat = M^* v with M = (x_0, ..., x_{n-1}) and
// x_r = n^{-1/2} (1, e^{2 pi i r / n}, ..., e^{2 pi i (n-1) r / n})^T, the
// shared eigenbasis of every symmetric circulant matrix of order n.
// Parseval holds without extra factors: sum |v_j|^2 = sum |vhat_r|^2.

std::vector<std::complex<double>> unitary_dft(std::span<const double> v);

// Inverse of unitary_dft, keeping the real part.
std::vector<double> unitary_idft_real(std::span<const std::complex<double>> vhat);

// |vhat_r|^2 for r = 0..n-1.
std::vector<double> power_spectrum(std::span<const double> v);

// M diag(multiplier) M^* v. The multiplier must satisfy g_r = g_{n-r} so the
// result is real; this is the action of the symmetric circulant matrix whose
// eigenvalues are g.
std::vector<double> apply_circulant(std::span<const double> v, std::span<const double> multiplier);

}  // namespace bbspline
