#pragma once

#include <span>

#include <Eigen/Dense>

#include "bbspline/kernel.hpp"

// Dense-matrix counterparts of the spectral routines, materializing Sigma,
// Omega and A explicitly. O(n^3); intended as an oracle for small grids.
namespace bbspline::dense {

inline constexpr int kMaxDenseN = 256;

Eigen::MatrixXd sigma_matrix(int n, const KernelSpec& spec);
Eigen::MatrixXd omega_matrix(int n, const KernelSpec& spec);

// (Sigma + lambda I)^{-1} Omega (Sigma + lambda I)^{-1}.
Eigen::MatrixXd a_matrix(int n, int m, double lambda);
// Sigma (Sigma + lambda I)^{-1}.
Eigen::MatrixXd smoother_matrix(int n, int m, double lambda);

struct Scalars {
  double trace_A;
  double s_n_sq;  // 2 sum_{i != i'} a_{i,i'}^2
};
Scalars spectral_scalars(int n, int m, double lambda);

double quadratic_form(int m, double lambda, std::span<const double> v);

// theta = (Sigma + lambda I)^{-1} v / n and the fitted grid Sigma (Sigma + lambda I)^{-1} v.
Eigen::VectorXd fit_theta(std::span<const double> v, int m, double lambda);
Eigen::VectorXd fit_grid(std::span<const double> v, int m, double lambda);

double gcv_score(std::span<const double> v, int m, double lambda);

}  // namespace bbspline::dense
