#include "bbspline/dense.hpp"

#include <string>

#include "bbspline/error.hpp"

namespace bbspline::dense {
namespace {

void check_n(int n) {
  if (n < 2 || n > kMaxDenseN) {
    throw Error(ErrorCode::kInvalidArgument,
                "dense path supports 2 <= n <= " + std::to_string(kMaxDenseN) + ", got " + std::to_string(n));
  }
}

template <typename F>
Eigen::MatrixXd circulant_from(int n, F&& kernel_of_diff) {
  check_n(n);
  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out(i, j) = kernel_of_diff(static_cast<double>(i - j) / n) / n;
  }
  return out;
}

Eigen::VectorXd as_vector(std::span<const double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd shifted(int n, int m, double lambda) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::kInvalidPenalty, "penalty lambda must be positive");
  Eigen::MatrixXd s = sigma_matrix(n, kernel_spec(m));
  s.diagonal().array() += lambda;
  return s;
}

}  // namespace

Eigen::MatrixXd sigma_matrix(int n, const KernelSpec& spec) {
  return circulant_from(n, [&](double u) { return spec.K_diff(u); });
}

Eigen::MatrixXd omega_matrix(int n, const KernelSpec& spec) {
  return circulant_from(n, [&](double u) { return spec.K2_diff(u); });
}

Eigen::MatrixXd a_matrix(int n, int m, double lambda) {
  const Eigen::MatrixXd shifted_sigma = shifted(n, m, lambda);
  const Eigen::LDLT<Eigen::MatrixXd> solver(shifted_sigma);
  const Eigen::MatrixXd left = solver.solve(omega_matrix(n, kernel_spec(m)));
  // (S^{-1} Omega) S^{-1} = (S^{-1} (S^{-1} Omega)^T)^T, S symmetric.
  Eigen::MatrixXd a = solver.solve(left.transpose()).transpose();
  return 0.5 * (a + a.transpose());
}

Eigen::MatrixXd smoother_matrix(int n, int m, double lambda) {
  const Eigen::MatrixXd shifted_sigma = shifted(n, m, lambda);
  const Eigen::MatrixXd sigma = sigma_matrix(n, kernel_spec(m));
  // Sigma (Sigma + lambda I)^{-1} = ((Sigma + lambda I)^{-1} Sigma)^T.
  return shifted_sigma.ldlt().solve(sigma).transpose();
}

Scalars spectral_scalars(int n, int m, double lambda) {
  const Eigen::MatrixXd a = a_matrix(n, m, lambda);
  Scalars out{};
  out.trace_A = a.trace();
  double off = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) off += a(i, j) * a(i, j);
    }
  }
  out.s_n_sq = 2.0 * off;
  return out;
}

double quadratic_form(int m, double lambda, std::span<const double> v) {
  const Eigen::VectorXd x = as_vector(v);
  return x.dot(a_matrix(static_cast<int>(v.size()), m, lambda) * x);
}

Eigen::VectorXd fit_theta(std::span<const double> v, int m, double lambda) {
  const int n = static_cast<int>(v.size());
  return shifted(n, m, lambda).ldlt().solve(as_vector(v)) / n;
}

Eigen::VectorXd fit_grid(std::span<const double> v, int m, double lambda) {
  const int n = static_cast<int>(v.size());
  return smoother_matrix(n, m, lambda) * as_vector(v);
}

double gcv_score(std::span<const double> v, int m, double lambda) {
  const int n = static_cast<int>(v.size());
  const Eigen::MatrixXd s = smoother_matrix(n, m, lambda);
  const Eigen::VectorXd resid = as_vector(v) - s * as_vector(v);
  const double dof = n - s.trace();
  return n * resid.squaredNorm() / (dof * dof);
}

}  // namespace bbspline::dense
