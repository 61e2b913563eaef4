#include "bbspline/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bbspline/error.hpp"
#include "bbspline/stats.hpp"

namespace bbspline {
namespace {

constexpr int kMaxBits = 24;

void check_thresholds(std::span<const double> t) {
  if (t.empty()) throw Error(ErrorCode::kInvalidArgument, "quantizer needs at least one threshold");
  for (std::size_t j = 0; j < t.size(); ++j) {
    if (!std::isfinite(t[j])) throw Error(ErrorCode::kInvalidArgument, "thresholds must be finite");
    if (j > 0 && !(t[j - 1] < t[j])) {
      throw Error(ErrorCode::kInvalidArgument, "thresholds must be strictly increasing");
    }
  }
}

int cell_of(std::span<const double> t, double y) noexcept {
  // Number of thresholds strictly below y.
  return static_cast<int>(std::lower_bound(t.begin(), t.end(), y) - t.begin());
}

int bits_for(std::size_t k) noexcept {
  int b = 0;
  while ((std::size_t{1} << b) < k) ++b;
  return b;
}

std::vector<double> uniform_grid(double lo, double hi, int gaps) {
  std::vector<double> t(gaps + 1);
  const double step = (hi - lo) / gaps;
  for (int i = 0; i <= gaps; ++i) t[i] = lo + step * i;
  t.back() = hi;
  return t;
}

}  // namespace

Quantizer::Quantizer(std::vector<double> thresholds, std::vector<double> marks, std::string scheme)
    : t_(std::move(thresholds)), mu_(std::move(marks)), scheme_(std::move(scheme)) {
  check_thresholds(t_);
  if (mu_.size() != t_.size() + 1) {
    throw Error(ErrorCode::kDimensionMismatch, "quantizer needs exactly one more mark than thresholds");
  }
  for (double m : mu_) {
    if (!std::isfinite(m)) throw Error(ErrorCode::kInvalidArgument, "marks must be finite");
  }
  b_ = bits_for(mu_.size());
}

int Quantizer::cell(double y) const noexcept { return cell_of(t_, y); }

std::vector<double> Quantizer::apply(std::span<const double> y) const {
  std::vector<double> z(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) z[i] = mu_[cell(y[i])];
  return z;
}

bool Quantizer::satisfies_condition_b(bool include_extremes) const noexcept {
  const int kk = k();
  for (int j = 1; j + 1 < kk; ++j) {
    if (!(t_[j - 1] < mu_[j] && mu_[j] <= t_[j])) return false;
  }
  if (include_extremes) {
    if (!(mu_.front() <= t_.front())) return false;
    if (!(mu_.back() > t_.back())) return false;
  }
  return true;
}

std::vector<double> apply(const Quantizer& q, std::span<const double> y) { return q.apply(y); }

std::vector<double> data_range_thresholds(std::span<const double> y, int b) {
  if (b < 1 || b > kMaxBits) {
    throw Error(ErrorCode::kInvalidArgument, "bit count b must lie in [1, " + std::to_string(kMaxBits) + "]");
  }
  if (y.empty()) throw Error(ErrorCode::kDegenerateRange, "cannot build thresholds from an empty sample");
  const auto [lo_it, hi_it] = std::minmax_element(y.begin(), y.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(lo < hi)) throw Error(ErrorCode::kDegenerateRange, "sample range is degenerate (constant data)");
  if (b == 1) return {0.5 * (lo + hi)};
  const int k = 1 << b;
  return uniform_grid(lo, hi, k - 2);
}

std::vector<double> midpoint_marks(std::span<const double> t) {
  check_thresholds(t);
  const std::size_t k = t.size() + 1;
  std::vector<double> mu(k);
  mu.front() = t.front();
  mu.back() = t.back();
  for (std::size_t j = 1; j + 1 < k; ++j) mu[j] = 0.5 * (t[j - 1] + t[j]);
  return mu;
}

std::vector<double> empirical_optimal_marks(std::span<const double> y, std::span<const double> t) {
  check_thresholds(t);
  const std::size_t k = t.size() + 1;
  std::vector<double> sum(k, 0.0);
  std::vector<std::size_t> count(k, 0);
  for (double v : y) {
    const int j = cell_of(t, v);
    sum[j] += v;
    ++count[j];
  }
  std::vector<double> mu(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    if (count[j] > 0) mu[j] = sum[j] / static_cast<double>(count[j]);
  }
  return mu;
}

std::vector<double> gaussian_cell_probabilities(double mean, double sigma, std::span<const double> t) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sigma must be positive");
  check_thresholds(t);
  const double inf = std::numeric_limits<double>::infinity();
  const std::size_t k = t.size() + 1;
  std::vector<double> p(k);
  for (std::size_t j = 0; j < k; ++j) {
    const double lo = j == 0 ? -inf : (t[j - 1] - mean) / sigma;
    const double hi = j + 1 == k ? inf : (t[j] - mean) / sigma;
    p[j] = standard_normal_moments(lo, hi).prob;
  }
  return p;
}

std::vector<double> population_optimal_marks(std::span<const double> f_grid, double sigma,
                                             std::span<const double> t, NoiseDensity density) {
  if (density != NoiseDensity::kGaussian) {
    throw Error(ErrorCode::kInvalidArgument, "only Gaussian noise is supported");
  }
  if (!(sigma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sigma must be positive");
  check_thresholds(t);
  const double inf = std::numeric_limits<double>::infinity();
  const std::size_t k = t.size() + 1;
  std::vector<double> num(k, 0.0), den(k, 0.0);
  for (double f : f_grid) {
    for (std::size_t j = 0; j < k; ++j) {
      const double lo = j == 0 ? -inf : (t[j - 1] - f) / sigma;
      const double hi = j + 1 == k ? inf : (t[j] - f) / sigma;
      const auto mom = standard_normal_moments(lo, hi);
      // y = f + sigma Z.
      num[j] += f * mom.prob + sigma * mom.first;
      den[j] += mom.prob;
    }
  }
  std::vector<double> mu(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    if (den[j] >= 1e-300) mu[j] = num[j] / den[j];
  }
  return mu;
}

Quantizer remark2_uniform_quantizer(double c, int l) {
  if (!(c > 0.0)) throw Error(ErrorCode::kInvalidArgument, "spacing c must be positive");
  if (l < 0) throw Error(ErrorCode::kInvalidArgument, "l must be non-negative");
  std::vector<double> t(2 * l + 1);
  for (int i = -l; i <= l; ++i) t[i + l] = i * c;
  auto mu = midpoint_marks(t);
  return Quantizer(std::move(t), std::move(mu), "remark2-uniform");
}

Quantizer remark4_testing_quantizer(double sigma, int n, int m) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sigma must be positive");
  if (n < 2) throw Error(ErrorCode::kTooFewPoints, "remark4 quantizer needs n >= 2");
  if (m < 1) throw Error(ErrorCode::kUnsupportedOrder, "spline order must be >= 1");
  const double edge = 4.0 * sigma * std::sqrt(std::log(static_cast<double>(n)));
  const double mesh = std::pow(static_cast<double>(n), -2.0 * m / (4.0 * m + 1.0));
  const auto min_gaps = static_cast<long long>(std::ceil(2.0 * edge / mesh));
  long long k = 2;
  while (k - 2 < min_gaps) k *= 2;
  if (k > (1LL << kMaxBits)) throw Error(ErrorCode::kInvalidArgument, "remark4 quantizer exceeds bit limit");
  auto t = uniform_grid(-edge, edge, static_cast<int>(k - 2));
  auto mu = midpoint_marks(t);
  return Quantizer(std::move(t), std::move(mu), "remark4-testing");
}

double mesh_C_k(std::span<const double> t) noexcept {
  double mesh = 0.0;
  for (std::size_t j = 1; j < t.size(); ++j) mesh = std::max(mesh, std::abs(t[j] - t[j - 1]));
  return mesh;
}

const char* to_string(MarkRule rule) noexcept {
  switch (rule) {
    case MarkRule::kMidpoint:
      return "midpoint";
    case MarkRule::kEmpiricalOptimal:
      return "empirical";
  }
  return "unknown";
}

MarkRule parse_mark_rule(const std::string& name) {
  if (name == "midpoint") return MarkRule::kMidpoint;
  if (name == "empirical" || name == "empirical-optimal") return MarkRule::kEmpiricalOptimal;
  throw Error(ErrorCode::kConfiguration, "unknown mark rule '" + name + "' (expected midpoint|empirical)");
}

Quantizer data_range_quantizer(std::span<const double> y, int b, MarkRule rule) {
  auto t = data_range_thresholds(y, b);
  auto mu = rule == MarkRule::kMidpoint ? midpoint_marks(t) : empirical_optimal_marks(y, t);
  return Quantizer(std::move(t), std::move(mu), std::string("data-range/") + to_string(rule));
}

}  // namespace bbspline
