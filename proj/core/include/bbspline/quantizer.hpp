#pragma once

#include <span>
#include <string>
#include <vector>

namespace bbspline {

// Q(y) = sum_j mu_j 1(y in R_j(t)) with cells
//   R_1 = (-inf, t_1], R_j = (t_{j-1}, t_j], R_k = (t_{k-1}, inf).
// Ties at a threshold fall into the cell on the left.
class Quantizer {
 public:
  // Requires strictly increasing finite thresholds and marks.size() ==
  // thresholds.size() + 1 >= 2.
  Quantizer(std::vector<double> thresholds, std::vector<double> marks, std::string scheme = "custom");

  int k() const noexcept { return static_cast<int>(mu_.size()); }
  // Bits needed to index the cells, ceil(log2 k). Equals b exactly when k = 2^b.
  int b() const noexcept { return b_; }
  const std::vector<double>& thresholds() const noexcept { return t_; }
  const std::vector<double>& marks() const noexcept { return mu_; }
  const std::string& scheme() const noexcept { return scheme_; }

  // Zero-based cell index of y.
  int cell(double y) const noexcept;
  double operator()(double y) const noexcept { return mu_[cell(y)]; }
  std::vector<double> apply(std::span<const double> y) const;

  // Condition (B): mu_j in R_j(t) for the interior cells; with
  // include_extremes also mu_1 in R_1 and mu_k in R_k.
  bool satisfies_condition_b(bool include_extremes = false) const noexcept;

 private:
  std::vector<double> t_;
  std::vector<double> mu_;
  std::string scheme_;
  int b_ = 0;
};

std::vector<double> apply(const Quantizer& q, std::span<const double> y);

// Equally spaced thresholds spanning [min y, max y]: k - 1 = 2^b - 1 points
// with t_1 = min y and t_{k-1} = max y. For b = 1 the single threshold is the
// midrange. Throws kDegenerateRange for constant y.
std::vector<double> data_range_thresholds(std::span<const double> y, int b);

// mu_1 = t_1, mu_k = t_{k-1}, interior marks at cell midpoints.
std::vector<double> midpoint_marks(std::span<const double> t);

// Cell-conditional sample means; empty cells get 0.
std::vector<double> empirical_optimal_marks(std::span<const double> y, std::span<const double> t);

enum class NoiseDensity { kGaussian };

// mu*_j = sum_i E[y_i 1(y_i in R_j)] / sum_i P(y_i in R_j) for
// y_i ~ N(f_i, sigma^2), from closed-form truncated normal moments.
std::vector<double> population_optimal_marks(std::span<const double> f_grid, double sigma,
                                             std::span<const double> t,
                                             NoiseDensity density = NoiseDensity::kGaussian);

// P(f + sigma * eps in R_j) for eps ~ N(0, 1), j = 1..k.
std::vector<double> gaussian_cell_probabilities(double mean, double sigma, std::span<const double> t);

// t = (-l c, ..., -c, 0, c, ..., l c), k = 2 (l + 1), midpoint marks.
Quantizer remark2_uniform_quantizer(double c, int l);

// Uniform quantizer on [-4 sigma sqrt(log n), 4 sigma sqrt(log n)] whose
// interior spacing is at most n^{-2m/(4m+1)}; k is rounded up to a power of
// two and the spacing shrunk to fit. Midpoint marks.
Quantizer remark4_testing_quantizer(double sigma, int n, int m);

// C_k(t) = max_{j=2..k-1} |t_j - t_{j-1}|; 0 when there is a single threshold.
double mesh_C_k(std::span<const double> t) noexcept;

enum class MarkRule { kMidpoint, kEmpiricalOptimal };

const char* to_string(MarkRule rule) noexcept;
MarkRule parse_mark_rule(const std::string& name);

// Data-range thresholds for y with the chosen mark rule; the scheme name
// records both choices, e.g. "data-range/empirical".
Quantizer data_range_quantizer(std::span<const double> y, int b, MarkRule rule);

}  // namespace bbspline
