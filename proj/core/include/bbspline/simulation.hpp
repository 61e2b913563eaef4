#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bbspline/quantizer.hpp"

namespace bbspline {

enum class Scenario { kMse, kSize, kPower, kLinearitySize, kLinearityPower };

const char* to_string(Scenario s) noexcept;
Scenario parse_scenario(const std::string& name);

struct LambdaRule {
  enum class Kind { kGcv, kGcvOverLogN, kFixed };
  Kind kind = Kind::kGcv;
  double value = 0.0;  // used by kFixed

  static LambdaRule gcv() { return {Kind::kGcv, 0.0}; }
  static LambdaRule gcv_over_log_n() { return {Kind::kGcvOverLogN, 0.0}; }
  static LambdaRule fixed(double v) { return {Kind::kFixed, v}; }
};

std::string to_string(const LambdaRule& rule);
// "gcv", "gcv-over-log-n" (alias "gcv-log"), "fixed:<value>" or a bare number.
LambdaRule parse_lambda_rule(const std::string& text);

// Data models:
//   mse, size, power:    y = r sin(alpha_signal pi x) + noise_sd eps   (mse uses r = 1)
//   linearity-*:         y = 3 x + 2 + r beta_{11,3}(x) + noise_sd eps
// on the design x_i = i/n. Quantized variants use data-range thresholds.
struct ExperimentConfig {
  Scenario scenario = Scenario::kSize;
  std::vector<int> n_list{100, 500, 1000};
  std::vector<int> b_list{1, 2, 3, 5};
  std::vector<double> r_list{0.0};
  int alpha_signal = 2;
  double noise_sd = 1.0;
  int replications = 1000;
  std::uint64_t seed = 20240601;
  double alpha_level = 0.1;
  int m = 2;
  LambdaRule lambda_rule = LambdaRule::gcv_over_log_n();
  MarkRule marks = MarkRule::kEmpiricalOptimal;
  double lambda_grid_lo = 1e-8;
  double lambda_grid_hi = 1e2;
  int lambda_grid_count = 40;
  int eval_grid = 4096;
  int threads = 0;  // 0: std::thread::hardware_concurrency()

  // Defaults that match the scenario (lambda rule and r list).
  static ExperimentConfig defaults_for(Scenario s);

  // Throws Error(kConfiguration) when an invariant is violated.
  void validate() const;
};

struct ResultRow {
  std::string scenario;
  int n = 0;
  std::optional<int> b;  // nullopt for the nonquantized baseline
  double r = 0.0;
  double noise_sd = 0.0;
  int alpha_signal = 0;
  std::string metric;
  double value = 0.0;
  double mc_stderr = 0.0;
  int replications = 0;
  std::uint64_t seed = 0;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
};

// Per-replication outcomes, exposed so callers can inspect the raw Monte
// Carlo sample behind a row. Variant 0 is the nonquantized baseline; variant
// j >= 1 uses b_list[j - 1].
struct TestReplicate {
  double standardized = 0.0;
  double p_value = 1.0;
  bool reject = false;
  bool degenerate = false;  // tau_hat^2 = 0; counted as no rejection
  double lambda = 0.0;
};

struct MseReplicate {
  double mse_grid = 0.0;  // mean squared error over the evaluation grid
  double mse_l2 = 0.0;    // exact ||f_hat - f0||^2, NaN when f0 is not periodic
  double lambda = 0.0;
};

std::vector<std::vector<TestReplicate>> simulate_test_cell(const ExperimentConfig& config, int n, double r);
std::vector<std::vector<MseReplicate>> simulate_mse_cell(const ExperimentConfig& config, int n);

ExperimentResult run_mse(const ExperimentConfig& config);
ExperimentResult run_size(const ExperimentConfig& config);
ExperimentResult run_power(const ExperimentConfig& config);
ExperimentResult run_linearity(const ExperimentConfig& config);
// Dispatches on config.scenario.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Seed of the stream family for one (n, r) cell.
std::uint64_t cell_seed(std::uint64_t seed, int n, double r) noexcept;

// The signal f0 of the configured scenario at x.
double scenario_signal(const ExperimentConfig& config, double r, double x);

// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
// visited exactly once; callers write results into per-index slots.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace bbspline
