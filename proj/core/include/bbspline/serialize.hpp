#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bbspline/estimator.hpp"
#include "bbspline/inference.hpp"
#include "bbspline/quantizer.hpp"
#include "bbspline/simulation.hpp"
#include "bbspline/spectral.hpp"

namespace bbspline {

// Shortest decimal string that parses back to the same double.
std::string format_number(double v);

// {"b", "t", "mu", "scheme"}.
std::string quantizer_json(const Quantizer& q, int indent = -1);

// Fixed keys n_T, tau_sq_hat, standardized, p_value, reject, alpha, lambda,
// followed by the remaining TestResult fields and the quantizer record when
// one is attached.
std::string test_result_json(const TestResult& result, int indent = 2);

inline constexpr const char* kExperimentCsvHeader =
    "scenario,n,b,r,noise_sd,alpha_signal,metric,value,mc_stderr,replications,seed";

// Header line plus one line per row; b is "nonquant" for the baseline.
std::string experiment_csv(const ExperimentResult& result);

std::string experiment_config_json(const ExperimentConfig& config, int indent = 2);
// Missing keys keep ExperimentConfig::defaults_for(scenario); unknown keys and
// type errors throw kConfiguration. The result is validated.
ExperimentConfig parse_experiment_config(const std::string& json_text);

// Context recorded next to a fit.
struct FitMetadata {
  std::string input;
  bool mapped_grid = false;
  bool center_y = false;
  double y_mean = 0.0;  // subtracted from y when center_y
  std::string lambda_rule;
  std::vector<std::string> warnings;
  std::optional<Quantizer> quantizer;
};

std::string fit_json(const FitResult& fit, const FitMetadata& meta, int indent = 2);
// Rebuilds the FitResult (theta, fitted grid, lambda, n, m) from fit_json output.
FitResult parse_fit_json(const std::string& json_text);

// Two columns x,f_hat.
std::string curve_csv(const std::vector<double>& x, const std::vector<double>& f);

// n, m, lambda, trace_A, s_n, s_n_sq, h and the per-frequency lam_c, lam_d, xi.
std::string spectral_json(const SpectralQuantities& sq, int indent = 2);

std::string diagnostic_json(const Theorem2Diagnostic& diag, double separation, const ConditionReport& report,
                            const Quantizer& q, int indent = 2);

// Writes text to path through a sibling temporary file and a rename, so the
// target is either untouched or complete. Throws kIo.
void write_file_atomic(const std::string& path, const std::string& text);
std::string read_file(const std::string& path);

}  // namespace bbspline
