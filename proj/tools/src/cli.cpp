#include "bbspline/cli.hpp"

#include <cmath>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bbspline/dataset.hpp"
#include "bbspline/error.hpp"
#include "bbspline/estimator.hpp"
#include "bbspline/inference.hpp"
#include "bbspline/quantizer.hpp"
#include "bbspline/serialize.hpp"
#include "bbspline/simulation.hpp"
#include "bbspline/spectral.hpp"
#include "bbspline/stats.hpp"

namespace bbspline {
namespace {

// Bad flag values; reported like parse errors (exit 2).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string input;
  std::string x_col = "x";
  std::string y_col = "y";
  std::string mapping = "rank";
  int b = 0;
  int m = 2;
  std::string lambda;
  std::string null_spec = "zero";
  double alpha = 0.1;
  std::uint64_t seed = 0;
  std::string output;
  std::string meta;
  bool center_y = false;
  std::string marks = "empirical";
  std::string config;
  int threads = -1;
  int replications = 0;
  int n = 0;
  double sigma = 1.0;
  int grid = 512;
};

struct PenaltyRule {
  enum class Kind { kGcv, kGcvLog, kFixed } kind = Kind::kGcv;
  double value = 0.0;
};

PenaltyRule parse_penalty(const std::string& text) {
  if (text == "gcv") return {PenaltyRule::Kind::kGcv, 0.0};
  if (text == "gcv-log") return {PenaltyRule::Kind::kGcvLog, 0.0};
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size() && v > 0.0 && std::isfinite(v)) return {PenaltyRule::Kind::kFixed, v};
  } catch (const std::exception&) {
  }
  throw UsageError("--lambda must be a positive number, 'gcv' or 'gcv-log', got '" + text + "'");
}

double positive_lambda(const std::string& text) {
  const auto rule = parse_penalty(text);
  if (rule.kind != PenaltyRule::Kind::kFixed) throw UsageError("--lambda must be a positive number here");
  return rule.value;
}

template <class F>
auto as_usage(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

struct Choice {
  double lambda;
  std::vector<std::string> warnings;
};

Choice choose_lambda(const PenaltyRule& rule, const CirculantEigenvalues& eig, std::span<const double> values) {
  const auto grid = default_lambda_grid();
  switch (rule.kind) {
    case PenaltyRule::Kind::kFixed:
      return {rule.value, {}};
    case PenaltyRule::Kind::kGcv: {
      auto sel = gcv_select(eig, values, grid);
      return {sel.lambda_hat, sel.warnings};
    }
    case PenaltyRule::Kind::kGcvLog: {
      auto sel = gcv_select(eig, values, grid);
      return {sel.lambda_hat / std::log(static_cast<double>(eig.n)), sel.warnings};
    }
  }
  return {rule.value, {}};
}

void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.output.empty()) {
    out << text;
  } else {
    write_file_atomic(o.output, text);
  }
}

struct Prepared {
  Dataset data;
  double y_mean = 0.0;
  std::optional<Quantizer> quantizer;
  std::vector<double> values;
};

Prepared load_values(const Options& o, GridMapping mapping, MarkRule marks) {
  Prepared p;
  p.data = ingest_csv(o.input, o.x_col, o.y_col, mapping);
  std::vector<double> y = p.data.y;
  if (o.center_y) {
    p.y_mean = sample_mean(y);
    for (double& v : y) v -= p.y_mean;
  }
  if (o.b > 0) {
    p.quantizer = data_range_quantizer(y, o.b, marks);
    p.values = p.quantizer->apply(y);
  } else {
    p.values = std::move(y);
  }
  return p;
}

void check_b(const Options& o) {
  if (o.b < 0 || o.b > 24) throw UsageError("--b must lie in [1, 24] (omit it for raw data)");
}

int run_estimate(const Options& o, std::ostream& out) {
  check_b(o);
  const auto mapping = as_usage([&] { return parse_grid_mapping(o.mapping); });
  const auto marks = as_usage([&] { return parse_mark_rule(o.marks); });
  const auto rule = parse_penalty(o.lambda.empty() ? "gcv" : o.lambda);
  as_usage([&] { return kernel_spec(o.m).m(); });
  if (o.grid < 1) throw UsageError("--grid must be >= 1");

  const auto p = load_values(o, mapping, marks);
  auto eig = std::make_shared<const CirculantEigenvalues>(eigenvalues_from_series(p.data.n(), o.m));
  const auto choice = choose_lambda(rule, *eig, p.values);
  const auto f = fit(eig, p.values, choice.lambda, p.quantizer ? FitSource::kQuantized : FitSource::kRaw);

  std::vector<double> xs(o.grid);
  for (int j = 0; j < o.grid; ++j) xs[j] = (j + 1) / static_cast<double>(o.grid);
  const auto curve = curve_csv(xs, evaluate(f, xs));

  FitMetadata meta;
  meta.input = o.input;
  meta.mapped_grid = p.data.mapped_grid;
  meta.center_y = o.center_y;
  meta.y_mean = p.y_mean;
  meta.lambda_rule = o.lambda.empty() ? "gcv" : o.lambda;
  meta.warnings = choice.warnings;
  meta.quantizer = p.quantizer;
  const auto meta_text = fit_json(f, meta);

  emit(o, out, curve);
  const std::string meta_path = !o.meta.empty() ? o.meta : (o.output.empty() ? "" : o.output + ".json");
  if (!meta_path.empty()) write_file_atomic(meta_path, meta_text);
  return kExitOk;
}

int run_test(const Options& o, std::ostream& out) {
  check_b(o);
  const auto mapping = as_usage([&] { return parse_grid_mapping(o.mapping); });
  const auto marks = as_usage([&] { return parse_mark_rule(o.marks); });
  const auto rule = parse_penalty(o.lambda.empty() ? "gcv-log" : o.lambda);
  as_usage([&] { return kernel_spec(o.m).m(); });
  if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
  const bool linear = o.null_spec == "linear";
  const bool from_file = o.null_spec.rfind("file:", 0) == 0;
  if (!linear && !from_file && o.null_spec != "zero") {
    throw UsageError("--null must be zero, linear or file:<grid csv>");
  }

  const auto p = load_values(o, mapping, marks);
  const int n = p.data.n();
  const auto eig = eigenvalues_from_series(n, o.m);
  std::vector<double> f_star(n, 0.0);
  if (from_file) {
    f_star = read_grid_csv(o.null_spec.substr(5), n);
    if (o.center_y) {
      for (double& v : f_star) v -= p.y_mean;
    }
  }
  // GCV sees the data centered at the null
  std::vector<double> centered;
  if (linear) {
    centered = linear_residuals(p.values);
  } else {
    centered.resize(n);
    for (int i = 0; i < n; ++i) centered[i] = p.values[i] - f_star[i];
  }
  const auto choice = choose_lambda(rule, eig, centered);
  const SpectralQuantities sq(eig, choice.lambda);

  TestResult result;
  if (linear) {
    result = linearity_test(sq, p.values, o.alpha);
  } else {
    result = quantization_test(sq, p.values, f_star, o.alpha);
    result.null_kind = from_file ? "file" : "zero";
  }
  result.quantizer = p.quantizer;
  emit(o, out, test_result_json(result));
  return kExitOk;
}

int run_simulate(const Options& o, bool seed_given, bool m_given, std::ostream& out) {
  if (o.config.empty()) throw UsageError("simulate needs --config <file.json>");
  auto config = parse_experiment_config(read_file(o.config));
  if (seed_given) config.seed = o.seed;
  if (m_given) config.m = o.m;
  if (o.threads >= 0) config.threads = o.threads;
  if (o.replications > 0) config.replications = o.replications;
  config.validate();
  const auto result = run_experiment(config);
  emit(o, out, experiment_csv(result));
  if (!o.output.empty()) write_file_atomic(o.output + ".config.json", experiment_config_json(config));
  return kExitOk;
}

int run_spectral(const Options& o, std::ostream& out) {
  if (o.n < 2) throw UsageError("spectral needs --n >= 2");
  const double lambda = positive_lambda(o.lambda.empty() ? "" : o.lambda);
  as_usage([&] { return kernel_spec(o.m).m(); });
  emit(o, out, spectral_json(build_spectral(o.n, o.m, lambda)));
  return kExitOk;
}

int run_diagnose(const Options& o, std::ostream& out) {
  if (o.n < 8) throw UsageError("diagnose needs --n >= 8");
  if (!(o.sigma > 0.0)) throw UsageError("--sigma must be positive");
  check_b(o);
  as_usage([&] { return kernel_spec(o.m).m(); });
  const double lambda = o.lambda.empty() ? std::pow(static_cast<double>(o.n), -4.0 * o.m / (4.0 * o.m + 1.0))
                                         : positive_lambda(o.lambda);
  const bool from_file = o.null_spec.rfind("file:", 0) == 0;
  if (!from_file && o.null_spec != "zero") throw UsageError("diagnose supports --null zero or file:<grid csv>");

  std::vector<double> f0(o.n, 0.0);
  if (from_file) f0 = read_grid_csv(o.null_spec.substr(5), o.n);

  Quantizer q = remark4_testing_quantizer(o.sigma, o.n, o.m);
  if (o.b > 0) {
    // 2^b - 1 equally spaced thresholds over +-4 sigma sqrt(log n).
    const int k = 1 << o.b;
    const double edge = 4.0 * o.sigma * std::sqrt(std::log(static_cast<double>(o.n)));
    std::vector<double> t(k - 1);
    for (int j = 0; j < k - 1; ++j) t[j] = k == 2 ? 0.0 : -edge + 2.0 * edge * j / (k - 2);
    q = Quantizer(t, population_optimal_marks(f0, o.sigma, t), "uniform-edge");
  }
  const auto diag = theorem2_diagnostic(f0, o.sigma, q.thresholds());
  const auto sq = build_spectral(o.n, o.m, lambda);
  const double tau_sq = null_quantized_variance(q, o.sigma);
  const auto sep = separation_rate(sq, tau_sq, q.thresholds());
  const auto report = check_conditions(q, o.sigma, o.n, lambda, o.m);
  emit(o, out, diagnostic_json(diag, sep, report, q));
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Smoothing-spline estimation and testing from b-bit quantized samples", "bbspline"};
  app.require_subcommand(1);
  Options o;

  auto add_data_flags = [&](CLI::App* sub) {
    sub->add_option("--input", o.input, "CSV file with a header row")->required();
    sub->add_option("--x-col", o.x_col, "covariate column")->capture_default_str();
    sub->add_option("--y-col", o.y_col, "response column")->capture_default_str();
    sub->add_option("--mapping", o.mapping, "rank | none")->capture_default_str();
    sub->add_option("--b", o.b, "quantize with 2^b cells over the data range (omit for raw data)");
    sub->add_option("--marks", o.marks, "empirical | midpoint")->capture_default_str();
    sub->add_flag("--center-y", o.center_y, "subtract the sample mean of y first");
  };
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--m", o.m, "spline order")->capture_default_str();
    sub->add_option("--output", o.output, "output file (default: standard output)");
    sub->add_option("--seed", o.seed, "random seed");
  };

  auto* estimate = app.add_subcommand("estimate", "fit and write the curve on an evaluation grid");
  add_data_flags(estimate);
  add_common(estimate);
  estimate->add_option("--lambda", o.lambda, "number | gcv | gcv-log (default gcv)");
  estimate->add_option("--grid", o.grid, "evaluation points")->capture_default_str();
  estimate->add_option("--meta", o.meta, "metadata JSON (default: <output>.json)");

  auto* test = app.add_subcommand("test", "test a null hypothesis on the data");
  add_data_flags(test);
  add_common(test);
  test->add_option("--lambda", o.lambda, "number | gcv | gcv-log (default gcv-log)");
  test->add_option("--null", o.null_spec, "zero | linear | file:<grid csv>")->capture_default_str();
  test->add_option("--alpha", o.alpha, "level")->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "run a Monte Carlo experiment");
  add_common(simulate);
  simulate->add_option("--config", o.config, "experiment JSON")->required();
  simulate->add_option("--threads", o.threads, "worker threads (0: all cores)");
  simulate->add_option("--replications", o.replications, "override the configured replications");

  auto* spectral = app.add_subcommand("spectral", "dump circulant eigenvalues and test scalars");
  add_common(spectral);
  spectral->add_option("--n", o.n, "sample size")->required();
  spectral->add_option("--lambda", o.lambda, "penalty")->required();

  auto* diagnose = app.add_subcommand("diagnose", "quantizer diagnostics and condition checks");
  add_common(diagnose);
  diagnose->add_option("--n", o.n, "sample size")->required();
  diagnose->add_option("--lambda", o.lambda, "penalty (default n^{-4m/(4m+1)})");
  diagnose->add_option("--sigma", o.sigma, "noise level")->capture_default_str();
  diagnose->add_option("--b", o.b, "uniform quantizer with 2^b cells instead of the default testing quantizer");
  diagnose->add_option("--null", o.null_spec, "zero | file:<grid csv>")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  const bool seed_given = !app.get_subcommands().empty() &&
                          app.get_subcommands().front()->get_option_no_throw("--seed") != nullptr &&
                          app.get_subcommands().front()->get_option("--seed")->count() > 0;
  try {
    if (estimate->parsed()) return run_estimate(o, out);
    if (test->parsed()) return run_test(o, out);
    if (simulate->parsed()) return run_simulate(o, seed_given, simulate->get_option("--m")->count() > 0, out);
    if (spectral->parsed()) return run_spectral(o, out);
    if (diagnose->parsed()) return run_diagnose(o, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

int cli_main(int argc, const char* const* argv) { return cli_main(argc, argv, std::cout, std::cerr); }

}  // namespace bbspline
