#include "bbspline/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>
#include <tuple>

#include "bbspline/error.hpp"
#include "bbspline/estimator.hpp"
#include "bbspline/inference.hpp"
#include "bbspline/rng.hpp"
#include "bbspline/spectral.hpp"
#include "bbspline/stats.hpp"

namespace bbspline {
namespace {

constexpr int kMaxBits = 12;

double rate_stderr(double p, int reps) {
  if (reps < 2) return 0.0;
  const double var = p * (1.0 - p) * reps / (reps - 1.0);
  return std::sqrt(var / reps);
}

std::vector<double> design(int n) {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = (i + 1) / static_cast<double>(n);
  return x;
}

double choose_lambda(const ExperimentConfig& config, const CirculantEigenvalues& eig,
                     std::span<const double> values, std::span<const double> grid) {
  switch (config.lambda_rule.kind) {
    case LambdaRule::Kind::kFixed:
      return config.lambda_rule.value;
    case LambdaRule::Kind::kGcv:
      return gcv_select(eig, values, grid).lambda_hat;
    case LambdaRule::Kind::kGcvOverLogN:
      return gcv_log_scaled(eig, values, grid);
  }
  return config.lambda_rule.value;
}

struct Variant {
  std::optional<int> b;
};

std::vector<Variant> variants_of(const ExperimentConfig& config) {
  std::vector<Variant> v{{std::nullopt}};
  for (int b : config.b_list) v.push_back({b});
  return v;
}

// y for one replication.
std::vector<double> draw_sample(const ExperimentConfig& config, int n, double r, std::size_t rep) {
  auto stream = rng_stream(cell_seed(config.seed, n, r), rep);
  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) {
    const double x = (i + 1) / static_cast<double>(n);
    y[i] = scenario_signal(config, r, x) + config.noise_sd * stream.normal();
  }
  return y;
}

std::vector<double> variant_values(const ExperimentConfig& config, const Variant& v, const std::vector<double>& y) {
  if (!v.b) return y;
  return data_range_quantizer(y, *v.b, config.marks).apply(y);
}

bool is_linearity(Scenario s) { return s == Scenario::kLinearitySize || s == Scenario::kLinearityPower; }

void append_rate_rows(const ExperimentConfig& config, int n, double r,
                      const std::vector<std::vector<TestReplicate>>& cell, ExperimentResult& out) {
  const auto vars = variants_of(config);
  for (std::size_t v = 0; v < vars.size(); ++v) {
    const auto& reps = cell[v];
    const int count = static_cast<int>(reps.size());
    double rejections = 0.0;
    double degenerate = 0.0;
    for (const auto& t : reps) {
      rejections += t.reject ? 1.0 : 0.0;
      degenerate += t.degenerate ? 1.0 : 0.0;
    }
    ResultRow row;
    row.scenario = to_string(config.scenario);
    row.n = n;
    row.b = vars[v].b;
    row.r = r;
    row.noise_sd = config.noise_sd;
    row.alpha_signal = config.alpha_signal;
    row.replications = count;
    row.seed = config.seed;
    row.metric = "rejection_rate";
    row.value = rejections / count;
    row.mc_stderr = rate_stderr(row.value, count);
    out.rows.push_back(row);
    if (degenerate > 0.0) {
      row.metric = "degenerate_rate";
      row.value = degenerate / count;
      row.mc_stderr = rate_stderr(row.value, count);
      out.rows.push_back(row);
    }
  }
}

void sort_rows(ExperimentResult& result) {
  std::stable_sort(result.rows.begin(), result.rows.end(), [](const ResultRow& a, const ResultRow& b) {
    const int ab = a.b ? *a.b : -1;
    const int bb = b.b ? *b.b : -1;
    return std::tie(a.scenario, a.n, a.r, ab, a.metric) < std::tie(b.scenario, b.n, b.r, bb, b.metric);
  });
}

ExperimentResult run_test_scenario(const ExperimentConfig& config) {
  config.validate();
  ExperimentResult out;
  for (int n : config.n_list) {
    for (double r : config.r_list) {
      append_rate_rows(config, n, r, simulate_test_cell(config, n, r), out);
    }
  }
  sort_rows(out);
  return out;
}

void require_scenario(const ExperimentConfig& config, std::initializer_list<Scenario> allowed, const char* op) {
  for (Scenario s : allowed) {
    if (config.scenario == s) return;
  }
  throw Error(ErrorCode::kConfiguration,
              std::string(op) + " does not handle scenario '" + to_string(config.scenario) + "'");
}

}  // namespace

const char* to_string(Scenario s) noexcept {
  switch (s) {
    case Scenario::kMse:
      return "mse";
    case Scenario::kSize:
      return "size";
    case Scenario::kPower:
      return "power";
    case Scenario::kLinearitySize:
      return "linearity-size";
    case Scenario::kLinearityPower:
      return "linearity-power";
  }
  return "unknown";
}

Scenario parse_scenario(const std::string& name) {
  for (Scenario s : {Scenario::kMse, Scenario::kSize, Scenario::kPower, Scenario::kLinearitySize,
                     Scenario::kLinearityPower}) {
    if (name == to_string(s)) return s;
  }
  throw Error(ErrorCode::kConfiguration, "unknown scenario '" + name + "'");
}

std::string to_string(const LambdaRule& rule) {
  switch (rule.kind) {
    case LambdaRule::Kind::kGcv:
      return "gcv";
    case LambdaRule::Kind::kGcvOverLogN:
      return "gcv-over-log-n";
    case LambdaRule::Kind::kFixed: {
      std::ostringstream os;
      os.precision(17);
      os << "fixed:" << rule.value;
      return os.str();
    }
  }
  return "unknown";
}

LambdaRule parse_lambda_rule(const std::string& text) {
  if (text == "gcv") return LambdaRule::gcv();
  if (text == "gcv-over-log-n" || text == "gcv-log") return LambdaRule::gcv_over_log_n();
  std::string number = text.rfind("fixed:", 0) == 0 ? text.substr(6) : text;
  try {
    std::size_t used = 0;
    const double v = std::stod(number, &used);
    if (used != number.size() || !(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(number);
    return LambdaRule::fixed(v);
  } catch (const std::exception&) {
    throw Error(ErrorCode::kConfiguration,
                "lambda rule '" + text + "' is not gcv, gcv-over-log-n or a positive number");
  }
}

ExperimentConfig ExperimentConfig::defaults_for(Scenario s) {
  ExperimentConfig c;
  c.scenario = s;
  switch (s) {
    case Scenario::kMse:
      c.n_list = {100, 200, 500, 1000};
      c.r_list = {1.0};
      c.lambda_rule = LambdaRule::gcv();
      break;
    case Scenario::kSize:
      c.n_list = {100, 500, 1000};
      c.r_list = {0.0};
      break;
    case Scenario::kPower:
      c.n_list = {100, 500};
      c.r_list = {0.01, 0.1, 0.3, 0.5, 1.0};
      break;
    case Scenario::kLinearitySize:
      c.n_list = {100, 200, 500, 1000};
      c.r_list = {0.0};
      break;
    case Scenario::kLinearityPower:
      c.n_list = {100, 500, 1000};
      c.r_list = {0.1, 0.5, 1.0, 3.0};
      break;
  }
  return c;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kConfiguration, what); };
  if (replications < 1) fail("replications must be >= 1");
  if (n_list.empty()) fail("n_list is empty");
  for (int n : n_list) {
    if (n < 8 || n % 2 != 0) fail("every n must be even and >= 8, got " + std::to_string(n));
  }
  for (int b : b_list) {
    if (b < 1 || b > kMaxBits) fail("every b must lie in [1, 12], got " + std::to_string(b));
  }
  if (r_list.empty()) fail("r_list is empty");
  for (double r : r_list) {
    if (!std::isfinite(r)) fail("r values must be finite");
  }
  if (!(noise_sd > 0.0) || !std::isfinite(noise_sd)) fail("noise_sd must be positive");
  if (!(alpha_level > 0.0 && alpha_level < 1.0)) fail("alpha_level must lie in (0, 1)");
  if (m < 1 || m > 8) fail("m must lie in [1, 8]");
  if (lambda_rule.kind == LambdaRule::Kind::kFixed && !(lambda_rule.value > 0.0)) fail("fixed lambda must be > 0");
  if (!(lambda_grid_lo > 0.0) || !(lambda_grid_hi >= lambda_grid_lo) || lambda_grid_count < 1) {
    fail("lambda grid needs 0 < lo <= hi and count >= 1");
  }
  if (eval_grid < 1) fail("eval_grid must be >= 1");
  if (threads < 0) fail("threads must be >= 0");
  if (scenario == Scenario::kSize || scenario == Scenario::kLinearitySize) {
    for (double r : r_list) {
      if (r != 0.0) fail(std::string(to_string(scenario)) + " requires r_list = {0}");
    }
  }
  if (scenario == Scenario::kPower || scenario == Scenario::kLinearityPower) {
    if (std::all_of(r_list.begin(), r_list.end(), [](double r) { return r == 0.0; })) {
      fail(std::string(to_string(scenario)) + " needs at least one nonzero r");
    }
  }
}

std::uint64_t cell_seed(std::uint64_t seed, int n, double r) noexcept {
  const auto r_bits = std::bit_cast<std::uint64_t>(r == 0.0 ? 0.0 : r);
  return mix64(seed ^ mix64(static_cast<std::uint64_t>(n) * 0x9E3779B97F4A7C15ULL) ^ mix64(r_bits + 1));
}

double scenario_signal(const ExperimentConfig& config, double r, double x) {
  if (is_linearity(config.scenario)) return 3.0 * x + 2.0 + r * beta_density(x, 11.0, 3.0);
  const double amplitude = config.scenario == Scenario::kMse ? 1.0 : r;
  return amplitude * std::sin(config.alpha_signal * std::numbers::pi * x);
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                    : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

std::vector<std::vector<TestReplicate>> simulate_test_cell(const ExperimentConfig& config, int n, double r) {
  config.validate();
  const auto eig = eigenvalues_from_series(n, config.m);
  const auto grid = log_spaced_grid(config.lambda_grid_lo, config.lambda_grid_hi, config.lambda_grid_count);
  const auto vars = variants_of(config);
  const std::vector<double> zero(n, 0.0);
  const auto reps = static_cast<std::size_t>(config.replications);

  std::vector<std::vector<TestReplicate>> out(vars.size(), std::vector<TestReplicate>(reps));
  parallel_for(reps, config.threads, [&](std::size_t rep) {
    const auto y = draw_sample(config, n, r, rep);
    for (std::size_t v = 0; v < vars.size(); ++v) {
      TestReplicate& slot = out[v][rep];
      const auto z = variant_values(config, vars[v], y);
      // penalty is tuned on the data centered at the null fit
      const double lambda = is_linearity(config.scenario) ? choose_lambda(config, eig, linear_residuals(z), grid)
                                                          : choose_lambda(config, eig, z, grid);
      slot.lambda = lambda;
      const SpectralQuantities sq(eig, lambda);
      try {
        const auto t = is_linearity(config.scenario) ? linearity_test(sq, z, config.alpha_level)
                                                     : quantization_test(sq, z, zero, config.alpha_level);
        slot.standardized = t.standardized;
        slot.p_value = t.p_value;
        slot.reject = t.reject;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kDegenerateVariance) throw;
        slot.degenerate = true;
      }
    }
  });
  return out;
}

std::vector<std::vector<MseReplicate>> simulate_mse_cell(const ExperimentConfig& config, int n) {
  config.validate();
  auto eig = std::make_shared<const CirculantEigenvalues>(eigenvalues_from_series(n, config.m));
  const auto grid = log_spaced_grid(config.lambda_grid_lo, config.lambda_grid_hi, config.lambda_grid_count);
  const auto vars = variants_of(config);
  const auto reps = static_cast<std::size_t>(config.replications);
  const double r = 1.0;

  std::vector<double> eval_x(config.eval_grid), f0_eval(config.eval_grid);
  for (int j = 0; j < config.eval_grid; ++j) {
    eval_x[j] = (j + 1) / static_cast<double>(config.eval_grid);
    f0_eval[j] = scenario_signal(config, r, eval_x[j]);
  }
  // Exact L2 distance needs f0 = sin(2 pi q x) with integer q.
  const bool periodic_signal = config.alpha_signal % 2 == 0 && config.alpha_signal != 0;
  const int freq = config.alpha_signal / 2;
  const auto x = design(n);
  std::vector<double> inner_kernel(n, 0.0);
  if (periodic_signal) {
    const double weight = std::pow(2.0 * std::numbers::pi * std::abs(freq), -2.0 * config.m);
    for (int i = 0; i < n; ++i) inner_kernel[i] = std::sin(2.0 * std::numbers::pi * freq * x[i]) * weight;
  }

  std::vector<std::vector<MseReplicate>> out(vars.size(), std::vector<MseReplicate>(reps));
  parallel_for(reps, config.threads, [&](std::size_t rep) {
    const auto y = draw_sample(config, n, r, rep);
    for (std::size_t v = 0; v < vars.size(); ++v) {
      MseReplicate& slot = out[v][rep];
      const auto values = variant_values(config, vars[v], y);
      const double lambda = choose_lambda(config, *eig, values, grid);
      const auto f = fit(eig, values, lambda, vars[v].b ? FitSource::kQuantized : FitSource::kRaw);
      const auto fhat = evaluate(f, eval_x);
      double acc = 0.0;
      for (int j = 0; j < config.eval_grid; ++j) acc += (fhat[j] - f0_eval[j]) * (fhat[j] - f0_eval[j]);
      slot.mse_grid = acc / config.eval_grid;
      slot.lambda = lambda;
      if (periodic_signal) {
        // ||f_hat||^2 - 2 <f_hat, f0> + ||f0||^2 with <K(x_i, .), f0> = inner_kernel[i].
        double cross = 0.0;
        for (int i = 0; i < n; ++i) cross += f.theta[i] * inner_kernel[i];
        slot.mse_l2 = l2_distance_sq(f) - 2.0 * cross + 0.5;
      } else {
        slot.mse_l2 = std::numeric_limits<double>::quiet_NaN();
      }
    }
  });
  return out;
}

ExperimentResult run_mse(const ExperimentConfig& config) {
  require_scenario(config, {Scenario::kMse}, "run_mse");
  config.validate();
  ExperimentResult out;
  const auto vars = variants_of(config);
  for (int n : config.n_list) {
    const auto cell = simulate_mse_cell(config, n);
    for (std::size_t v = 0; v < vars.size(); ++v) {
      std::vector<double> grid_vals, l2_vals;
      for (const auto& rep : cell[v]) {
        grid_vals.push_back(rep.mse_grid);
        l2_vals.push_back(rep.mse_l2);
      }
      ResultRow row;
      row.scenario = to_string(config.scenario);
      row.n = n;
      row.b = vars[v].b;
      row.r = 1.0;
      row.noise_sd = config.noise_sd;
      row.alpha_signal = config.alpha_signal;
      row.replications = config.replications;
      row.seed = config.seed;
      const double rootr = std::sqrt(static_cast<double>(config.replications));
      row.metric = "mse_grid";
      row.value = sample_mean(grid_vals);
      row.mc_stderr = sample_sd(grid_vals) / rootr;
      out.rows.push_back(row);
      if (!l2_vals.empty() && std::isfinite(l2_vals.front())) {
        row.metric = "mse_l2";
        row.value = sample_mean(l2_vals);
        row.mc_stderr = sample_sd(l2_vals) / rootr;
        out.rows.push_back(row);
      }
    }
  }
  sort_rows(out);
  return out;
}

ExperimentResult run_size(const ExperimentConfig& config) {
  require_scenario(config, {Scenario::kSize}, "run_size");
  return run_test_scenario(config);
}

ExperimentResult run_power(const ExperimentConfig& config) {
  require_scenario(config, {Scenario::kPower}, "run_power");
  return run_test_scenario(config);
}

ExperimentResult run_linearity(const ExperimentConfig& config) {
  require_scenario(config, {Scenario::kLinearitySize, Scenario::kLinearityPower}, "run_linearity");
  return run_test_scenario(config);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  switch (config.scenario) {
    case Scenario::kMse:
      return run_mse(config);
    case Scenario::kSize:
      return run_size(config);
    case Scenario::kPower:
      return run_power(config);
    case Scenario::kLinearitySize:
    case Scenario::kLinearityPower:
      return run_linearity(config);
  }
  throw Error(ErrorCode::kConfiguration, "unknown scenario");
}

}  // namespace bbspline
