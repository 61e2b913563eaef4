#include "bbspline/serialize.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unistd.h>

#include <json.hpp>

#include "bbspline/error.hpp"

namespace bbspline {
namespace {

using Json = nlohmann::ordered_json;

Json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

Json number_array(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

std::string dump(const Json& j, int indent) { return j.dump(indent) + (indent >= 0 ? "\n" : ""); }

Json quantizer_record(const Quantizer& q) {
  Json j;
  j["b"] = q.b();
  j["t"] = number_array(q.thresholds());
  j["mu"] = number_array(q.marks());
  j["scheme"] = q.scheme();
  return j;
}

template <class T>
T get_as(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfiguration, std::string("config key '") + key + "': " + e.what());
  }
}

std::vector<double> get_doubles(const nlohmann::json& j, const char* key) {
  try {
    std::vector<double> out;
    for (const auto& v : j.at(key)) {
      if (v.is_null()) throw Error(ErrorCode::kParse, std::string("null entry in '") + key + "'");
      out.push_back(v.get<double>());
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("key '") + key + "': " + e.what());
  }
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string quantizer_json(const Quantizer& q, int indent) { return dump(quantizer_record(q), indent); }

std::string test_result_json(const TestResult& r, int indent) {
  Json j;
  j["n_T"] = number(r.nT);
  j["tau_sq_hat"] = number(r.tau_sq_hat);
  j["standardized"] = number(r.standardized);
  j["p_value"] = number(r.p_value);
  j["reject"] = r.reject;
  j["alpha"] = r.alpha;
  j["lambda"] = r.lambda;
  j["critical_value"] = number(r.critical_value);
  j["trace_A"] = number(r.trace_A);
  j["s_n"] = number(r.s_n);
  j["n"] = r.n;
  j["m"] = r.m;
  j["variance_source"] = to_string(r.variance_source);
  j["null_kind"] = r.null_kind;
  if (r.linear_slope) j["linear_slope"] = number(*r.linear_slope);
  if (r.linear_intercept) j["linear_intercept"] = number(*r.linear_intercept);
  if (r.quantizer) j["quantizer"] = quantizer_record(*r.quantizer);
  return dump(j, indent);
}

std::string experiment_csv(const ExperimentResult& result) {
  std::string out = kExperimentCsvHeader;
  out += '\n';
  for (const auto& row : result.rows) {
    out += row.scenario;
    out += ',' + std::to_string(row.n);
    out += ',' + (row.b ? std::to_string(*row.b) : std::string("nonquant"));
    out += ',' + format_number(row.r);
    out += ',' + format_number(row.noise_sd);
    out += ',' + std::to_string(row.alpha_signal);
    out += ',' + row.metric;
    out += ',' + format_number(row.value);
    out += ',' + format_number(row.mc_stderr);
    out += ',' + std::to_string(row.replications);
    out += ',' + std::to_string(row.seed);
    out += '\n';
  }
  return out;
}

std::string experiment_config_json(const ExperimentConfig& c, int indent) {
  Json j;
  j["scenario"] = to_string(c.scenario);
  j["n_list"] = c.n_list;
  j["b_list"] = c.b_list;
  j["r_list"] = c.r_list;
  j["alpha_signal"] = c.alpha_signal;
  j["noise_sd"] = c.noise_sd;
  j["replications"] = c.replications;
  j["seed"] = c.seed;
  j["alpha_level"] = c.alpha_level;
  j["m"] = c.m;
  j["lambda_rule"] = to_string(c.lambda_rule);
  j["marks"] = to_string(c.marks);
  j["lambda_grid_lo"] = c.lambda_grid_lo;
  j["lambda_grid_hi"] = c.lambda_grid_hi;
  j["lambda_grid_count"] = c.lambda_grid_count;
  j["eval_grid"] = c.eval_grid;
  j["threads"] = c.threads;
  return dump(j, indent);
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kConfiguration, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kConfiguration, "config must be a JSON object");
  static const std::set<std::string> known{
      "scenario", "n_list", "b_list", "r_list", "alpha_signal", "noise_sd", "replications", "seed",
      "alpha_level", "m", "lambda_rule", "marks", "lambda_grid_lo", "lambda_grid_hi", "lambda_grid_count",
      "eval_grid", "threads"};
  for (const auto& item : j.items()) {
    if (!known.contains(item.key())) throw Error(ErrorCode::kConfiguration, "unknown config key '" + item.key() + "'");
  }
  const Scenario scenario = j.contains("scenario") ? parse_scenario(get_as<std::string>(j, "scenario")) : Scenario::kSize;
  ExperimentConfig c = ExperimentConfig::defaults_for(scenario);
  if (j.contains("n_list")) c.n_list = get_as<std::vector<int>>(j, "n_list");
  if (j.contains("b_list")) c.b_list = get_as<std::vector<int>>(j, "b_list");
  if (j.contains("r_list")) c.r_list = get_as<std::vector<double>>(j, "r_list");
  if (j.contains("alpha_signal")) c.alpha_signal = get_as<int>(j, "alpha_signal");
  if (j.contains("noise_sd")) c.noise_sd = get_as<double>(j, "noise_sd");
  if (j.contains("replications")) c.replications = get_as<int>(j, "replications");
  if (j.contains("seed")) c.seed = get_as<std::uint64_t>(j, "seed");
  if (j.contains("alpha_level")) c.alpha_level = get_as<double>(j, "alpha_level");
  if (j.contains("m")) c.m = get_as<int>(j, "m");
  if (j.contains("lambda_rule")) {
    const auto& v = j.at("lambda_rule");
    c.lambda_rule = v.is_number() ? LambdaRule::fixed(v.get<double>()) : parse_lambda_rule(get_as<std::string>(j, "lambda_rule"));
  }
  if (j.contains("marks")) c.marks = parse_mark_rule(get_as<std::string>(j, "marks"));
  if (j.contains("lambda_grid_lo")) c.lambda_grid_lo = get_as<double>(j, "lambda_grid_lo");
  if (j.contains("lambda_grid_hi")) c.lambda_grid_hi = get_as<double>(j, "lambda_grid_hi");
  if (j.contains("lambda_grid_count")) c.lambda_grid_count = get_as<int>(j, "lambda_grid_count");
  if (j.contains("eval_grid")) c.eval_grid = get_as<int>(j, "eval_grid");
  if (j.contains("threads")) c.threads = get_as<int>(j, "threads");
  c.validate();
  return c;
}

std::string fit_json(const FitResult& fit, const FitMetadata& meta, int indent) {
  Json j;
  j["n"] = fit.n;
  j["m"] = fit.m;
  j["lambda"] = fit.lambda;
  j["lambda_rule"] = meta.lambda_rule;
  j["source"] = to_string(fit.source);
  j["input"] = meta.input;
  j["mapped_grid"] = meta.mapped_grid;
  j["center_y"] = meta.center_y;
  j["y_mean"] = number(meta.y_mean);
  j["warnings"] = meta.warnings;
  if (meta.quantizer) j["quantizer"] = quantizer_record(*meta.quantizer);
  j["theta"] = number_array(fit.theta);
  j["fitted_grid"] = number_array(fit.fitted_grid);
  return dump(j, indent);
}

FitResult parse_fit_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    FitResult f;
    f.n = j.at("n").get<int>();
    f.m = j.at("m").get<int>();
    f.lambda = j.at("lambda").get<double>();
    f.source = j.value("source", std::string("raw")) == "quantized" ? FitSource::kQuantized : FitSource::kRaw;
    f.theta = get_doubles(j, "theta");
    f.fitted_grid = get_doubles(j, "fitted_grid");
    if (f.theta.size() != static_cast<std::size_t>(f.n) || f.fitted_grid.size() != f.theta.size()) {
      throw Error(ErrorCode::kParse, "fit record: theta and fitted_grid must have n entries");
    }
    kernel_spec(f.m);  // validates m
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("fit record: ") + e.what());
  }
}

std::string curve_csv(const std::vector<double>& x, const std::vector<double>& f) {
  if (x.size() != f.size()) throw Error(ErrorCode::kDimensionMismatch, "curve x and f lengths differ");
  std::string out = "x,f_hat\n";
  for (std::size_t i = 0; i < x.size(); ++i) out += format_number(x[i]) + ',' + format_number(f[i]) + '\n';
  return out;
}

std::string spectral_json(const SpectralQuantities& sq, int indent) {
  Json j;
  j["n"] = sq.n();
  j["m"] = sq.m();
  j["lambda"] = sq.lambda();
  j["trace_A"] = sq.trace_A();
  j["s_n"] = sq.s_n();
  j["s_n_sq"] = sq.s_n_sq();
  j["h"] = sq.h();
  j["lam_c"] = number_array(sq.lam_c());
  j["lam_d"] = number_array(sq.lam_d());
  j["xi"] = number_array(sq.xi());
  return dump(j, indent);
}

std::string diagnostic_json(const Theorem2Diagnostic& diag, double separation, const ConditionReport& report,
                            const Quantizer& q, int indent) {
  Json j;
  j["quantizer"] = quantizer_record(q);
  j["C_k_sq"] = number(diag.C_k_sq);
  j["G1"] = number(diag.G1);
  j["G2"] = number(diag.G2);
  j["G_total"] = number(diag.G_total);
  j["separation_rate"] = number(separation);
  Json c;
  c["condition_b"] = report.condition_b;
  c["condition_c_residual"] = number(report.condition_c_residual);
  c["condition_c"] = report.condition_c;
  c["r2_edge_sq"] = number(report.r2_edge_sq);
  c["r2_threshold"] = number(report.r2_threshold);
  c["r2_edges"] = report.r2_edges;
  c["n_h_sq"] = number(report.n_h_sq);
  c["tau_sq"] = number(report.tau_sq);
  j["conditions"] = c;
  return dump(j, indent);
}

void write_file_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write '" + tmp.string() + "'");
    out << text;
    out.close();
    if (!out) {
      std::error_code ignore;
      fs::remove(tmp, ignore);
      throw Error(ErrorCode::kIo, "failed writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::kIo, "cannot move output into '" + path + "'");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace bbspline
