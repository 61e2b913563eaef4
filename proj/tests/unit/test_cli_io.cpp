#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "bbspline/cli.hpp"
#include "bbspline/dataset.hpp"
#include "bbspline/error.hpp"
#include "bbspline/estimator.hpp"
#include "bbspline/serialize.hpp"

namespace bbspline {
namespace {

namespace fs = std::filesystem;
using V = std::vector<double>;

std::string data(const std::string& name) { return std::string(BBSPLINE_TEST_DATA) + "/" + name; }

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("bbspline_test_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "bbspline");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

V column(const std::string& csv, int col) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  V out;
  while (std::getline(in, line)) out.push_back(std::stod(split_csv_line(line)[col]));
  return out;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(Ingest, GridFixtureAcceptedVerbatim) {
  const auto d = ingest_csv(data("grid8.csv"), "x", "y", GridMapping::kNone);
  ASSERT_EQ(d.n(), 8);
  EXPECT_FALSE(d.mapped_grid);
  for (int i = 0; i < 8; ++i) EXPECT_EQ(d.x[i], (i + 1) / 8.0);
  const auto ranked = ingest_csv(data("grid8.csv"), "x", "y", GridMapping::kRank);
  EXPECT_EQ(ranked.y, d.y);
  EXPECT_TRUE(ranked.mapped_grid);
}

TEST(Ingest, RankMappingSortsByX) {
  const auto sorted = ingest_csv(data("grid8.csv"), "x", "y", GridMapping::kNone);
  const auto d = ingest_csv(data("shuffled8.csv"), "x", "y", GridMapping::kRank);
  EXPECT_EQ(d.y, sorted.y);
  EXPECT_EQ(d.x, sorted.x);
}

TEST(Ingest, RankBreaksTiesByInputOrder) {
  const auto d = ingest_csv(data("ties.csv"), "x", "y", GridMapping::kRank);
  EXPECT_EQ(d.y[1], 2.0);
  EXPECT_EQ(d.y[2], 3.0);
}

TEST(Ingest, Errors) {
  EXPECT_EQ(code_of([] { ingest_csv(data("nope.csv"), "x", "y"); }), ErrorCode::kIo);
  try {
    ingest_csv(data("missing_value.csv"), "x", "y");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    EXPECT_NE(std::string(e.what()).find("line 6"), std::string::npos) << e.what();
  }
  EXPECT_EQ(code_of([] { ingest_csv(data("ties.csv"), "x", "y", GridMapping::kNone); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { ingest_csv(data("short.csv"), "x", "y"); }), ErrorCode::kTooFewPoints);
  EXPECT_EQ(code_of([] { ingest_csv(data("grid8.csv"), "x", "temperature"); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([] { ingest_csv(data("shuffled8.csv"), "x", "y", GridMapping::kNone); }),
            ErrorCode::kInvalidArgument);
}

TEST(Ingest, CsvSplitting) {
  EXPECT_EQ(split_csv_line("a,\"b,c\",d"), (std::vector<std::string>{"a", "b,c", "d"}));
  EXPECT_EQ(split_csv_line("\"say \"\"hi\"\"\",2\r"), (std::vector<std::string>{"say \"hi\"", "2"}));
  EXPECT_EQ(split_csv_line(""), (std::vector<std::string>{""}));
}

TEST(Serialize, ShortestNumbers) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(format_number(1e-300), "1e-300");
  for (double v : {0.1 + 0.2, 1.0 / 3.0, 6.02214076e23}) EXPECT_EQ(std::stod(format_number(v)), v);
}

TEST(Serialize, FitRoundTrip) {
  const auto d = ingest_csv(data("sine200.csv"), "elevation", "temp");
  const auto f = fit(d.y, 2, 3e-6);
  const auto back = parse_fit_json(fit_json(f, FitMetadata{}));
  EXPECT_EQ(back.theta, f.theta);
  EXPECT_EQ(back.fitted_grid, f.fitted_grid);
  for (double x : {0.0, 0.33, 0.5}) EXPECT_EQ(evaluate(back, x), evaluate(f, x));
}

TEST(Cli, EstimateWritesCurveAndMetadata) {
  TempDir tmp;
  const auto curve_path = tmp.file("curve.csv");
  const auto r = run({"estimate", "--input", data("sine200.csv"), "--x-col", "elevation", "--y-col", "temp",
                      "--b", "5", "--m", "2", "--lambda", "gcv", "--output", curve_path, "--grid", "300"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto meta_text = read_file(curve_path + ".json");
  EXPECT_NE(meta_text.find("\"mapped_grid\": true"), std::string::npos);
  EXPECT_NE(meta_text.find("\"scheme\": \"data-range/empirical\""), std::string::npos);
  const auto f = parse_fit_json(meta_text);
  EXPECT_EQ(f.source, FitSource::kQuantized);
  EXPECT_GT(f.lambda, 0.0);

  const auto curve = read_file(curve_path);
  EXPECT_EQ(curve.substr(0, 8), "x,f_hat\n");
  const auto xs = column(curve, 0), fs_ = column(curve, 1);
  ASSERT_EQ(xs.size(), 300u);
  for (std::size_t j = 0; j < xs.size(); ++j) EXPECT_NEAR(evaluate(f, xs[j]), fs_[j], 1e-12);

  // In-process fit on the same quantized data reproduces the grid.
  const auto d = ingest_csv(data("sine200.csv"), "elevation", "temp");
  const auto q = data_range_quantizer(d.y, 5, MarkRule::kEmpiricalOptimal);
  const auto direct = fit(q.apply(d.y), 2, f.lambda);
  for (int i = 0; i < f.n; ++i) EXPECT_NEAR(direct.fitted_grid[i], f.fitted_grid[i], 1e-12);
}

TEST(Cli, EstimateCenterYRecorded) {
  const auto r = run({"estimate", "--input", data("sine200.csv"), "--x-col", "elevation", "--y-col", "temp",
                      "--center-y", "--lambda", "1e-5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, 8), "x,f_hat\n");
}

TEST(Cli, TestLinearNull) {
  const auto r = run({"test", "--input", data("sine200.csv"), "--x-col", "elevation", "--y-col", "temp", "--b",
                      "3", "--null", "linear", "--alpha", "0.1"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* key : {"\"n_T\"", "\"tau_sq_hat\"", "\"standardized\"", "\"p_value\"", "\"reject\"",
                          "\"alpha\"", "\"lambda\"", "\"quantizer\""}) {
    EXPECT_NE(r.out.find(key), std::string::npos) << key;
  }
  EXPECT_NE(r.out.find("\"reject\": true"), std::string::npos);
  EXPECT_LT(r.out.find("\"n_T\""), r.out.find("\"tau_sq_hat\""));
}

TEST(Cli, TestFileNullAcceptsTruth) {
  const auto r = run({"test", "--input", data("sine200.csv"), "--x-col", "elevation", "--y-col", "temp",
                      "--null", "file:" + data("null200.csv"), "--alpha", "0.01"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"null_kind\": \"file\""), std::string::npos);
}

TEST(Cli, SimulateReproducibleWithSeed) {
  TempDir tmp;
  const auto a = run({"simulate", "--config", data("size_small.json"), "--seed", "5", "--threads", "1"});
  const auto b = run({"simulate", "--config", data("size_small.json"), "--seed", "5", "--threads", "2",
                      "--output", tmp.file("sim.csv")});
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(a.out, read_file(tmp.file("sim.csv")));
  EXPECT_EQ(a.out.substr(0, a.out.find('\n')), kExperimentCsvHeader);
  EXPECT_NE(a.out.find(",nonquant,"), std::string::npos);
  const auto sidecar = parse_experiment_config(read_file(tmp.file("sim.csv.config.json")));
  EXPECT_EQ(sidecar.seed, 5u);
  const auto c = run({"simulate", "--config", data("size_small.json"), "--seed", "6"});
  EXPECT_NE(a.out, c.out);
}

TEST(Cli, SpectralAndDiagnose) {
  const auto s = run({"spectral", "--n", "8", "--m", "2", "--lambda", "1e-3"});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_NE(s.out.find("\"trace_A\""), std::string::npos);
  EXPECT_NE(s.out.find("\"lam_d\""), std::string::npos);
  const auto d = run({"diagnose", "--n", "200", "--b", "4"});
  ASSERT_EQ(d.code, 0) << d.err;
  EXPECT_NE(d.out.find("\"G_total\""), std::string::npos);
  EXPECT_NE(d.out.find("\"condition_c\": true"), std::string::npos);
}

TEST(Cli, UsageErrorsExitTwoWithoutOutput) {
  TempDir tmp;
  const auto out = tmp.file("never.csv");
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"estimate", "--input", data("grid8.csv"), "--bogus", "--output", out},
           {"estimate", "--input", data("grid8.csv"), "--lambda", "fast", "--output", out},
           {"estimate", "--input", data("grid8.csv"), "--mapping", "sorted", "--output", out},
           {"test", "--input", data("grid8.csv"), "--null", "quadratic", "--output", out},
           {"test", "--input", data("grid8.csv"), "--alpha", "2", "--output", out},
           {"frobnicate"},
           {}}) {
    const auto r = run(args);
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_NE(r.err.find("Usage"), std::string::npos) << r.err;
    EXPECT_FALSE(fs::exists(out));
  }
  EXPECT_TRUE(fs::is_empty(tmp.path));
}

TEST(Cli, RuntimeErrorsExitOne) {
  EXPECT_EQ(run({"estimate", "--input", data("nope.csv")}).code, kExitRuntime);
  const auto r = run({"estimate", "--input", data("missing_value.csv"), "--mapping", "none"});
  EXPECT_EQ(r.code, kExitRuntime);
  EXPECT_NE(r.err.find("line 6"), std::string::npos);
  EXPECT_EQ(run({"estimate", "--input", data("short.csv")}).code, kExitRuntime);
}

TEST(Cli, HelpExitsZero) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("simulate"), std::string::npos);
}

TEST(Cli, BinaryExitCodes) {
  const std::string bin = BBSPLINE_CLI_PATH;
  const int ok = std::system((bin + " spectral --n 8 --lambda 1e-3 > /dev/null").c_str());
  EXPECT_EQ(WEXITSTATUS(ok), 0);
  const int usage = std::system((bin + " spectral --n 8 --wat 2> /dev/null").c_str());
  EXPECT_EQ(WEXITSTATUS(usage), 2);
  const int runtime = std::system((bin + " estimate --input /nonexistent.csv 2> /dev/null").c_str());
  EXPECT_EQ(WEXITSTATUS(runtime), 1);
}

}  // namespace
}  // namespace bbspline
