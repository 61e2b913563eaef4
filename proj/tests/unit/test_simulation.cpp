#include <cmath>
#include <map>

#include <gtest/gtest.h>

#include "bbspline/error.hpp"
#include "bbspline/rng.hpp"
#include "bbspline/serialize.hpp"
#include "bbspline/simulation.hpp"
#include "bbspline/stats.hpp"

namespace bbspline {
namespace {

using V = std::vector<double>;

TEST(Rng, Deterministic) {
  auto a = rng_stream(123, 4);
  auto b = rng_stream(123, 4);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.normal(), b.normal());
}

TEST(Rng, AdjacentReplicationsUncorrelated) {
  auto a = rng_stream(9, 10);
  auto b = rng_stream(9, 11);
  const int n = 10000;
  V x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[i] = a.normal();
    y[i] = b.normal();
  }
  const double mx = sample_mean(x), my = sample_mean(y);
  double sxy = 0, sxx = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  EXPECT_LT(std::abs(sxy / std::sqrt(sxx * syy)), 0.05);
}

TEST(Rng, SeedChangesStreams) {
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    auto a = rng_stream(1, rep);
    auto b = rng_stream(2, rep);
    EXPECT_NE(a.next_u64(), b.next_u64());
  }
}

TEST(Rng, NormalDrawsLookGaussian) {
  auto s = rng_stream(31337, 0);
  V z(200000);
  for (auto& v : z) v = s.normal();
  EXPECT_NEAR(sample_mean(z), 0.0, 0.01);
  EXPECT_NEAR(population_variance(z), 1.0, 0.01);
  EXPECT_LT(ks_distance_to_normal(z), 0.005);
}

TEST(Rng, UniformRange) {
  auto s = rng_stream(5, 5);
  for (int i = 0; i < 100000; ++i) {
    const double u = s.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Beta, DensityAtModeAndNormalization) {
  const double mode = 10.0 / 12.0;
  const double exact = 858.0 * std::pow(5.0 / 6.0, 10) / 36.0;
  EXPECT_NEAR(beta_density(mode, 11.0, 3.0), exact, 1e-12);
  EXPECT_NEAR(exact, 3.8492, 1e-4);
  const int points = 100000;
  double acc = 0.0;
  for (int j = 0; j < points; ++j) acc += beta_density((j + 0.5) / points, 11.0, 3.0);
  EXPECT_NEAR(acc / points, 1.0, 1e-9);
}

ExperimentConfig small_size_config() {
  auto c = ExperimentConfig::defaults_for(Scenario::kSize);
  c.n_list = {64, 128};
  c.b_list = {2, 5};
  c.replications = 60;
  c.seed = 777;
  return c;
}

bool same_rows(const ExperimentResult& a, const ExperimentResult& b) {
  if (a.rows.size() != b.rows.size()) return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const auto& x = a.rows[i];
    const auto& y = b.rows[i];
    if (x.scenario != y.scenario || x.n != y.n || x.b != y.b || x.r != y.r || x.metric != y.metric ||
        x.value != y.value || x.mc_stderr != y.mc_stderr || x.replications != y.replications || x.seed != y.seed) {
      return false;
    }
  }
  return true;
}

TEST(Simulation, BitIdenticalAcrossThreadCounts) {
  auto c = small_size_config();
  c.threads = 1;
  const auto one = run_experiment(c);
  c.threads = 3;
  const auto three = run_experiment(c);
  EXPECT_TRUE(same_rows(one, three));
  EXPECT_EQ(experiment_csv(one), experiment_csv(three));
  c.seed = 778;
  EXPECT_FALSE(same_rows(one, run_experiment(c)));
}

TEST(Simulation, RowsCarryBaselineAndStderr) {
  const auto result = run_experiment(small_size_config());
  int baseline = 0;
  for (const auto& row : result.rows) {
    if (!row.b) ++baseline;
    EXPECT_EQ(row.replications, 60);
    EXPECT_GE(row.value, 0.0);
    EXPECT_LE(row.value, 1.0);
    if (row.metric == "rejection_rate") {
      const double p = row.value;
      EXPECT_NEAR(row.mc_stderr, std::sqrt(p * (1 - p) / 59.0), 1e-15);
    }
  }
  EXPECT_EQ(baseline, 2);
  // nonquant rows first inside each n.
  EXPECT_FALSE(result.rows.front().b.has_value());
}

TEST(Simulation, CsvSchema) {
  ExperimentResult r;
  ResultRow row;
  row.scenario = "size";
  row.n = 100;
  row.r = 0.0;
  row.noise_sd = 1.0;
  row.alpha_signal = 2;
  row.metric = "rejection_rate";
  row.value = 0.1;
  row.mc_stderr = 0.0095;
  row.replications = 1000;
  row.seed = 5;
  r.rows.push_back(row);
  row.b = 3;
  r.rows.push_back(row);
  EXPECT_EQ(experiment_csv(r),
            "scenario,n,b,r,noise_sd,alpha_signal,metric,value,mc_stderr,replications,seed\n"
            "size,100,nonquant,0,1,2,rejection_rate,0.1,0.0095,1000,5\n"
            "size,100,3,0,1,2,rejection_rate,0.1,0.0095,1000,5\n");
}

TEST(Simulation, ConfigValidation) {
  auto expect_bad = [](ExperimentConfig c) {
    try {
      c.validate();
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kConfiguration);
    }
  };
  auto c = small_size_config();
  EXPECT_NO_THROW(c.validate());
  auto bad = c;
  bad.replications = 0;
  expect_bad(bad);
  bad = c;
  bad.n_list = {63};
  expect_bad(bad);
  bad = c;
  bad.n_list = {6};
  expect_bad(bad);
  bad = c;
  bad.b_list = {13};
  expect_bad(bad);
  bad = c;
  bad.r_list = {0.5};
  expect_bad(bad);
  auto p = ExperimentConfig::defaults_for(Scenario::kPower);
  p.r_list = {0.0};
  expect_bad(p);
  EXPECT_THROW(run_mse(c), Error);
}

TEST(Simulation, ConfigJsonRoundTrip) {
  auto c = ExperimentConfig::defaults_for(Scenario::kLinearityPower);
  c.seed = 18446744073709551557ULL;
  c.lambda_rule = LambdaRule::fixed(2.5e-5);
  c.marks = MarkRule::kMidpoint;
  const auto back = parse_experiment_config(experiment_config_json(c));
  EXPECT_EQ(experiment_config_json(back), experiment_config_json(c));
  EXPECT_EQ(back.seed, c.seed);
  EXPECT_EQ(back.lambda_rule.kind, LambdaRule::Kind::kFixed);
  EXPECT_EQ(back.lambda_rule.value, 2.5e-5);
  EXPECT_THROW(parse_experiment_config(R"({"scenario": "size", "bogus": 1})"), Error);
  EXPECT_THROW(parse_experiment_config(R"({"scenario": "nope"})"), Error);
  EXPECT_THROW(parse_experiment_config(R"({"scenario": "size", "n_list": "x"})"), Error);
  EXPECT_THROW(parse_experiment_config("{"), Error);
  const auto defaults = parse_experiment_config(R"({"scenario": "power"})");
  EXPECT_EQ(defaults.r_list, ExperimentConfig::defaults_for(Scenario::kPower).r_list);
}

TEST(Simulation, LambdaRuleParsing) {
  EXPECT_EQ(parse_lambda_rule("gcv").kind, LambdaRule::Kind::kGcv);
  EXPECT_EQ(parse_lambda_rule("gcv-log").kind, LambdaRule::Kind::kGcvOverLogN);
  EXPECT_EQ(parse_lambda_rule("gcv-over-log-n").kind, LambdaRule::Kind::kGcvOverLogN);
  EXPECT_EQ(parse_lambda_rule("fixed:0.001").value, 0.001);
  EXPECT_EQ(parse_lambda_rule("1e-4").value, 1e-4);
  EXPECT_THROW(parse_lambda_rule("-1"), Error);
  EXPECT_THROW(parse_lambda_rule("fixed:abc"), Error);
}

TEST(Simulation, SignalModels) {
  auto c = ExperimentConfig::defaults_for(Scenario::kPower);
  c.alpha_signal = 8;
  EXPECT_NEAR(scenario_signal(c, 0.5, 1.0 / 16.0), 0.5 * std::sin(8 * M_PI / 16.0), 1e-15);
  auto l = ExperimentConfig::defaults_for(Scenario::kLinearityPower);
  EXPECT_NEAR(scenario_signal(l, 3.0, 0.5), 3.5 + 3.0 * beta_density(0.5, 11, 3), 1e-14);
  auto m = ExperimentConfig::defaults_for(Scenario::kMse);
  EXPECT_NEAR(scenario_signal(m, 0.0, 0.25), 1.0, 1e-15);
}

TEST(Simulation, MseExactAndGridAgree) {
  auto c = ExperimentConfig::defaults_for(Scenario::kMse);
  c.n_list = {128};
  c.b_list = {3};
  c.replications = 5;
  const auto cell = simulate_mse_cell(c, 128);
  for (const auto& variant : cell) {
    for (const auto& rep : variant) {
      EXPECT_NEAR(rep.mse_grid, rep.mse_l2, 1e-6 + 1e-6 * rep.mse_l2);
    }
  }
}

TEST(Simulation, MseDecreasesInN) {
  auto c = ExperimentConfig::defaults_for(Scenario::kMse);
  c.n_list = {100, 400, 1000};
  c.b_list = {3, 5};
  c.replications = 100;
  c.eval_grid = 1024;
  const auto result = run_mse(c);
  std::map<std::pair<int, int>, std::pair<double, double>> by;  // (b, n) -> (value, stderr)
  for (const auto& row : result.rows) {
    if (row.metric == "mse_grid") by[{row.b.value_or(-1), row.n}] = {row.value, row.mc_stderr};
  }
  for (int b : {-1, 3, 5}) {
    const auto a = by.at({b, 100}), m = by.at({b, 400}), z = by.at({b, 1000});
    EXPECT_LE(m.first, a.first + 2 * (a.second + m.second)) << "b=" << b;
    EXPECT_LE(z.first, m.first + 2 * (m.second + z.second)) << "b=" << b;
  }
}

TEST(Simulation, PowerIncreasesWithSignal) {
  auto c = ExperimentConfig::defaults_for(Scenario::kPower);
  c.n_list = {500};
  c.b_list = {5};
  c.r_list = {0.01, 0.1, 0.3, 0.5, 1.0};
  c.replications = 1000;
  const auto result = run_power(c);
  std::map<std::pair<int, double>, double> power;
  std::map<std::pair<int, double>, double> stderr_of;
  for (const auto& row : result.rows) {
    if (row.metric != "rejection_rate") continue;
    power[{row.b.value_or(-1), row.r}] = row.value;
    stderr_of[{row.b.value_or(-1), row.r}] = row.mc_stderr;
  }
  for (int b : {-1, 5}) {
    for (std::size_t i = 1; i < c.r_list.size(); ++i) {
      EXPECT_GE(power.at({b, c.r_list[i]}) + 0.02, power.at({b, c.r_list[i - 1]})) << "b=" << b;
    }
    // Near-null alternative stays near the level.
    EXPECT_LE(std::abs(power.at({b, 0.01}) - c.alpha_level), 3 * stderr_of.at({b, 0.01}) + 0.01);
  }
}

TEST(Simulation, SizeStderrScale) {
  auto c = ExperimentConfig::defaults_for(Scenario::kSize);
  c.n_list = {200};
  c.b_list = {5};
  c.replications = 1000;
  const auto result = run_size(c);
  for (const auto& row : result.rows) {
    if (row.metric == "rejection_rate") {
      EXPECT_NEAR(row.mc_stderr, 0.0095, 0.003);
    }
  }
}

TEST(ParallelFor, VisitsEveryIndexOnceAndPropagatesErrors) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, 2, [](std::size_t i) {
                 if (i == 7) throw Error(ErrorCode::kInvalidArgument, "boom");
               }),
               Error);
}

}  // namespace
}  // namespace bbspline
