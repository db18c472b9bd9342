#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "congruent/cli.hpp"
#include "congruent/error.hpp"

using namespace congruent;
using congruent::cli::JobSpec;
using congruent::cli::run;

namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("congruent_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string file(const std::string& name, const std::string& content) {
    const auto path = dir_ / name;
    std::ofstream(path) << content;
    return path.string();
  }

  static nlohmann::json report(const cli::JobResult& r) { return nlohmann::json::parse(r.report); }

  fs::path dir_;
};

TEST_F(CliTest, TensorBernoulliFisher) {
  JobSpec job;
  job.command = "tensor";
  job.model = file("bernoulli.json", R"({"type": "bernoulli"})");
  job.degree = 2;
  job.xi = {0.5};
  const auto r = run(job);
  ASSERT_EQ(r.exit_code, 0) << r.report;
  const auto doc = report(r);
  EXPECT_EQ(doc["status"], "ok");
  EXPECT_DOUBLE_EQ(doc["results"]["tensor"]["components"][0].get<double>(), 4.0);
  EXPECT_EQ(doc["inputs_digest"].get<std::string>().size(), 64u);
  EXPECT_EQ(doc["options"]["xi"][0], 0.5);
}

TEST_F(CliTest, TensorExponentialFamily) {
  JobSpec job;
  job.command = "tensor";
  job.model = file("ef.json", R"({"type": "expfam", "size": 3, "dimension": 1,
                                   "sufficient_statistics": [[0], [1], [2]]})");
  job.degree = 1;
  job.xi = {0.0};
  const auto doc = report(run(job));
  EXPECT_NEAR(doc["results"]["tensor"]["components"][0].get<double>(), 0.0, 1e-15);
}

TEST_F(CliTest, TableModelIsAffine) {
  JobSpec job;
  job.command = "tensor";
  job.model = file("t.json", R"({"type": "table", "base": [0.5, 0.5], "directions": [[1], [-1]],
                                  "lower": [-0.5], "upper": [0.5]})");
  job.xi = {0.0};
  const auto doc = report(run(job));
  EXPECT_NEAR(doc["results"]["tensor"]["components"][0].get<double>(), 4.0, 1e-14);
}

TEST_F(CliTest, CheckCongruencePassAndFail) {
  JobSpec job;
  job.command = "check-congruence";
  job.kernel = file("k.json", R"({"rows": [[0.5, 0.5, 0], [0, 0, 1]]})");
  job.statistic = file("s.json", R"([0, 0, 1])");
  auto r = run(job);
  EXPECT_EQ(r.exit_code, 0) << r.report;
  EXPECT_TRUE(report(r)["results"]["congruent"].get<bool>());

  job.kernel = file("bad.json", R"({"rows": [[0.5, 0.25, 0.25], [0, 0, 1]]})");
  r = run(job);
  EXPECT_EQ(r.exit_code, cli::kExitVerification);
  const auto doc = report(r);
  EXPECT_FALSE(doc["results"]["congruent"].get<bool>());
  ASSERT_EQ(doc["results"]["violations"].size(), 1u);
  EXPECT_EQ(doc["results"]["violations"][0]["target"], 2);
  EXPECT_EQ(doc["status"], "verification-failed");
}

TEST_F(CliTest, CheckCongruenceStatisticInsideKernelFile) {
  JobSpec job;
  job.command = "check-congruence";
  job.kernel = file("k.json", R"({"rows": [[1, 0], [0, 1]], "statistic": [1, 0]})");
  const auto r = run(job);
  EXPECT_EQ(r.exit_code, cli::kExitVerification);
}

TEST_F(CliTest, PushforwardMeasureAndModel) {
  JobSpec job;
  job.command = "pushforward";
  job.kernel = file("k.json", R"({"rows": [[1, 0, 0], [0, 0.5, 0.5]]})");
  job.measure = file("m.json", R"({"coefficients": [0.5, 0.5]})");
  auto doc = report(run(job));
  EXPECT_EQ(doc["results"]["pushforward"], (nlohmann::json{0.5, 0.25, 0.25}));

  job.measure.reset();
  job.model = file("b.json", R"({"type": "bernoulli"})");
  job.xi = {0.25};
  doc = report(run(job));
  EXPECT_NEAR(doc["results"]["pushforward_tensor"]["components"][0].get<double>(), 1.0 / (0.25 * 0.75), 1e-12);
}

TEST_F(CliTest, DecomposeBuiltinFisherOnM) {
  JobSpec job;
  job.command = "decompose";
  job.oracle = "builtin:fisher";
  job.degree = 2;
  const auto r = run(job);
  ASSERT_EQ(r.exit_code, 0) << r.report;
  const auto doc = report(r);
  const auto& terms = doc["results"]["terms"];
  ASSERT_EQ(terms.size(), 2u);
  EXPECT_EQ(terms[1]["partition"], (nlohmann::json{{1, 2}}));
  for (const auto& c : terms[1]["coefficients"]) EXPECT_NEAR(c.get<double>(), 1.0, 1e-12);
  for (const auto& c : terms[0]["coefficients"]) EXPECT_NEAR(c.get<double>(), 0.0, 1e-12);
}

TEST_F(CliTest, DecomposeLinearCombinationFile) {
  JobSpec job;
  job.command = "decompose";
  job.oracle = file("o.json", R"({"type": "linear-combination", "degree": 2, "regularity": "1/2",
    "terms": [{"partition": [[1, 2]], "coefficient": {"power": {"scale": 1, "exponent": 1}}},
              {"partition": [[1], [2]], "coefficient": {"table": {"lambda": [0.5, 4], "values": [2, 2]}}}]})");
  job.lambda_grid = {0.5, 1, 2};
  const auto doc = report(run(job));
  const auto& terms = doc["results"]["terms"];
  for (std::size_t l = 0; l < 3; ++l) {
    EXPECT_NEAR(terms[0]["coefficients"][l].get<double>(), 2.0, 1e-8);
    EXPECT_NEAR(terms[1]["coefficients"][l].get<double>(), job.lambda_grid[l], 1e-8);
  }
}

TEST_F(CliTest, DecomposeOnP) {
  JobSpec job;
  job.command = "decompose";
  job.oracle = "builtin:amari-chentsov";
  job.space = "P";
  job.regularity = "1/3";
  const auto doc = report(run(job));
  ASSERT_EQ(doc["results"]["terms"].size(), 1u);
  EXPECT_NEAR(doc["results"]["terms"][0]["coefficient"].get<double>(), 1.0, 1e-10);
}

TEST_F(CliTest, VerifyDetectsInvariance) {
  JobSpec job;
  job.command = "verify";
  job.oracle = "builtin:canonical";
  job.degree = 3;
  job.regularity = "1/2";
  job.trials = 50;
  const auto r = run(job);
  EXPECT_EQ(r.exit_code, 0) << r.report;
  EXPECT_TRUE(report(r)["results"]["invariant"].get<bool>());
}

TEST_F(CliTest, SchemaErrors) {
  JobSpec job;
  job.command = "tensor";
  job.model = file("bad.json", R"({"type": "mystery"})");
  job.xi = {0.5};
  EXPECT_EQ(run(job).exit_code, cli::kExitSchema);

  job.model = file("broken.json", "{not json");
  EXPECT_EQ(run(job).exit_code, cli::kExitSchema);

  job.model = (dir_ / "missing.json").string();
  EXPECT_EQ(run(job).exit_code, cli::kExitSchema);

  job.model = file("b.json", R"({"type": "bernoulli"})");
  job.xi = {0.5, 0.5};
  EXPECT_EQ(run(job).exit_code, cli::kExitSchema);

  JobSpec bad_tol;
  bad_tol.command = "decompose";
  bad_tol.oracle = "builtin:fisher";
  bad_tol.tolerance = 0.0;
  EXPECT_EQ(run(bad_tol).exit_code, cli::kExitSchema);

  JobSpec wrong_degree = bad_tol;
  wrong_degree.tolerance = 1e-8;
  wrong_degree.degree = 3;
  EXPECT_EQ(run(wrong_degree).exit_code, cli::kExitSchema);

  JobSpec not_stochastic;
  not_stochastic.command = "check-congruence";
  not_stochastic.kernel = file("k.json", R"({"rows": [[0.5, 0.4]], "statistic": [0, 0]})");
  EXPECT_EQ(run(not_stochastic).exit_code, cli::kExitSchema);

  JobSpec unknown;
  unknown.command = "frobnicate";
  const auto r = run(unknown);
  EXPECT_EQ(r.exit_code, cli::kExitSchema);
  EXPECT_EQ(report(r)["status"], "schema-error");
}

TEST_F(CliTest, NumericFailure) {
  JobSpec job;
  job.command = "tensor";
  job.model = file("b.json", R"({"type": "bernoulli"})");
  job.xi = {1.5};
  const auto r = run(job);
  EXPECT_EQ(r.exit_code, cli::kExitNumeric);
  EXPECT_EQ(report(r)["status"], "numeric-error");
}

TEST_F(CliTest, MassDependentCoefficientsStayInvariant) {
  JobSpec job;
  job.command = "verify";
  job.oracle = file("o.json", R"({"type": "linear-combination", "degree": 2,
    "terms": [{"partition": [[1, 2]], "coefficient": {"table": {"lambda": [0.25, 4], "values": [0, 3]}}},
              {"partition": [[1], [2]], "coefficient": {"power": {"scale": -1, "exponent": 2}}}]})");
  const auto r = run(job);
  EXPECT_EQ(r.exit_code, 0) << r.report;
}

TEST_F(CliTest, ReportsAreByteIdentical) {
  JobSpec job;
  job.command = "decompose";
  job.oracle = "builtin:canonical";
  job.degree = 3;
  job.seed = 1234;
  job.threads = 3;
  const auto a = run(job);
  const auto b = run(job);
  EXPECT_EQ(a.report, b.report);
  job.threads = 1;
  const auto c = run(job);
  // The echoed thread count differs; the results do not.
  EXPECT_EQ(report(a)["results"], report(c)["results"]);
}

TEST_F(CliTest, NumbersUseSeventeenDigits) {
  nlohmann::ordered_json doc;
  doc["x"] = 0.1;
  doc["n"] = 3;
  doc["v"] = {1.0 / 3.0};
  const auto text = cli::serialize(doc);
  EXPECT_NE(text.find("0.10000000000000001"), std::string::npos) << text;
  EXPECT_NE(text.find("0.33333333333333331"), std::string::npos) << text;
  EXPECT_NE(text.find("\"n\": 3"), std::string::npos) << text;
}

TEST_F(CliTest, ThreadCapFromEnvironment) {
  ::setenv("CONGRUENT_TENSORS_THREADS", "2", 1);
  EXPECT_EQ(cli::effective_threads(8), 2u);
  EXPECT_EQ(cli::effective_threads(1), 1u);
  ::setenv("CONGRUENT_TENSORS_THREADS", "junk", 1);
  EXPECT_EQ(cli::effective_threads(8), 8u);
  ::unsetenv("CONGRUENT_TENSORS_THREADS");
}

TEST(CliParsers, OracleDocuments) {
  EXPECT_EQ(cli::parse_oracle(nlohmann::json::parse(R"({"type": "builtin", "name": "canonical", "degree": 4})"))
                .degree(),
            4);
  EXPECT_THROW(cli::parse_oracle(nlohmann::json::parse(R"({"type": "builtin", "name": "canonical"})")), Error);
  EXPECT_THROW(cli::parse_oracle(nlohmann::json::parse(
                   R"({"type": "linear-combination", "degree": 2, "terms": [{"partition": [[1]], "coefficient": 1}]})")),
               Error);
  EXPECT_THROW(cli::parse_oracle(nlohmann::json::parse(
                   R"({"type": "linear-combination", "degree": 2, "terms": [{"partition": [[1, 2]],
                       "coefficient": {"table": {"lambda": [2, 1], "values": [0, 0]}}}]})")),
               Error);
  const auto o = cli::resolve_oracle("builtin:fisher", std::nullopt, Rational(1, 2));
  EXPECT_EQ(o.degree(), 2);
  EXPECT_EQ(o.regularity(), Rational(1, 2));
}

TEST(CliParsers, Statistic) {
  const auto s = cli::parse_statistic(nlohmann::json::parse(R"({"map": [0, 2], "target_size": 4})"), std::nullopt);
  EXPECT_EQ(s.target_size(), 4u);
  EXPECT_EQ(cli::parse_statistic(nlohmann::json::parse("[1, 0, 1]"), std::nullopt).target_size(), 2u);
  EXPECT_THROW(cli::parse_statistic(nlohmann::json::parse("[-1]"), std::nullopt), Error);
}

}  // namespace
