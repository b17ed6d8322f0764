#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "config.hpp"
#include "qfb/csv.hpp"

namespace fs = std::filesystem;
using namespace qfb::cli;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "qfb");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    rows.push_back(fields);
  }
  return rows;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("qfb_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

}  // namespace

TEST(CliTest, Fig1Defaults) {
  const CliRun r = invoke({"--experiment", "fig1"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 182u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"theta", "i_f_p", "n_e_p", "n_e_v"}));
  EXPECT_EQ(std::stod(rows[1][2]), 0.0);
  EXPECT_NEAR(std::stod(rows[1][1]), 47.0 / 56.0, 1e-12);
  EXPECT_NEAR(std::stod(rows[91][0]), M_PI / 2, 1e-15);
  EXPECT_NEAR(std::stod(rows[91][1]), 0.865, 1e-12);
  EXPECT_NEAR(std::stod(rows[91][2]), 0.08, 1e-12);
  double best = 0.0;
  std::size_t arg = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (std::stod(rows[i][1]) > best) {
      best = std::stod(rows[i][1]);
      arg = i;
    }
  }
  EXPECT_EQ(arg, 91u);
}

TEST(CliTest, Fig1NoInformationMeasurement) {
  const CliRun r = invoke({"-e", "fig1", "--kappa", "0.5", "--theta-points", "7"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 8u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_NEAR(std::stod(rows[i][1]), 0.82, 1e-14);
    EXPECT_NEAR(std::stod(rows[i][2]), 0.0, 1e-14);
    EXPECT_NEAR(std::stod(rows[i][3]), 0.0, 1e-14);
  }
}

TEST_F(CliFiles, Fig2SmokeRunWritesManifest) {
  const fs::path out = dir_ / "fig2.csv";
  const CliRun r = invoke({"-e", "fig2", "--realizations", "4", "--t-end", "0.05", "--seed", "9",
                     "--out", out.string()});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto rows = parse_csv(slurp(out));
  ASSERT_EQ(rows.size(), 10u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"theta", "purity_mean", "purity_se",
                                               "overlap_mean", "overlap_se"}));
  EXPECT_NEAR(std::stod(rows[9][0]), M_PI / 2, 1e-15);
  const std::string manifest = slurp(dir_ / "fig2.csv.manifest");
  EXPECT_NE(manifest.find("experiment = fig2"), std::string::npos);
  EXPECT_NE(manifest.find("config.ensemble.realizations = 4"), std::string::npos);
  EXPECT_NE(manifest.find("config.seed = 9"), std::string::npos);
  EXPECT_NE(manifest.find("config.feedback.mu = 10"), std::string::npos);
  EXPECT_NE(manifest.find("duration_seconds = "), std::string::npos);
  EXPECT_NE(manifest.find("summary.theta_at_purity_max = "), std::string::npos);
}

TEST_F(CliFiles, Fig2BytesIndependentOfThreads) {
  const fs::path a = dir_ / "a.csv";
  const fs::path b = dir_ / "b.csv";
  const std::vector<std::string> common{"-e", "fig2", "--realizations", "40", "--t-end", "0.05",
                                        "--theta-points", "3"};
  std::vector<std::string> one = common;
  one.insert(one.end(), {"--threads", "1", "--out", a.string()});
  std::vector<std::string> many = common;
  many.insert(many.end(), {"--threads", "8", "--out", b.string()});
  ASSERT_EQ(invoke(one).code, kOk);
  ASSERT_EQ(invoke(many).code, kOk);
  EXPECT_EQ(slurp(a), slurp(b));
}

TEST(CliTest, TrajectoryColumns) {
  const CliRun r = invoke({"-e", "trajectory", "--t-end", "0.01", "--stride", "5"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 22u);
  EXPECT_EQ(rows[0].size(), 12u);
  EXPECT_EQ(rows[0][0], "t");
  EXPECT_EQ(rows[0][1], "rho_00_re");
  EXPECT_EQ(rows[0][11], "dy");
  EXPECT_EQ(rows[1][11], "");
  EXPECT_NE(rows[2][11], "");
}

TEST(CliTest, ZenoTable) {
  const CliRun r = invoke({"-e", "zeno", "--m-list", "1,2,50", "--runs", "2000"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[1][0], "1");
  EXPECT_EQ(rows[1][2], "0");
  EXPECT_EQ(std::stod(rows[1][3]), 0.0);
  EXPECT_NEAR(std::stod(rows[3][6]), 0.9519, 1e-4);
  const double lo = std::stod(rows[2][4]);
  const double hi = std::stod(rows[2][5]);
  EXPECT_LT(lo, 0.25);
  EXPECT_GT(hi, 0.25);
}

TEST(CliTest, RatesTable) {
  const CliRun r = invoke({"-e", "rates", "--k-list", "0,1", "--set", "rates.realizations=2000"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t c = 1; c < 5; ++c) EXPECT_EQ(std::stod(rows[1][c]), 0.0);
  EXPECT_EQ(std::stod(rows[1][5]), 0.0);
  EXPECT_NEAR(std::stod(rows[2][5]), 64.0, 1e-12);
  EXPECT_NEAR(std::stod(rows[2][1]), 16.0, 2.0);
}

TEST_F(CliFiles, ConfigFileWithFlagOverride) {
  const fs::path cfg = dir_ / "run.cfg";
  std::ofstream(cfg) << "# fig1 settings\nexperiment = fig1\nmeasurement.kappa = 0.5\n"
                        "sweep.theta_points = 5   # short\n";
  const CliRun from_file = invoke({"--config", cfg.string()});
  ASSERT_EQ(from_file.code, kOk) << from_file.err;
  EXPECT_EQ(parse_csv(from_file.out).size(), 6u);
  EXPECT_NEAR(std::stod(parse_csv(from_file.out)[3][1]), 0.82, 1e-14);

  const CliRun overridden = invoke({"--config", cfg.string(), "--kappa", "0.75"});
  ASSERT_EQ(overridden.code, kOk);
  EXPECT_NEAR(std::stod(parse_csv(overridden.out)[3][1]), 0.865, 1e-12);
}

TEST_F(CliFiles, ErrorExitCodes) {
  EXPECT_EQ(invoke({"-e", "fig2", "--mu", "-1"}).code, kConfigError);
  EXPECT_EQ(invoke({"-e", "nonsense"}).code, kConfigError);
  EXPECT_EQ(invoke({}).code, kConfigError);
  EXPECT_EQ(invoke({"-e", "fig1", "--bogus", "1"}).code, kConfigError);
  EXPECT_EQ(invoke({"-e", "fig1", "--set", "measurement.unknown=1"}).code, kConfigError);
  EXPECT_EQ(invoke({"-e", "fig1", "--p", "abc"}).code, kConfigError);
  EXPECT_EQ(invoke({"-e", "fig1", "--p", "1.5"}).code, kConfigError);
  EXPECT_EQ(invoke({"-e", "fig2", "--dt", "0.3"}).code, kConfigError);
  EXPECT_EQ(invoke({"--config", (dir_ / "missing.cfg").string()}).code, kIoError);
  EXPECT_EQ(invoke({"-e", "fig1", "--out", (dir_ / "no" / "such" / "dir.csv").string()}).code,
            kIoError);

  const CliRun failure = invoke({"-e", "fig2", "--realizations", "2", "--dt", "0.02", "--k", "50",
                           "--seed", "31", "--out", (dir_ / "f.csv").string()});
  EXPECT_EQ(failure.code, kNumericalFailure);
  EXPECT_NE(failure.err.find("master seed 31"), std::string::npos) << failure.err;
}

TEST(CliTest, StiffnessWarning) {
  const CliRun r = invoke({"-e", "trajectory", "--dt", "0.01", "--t-end", "0.02", "--k", "10"});
  EXPECT_NE(r.err.find("warning"), std::string::npos);
}

TEST(ParamsTest, ParsingAndEcho) {
  Params p = Params::parse("a = 1\n# comment\nb = pi\nlist = 1, 2,3\nname = sigma_z\n", "test");
  EXPECT_EQ(p.integer("a", 0), 1);
  EXPECT_DOUBLE_EQ(p.real("b", 0.0), M_PI);
  EXPECT_EQ(p.integers("list", {}), (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(p.text("name", ""), "sigma_z");
  EXPECT_EQ(p.real("fallback", 2.5), 2.5);
  EXPECT_EQ(p.echo().at("a"), "1");
  EXPECT_NO_THROW(p.reject_unused());
  p.set("extra", "1");
  EXPECT_THROW(p.reject_unused(), ConfigError);
  EXPECT_THROW(Params::parse("novalue\n", "test"), ConfigError);
  Params bad = Params::parse("x = 1.5\n", "test");
  EXPECT_THROW(bad.integer("x", 0), ConfigError);
  EXPECT_THROW(parse_real("1.0abc", "x"), ConfigError);
}

TEST(CsvTest, NumberFormatting) {
  EXPECT_EQ(qfb::csv::number(0.1), "0.10000000000000001");
  EXPECT_EQ(qfb::csv::number(0.0), "0");
  EXPECT_EQ(qfb::csv::number(-2.5), "-2.5");
  EXPECT_EQ(qfb::csv::number(std::nan("")), "nan");
  EXPECT_EQ(qfb::csv::number(-INFINITY), "-inf");
  EXPECT_EQ(qfb::csv::number(std::optional<double>{}), "");
  std::ostringstream os;
  qfb::csv::write_row(os, {"a", "", "c"});
  EXPECT_EQ(os.str(), "a,,c\n");
}
