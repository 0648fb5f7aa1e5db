#include <gtest/gtest.h>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "zagff/cli/cli.hpp"

namespace zagff::cli {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("zagff_cli_" + std::to_string(::getpid()) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  int invoke(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return run(args, out_, err_);
  }
  std::string dir(const std::string& name) const { return (root_ / name).string(); }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  static std::map<std::string, std::string> tree(const fs::path& p) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::directory_iterator(p)) files[e.path().filename().string()] = slurp(e.path());
    return files;
  }

  fs::path root_;
  std::ostringstream out_, err_;
};

TEST_F(CliTest, GreensTableAtN3) {
  ASSERT_EQ(invoke({"greens", "--d", "3", "--n", "3", "--out", dir("g")}), 0);
  std::istringstream table(slurp(root_ / "g" / "green_table_n3.csv"));
  std::string header, first;
  std::getline(table, header);
  std::getline(table, first);
  EXPECT_EQ(header, "x1,x2,x3,G_value");
  EXPECT_NEAR(std::stod(first.substr(first.rfind(',') + 1)), 1.0864198, 1e-7);
  EXPECT_TRUE(fs::exists(root_ / "g" / "decay_profile_n3.csv"));
  const auto report = Json::parse(slurp(root_ / "g" / "report.json"));
  EXPECT_EQ(report["schema_version"], kSchemaVersion);
}

TEST_F(CliTest, GreensConvergenceGapsDecrease) {
  ASSERT_EQ(invoke({"greens", "--d", "3", "--n-list", "4,8,16", "--out", dir("g")}), 0);
  std::istringstream csv(slurp(root_ / "g" / "convergence.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "n,v_n,v,gap,bound");
  std::vector<double> gaps;
  while (std::getline(csv, line)) {
    std::vector<std::string> cols;
    std::stringstream row(line);
    for (std::string c; std::getline(row, c, ',');) cols.push_back(c);
    ASSERT_EQ(cols.size(), 5u);
    gaps.push_back(std::stod(cols[3]));
  }
  ASSERT_EQ(gaps.size(), 3u);
  EXPECT_GT(gaps[0], gaps[1]);
  EXPECT_GT(gaps[1], gaps[2]);
}

TEST_F(CliTest, UnsupportedDimensionIsUsageError) {
  EXPECT_EQ(invoke({"greens", "--d", "2", "--n", "8", "--out", dir("g")}), 2);
  const auto err = Json::parse(err_.str());
  EXPECT_EQ(err["error"]["kind"], "unsupported-dimension");
  EXPECT_FALSE(fs::exists(root_ / "g"));
  EXPECT_EQ(invoke({"greens", "--bogus"}), 2);
  EXPECT_EQ(Json::parse(err_.str())["error"]["kind"], "usage");
  EXPECT_EQ(invoke({}), 2);
}

TEST_F(CliTest, VerifyPassesAndDetectsInjectedFault) {
  ASSERT_EQ(invoke({"verify", "--out", dir("v")}), 0);
  const auto j = Json::parse(slurp(root_ / "v" / "report.json"));
  const VerifyReport report = verify_report_from_json(j);
  EXPECT_TRUE(report.all_passed);
  EXPECT_EQ(report.n_list, (std::vector<int>{4, 5}));
  for (const auto& c : report.checks) {
    if (c.group != "spatial-markov-zd") EXPECT_LE(c.residual, 1e-8) << c.name;
  }
  EXPECT_EQ(to_json(report), j);
  EXPECT_EQ(to_json(report).dump(2) + "\n", slurp(root_ / "v" / "report.json"));

  EXPECT_EQ(invoke({"verify", "--inject-fault", "--out", dir("vf")}), 1);
  const auto faulty = verify_report_from_json(Json::parse(slurp(root_ / "vf" / "report.json")));
  EXPECT_FALSE(faulty.all_passed);
  EXPECT_TRUE(faulty.fault_injected);
}

TEST_F(CliTest, VerifySchemaRejectsMalformedReports) {
  EXPECT_THROW(verify_report_from_json(Json::parse(R"({"schema_version": 1})")), UsageError);
  EXPECT_THROW(verify_report_from_json(Json::parse(R"({"schema_version": 99, "command": "verify"})")), UsageError);
}

TEST_F(CliTest, ExtremesIsByteIdenticalAcrossRunsAndWorkers) {
  const std::vector<std::string> base = {"extremes", "--d", "3", "--n", "24", "--replicates", "2000", "--seed", "7"};
  auto with_out = [&](const std::string& name) {
    auto args = base;
    args.push_back("--out");
    args.push_back(dir(name));
    return args;
  };
  setenv("ZAGFF_THREADS", "1", 1);
  ASSERT_EQ(invoke(with_out("a")), 0);
  setenv("ZAGFF_THREADS", "4", 1);
  ASSERT_EQ(invoke(with_out("b")), 0);
  unsetenv("ZAGFF_THREADS");
  const auto a = tree(root_ / "a");
  EXPECT_EQ(a, tree(root_ / "b"));
  for (const char* f : {"config.json", "report.json", "maxima.csv", "counts.csv"}) EXPECT_TRUE(a.count(f)) << f;

  std::istringstream maxima(a.at("maxima.csv"));
  std::string line;
  int rows = -1;
  while (std::getline(maxima, line)) ++rows;
  EXPECT_EQ(rows, 2000);

  const auto report = Json::parse(a.at("report.json"));
  EXPECT_EQ(report["schema_version"], kSchemaVersion);
  EXPECT_TRUE(report["gumbel"].contains("ks"));
  EXPECT_TRUE(report["poisson"][0].contains("dispersion"));
  EXPECT_TRUE(report["poisson"][0].contains("mean"));
  EXPECT_TRUE(report["laplace"][0].contains("empirical"));
  EXPECT_TRUE(report["laplace"][0].contains("limit"));
  EXPECT_TRUE(report["boundary"].is_array());
}

TEST_F(CliTest, OutputDirectoryIsNotOverwritten) {
  ASSERT_EQ(invoke({"sample", "--n", "4", "--out", dir("s")}), 0);
  EXPECT_EQ(invoke({"sample", "--n", "4", "--out", dir("s")}), 2);
  EXPECT_EQ(Json::parse(err_.str())["error"]["kind"], "io");
  EXPECT_EQ(invoke({"sample", "--n", "4", "--out", dir("s"), "--force"}), 0);
}

TEST_F(CliTest, SampleWritesFieldsAndPatterns) {
  ASSERT_EQ(invoke({"sample", "--n", "4", "--replicates", "3", "--seed", "5", "--format", "csv", "--out", dir("s")}),
            0);
  const auto files = tree(root_ / "s");
  EXPECT_TRUE(files.count("field_00002.csv"));
  EXPECT_TRUE(files.count("pattern_00000.csv"));
  const auto report = Json::parse(files.at("report.json"));
  EXPECT_EQ(report["fields"].size(), 3u);
  ASSERT_EQ(invoke({"sample", "--n", "4", "--replicates", "3", "--seed", "5", "--format", "csv", "--out", dir("t")}),
            0);
  EXPECT_EQ(files, tree(root_ / "t"));
}

TEST_F(CliTest, ConfigFileWithFlagOverride) {
  {
    std::ofstream cfg(root_ / "cfg.json");
    cfg << R"({"d": 3, "n": 12, "replicates": 150, "seed": 3, "deltas": [0.0, 1.0], "split": "2x2x1"})";
  }
  ASSERT_EQ(invoke({"extremes", "--config", (root_ / "cfg.json").string(), "--seed", "4", "--out", dir("e")}), 0);
  const auto resolved = Json::parse(slurp(root_ / "e" / "config.json"));
  EXPECT_EQ(resolved["n"], 12);
  EXPECT_EQ(resolved["seed"], 4);
  EXPECT_EQ(resolved["replicates"], 150);
  EXPECT_EQ(resolved["split"], (std::vector<int>{2, 2, 1}));
  EXPECT_EQ(resolved["deltas"].size(), 2u);
  // The resolved config replays to the same outputs.
  ASSERT_EQ(invoke({"extremes", "--config", (root_ / "e" / "config.json").string(), "--out", dir("f")}), 0);
  EXPECT_EQ(tree(root_ / "e"), tree(root_ / "f"));

  {
    std::ofstream bad(root_ / "bad.json");
    bad << R"({"d": 3, "colour": "blue"})";
  }
  EXPECT_EQ(invoke({"extremes", "--config", (root_ / "bad.json").string(), "--out", dir("x")}), 2);
}

TEST_F(CliTest, ExtremesValidation) {
  EXPECT_EQ(invoke({"extremes", "--n", "24", "--replicates", "50", "--out", dir("x")}), 2);
  EXPECT_EQ(invoke({"extremes", "--n", "24", "--split", "5x1x1", "--out", dir("x")}), 2);
  EXPECT_EQ(invoke({"extremes", "--n", "24", "--delta", "-20", "--out", dir("x")}), 2);
}

}  // namespace
}  // namespace zagff::cli
