#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "json.hpp"
#include "spb/bounds.hpp"
#include "spb/matrix_io.hpp"

namespace fs = std::filesystem;
using spb::cli::run_cli;

namespace {

struct CliRun {
  int code;
  std::string out, err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("spb_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, GenLowRankClosedForm) {
  const CliRun r = run({"gen", "low-rank", "--n", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "4,4\n0.5,0.5,0,0\n0.5,0.5,0,0\n0,0,0.5,0.5\n0,0,0.5,0.5\n");
}

TEST_F(CliTest, BoundZeroPerturbation) {
  ASSERT_EQ(run({"gen", "low-rank", "--n", "16", "--out", path("a.csv")}).code, 0);
  ASSERT_EQ(run({"gen", "low-rank", "--n", "16", "--part", "e", "--sigma", "0", "--out", path("e.csv")}).code, 0);
  const CliRun r = run({"bound", "--a", path("a.csv"), "--e", path("e.csv"), "--r", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["total"].get<double>(), 0.0);
  EXPECT_TRUE(j["assumptions_ok"].get<bool>());
}

TEST_F(CliTest, BoundCoherentGapAndCsv) {
  ASSERT_EQ(run({"gen", "coherent", "--n", "256", "--out", path("a.csv")}).code, 0);
  ASSERT_EQ(run({"gen", "coherent", "--n", "256", "--part", "e", "--sigma-exp", "1", "--seed", "5",
                 "--matrix-format", "binary", "--out", path("e.bin")})
                .code,
            0);
  const CliRun r = run({"bound", "--a", path("a.csv"), "--e", path("e.bin"), "--r", "2", "--observe"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["gap_used"].get<double>(), 2.0, 1e-12);
  EXPECT_LE(j["observed_error"].get<double>(), j["total"].get<double>());
  const CliRun csv = run({"bound", "--a", path("a.csv"), "--e", path("e.bin"), "--r", "2", "--format", "csv"});
  ASSERT_EQ(csv.code, 0);
  EXPECT_EQ(csv.out.substr(0, csv.out.find('\n')), spb::bound_report_csv_header());
}

TEST_F(CliTest, BoundAssumptionFailureExitsTwo) {
  ASSERT_EQ(run({"gen", "low-rank", "--n", "32", "--out", path("a.csv")}).code, 0);
  ASSERT_EQ(run({"gen", "low-rank", "--n", "32", "--part", "e", "--sigma", "0.5", "--out", path("e.csv")}).code, 0);
  const CliRun r = run({"bound", "--a", path("a.csv"), "--e", path("e.csv"), "--r", "2"});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(nlohmann::json::parse(r.out)["assumptions_ok"].get<bool>());
  EXPECT_FALSE(r.err.empty());
}

TEST_F(CliTest, MalformedInputExitsOne) {
  std::ofstream(path("bad.csv")) << "2,2\n1,2\n";
  ASSERT_EQ(run({"gen", "low-rank", "--n", "4", "--out", path("a.csv")}).code, 0);
  const CliRun r = run({"bound", "--a", path("a.csv"), "--e", path("bad.csv"), "--r", "1"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("error"), std::string::npos);
  EXPECT_EQ(run({"bound", "--a", path("missing.csv"), "--e", path("a.csv"), "--r", "1"}).code, 1);
  EXPECT_EQ(run({"gen", "low-rank", "--n", "4", "--bogus"}).code, 1);
  EXPECT_EQ(run({"gen", "low-rank", "--n", "5"}).code, 1);
}

TEST_F(CliTest, NewtonZeroPerturbation) {
  ASSERT_EQ(run({"gen", "low-rank", "--n", "8", "--out", path("a.csv")}).code, 0);
  ASSERT_EQ(run({"gen", "low-rank", "--n", "8", "--part", "e", "--sigma", "0", "--out", path("e.csv")}).code, 0);
  const CliRun r = run({"newton", "--a", path("a.csv"), "--e", path("e.csv"), "--r", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  const spb::Matrix x = spb::read_matrix_csv(in);
  EXPECT_EQ(x.rows(), 6);
  EXPECT_EQ(x.cols(), 2);
  EXPECT_EQ(x.norm(), 0.0);
}

TEST_F(CliTest, NewtonInvalidCertificateExitsTwo) {
  ASSERT_EQ(run({"gen", "low-rank", "--n", "8", "--out", path("a.csv")}).code, 0);
  ASSERT_EQ(run({"gen", "low-rank", "--n", "8", "--part", "e", "--sigma", "2", "--out", path("e.csv")}).code, 0);
  EXPECT_EQ(run({"newton", "--a", path("a.csv"), "--e", path("e.csv"), "--r", "2", "--check-certificate"}).code, 2);
}

TEST_F(CliTest, SepProbeOnSepExample) {
  for (int n : {4, 16, 64}) {
    const std::string ns = std::to_string(n);
    ASSERT_EQ(run({"gen", "sep-example", "--n", ns, "--out", path("a.csv")}).code, 0);
    ASSERT_EQ(run({"gen", "sep-example", "--n", ns, "--part", "probe", "--out", path("q.csv")}).code, 0);
    const CliRun r = run({"sep", "--a", path("a.csv"), "--r", "1", "--probe", path("q.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_LE(j["sep2inf_upper_probe"].get<double>(), 3.0 / std::sqrt(double(n)) + 1e-12);
    EXPECT_GE(j["sep2inf_lower"].get<double>(), 1.0 / std::sqrt(double(n + 1)) - 1e-12);
    EXPECT_NEAR(j["sepF"].get<double>(), 1.0, 1e-12);
  }
}

TEST_F(CliTest, SweepDeterministicAndAtomic) {
  const std::vector<std::string> args{"sweep", "--family", "low-rank", "--n-list", "32,64,128", "--trials", "3",
                                      "--sigma-exp", "1", "--svg", "--out", path("run")};
  const CliRun first = run(args);
  ASSERT_EQ(first.code, 0) << first.err;
  const std::string csv = slurp(path("run.csv"));
  const std::string js = slurp(path("run.json"));
  const std::string svg = slurp(path("run.svg"));
  ASSERT_FALSE(csv.empty());
  ASSERT_EQ(run(args).code, 0);
  EXPECT_EQ(slurp(path("run.csv")), csv);
  EXPECT_EQ(slurp(path("run.json")), js);
  EXPECT_EQ(slurp(path("run.svg")), svg);

  const CliRun plot = run({"plot", "--in", path("run.csv"), "--family", "low-rank"});
  ASSERT_EQ(plot.code, 0) << plot.err;
  EXPECT_EQ(plot.out, svg);

  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir_)) {
    (void)e;
    ++files;
  }
  EXPECT_EQ(files, 3u);
}

TEST_F(CliTest, SweepFailuresWriteNothing) {
  EXPECT_EQ(run({"sweep", "--preset", "fig9", "--out", path("x")}).code, 1);
  EXPECT_EQ(run({"sweep", "--family", "low-rank", "--n-list", "33", "--out", path("y")}).code, 1);
  EXPECT_TRUE(fs::is_empty(dir_));
}

TEST_F(CliTest, DefaultSeedIsFixed) {
  const CliRun a = run({"gen", "low-rank", "--n", "8", "--part", "e", "--sigma", "1"});
  const CliRun b = run({"gen", "low-rank", "--n", "8", "--part", "e", "--sigma", "1", "--seed", "1"});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(spb::cli::kDefaultSeed, 1u);
}
