#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "json.hpp"
#include "selr/csv_io.hpp"
#include "selr/error.hpp"
#include "selr/report.hpp"
#include "test_data.hpp"

#ifdef SELR_HAVE_CLI
#include "selr_cli/cli.hpp"
#endif

namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("selr_test_" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

selr::ErrorCode read_error(const std::string& text) {
  std::istringstream in(text);
  try {
    selr::read_csv(in, "mem");
  } catch (const selr::Error& e) {
    return e.code();
  }
  return selr::ErrorCode::InvalidArgument;
}

TEST(Csv, ReadsColumnsByName) {
  std::istringstream in("y,u,x1\n1.5,0.1,1\n-2,0.2,1\n3e-1,0.3,1\n");
  const auto d = selr::read_csv(in);
  EXPECT_EQ(d.n(), 3);
  EXPECT_EQ(d.p(), 1);
  EXPECT_DOUBLE_EQ(d.u[2], 0.3);
  EXPECT_DOUBLE_EQ(d.y[0], 1.5);
  EXPECT_DOUBLE_EQ(d.y[2], 0.3);
}

TEST(Csv, ReportsMissingColumns) {
  EXPECT_EQ(read_error("u,x1\n0.1,1\n"), selr::ErrorCode::MissingColumn);
  EXPECT_EQ(read_error("u,x2,y\n0.1,1,2\n"), selr::ErrorCode::MissingColumn);
  EXPECT_EQ(read_error(""), selr::ErrorCode::EmptyFile);
  EXPECT_EQ(read_error("u,x1,y\n"), selr::ErrorCode::EmptyFile);
}

TEST(Csv, ParseErrorNamesLineAndColumn) {
  std::istringstream in("u,x1,y\n0.1,1,2\n0.2,abc,3\n");
  try {
    selr::read_csv(in, "mem");
    FAIL();
  } catch (const selr::Error& e) {
    EXPECT_EQ(e.code(), selr::ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find("mem:3:2"), std::string::npos) << e.what();
  }
}

TEST(Csv, RejectsNonFiniteRowsWithLines) {
  std::istringstream in("u,x1,y\n0.1,1,2\n0.2,1,NaN\n0.3,1,4\n0.4,inf,1\n");
  try {
    selr::read_csv(in, "mem");
    FAIL();
  } catch (const selr::Error& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find('3'), std::string::npos) << what;
    EXPECT_NE(what.find('5'), std::string::npos) << what;
  }
}

TEST(Csv, RoundTripIsBitExact) {
  const auto d = selr::testing::random_dataset(50, 3, 5);
  TempDir dir;
  const auto path = dir.file("data.csv");
  selr::write_csv(path, d);
  const auto back = selr::ingest_csv(path);
  EXPECT_EQ(back.u, d.u);
  EXPECT_EQ(back.x, d.x);
  EXPECT_EQ(back.y, d.y);
  try {
    selr::ingest_csv(dir.file("missing.csv"));
    FAIL();
  } catch (const selr::Error& e) {
    EXPECT_EQ(e.code(), selr::ErrorCode::IoError);
  }
}

TEST(Report, SchemaFields) {
  selr::TestResult r;
  r.statistic = 1.25;
  r.scaled = 3.0;
  r.calibration.df = 4.0;
  r.p_asymptotic = 0.5;
  r.warnings = {"w"};
  r.per_point.push_back({0.5, 0.1, 0.0, 0.1, "converged"});
  selr::ReportContext ctx;
  ctx.kernel = "triweight";
  const auto doc = nlohmann::json::parse(selr::report_json(r, ctx));
  EXPECT_EQ(doc["schema_version"], selr::kReportSchemaVersion);
  for (const char* key : {"hypothesis", "kernel", "h", "statistic", "scaled", "df", "r_K", "c_K",
                          "p_asymptotic", "p_bootstrap", "B", "n_skipped", "per_point"}) {
    EXPECT_TRUE(doc.contains(key)) << key;
  }
  EXPECT_TRUE(doc["p_bootstrap"].is_null());
  EXPECT_EQ(doc["per_point"].size(), 1u);
  EXPECT_FALSE(doc.contains("timestamp"));
}

#ifdef SELR_HAVE_CLI

struct CliRun {
  int status = 0;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  CliRun r;
  r.status = selr::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string null_csv(const TempDir& dir, std::uint64_t seed, int n = 120) {
  const auto path = dir.file("null_" + std::to_string(seed) + ".csv");
  selr::write_csv(path, selr::testing::random_dataset(n, 1, seed));
  return path;
}

TEST(Cli, KernelConstants) {
  const auto r = cli({"kernel-constants", "--kernel", "uniform"});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("kstar0 1\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("r_K 2.837837838"), std::string::npos) << r.out;
}

TEST(Cli, ExitCodes) {
  TempDir dir;
  EXPECT_EQ(cli({"frobnicate"}).status, 2);
  EXPECT_EQ(cli({"test", "--h", "0.3"}).status, 2);
  EXPECT_EQ(cli({"kernel-constants", "--kernel", "gaussian"}).status, 2);
  {
    std::ofstream bad(dir.file("bad.csv"));
    bad << "u,x1\n0.1,1\n";
  }
  const auto missing = cli({"test", "--input", dir.file("bad.csv"), "--h", "0.3"});
  EXPECT_EQ(missing.status, 3);
  EXPECT_NE(missing.err.find("MissingColumn"), std::string::npos);
  const auto tiny = cli({"test", "--input", null_csv(dir, 1), "--h", "1e-6"});
  EXPECT_EQ(tiny.status, 4) << tiny.err;
  EXPECT_EQ(cli({"test", "--input", null_csv(dir, 1), "--h", "0.3", "--null", "composite"}).status,
            2);
}

TEST(Cli, TestReportIsJson) {
  TempDir dir;
  const auto r = cli({"test", "--input", null_csv(dir, 3), "--h", "0.3", "--per-point"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["hypothesis"], "simple_null");
  EXPECT_EQ(doc["per_point"].size(), 120u);
  EXPECT_GE(doc["p_asymptotic"].get<double>(), 0.0);
  EXPECT_LE(doc["p_asymptotic"].get<double>(), 1.0);
}

TEST(Cli, SameSeedGivesIdenticalReports) {
  TempDir dir;
  const auto input = null_csv(dir, 4, 60);
  const auto out1 = dir.file("a.json");
  const auto out2 = dir.file("b.json");
  const std::vector<std::string> base = {"test", "--input", input, "--h", "0.35", "--bootstrap",
                                         "19", "--seed", "99"};
  auto a = base;
  a.insert(a.end(), {"--output", out1});
  auto b = base;
  b.insert(b.end(), {"--output", out2, "--threads", "3"});
  ASSERT_EQ(cli(a).status, 0);
  ASSERT_EQ(cli(b).status, 0);
  EXPECT_EQ(slurp(out1), slurp(out2));
  EXPECT_TRUE(fs::exists(out1 + ".meta.json"));
  const auto doc = nlohmann::json::parse(slurp(out1));
  EXPECT_EQ(doc["seed"], 99);
  EXPECT_EQ(doc["B"], 19);
}

TEST(Cli, MissingSeedIsDrawnAndPrinted) {
  TempDir dir;
  const auto r = cli({"test", "--input", null_csv(dir, 5, 50), "--h", "0.35", "--bootstrap", "5"});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(r.err.rfind("seed: ", 0), 0u) << r.err;
}

TEST(Cli, ConfigFileFlagsWin) {
  TempDir dir;
  const auto input = null_csv(dir, 6);
  {
    std::ofstream cfg(dir.file("run.cfg"));
    cfg << "# defaults\ninput = " << input << "\nh = 0.5\nkernel=epanechnikov\n";
  }
  const auto from_file = cli({"test", "--config", dir.file("run.cfg")});
  ASSERT_EQ(from_file.status, 0) << from_file.err;
  const auto overridden = cli({"test", "--config", dir.file("run.cfg"), "--h", "0.3"});
  ASSERT_EQ(overridden.status, 0) << overridden.err;
  const auto a = nlohmann::json::parse(from_file.out);
  const auto b = nlohmann::json::parse(overridden.out);
  EXPECT_DOUBLE_EQ(a["h"].get<double>(), 0.5);
  EXPECT_DOUBLE_EQ(b["h"].get<double>(), 0.3);
  EXPECT_EQ(b["kernel"], "epanechnikov");
  {
    std::ofstream cfg(dir.file("broken.cfg"));
    cfg << "this line has no equals sign\n";
  }
  EXPECT_EQ(cli({"test", "--config", dir.file("broken.cfg")}).status, 2);
}

TEST(Cli, SimulateTable1Row) {
  const auto r = cli({"simulate", "--table1", "--n", "200", "--c0", "1", "--c1", "0", "--reps",
                      "20", "--seed", "7"});
  ASSERT_EQ(r.status, 0) << r.err;
  std::istringstream lines(r.out);
  std::string header, row, extra;
  std::getline(lines, header);
  std::getline(lines, row);
  EXPECT_EQ(header, "n,h,variance,mu,sigma,reps,failures");
  EXPECT_EQ(row.rfind("200,0.308077", 0), 0u) << row;
  EXPECT_FALSE(std::getline(lines, extra));
  EXPECT_EQ(cli({"simulate", "--table1", "--n", "200", "--reps", "20", "--seed", "7"}).out, r.out);
}

TEST(Cli, SimulatePowerWritesArtifacts) {
  TempDir dir;
  const auto r = cli({"simulate", "--power", "--n", "60", "--c1", "0,100", "--reps", "20",
                      "--r-grid", "0,1", "--seed", "3", "--output-dir", dir.file("out")});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir.file("out/power.csv")));
  const auto plot = slurp(dir.file("out/power_plot.dat"));
  EXPECT_NE(plot.find("# series: n=60 variance=1\n"), std::string::npos) << plot;
  EXPECT_NE(plot.find("# series: n=60 variance=1+100u^2\n"), std::string::npos) << plot;
  const auto manifest = nlohmann::json::parse(slurp(dir.file("out/manifest.json")));
  EXPECT_EQ(manifest["configs"].size(), 2u);
}

TEST(Cli, CompositeAndParametricNulls) {
  TempDir dir;
  const auto path = dir.file("p2.csv");
  selr::write_csv(path, selr::testing::random_dataset(150, 2, 8));
  const auto comp = cli({"test", "--input", path, "--h", "0.35", "--null", "composite", "--fixed",
                         "2", "--fixed-value", "0"});
  ASSERT_EQ(comp.status, 0) << comp.err;
  EXPECT_EQ(nlohmann::json::parse(comp.out)["hypothesis"], "composite_null");
  const auto par = cli({"test", "--input", path, "--h", "0.35", "--null", "parametric:linear"});
  ASSERT_EQ(par.status, 0) << par.err;
  EXPECT_EQ(nlohmann::json::parse(par.out)["theta_hat"].size(), 4u);
}

TEST(Cli, BandwidthSelection) {
  TempDir dir;
  const auto r = cli({"bandwidth", "--input", null_csv(dir, 10), "--grid", "0.2,0.3,0.4"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["grid"].size(), 3u);
}

TEST(Cli, BootstrapPValuesRoughlyUniform) {
  TempDir dir;
  int small = 0;
  const int datasets = 50;
  for (int k = 0; k < datasets; ++k) {
    const auto input = null_csv(dir, 300 + k, 40);
    const auto r = cli({"test", "--input", input, "--null", "zero", "--g", "identity", "--h",
                        "0.25", "--bootstrap", "99", "--scheme", "wild", "--seed",
                        std::to_string(k + 1)});
    ASSERT_EQ(r.status, 0) << r.err;
    if (nlohmann::json::parse(r.out)["p_bootstrap"].get<double>() <= 0.1) ++small;
  }
  EXPECT_NEAR(small / double(datasets), 0.1, 0.08);
}

#endif

}  // namespace
