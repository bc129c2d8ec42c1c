#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "capelast/error.hpp"
#include "capelast/field_io.hpp"
#include "cli.hpp"

namespace fs = std::filesystem;
using capelast::cli::run;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("capelast_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string config(const std::string& name) { return std::string(CAPELAST_CONFIG_DIR) + "/" + name; }

std::size_t line_count(const fs::path& p) {
  std::ifstream is(p);
  std::size_t n = 0;
  for (std::string line; std::getline(is, line);) ++n;
  return n;
}

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
  EXPECT_EQ(invoke({"simulate"}).code, 2);
  EXPECT_EQ(invoke({"simulate", "--config", "/nonexistent.ini", "--out", "/tmp/x"}).code, 2);
  EXPECT_EQ(invoke({"verify", "--suite", "bogus"}).code, 2);
  EXPECT_EQ(invoke({"verify", "--suite", "alinhac", "--history", "2", "--nx", "8", "--ny", "8", "--nz", "9"}).code, 2);
  EXPECT_EQ(invoke({"sweep-sigma", "--config", config("rest.ini"), "--sigmas", "0.1,0.2"}).code, 2);
}

TEST(Cli, HelpExitsCleanly) {
  const Outcome o = invoke({"--help"});
  EXPECT_EQ(o.code, 0);
  EXPECT_NE((o.out + o.err).find("simulate"), std::string::npos);
}

TEST(Cli, SimulateWritesArtifacts) {
  const fs::path dir = scratch("simulate");
  const Outcome o = invoke({"simulate", "--config", config("capillary.ini"), "--out", dir.string(), "--nx", "16",
                            "--ny", "16", "--nz", "9", "--snapshot-every", "5"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_TRUE(fs::exists(dir / "config.ini"));
  EXPECT_EQ(line_count(dir / "diagnostics.csv"), 12u);  // header + steps 0..10
  const fs::path snap = dir / "snapshots" / "step_000010";
  ASSERT_TRUE(fs::exists(snap / "psi.bin"));
  const capelast::FieldDump psi = capelast::read_field(snap / "psi.bin");
  EXPECT_EQ(psi.nx, 16);
  EXPECT_EQ(psi.nz, 1);
  const capelast::FieldDump f = capelast::read_field(snap / "F11.bin");
  EXPECT_EQ(f.nz, 9);
  EXPECT_TRUE(fs::exists(dir / "snapshots" / "step_000005" / "v3.bin"));

  std::ifstream is(dir / "manifest.json");
  const nlohmann::json m = nlohmann::json::parse(is);
  EXPECT_EQ(m["nx"], 16);
  EXPECT_EQ(m["steps"], 10);
  EXPECT_EQ(m["aborted"], false);
  EXPECT_EQ(m["snapshots"].size(), 3u);
  fs::remove_all(dir);
}

TEST(Cli, SimulateReportsAbort) {
  const fs::path dir = scratch("abort");
  const Outcome o =
      invoke({"simulate", "--config", config("capillary.ini"), "--out", dir.string(), "--nx", "16", "--ny", "16",
              "--nz", "9", "--dt", "0.5"});
  EXPECT_EQ(o.code, 1);
  std::ifstream is(dir / "manifest.json");
  const nlohmann::json m = nlohmann::json::parse(is);
  EXPECT_EQ(m["aborted"], true);
  fs::remove_all(dir);
}

TEST(Cli, VerifySuitesPass) {
  for (const std::string suite : {"operators", "lemmas", "elliptic"}) {
    const Outcome o = invoke({"verify", "--suite", suite});
    EXPECT_EQ(o.code, 0) << suite << '\n' << o.out << o.err;
    EXPECT_EQ(o.out.rfind("identity,alpha,resolution,residual,tolerance,status\n", 0), 0u);
    EXPECT_EQ(o.out.find(",FAIL"), std::string::npos);
  }
}

TEST(Cli, VerifyWritesCsvFile) {
  const fs::path dir = scratch("verify");
  EXPECT_EQ(invoke({"verify", "--suite", "operators", "--nx", "16", "--ny", "16", "--nz", "13", "--out",
                    dir.string()}).code,
            0);
  EXPECT_GT(line_count(dir / "verify_operators.csv"), 10u);
  fs::remove_all(dir);
}

TEST(Cli, SweepOnRestData) {
  const fs::path dir = scratch("sweep");
  const Outcome o = invoke({"sweep-sigma", "--config", config("rest.ini"), "--sigmas", "0.1,0.01,0", "--out",
                            dir.string(), "--jobs", "2"});
  EXPECT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(line_count(dir / "sweep.csv"), 3u);
  EXPECT_EQ(line_count(dir / "limit.csv"), 3u);
  EXPECT_TRUE(fs::exists(dir / "summary.txt"));
  fs::remove_all(dir);
}
