#include "entmix/boxworld.hpp"
#include "entmix/cli.hpp"
#include "entmix/harness.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace entmix {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Run {
  int status;
  std::string out;
  std::string err;
  json body() const { return json::parse(out); }
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int status = run_cli(args, out, err);
  return {status, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(ENTMIX_TEST_DATA_DIR) + "/" + name; }

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("entmix_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(Cli, MoreMixedExample) {
  const auto r = run({"more-mixed", "--system", "classical:2", "--rho", "0.7,0.3", "--sigma", "0.5,0.5"});
  ASSERT_EQ(r.status, kExitOk) << r.err;
  const auto j = r.body();
  EXPECT_TRUE(j["more_mixed"].get<bool>());
  double total = 0;
  for (const auto& w : j["weights"]) total += w["weight"].get<double>();
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_NEAR(j["weights"][0]["weight"].get<double>(), 0.5, 1e-12);
}

TEST(Cli, CheckLocexOnPrBox) {
  const auto r = run({"check-locex", "--box", "pr"});
  ASSERT_EQ(r.status, kExitOk) << r.err;
  const auto j = r.body();
  EXPECT_TRUE(j["found"].get<bool>());
  EXPECT_TRUE(j.contains("alice"));
  EXPECT_TRUE(j.contains("bob"));
}

TEST(Cli, DualitySuite) {
  const auto r = run({"duality", "--dim", "3", "--trials", "50", "--seed", "7"});
  ASSERT_EQ(r.status, kExitOk) << r.err;
  const auto j = r.body();
  EXPECT_EQ(j["suite"], "duality");
  EXPECT_EQ(j["trials_run"], 50);
  EXPECT_TRUE(j["counterexamples"].empty());
}

TEST(Cli, CsvFormat) {
  const auto r = run({"--format", "csv", "max-ent", "--trials", "5"});
  ASSERT_EQ(r.status, kExitOk) << r.err;
  EXPECT_EQ(r.out.rfind(SuiteReport::csv_header() + "\nmax-ent,1,0,5,5,0,", 0), 0u) << r.out;

  const auto c = run({"--format", "csv", "catalyst", "--density", "diag:0.7,0.3"});
  ASSERT_EQ(c.status, kExitOk);
  EXPECT_NE(c.out.find("margin,0.42"), std::string::npos) << c.out;

  const auto g = run({"--format", "csv", "monotone", "--name", "x2-purity", "--grid", "3"});
  ASSERT_EQ(g.status, kExitOk) << g.err;
  EXPECT_EQ(g.out.rfind("x,y,value\n", 0), 0u);
  EXPECT_EQ(std::count(g.out.begin(), g.out.end(), '\n'), 10);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({}).status, kExitUsage);
  const auto unknown = run({"frobnicate"});
  EXPECT_EQ(unknown.status, kExitUsage);
  EXPECT_NE(unknown.err.find("unknown verb 'frobnicate'"), std::string::npos);
  EXPECT_EQ(run({"more-mixed", "--rho", "0.1"}).status, kExitUsage);
  EXPECT_EQ(run({"--format", "xml", "make-pr"}).status, kExitUsage);
  EXPECT_EQ(run({"make-pr", "--k", "9", "--d", "3"}).status, kExitUsage);
  EXPECT_EQ(run({"check-ns", "--box", data("signalling_box.json")}).status, kExitFailure);
  EXPECT_EQ(run({"check-locex", "--box", data("signalling_box.json")}).status, kExitUsage);
  EXPECT_EQ(run({"duality", "--trials", "5", "--tol", "1e-300", "--dim", "3"}).status, kExitFailure);
  EXPECT_EQ(run({"validate-system", "--system", data("non_invariant_theory.json")}).status, kExitFailure);
  EXPECT_EQ(run({"validate-system", "--system", "square"}).status, kExitOk);
  EXPECT_EQ(run({"--help"}).status, kExitOk);
}

TEST(Cli, MalformedFilesReportLocation) {
  const auto syntax = run({"validate-system", "--system", data("malformed_theory.json")});
  EXPECT_EQ(syntax.status, kExitUsage);
  EXPECT_NE(syntax.err.find("malformed_theory.json"), std::string::npos) << syntax.err;
  EXPECT_NE(syntax.err.find("line"), std::string::npos) << syntax.err;

  const auto shape = run({"more-mixed", "--system", data("wrong_shape_theory.json"), "--rho", "1,0,1", "--sigma", "0,1,1"});
  EXPECT_EQ(shape.status, kExitUsage);
  EXPECT_NE(shape.err.find("pure_states[1]"), std::string::npos) << shape.err;

  const auto entry = run({"check-ns", "--box", data("bad_entry_box.json")});
  EXPECT_EQ(entry.status, kExitUsage);
  EXPECT_NE(entry.err.find("x/2"), std::string::npos) << entry.err;

  const auto missing = run({"check-ns", "--box", data("does_not_exist.json")});
  EXPECT_EQ(missing.status, kExitUsage);
}

TEST(Cli, ToleranceFromEnvironment) {
  ::setenv("ENTMIX_TOL", "1e-300", 1);
  const auto strict = run({"duality", "--trials", "5", "--dim", "3"});
  ::setenv("ENTMIX_TOL", "banana", 1);
  const auto bad = run({"make-pr"});
  ::unsetenv("ENTMIX_TOL");
  EXPECT_EQ(strict.status, kExitFailure);
  EXPECT_DOUBLE_EQ(strict.body()["config"]["witness_tol"].get<double>(), 1e-300);
  EXPECT_EQ(bad.status, kExitUsage);
  // The flag overrides the environment.
  ::setenv("ENTMIX_TOL", "1e-300", 1);
  const auto relaxed = run({"--tol", "1e-9", "duality", "--trials", "5", "--dim", "3"});
  ::unsetenv("ENTMIX_TOL");
  EXPECT_EQ(relaxed.status, kExitOk) << relaxed.err;
}

TEST(Cli, RoundTripsThroughFiles) {
  TempDir tmp;
  const auto box_file = tmp.file("box.json");
  ASSERT_EQ(run({"--output", box_file, "make-pr", "--k", "3"}).status, kExitOk);
  EXPECT_EQ(boxworld::box_from_json(json::parse(slurp(box_file))), boxworld::pr_box_k(3, 3, 3));
  EXPECT_EQ(run({"check-extreme", "--box", box_file}).body()["extreme"], true);
  EXPECT_EQ(run({"check-locex", "--box", box_file}).status, kExitOk);

  const auto theory_file = tmp.file("square.json");
  ASSERT_EQ(run({"--output", theory_file, "make-square-bit"}).status, kExitOk);
  const auto before = slurp(theory_file);
  const auto v = run({"validate-system", "--system", theory_file});
  EXPECT_EQ(v.status, kExitOk) << v.err;
  EXPECT_EQ(slurp(theory_file), before);
  const auto direct = run({"monotone", "--name", "x2-purity", "--rho", "0.3,0.2"});
  const auto via_file = run({"monotone", "--system", theory_file, "--name", "x2-purity", "--rho", "0.3,0.2"});
  EXPECT_EQ(direct.out, via_file.out);

  const auto state_file = tmp.file("state.json");
  ASSERT_EQ(run({"--output", state_file, "sym-purify", "--density", "diag:0.8,0.2"}).status, kExitOk);
  const auto m = run({"marginals", "--state", state_file}).body();
  EXPECT_NEAR(m["spectrum_a"][0].get<double>(), 0.8, 1e-12);
  EXPECT_NEAR(m["spectrum_b"][1].get<double>(), 0.2, 1e-12);
}

TEST(Cli, ReplayVerb) {
  TempDir tmp;
  const auto report_file = tmp.file("report.json");
  EXPECT_EQ(run({"--tol", "1e-300", "--output", report_file, "duality", "--trials", "4", "--dim", "3"}).status,
            kExitFailure);
  const auto r = run({"replay", "--report", report_file});
  EXPECT_EQ(r.status, kExitFailure);
  EXPECT_TRUE(r.body()["replayed"][0]["reproduced"].get<bool>());
}

TEST(Cli, QuantumVerbs) {
  EXPECT_EQ(run({"schmidt", "--state", "schmidt:0.8,0.2"}).body()["coefficients"][1].get<double>(),
            0.447213595500);
  EXPECT_EQ(run({"nielsen", "--state", "schmidt:0.6,0.4", "--target", "schmidt:0.8,0.2"}).body()["convertible"], true);
  EXPECT_EQ(run({"nielsen", "--state", "schmidt:0.8,0.2", "--target", "schmidt:0.6,0.4"}).body()["convertible"], false);
  EXPECT_EQ(run({"lu-equiv", "--state", "bell", "--target", "maxent:2"}).body()["lu_equivalent"], true);
  EXPECT_EQ(run({"locex-quantum", "--state", "random:3:5"}).status, kExitOk);
  EXPECT_EQ(run({"rare-quantum", "--density", "maxmixed:2", "--target", "diag:0.7,0.3"}).status, kExitOk);
  EXPECT_EQ(run({"one-way", "--state", "maxent:2", "--target", "schmidt:0.7,0.3"}).status, kExitOk);
  EXPECT_EQ(run({"one-way", "--state", "schmidt:0.7,0.3", "--target", "maxent:2"}).status, kExitUsage);
  EXPECT_NEAR(run({"eof", "--density", "bell"}).body()["value"].get<double>(), 1.0, 1e-6);
  EXPECT_NEAR(run({"monotone", "--name", "measurement-entropy", "--density", "maxmixed:2"}).body()["value"].get<double>(),
              1.0, 1e-9);
  EXPECT_NEAR(run({"monotone", "--name", "measurement-entropy", "--rho", "0,0"}).body()["value"].get<double>(), 1.0,
              1e-9);
}

}  // namespace
}  // namespace entmix
