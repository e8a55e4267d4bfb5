#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;

struct CommandResult {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream bytes;
  bytes << in.rdbuf();
  return bytes.str();
}

class CliTest : public testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ranklab_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);

    write("a.run",
          "q1 Q0 d1 1 9.5 sysA\nq1 Q0 d2 2 8.0 sysA\n"
          "q2 Q0 d3 1 7.0 sysA\nq2 Q0 d1 2 6.5 sysA\n"
          "q3 Q0 d1 1 5.0 sysA\nq3 Q0 d2 2 4.0 sysA\n"
          "q4 Q0 d2 1 5.0 sysA\nq4 Q0 d1 2 4.0 sysA\n");
    write("b.run",
          "q1 Q0 d2 1 9.9 sysB\nq1 Q0 d1 2 9.0 sysB\n"
          "q2 Q0 d1 1 8.0 sysB\nq2 Q0 d3 2 7.0 sysB\n"
          "q3 Q0 d2 1 6.0 sysB\nq3 Q0 d1 2 5.0 sysB\n"
          "q4 Q0 d1 1 3.0 sysB\nq4 Q0 d2 2 2.0 sysB\n");
    write("j.qrels",
          "q1 0 d1 1\nq1 0 d2 0\nq2 0 d3 1\nq2 0 d1 0\n"
          "q3 0 d1 1\nq3 0 d2 0\nq4 0 d1 1\nq4 0 d2 0\n");
  }

  void TearDown() override { fs::remove_all(dir_); }

  void write(const std::string& name, const std::string& content) {
    std::ofstream out(dir_ / name, std::ios::binary);
    out << content;
  }

  fs::path path(const std::string& name) const { return dir_ / name; }

  CommandResult run_cli(const std::string& args) {
    const fs::path out_path = dir_ / "stdout.txt";
    const fs::path err_path = dir_ / "stderr.txt";
    const std::string command = std::string(RANKLAB_CLI_PATH) + " " + args + " > " +
                                out_path.string() + " 2> " + err_path.string();
    const int rc = std::system(command.c_str());
    CommandResult result;
    result.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    result.out = slurp(out_path);
    result.err = slurp(err_path);
    return result;
  }

  std::string inputs() const {
    return "--run " + path("a.run").string() + " --run " + path("b.run").string() +
           " --qrels " + path("j.qrels").string();
  }

  fs::path dir_;
};

TEST_F(CliTest, EvalEmitsPerQueryTableWithAggregateRow) {
  CommandResult r = run_cli("eval " + inputs() + " --metric rr@10");
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("# ranklab 0.1.0\n"), std::string::npos);
  EXPECT_NE(r.out.find("# command: eval\n"), std::string::npos);
  EXPECT_NE(r.out.find("# config: metric=rr@10\n"), std::string::npos);
  EXPECT_NE(r.out.find("# config: binarization=1\n"), std::string::npos);
  EXPECT_NE(r.out.find("query,sysA,sysB\n"), std::string::npos);
  EXPECT_NE(r.out.find("q1,1.0000,0.5000\n"), std::string::npos);
  EXPECT_NE(r.out.find("mean,"), std::string::npos);
  // Provenance digests every input.
  EXPECT_NE(r.out.find(" fnv1a64:"), std::string::npos);
  EXPECT_EQ(r.out.find("sha"), std::string::npos);
}

TEST_F(CliTest, BootstrapIsByteIdenticalAcrossInvocations) {
  const std::string args =
      "bootstrap " + inputs() + " --metric rr@10 --trials 200 --seed 42";
  CommandResult first = run_cli(args);
  ASSERT_EQ(first.status, 0) << first.err;
  CommandResult second = run_cli(args);
  ASSERT_EQ(second.status, 0);
  EXPECT_EQ(first.out, second.out);
  EXPECT_NE(first.out.find("# config: seed=42\n"), std::string::npos);
  EXPECT_NE(first.out.find("# config: trials=200\n"), std::string::npos);
  EXPECT_NE(first.out.find("run,expected_rank,min,q1,median,q3,max,rank_1,rank_2\n"),
            std::string::npos);

  CommandResult reseeded = run_cli("bootstrap " + inputs() +
                                   " --metric rr@10 --trials 200 --seed 43");
  ASSERT_EQ(reseeded.status, 0);
  EXPECT_NE(reseeded.out, first.out);  // header alone differs; stays honest
}

TEST_F(CliTest, SeedIsMandatoryForRandomizedCommands) {
  CommandResult r = run_cli("bootstrap " + inputs() + " --metric rr@10");
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("--seed"), std::string::npos);
  CommandResult a = run_cli("agreement " + inputs() + " --metric rr@10");
  EXPECT_NE(a.status, 0);
  EXPECT_NE(a.err.find("--seed"), std::string::npos);
}

TEST_F(CliTest, MalformedRunFileFailsNamingTheLine) {
  write("bad.run", "q1 Q0 d1 1 9.5 tag\nq2 Q0 d2 2\n");
  CommandResult r = run_cli("agreement --run " + path("bad.run").string() + " --run " +
                            path("b.run").string() + " --qrels " +
                            path("j.qrels").string() + " --metric rr@10 --seed 1");
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("bad.run"), std::string::npos);
  EXPECT_NE(r.err.find("line 2"), std::string::npos);
  EXPECT_TRUE(r.out.empty());
}

TEST_F(CliTest, StructuredOutputIsValidJsonAndAgreesWithCsv) {
  const std::string base = "eval " + inputs() + " --metric rr@10";
  CommandResult csv = run_cli(base);
  CommandResult structured = run_cli(base + " --format structured");
  ASSERT_EQ(structured.status, 0) << structured.err;
  nlohmann::json doc = nlohmann::json::parse(structured.out);
  EXPECT_EQ(doc["command"], "eval");
  EXPECT_EQ(doc["tables"][0]["name"], "scores");
  // q1: sysA found d1 first (rr 1), sysB second (rr 1/2).
  EXPECT_DOUBLE_EQ(doc["tables"][0]["rows"][0][1].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(doc["tables"][0]["rows"][0][2].get<double>(), 0.5);
  ASSERT_EQ(csv.status, 0);
  EXPECT_NE(csv.out.find("q1,1.0000,0.5000\n"), std::string::npos);
}

TEST_F(CliTest, OutFlagWritesTheReportFile) {
  const fs::path report = dir_ / "report.csv";
  CommandResult r = run_cli("scale-check --metric rr --depth 3 --out " + report.string());
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  const std::string bytes = slurp(report);
  EXPECT_NE(bytes.find("# command: scale-check\n"), std::string::npos);
  EXPECT_NE(bytes.find("distinct_values,equi_spaced,solvable\n4,false,false\n"),
            std::string::npos);
  EXPECT_NE(bytes.find("missing_2,5/6,0.8333\n"), std::string::npos);
}

TEST_F(CliTest, HoldoutAndMonitorRoundTrip) {
  write("part.json", R"({"public": ["q1", "q2"], "private": ["q3", "q4"]})");
  CommandResult h = run_cli("holdout --run " + path("a.run").string() + " --run " +
                            path("b.run").string() + " --partition " +
                            path("part.json").string() + " --qrels sparse=" +
                            path("j.qrels").string() +
                            " --metric rr@10 --trials 50 --seed 9");
  ASSERT_EQ(h.status, 0) << h.err;
  EXPECT_NE(h.out.find("queryset,scheme,metric,rank,run,aggregate\n"), std::string::npos);
  EXPECT_NE(h.out.find("public,sparse,rr@10,1,"), std::string::npos);
  EXPECT_NE(h.out.find("private,sparse,rr@10,1,"), std::string::npos);

  write("man.json", R"({"task_id": "demo", "submissions": [
    {"run_id": "r1", "group_id": "g1", "submitted_on": "2020-01-05", "path": "a.run"},
    {"run_id": "r2", "group_id": "g1", "submitted_on": "2020-01-20", "path": "a.run"},
    {"run_id": "r3", "group_id": "g1", "submitted_on": "2020-01-25", "path": "a.run"}]})");
  write("scores.csv", "r1,0.30\nr2,0.45\nr3,0.40\n");
  CommandResult m = run_cli("monitor --manifest " + path("man.json").string() +
                            " --scores " + path("scores.csv").string() +
                            " --baseline-score 0.35");
  ASSERT_EQ(m.status, 0) << m.err;
  EXPECT_NE(m.out.find("r3,g1,2020-01-25,max-runs-per-window,"), std::string::npos);
  EXPECT_NE(m.out.find("2020-01-20,r2,0.4500,true\n"), std::string::npos);
  EXPECT_NE(m.out.find("2020-01-25,r3,0.4000,false\n"), std::string::npos);

  CommandResult bad = run_cli("monitor --manifest " + path("man.json").string() +
                              " --scores " + path("scores.csv").string());
  EXPECT_NE(bad.status, 0);  // --scores requires --baseline-score
  EXPECT_NE(bad.err.find("baseline-score"), std::string::npos);
}

}  // namespace
