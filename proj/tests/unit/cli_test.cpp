#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "botscan/atomic_file.hpp"
#include "botscan/classifier.hpp"
#include "botscan/corpus.hpp"
#include "botscan/store.hpp"
#include "cli.hpp"
#include "fixtures.hpp"
#include "mock_github.hpp"
#include "temp_dir.hpp"

namespace botscan {
namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args, const cli::Environment& env = {}) {
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(args, env, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string fixture_path(const std::string& name) { return testing::fixture(name).string(); }

TEST(Cli, HelpListsFlags) {
  const std::map<std::string, std::vector<std::string>> flags{
      {"fetch", {"--repo", "--token-env", "--since", "--until", "--kinds", "--cache", "--out"}},
      {"predict", {"--in", "--model", "--eps", "--min-comments", "--cap", "--out"}},
      {"train", {"--features", "--labels", "--max-depth", "--min-leaf", "--out"}},
      {"report", {"--in", "--format", "--index", "--aliases"}},
      {"override", {"--in", "--repo", "--login", "--set", "--overrides", "--out"}},
      {"serve", {"--in", "--port", "--ui-dir"}},
  };
  for (const auto& [sub, names] : flags) {
    const auto r = run({sub, "--help"});
    EXPECT_EQ(r.code, 0) << sub;
    for (const auto& flag : names) {
      EXPECT_NE(r.out.find(flag), std::string::npos) << sub << " help lacks " << flag;
    }
  }
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, cli::kUsageError);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kUsageError);
  EXPECT_EQ(run({"predict", "--in", "x.csv", "--out", "y.csv", "--bogus"}).code, cli::kUsageError);
  EXPECT_EQ(run({"predict", "--out", "y.csv"}).code, cli::kUsageError);
  EXPECT_EQ(run({"report", "--in", "x.csv", "--format", "xml"}).code, cli::kUsageError);
  testing::TempDir dir;
  EXPECT_EQ(run({"predict", "--in", fixture_path("comments.csv"), "--out",
                 (dir / "p.csv").string(), "--eps", "1.5"})
                .code,
            cli::kUsageError);
}

TEST(Cli, PredictMatchesGoldenFile) {
  testing::TempDir dir;
  const auto out = (dir / "predictions.csv").string();
  const auto r = run({"predict", "--in", fixture_path("comments.csv"), "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_file(out), read_file(testing::fixture("expected_predictions.csv")));
}

TEST(Cli, PredictIsDeterministicAcrossThreadCounts) {
  testing::TempDir dir;
  std::vector<std::string> outputs;
  for (const char* threads : {"1", "3", "8"}) {
    const auto out = (dir / (std::string("p") + threads + ".csv")).string();
    ASSERT_EQ(run({"predict", "--in", fixture_path("comments.csv"), "--out", out, "--threads",
                   threads})
                  .code,
              0);
    outputs.push_back(read_file(out));
  }
  EXPECT_EQ(outputs[0], outputs[1]);
  EXPECT_EQ(outputs[0], outputs[2]);
}

TEST(Cli, PredictMissingInputNamesFile) {
  testing::TempDir dir;
  const auto r = run({"predict", "--in", "missing.csv", "--out", (dir / "p.csv").string()});
  EXPECT_EQ(r.code, cli::kDataError);
  EXPECT_NE(r.err.find("missing.csv"), std::string::npos) << r.err;
  EXPECT_FALSE(std::filesystem::exists(dir / "p.csv"));
}

TEST(Cli, PredictMalformedActivityNamesLine) {
  testing::TempDir dir;
  std::ofstream(dir / "bad.csv") << "repository,activity_type,number,author,created_at,body\n"
                                 << "a/b,issue,1,x,not-a-time,hello\n";
  const auto r = run({"predict", "--in", (dir / "bad.csv").string(), "--out",
                      (dir / "p.csv").string()});
  EXPECT_EQ(r.code, cli::kDataError);
  EXPECT_NE(r.err.find("bad.csv:2"), std::string::npos) << r.err;
}

TEST(Cli, FetchRequiresToken) {
  testing::TempDir dir;
  const auto r = run({"fetch", "--repo", "diem/diem", "--token-env", "BOTSCAN_TEST_TOKEN",
                      "--since", "2021-12-01", "--until", "2022-02-01", "--out",
                      (dir / "a.csv").string()});
  EXPECT_EQ(r.code, cli::kEnvironmentError);
  EXPECT_NE(r.err.find("BOTSCAN_TEST_TOKEN"), std::string::npos);
}

TEST(Cli, FetchAgainstMockApi) {
  testing::MockGithub mock(
      testing::MockGithub::load_payload(testing::fixture("github/issue_comments.json")),
      testing::MockGithub::load_payload(testing::fixture("github/review_comments.json")));
  testing::TempDir dir;
  const auto out = (dir / "activity.csv").string();
  const cli::Environment env{{"GH_TOKEN", "test-token"}};
  const std::vector<std::string> args{"fetch", "--repo", "diem/diem", "--token-env", "GH_TOKEN",
                                      "--since", "2021-12-01T00:00:00Z", "--until",
                                      "2022-02-01T00:00:00Z", "--kinds", "issues,prs",
                                      "--base-url", mock.base_url(), "--no-review-comments",
                                      "--cache", (dir / "cache").string(), "--out", out};
  auto r = run(args, env);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_activity_csv(out).size(), 137u);
  const auto requests = mock.request_count();
  const auto first = read_file(out);

  r = run(args, env);
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(mock.request_count(), requests);
  EXPECT_EQ(read_file(out), first);

  auto with_reviews = args;
  with_reviews.erase(std::find(with_reviews.begin(), with_reviews.end(), "--no-review-comments"));
  r = run(with_reviews, {{"GH_TOKEN", "test-token"}});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_activity_csv(out).size(), 149u);
}

TEST(Cli, FetchErrorsMapToExitCodes) {
  testing::MockGithub mock(nlohmann::json::array(), nlohmann::json::array());
  testing::TempDir dir;
  const auto fetch = [&](const std::string& repo, const std::string& token) {
    return run({"fetch", "--repo", repo, "--token-env", "T", "--since", "2021-12-01", "--until",
                "2022-02-01", "--base-url", mock.base_url(), "--out", (dir / "a.csv").string()},
               {{"T", token}});
  };
  EXPECT_EQ(fetch("diem/diem", "wrong").code, cli::kEnvironmentError);
  EXPECT_EQ(fetch("diem/other", "test-token").code, cli::kNetworkError);
  EXPECT_EQ(fetch("diem/diem", "test-token").code, 0);
  EXPECT_EQ(read_file(dir / "a.csv"), render_activity_csv({}));
  EXPECT_EQ(fetch("not-a-repo", "test-token").code, cli::kUsageError);
}

TEST(Cli, ReportFormats) {
  auto r = run({"report", "--in", fixture_path("counts_predictions.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out,
            "repository  total  bots  humans  unknowns\n"
            "diem/diem  24  8  16  0\n"
            "paritytech/substrate  37  6  31  0\n"
            "servo/servo  6  2  4  0\n");

  r = run({"report", "--in", fixture_path("counts_predictions.csv"), "--format", "json"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out).size(), 3u);

  r = run({"report", "--in", fixture_path("all_human_predictions.csv"), "--format", "ndjson",
           "--index", "bots"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 24);

  r = run({"report", "--in", fixture_path("all_human_predictions.csv")});
  EXPECT_EQ(r.out, "repository  total  bots  humans  unknowns\ntokio-rs/tokio  12  0  12  0\n");
}

TEST(Cli, ReportWithAliases) {
  testing::TempDir dir;
  std::ofstream(dir / "aliases.txt") << "# merge two automation accounts\n"
                                     << "servo-bot: servo-automation-1, servo-automation-2\n";
  const auto r = run({"report", "--in", fixture_path("counts_predictions.csv"), "--aliases",
                      (dir / "aliases.txt").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("servo/servo  5  1  4  0\n"), std::string::npos) << r.out;
}

TEST(Cli, OverrideRoundTrip) {
  testing::TempDir dir;
  const auto out = (dir / "p.csv").string();
  auto r = run({"override", "--in", fixture_path("counts_predictions.csv"), "--repo", "servo/servo",
                "--login", "servo-dev-01", "--set", "bot", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  r = run({"report", "--in", out});
  EXPECT_NE(r.out.find("servo/servo  6  3  3  0\n"), std::string::npos);

  r = run({"override", "--in", out, "--repo", "servo/servo", "--login", "servo-dev-01", "--set",
           "clear", "--out", out});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(load_predictions(out), load_predictions(testing::fixture("counts_predictions.csv")));

  r = run({"override", "--in", out, "--repo", "servo/servo", "--login", "nobody", "--set", "bot",
           "--out", out});
  EXPECT_EQ(r.code, cli::kDataError);
  r = run({"override", "--in", out, "--out", out});
  EXPECT_EQ(r.code, cli::kUsageError);

  std::ofstream(dir / "o.csv") << "repository,login,override\n"
                               << "diem/diem,diem-dev-01,bot\ndiem/diem,diem-automation-1,human\n";
  r = run({"override", "--in", out, "--overrides", (dir / "o.csv").string(), "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(run({"report", "--in", out}).out.find("diem/diem  24  8  16  0\n"), std::string::npos);
}

TEST(Cli, TrainProducesLoadableModel) {
  testing::TempDir dir;
  std::ofstream labels(dir / "labels.csv");
  labels << "repository,login,label\n";
  for (const auto& rec : load_predictions(testing::fixture("counts_predictions.csv"))) {
    labels << rec.repo.str() << "," << rec.login << "," << to_string(rec.predicted) << "\n";
  }
  labels << "ghost/repo,nobody,bot\n";
  labels.close();
  const auto model_path = (dir / "model.json").string();
  const auto r = run({"train", "--features", fixture_path("counts_predictions.csv"), "--labels",
                      (dir / "labels.csv").string(), "--out", model_path});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("skipped 1"), std::string::npos);
  const auto model = load_model(model_path);
  EXPECT_GE(model.depth(), 1u);

  const auto p = run({"predict", "--in", fixture_path("comments.csv"), "--model", model_path,
                      "--out", (dir / "p.csv").string()});
  EXPECT_EQ(p.code, 0) << p.err;

  std::ofstream(dir / "bad_labels.csv") << "repository,login,label\ndiem/diem,x,robot\n";
  EXPECT_EQ(run({"train", "--features", fixture_path("counts_predictions.csv"), "--labels",
                 (dir / "bad_labels.csv").string(), "--out", model_path})
                .code,
            cli::kDataError);
}

TEST(Cli, PredictWithWindowFlags) {
  testing::TempDir dir;
  const auto out = (dir / "p.csv").string();
  auto r = run({"predict", "--in", fixture_path("comments.csv"), "--since", "2030-01-01", "--out",
                out});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(load_predictions(out).empty());
  r = run({"predict", "--in", fixture_path("comments.csv"), "--until", "2021-12-01", "--since",
           "2022-01-01", "--out", out});
  EXPECT_EQ(r.code, cli::kUsageError);
}

}  // namespace
}  // namespace botscan
