#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "intent_router/corpus.hpp"
#include "intent_router/variants.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(INTENT_ROUTER_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  while (const auto n = fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch() {
  const auto dir = fs::temp_directory_path() / "ir_cli_test";
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

}  // namespace

TEST(Cli, RouteEmitsDecisionJson) {
  const auto r = run("route --text \"Summarize the results of the previous request.\"");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("route"), "Intent Report Request");
  EXPECT_EQ(j.at("scores").size(), 6u);
}

TEST(Cli, DispatchToFile) {
  const auto out = scratch() / "actions.jsonl";
  fs::remove(out);
  const auto r = run("route --text \"Notify me of the status of [network] every [frequency].\" --text \"zebra quilt\" "
                     "--dispatch file:" + out.string());
  ASSERT_EQ(r.code, 0);
  std::ifstream in(out);
  std::string line;
  ASSERT_TRUE(std::getline(in, line));
  EXPECT_EQ(nlohmann::json::parse(line).at("action"), "schedule_notification");
  EXPECT_FALSE(std::getline(in, line));  // NONE sends nothing
}

TEST(Cli, RoutesFromCorpusRoundTripsThroughRoute) {
  const auto path = scratch() / "routes.json";
  ASSERT_EQ(run("routes --corpus " + std::string(INTENT_ROUTER_DATA_DIR) + "/corpus.jsonl --spec 5,5,5 --dim 128 "
                "--tune --out " + path.string())
                .code,
            0);
  const auto j = nlohmann::json::parse(std::ifstream(path));
  EXPECT_EQ(j.at("routes").size(), 6u);
  EXPECT_EQ(j.at("routes")[0].at("utterances").size(), 16u);
  EXPECT_EQ(run("route --routes " + path.string() + " --text \"deploy a network\"").code, 0);
}

TEST(Cli, ConfigErrorsExitTwo) {
  const auto bad = scratch() / "bad.json";
  write(bad, R"({"corpus": "nowhere.jsonl", "k_folds": 1, "mystery": true})");
  EXPECT_EQ(run("eval --experiment utterance --config " + bad.string()).code, 2);
  EXPECT_EQ(run("eval --experiment nonsense --config " + bad.string()).code, 2);
  EXPECT_EQ(run("routes --corpus " + std::string(INTENT_ROUTER_DATA_DIR) + "/corpus.jsonl --spec 5,9,0").code, 2);
  EXPECT_EQ(run("route --text hi --dispatch ftp://x").code, 2);
}

TEST(Cli, InsufficientDataExitsThree) {
  const auto dir = scratch();
  const intent_router::Corpus small(intent_router::synthesize_seed_prompts(1, 3));
  intent_router::save_corpus(small, dir / "small.jsonl");
  write(dir / "small.json", R"({"corpus": "small.jsonl", "specs": [[5, 0, 0]], "k_folds": 2})");
  EXPECT_EQ(run("eval --experiment diversity --config " + (dir / "small.json").string() + " --out " +
                (dir / "out").string())
                .code,
            3);
}

TEST(Cli, EvalWritesReports) {
  const auto dir = scratch();
  write(dir / "tiny.json", std::string(R"({"corpus": ")") + INTENT_ROUTER_DATA_DIR +
                               R"(/corpus.jsonl", "encoder": {"dim": 64}, "specs": [[0,0,0],[5,5,5]], "k_folds": 3})");
  fs::remove_all(dir / "reports");
  const auto r = run("eval --experiment utterance --config " + (dir / "tiny.json").string() + " --out " +
                     (dir / "reports").string());
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("(5,5,5)"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "reports" / "utterance.json"));
  EXPECT_TRUE(fs::exists(dir / "reports" / "utterance.csv"));
}

TEST(Cli, CorpusStats) {
  const auto r = run("corpus stats --corpus " + std::string(INTENT_ROUTER_DATA_DIR) + "/corpus.jsonl");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("prompts: 540"), std::string::npos);
}
