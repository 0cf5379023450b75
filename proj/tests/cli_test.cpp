#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "apsq/cli.hpp"

namespace apsq::cli {
namespace {

struct Outcome {
  int status;
  std::string out;
  std::string err;
};

Outcome call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int status = run(args, out, err);
  return {status, out.str(), err.str()};
}

Json json_of(const std::vector<std::string>& args) {
  auto full = args;
  full.push_back("--json");
  const auto o = call(full);
  EXPECT_EQ(o.status, kOk) << o.err;
  return Json::parse(o.out);
}

std::filesystem::path temp_store(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("apsq_" + name + "_" + std::to_string(::getpid()) + ".jsonl");
  std::filesystem::remove(p);
  return p;
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(call({}).status, kUsage);
  EXPECT_EQ(call({"no-such-command"}).status, kUsage);
  EXPECT_EQ(call({"qn", "--n", "4"}).status, kUsage);
  EXPECT_EQ(call({"bound", "--n", "abc"}).status, kUsage);
  EXPECT_EQ(call({"bound", "--n", "0"}).status, kUsage);
  EXPECT_EQ(call({"ledger", "--a", "0", "--d", "1", "--n", "36", "--m", "6", "--delta", "x"}).status, kUsage);
  EXPECT_EQ(call({"replay", "/nonexistent/store.jsonl"}).status, kUsage);
}

TEST(Cli, HelpAndVersion) {
  const auto help = call({"--help"});
  EXPECT_EQ(help.status, kOk);
  EXPECT_NE(help.out.find("fermat-scan"), std::string::npos);
  const auto version = call({"--version"});
  EXPECT_EQ(version.status, kOk);
  EXPECT_EQ(version.out, std::string(APSQ_VERSION) + "\n");
}

TEST(Cli, EveryCommandRunsAndEmitsJson) {
  const std::vector<std::vector<std::string>> cases = {
      {"fermat-scan", "--max-root", "50"},
      {"count-squares", "--a", "1", "--d", "24", "--n", "13"},
      {"qn", "--n", "4", "--d-max", "30", "--x-max", "100"},
      {"no4ap", "--n", "12"},
      {"bound", "--n", "4"},
      {"erdos-rudin", "--n-max", "1000"},
      {"color-demo", "--k", "2", "--n-max", "200"},
      {"b-count", "--m", "8", "--h", "3"},
      {"ledger", "--a", "1", "--d", "24", "--n", "4", "--m", "6"},
      {"congruence", "--c", "4", "--m", "15"},
  };
  for (const auto& c : cases) {
    const auto text = call(c);
    EXPECT_EQ(text.status, kOk) << c[0] << ": " << text.err;
    EXPECT_FALSE(text.out.empty()) << c[0];
    const Json doc = json_of(c);
    EXPECT_EQ(doc.at("command"), c[0]);
    EXPECT_TRUE(doc.at("result").is_object()) << c[0];
  }
}

TEST(Cli, PayloadValues) {
  const Json qn = json_of({"qn", "--n", "4", "--d-max", "30", "--x-max", "100"}).at("result");
  EXPECT_EQ(qn.at("best_count"), 3);
  const Json bound = json_of({"bound", "--n", "4"}).at("result");
  EXPECT_EQ(bound.at("fermat_upper_bound"), "3");
  const Json no4ap = json_of({"no4ap", "--n", "5"}).at("result");
  EXPECT_EQ(no4ap.at("max_size"), 4);
  const Json bc = json_of({"b-count", "--m", "8", "--h", "3", "--zero", "false"}).at("result");
  EXPECT_EQ(bc.at("count"), 10);
  const Json led = json_of({"ledger", "--a", "0", "--d", "1", "--n", "36", "--m", "6"}).at("result");
  EXPECT_EQ(led.at("interval_sizes"), Json::parse("[3,1,1,0,1,0,0]"));
  EXPECT_EQ(led.at("verdicts").at("all"), true);
  const Json cong = json_of({"congruence", "--c", "4", "--m", "15"}).at("result");
  EXPECT_EQ(cong.at("roots"), Json::parse(R"(["2","7","8","13"])"));
}

TEST(Cli, JsonIndependentOfThreadCount) {
  const std::vector<std::vector<std::string>> cases = {
      {"fermat-scan", "--max-root", "400"},
      {"qn", "--n", "10", "--d-max", "200", "--x-max", "300"},
      {"no4ap", "--n", "30"},
      {"color-demo", "--k", "4", "--n-max", "5000"},
      {"b-count", "--m", "9", "--h", "3", "--list", "true"},
  };
  for (auto c : cases) {
    auto one = c, many = c;
    one.insert(one.end(), {"--json", "--threads", "1"});
    many.insert(many.end(), {"--json", "--threads", "8"});
    const auto a = call(one), b = call(many);
    EXPECT_EQ(a.status, kOk);
    EXPECT_EQ(a.out, b.out) << c[0];
  }
}

TEST(Cli, StoreAndReplay) {
  const auto store = temp_store("replay");
  ASSERT_EQ(call({"bound", "--n", "99", "--store", store.string()}).status, kOk);
  ASSERT_EQ(call({"count-squares", "--a", "1", "--d", "24", "--n", "100", "--store", store.string()}).status, kOk);
  ASSERT_EQ(call({"ledger", "--a", "1", "--d", "24", "--n", "13", "--m", "13", "--store", store.string()}).status, kOk);

  std::ifstream in(store);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    const Json rec = Json::parse(line);
    for (const char* key : {"command", "params", "result", "version", "wall_time_s", "timestamp", "seed"}) {
      EXPECT_TRUE(rec.contains(key)) << key;
    }
    EXPECT_TRUE(rec.at("seed").is_null());
    ++lines;
  }
  EXPECT_EQ(lines, 3u);

  const auto replay = call({"replay", store.string()});
  EXPECT_EQ(replay.status, kOk) << replay.err;
  EXPECT_NE(replay.out.find("3/3 records reproduced"), std::string::npos);
  std::filesystem::remove(store);
}

TEST(Cli, ReplayDetectsTamperedRecord) {
  const auto store = temp_store("tamper");
  ASSERT_EQ(call({"bound", "--n", "4", "--store", store.string()}).status, kOk);
  std::string line;
  {
    std::ifstream in(store);
    std::getline(in, line);
  }
  Json rec = Json::parse(line);
  rec["result"]["tampered"] = true;
  {
    std::ofstream out(store, std::ios::trunc);
    out << rec.dump() << "\n";
  }
  const auto replay = call({"replay", store.string()});
  EXPECT_EQ(replay.status, kViolation);
  EXPECT_NE(replay.out.find("MISMATCH"), std::string::npos);
  std::filesystem::remove(store);
}

}  // namespace
}  // namespace apsq::cli
