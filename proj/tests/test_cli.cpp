#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "proact/cli.hpp"
#include "proact/episode.hpp"
#include "proact/glad.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "proact");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream err;
  std::ostringstream out;
  auto* old_err = std::cerr.rdbuf(err.rdbuf());
  auto* old_out = std::cout.rdbuf(out.rdbuf());
  const int code = proact::run_cli(static_cast<int>(argv.size()), argv.data());
  std::cerr.rdbuf(old_err);
  std::cout.rdbuf(old_out);
  return {code, err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path = fs::temp_directory_path() / ("proact_cli_" + std::to_string(::getpid()));
  TempDir() { fs::create_directories(path); }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("eval is reproducible") {
  TempDir dir;
  REQUIRE(cli({"eval", "--env", "2048", "--policy", "random", "--runs", "10", "--seed", "7", "--out", dir / "a.json"}).code == 0);
  REQUIRE(cli({"eval", "--env", "2048", "--policy", "random", "--runs", "10", "--seed", "7", "--out", dir / "b.json"}).code == 0);
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
  const auto j = nlohmann::json::parse(slurp(dir / "a.json"));
  CHECK(j["runs"] == 10);
}

TEST_CASE("value with M=0 is the degenerate zero") {
  TempDir dir;
  std::ofstream(dir / "f.txt") << "#####\n#@  #\n#$ $#\n#? ?#\n#####\n";
  REQUIRE(cli({"value", "--env", "sokoban", "--level", dir / "f.txt", "--M", "0", "--out", dir / "v.json"}).code == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "v.json"));
  CHECK(j == nlohmann::json{{"mean", 0.0}, {"degenerate", true}});
}

TEST_CASE("a missing env key exits 2 and names the key") {
  const Run r = cli({"train", "--algorithm", "mc_grpo"});
  CHECK(r.code == 2);
  CHECK(r.err.find("'env'") != std::string::npos);
}

TEST_CASE("bad values and unknown keys are configuration errors") {
  TempDir dir;
  CHECK(cli({"eval", "--env", "2048", "--bogus", "1"}).code == 2);
  CHECK(cli({"eval", "--env", "2048", "--variant", "9x9"}).code == 2);
  CHECK(cli({"eval", "--env", "2048", "--max-steps", "0"}).code == 2);
  CHECK(cli({"train", "--env", "chain", "--algorithm", "dqn"}).code == 2);
  std::ofstream(dir / "bad.toml") << "[eval]\nenv=\"2048\"\nbogus=3\n";
  CHECK(cli({"eval", "--config", dir / "bad.toml"}).code == 2);
  CHECK(cli({}).code == 2);
}

TEST_CASE("snapshot type mismatches are contract errors") {
  TempDir dir;
  REQUIRE(cli({"probe", "--env", "2048", "--seed", "1", "--budget", "8", "--out", dir / "p.json"}).code == 0);
  CHECK(cli({"value", "--env", "sokoban", "--snapshot", dir / "p.json", "--M", "5", "--T", "5"}).code == 3);
  const Run ok = cli({"value", "--env", "2048", "--snapshot", dir / "p.json", "--M", "5", "--T", "5", "--out", dir / "v.json"});
  CHECK(ok.code == 0);
}

TEST_CASE("the resolved-config echo reproduces the run") {
  TempDir dir;
  const Run first = cli({"train", "--env", "chain", "--algorithm", "mc_grpo", "--updates", "15", "--M", "20", "--T", "5",
                         "--seed", "3", "--echo-config", dir / "run.toml", "--out", dir / "a.json"});
  REQUIRE(first.code == 0);
  CHECK(first.err.find("[train]") != std::string::npos);
  const std::string echo = slurp(dir / "run.toml");
  CHECK(echo.find("updates=15") != std::string::npos);
  // Re-point the output so the two runs can be compared.
  std::string refeed = echo;
  const auto pos = refeed.find("out=");
  refeed.replace(pos, refeed.find('\n', pos) - pos, "out=\"" + (dir / "b.json") + "\"");
  std::ofstream(dir / "refeed.toml") << refeed;
  REQUIRE(cli({"--config", dir / "refeed.toml", "train"}).code == 0);
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
}

TEST_CASE("rollout writes a readable transcript") {
  TempDir dir;
  REQUIRE(cli({"rollout", "--env", "sokoban", "--seed", "2", "--out", dir / "t.jsonl"}).code == 0);
  std::ifstream in(dir / "t.jsonl");
  const proact::Trajectory t = proact::read_transcript(in);
  CHECK(t.env == "sokoban");
  CHECK(t.turns.size() <= 20);
}

TEST_CASE("glad-gen writes a dataset and a stats sidecar") {
  TempDir dir;
  REQUIRE(cli({"glad-gen", "--env", "2048", "--episodes", "2", "--max-steps", "15", "--budget", "16", "--out",
               dir / "d.jsonl"})
              .code == 0);
  std::ifstream in(dir / "d.jsonl");
  CHECK(proact::read_dataset(in).size() == 30);
  const auto stats = nlohmann::json::parse(slurp(dir / "d.jsonl.stats.json"));
  CHECK(stats["replay_failures"].empty());
  CHECK(stats["records"] == 30);
}

TEST_CASE("bench, sweep and version") {
  TempDir dir;
  CHECK(cli({"bench", "--env", "2048", "--count", "20", "--horizon", "50", "--out", dir / "b.json"}).code == 0);
  CHECK(nlohmann::json::parse(slurp(dir / "b.json"))["rollouts"] == 20);
  CHECK(cli({"bench", "--env", "2048", "--count", "20", "--serial", "--out", dir / "s.json"}).code == 0);
  CHECK(cli({"sweep", "--env", "chain", "--axis", "T", "--values", "0,5", "--updates", "10", "--out", dir / "w.json"})
            .code == 0);
  CHECK(nlohmann::json::parse(slurp(dir / "w.json"))["rows"].size() == 2);
  CHECK(cli({"sweep", "--env", "chain", "--axis", "K"}).code == 2);
  CHECK(cli({"--version"}).code == 0);
}

}  // TEST_SUITE
