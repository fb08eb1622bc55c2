#include <catch_amalgamated.hpp>
#include <json.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Result {
  int status;
  std::string out;
};

Result run(const std::string& args) {
  std::string cmd = std::string(CODELAB_CLI) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  std::array<char, 4096> buf;
  while (auto n = fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
  int st = pclose(p);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("codelab_cli_" + name);
  fs::remove_all(p);
  return p;
}

const std::string kSmall =
    " --iterations 3 --quiet --set primitives=[\\\"username\\\",\\\"password\\\"] --set max_pages=2 --set budget=3"
    " --set learner_hidden=8 --set learner_embed=4 --set generator_hidden=8 --set eval_episodes=1"
    " --set eval_envs=[\\\"login\\\"] --set eval_levels=[1]";

}  // namespace

TEST_CASE("analyze-chain csv") {
  auto r = run("analyze-chain --n-max 3 --l-max 2 --p 0.3,0.5");
  REQUIRE(r.status == 0);
  std::istringstream is(r.out);
  std::string line;
  std::getline(is, line);
  CHECK(line == "N,L,p,formula,bound,bruteforce");
  std::size_t rows = 0;
  bool found = false;
  while (std::getline(is, line)) {
    ++rows;
    found = found || line == "1,0,0.5,0.5,0.5,0.5";
  }
  CHECK(rows == 3 * 3 * 2);
  CHECK(found);
  CHECK(run("analyze-chain --rule sideways").status == 2);
}

TEST_CASE("train requires a seed and rejects unknown keys") {
  auto dir = scratch("noseed");
  CHECK(run("train --out " + dir.string() + kSmall).status == 2);
  CHECK(run("train --seed 1 --set gama=0.5 --out " + dir.string() + kSmall).status == 2);
  CHECK(run("train --seed 1 --alpha 2 --out " + dir.string() + kSmall).status == 2);
  CHECK(run("frobnicate").status != 0);
  fs::remove_all(dir);
}

TEST_CASE("train is deterministic and writes a manifest") {
  auto a = scratch("train_a"), b = scratch("train_b");
  REQUIRE(run("train --algo code --domain web --alpha 0.8 --m 2 --seed 7 --out " + a.string() + kSmall).status == 0);
  REQUIRE(run("train --algo code --domain web --alpha 0.8 --m 2 --seed 7 --workers 2 --out " + b.string() + kSmall)
              .status == 0);
  CHECK(slurp(a / "metrics.csv") == slurp(b / "metrics.csv"));
  auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(manifest["seed"] == 7);
  CHECK(manifest["config"]["beta"] == 0.0);
  CHECK(manifest["config"]["delta"] == 0.0);

  auto e = run("eval --checkpoint " + (a / "final").string() + " --envs login --levels 1 --episodes 1");
  CHECK(e.status == 0);
  CHECK(e.out.find("login") != std::string::npos);

  auto d = run("inspect-design --count 2 --checkpoint " + (a / "final").string());
  CHECK(d.status == 0);
  CHECK(nlohmann::json::parse(d.out).size() == 2);

  auto dr = scratch("train_dr");
  REQUIRE(run("train --algo dr --seed 7 --out " + dr.string() + kSmall).status == 0);
  CHECK_FALSE(fs::exists(dr / "final/generator.json"));
  fs::remove_all(a);
  fs::remove_all(b);
  fs::remove_all(dr);
}

TEST_CASE("eval reference policies and json agreement") {
  auto dir = scratch("eval");
  auto r = run("eval --policy scripted --episodes 2 --out " + dir.string());
  REQUIRE(r.status == 0);
  auto doc = nlohmann::json::parse(slurp(dir / "eval.json"));
  CHECK(doc["mean_success_rate"] == 1.0);
  std::size_t rows = 0;
  for (const auto& env : {"login", "address", "payment", "shopping", "flight"}) {
    auto pos = r.out.find(env);
    REQUIRE(pos != std::string::npos);
    CHECK(r.out.substr(pos, r.out.find('\n', pos) - pos).find("100.0%") != std::string::npos);
    ++rows;
  }
  CHECK(doc["results"].size() == rows * 4);
  CHECK(fs::exists(dir / "manifest.json"));

  auto rnd = run("eval --policy random --episodes 50 --envs flight --levels 4 --out " + dir.string());
  REQUIRE(rnd.status == 0);
  CHECK(nlohmann::json::parse(slurp(dir / "eval.json"))["results"][0]["success_rate"].get<double>() < 0.05);

  CHECK(run("eval --checkpoint /nonexistent/ckpt").status == 1);
  CHECK(run("eval").status == 2);
  fs::remove_all(dir);
}

TEST_CASE("export-html") {
  auto r = run("export-html --env login --level 1");
  REQUIRE(r.status == 0);
  CHECK(r.out.find("<html>") != std::string::npos);
  CHECK(r.out == run("export-html --env login --level 1").out);
  CHECK(run("export-html --env login --level 9").status == 2);
}
