#include <doctest.h>

#include <nlohmann/json.hpp>

#include <regex>
#include <sstream>

#include "morphforest/cli.hpp"
#include "morphforest/io.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using morphforest::io::read_file;
using morphforest::io::write_file;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "morphforest");
  std::ostringstream out, err;
  const int code = morphforest::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

const fs::path kFixtures = MORPHFOREST_FIXTURES_DIR;

// Synthesizes the fixture corpus once per process.
const fs::path& corpus_dir() {
  static const fs::path dir = [] {
    auto d = oracle::temp_dir("cli_corpus");
    const auto r = run({"synth", "--spec", (kFixtures / "synthetic.spec").string(), "--out", d.string()});
    REQUIRE(r.code == 0);
    return d;
  }();
  return dir;
}

std::vector<std::string> train_args(const fs::path& out) {
  const auto c = corpus_dir();
  return {"train", "--words", (c / "words.tsv").string(), "--extra-affixes",
          (c / "decoys.tsv").string(), "--config", (kFixtures / "synthetic.conf").string(),
          "--out", out.string()};
}

std::string config_value(const fs::path& model, const std::string& key) {
  const std::regex re("^" + key + " = (.*)$");
  for (auto line : morphforest::io::lines(read_file(model / "config.txt"))) {
    std::smatch m;
    const std::string s(line);
    if (std::regex_match(s, m, re)) return m[1];
  }
  return "";
}

}  // namespace

TEST_CASE("synth writes the corpus files") {
  const auto& c = corpus_dir();
  for (const char* f : {"words.tsv", "gold_seg.tsv", "gold_clusters.tsv", "gold_roots.tsv",
                        "decoys.tsv", "spec.txt"}) {
    CHECK(fs::exists(c / f));
  }
  CHECK(read_file(c / "spec.txt") == read_file(kFixtures / "synthetic.spec"));
}

TEST_CASE("train, apply and evaluate") {
  const auto dir = oracle::temp_dir("cli_flow");
  const auto model = dir / "model";
  auto r = run(train_args(model));
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("round") != std::string::npos);
  for (const char* f : {"forest.tsv", "affixes.tsv", "model.tsv", "siblings.tsv", "vocab.tsv",
                        "config.txt", "report.json", "manifest.json", "losses_round1.csv"}) {
    CHECK(fs::exists(model / f));
  }
  const auto report = nlohmann::json::parse(read_file(model / "report.json"));
  CHECK(report.contains("config"));
  CHECK(report["rounds"].size() >= 1);
  const auto manifest = nlohmann::json::parse(read_file(model / "manifest.json"));
  CHECK(manifest["config_hash"].get<std::string>().size() == 16);

  const auto c = corpus_dir();
  r = run({"segment", "--model", model.string(), "-o", (dir / "seg.tsv").string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  r = run({"eval-seg", "--pred", (dir / "seg.tsv").string(), "--gold", (c / "gold_seg.tsv").string(),
           "--report", (dir / "seg.json").string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto seg = nlohmann::json::parse(read_file(dir / "seg.json"));
  CHECK(seg["task"] == "segmentation");
  CHECK(seg["F1"].get<double>() >= 0.95);
  CHECK(std::regex_search(r.out, std::regex(R"(^P \d\.\d{4}  R \d\.\d{4}  F1 \d\.\d{4})")));

  r = run({"families", "--model", model.string(), "-o", (dir / "fam.tsv").string()});
  REQUIRE(r.code == 0);
  r = run({"eval-cluster", "--pred", (dir / "fam.tsv").string(), "--gold",
           (c / "gold_clusters.tsv").string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("\"task\": \"clustering\"") != std::string::npos);

  r = run({"roots", "--model", model.string(), "-o", (dir / "roots.tsv").string()});
  REQUIRE(r.code == 0);
  r = run({"eval-root", "--pred", (dir / "roots.tsv").string(), "--gold",
           (c / "gold_roots.tsv").string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(std::regex_search(r.out, std::regex(R"(^accuracy \d\.\d{4} )")));

  // unseen words through the trained model
  write_file(dir / "test.txt", "# words\nzzzzka\nZZZZKA\n");
  r = run({"segment", "--model", model.string(), "--input", (dir / "test.txt").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("zzzzka\t", 0) == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 1);

  SUBCASE("identical runs give identical artifacts") {
    REQUIRE(run(train_args(dir / "again")).code == 0);
    for (const char* f : {"forest.tsv", "model.tsv", "affixes.tsv", "config.txt", "manifest.json"}) {
      CHECK(read_file(model / f) == read_file(dir / "again" / f));
    }
  }
  fs::remove_all(dir);
}

TEST_CASE("flags override the config file and --set overrides flags") {
  const auto dir = oracle::temp_dir("cli_prec");
  auto args = train_args(dir / "a");
  for (const char* extra : {"--rounds", "1", "--adam-iters", "5"}) args.push_back(extra);
  REQUIRE(run(args).code == 0);
  CHECK(config_value(dir / "a", "alpha") == "0.3");
  CHECK(config_value(dir / "a", "rounds") == "1");

  args = train_args(dir / "b");
  for (const char* extra : {"--rounds", "1", "--adam-iters", "5", "--alpha", "0.2"}) args.push_back(extra);
  REQUIRE(run(args).code == 0);
  CHECK(config_value(dir / "b", "alpha") == "0.2");

  args = train_args(dir / "c");
  for (const char* extra : {"--rounds", "1", "--adam-iters", "5", "--alpha", "0.2", "--set", "alpha=0.1"}) {
    args.push_back(extra);
  }
  REQUIRE(run(args).code == 0);
  CHECK(config_value(dir / "c", "alpha") == "0.1");
  fs::remove_all(dir);
}

TEST_CASE("evaluation of the paint example files") {
  const auto dir = oracle::temp_dir("cli_eval");
  write_file(dir / "pred.tsv", "x\tpaint\nx\tpaints\nx\tpain\n");
  write_file(dir / "gold.tsv", "paint\ta\npaints\ta\npain\tb\n");
  auto r = run({"eval-cluster", "--pred", (dir / "pred.tsv").string(), "--gold", (dir / "gold.tsv").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("P 0.5000  R 1.0000  F1 0.6667", 0) == 0);

  write_file(dir / "seg.tsv", "paints\tpaint s\n");
  r = run({"eval-seg", "--pred", (dir / "seg.tsv").string(), "--gold", (dir / "seg.tsv").string()});
  CHECK(r.out.rfind("P 1.0000  R 1.0000  F1 1.0000", 0) == 0);

  write_file(dir / "other.tsv", "walks\twalk s\n");
  r = run({"eval-seg", "--pred", (dir / "other.tsv").string(), "--gold", (dir / "seg.tsv").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("walks") != std::string::npos);

  write_file(dir / "bad.tsv", "paints paint s\n");
  r = run({"eval-seg", "--pred", (dir / "bad.tsv").string(), "--gold", (dir / "seg.tsv").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find(":1:") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"train"}).code == 1);
  CHECK(run({"--version"}).code == 0);
  const auto dir = oracle::temp_dir("cli_codes");
  write_file(dir / "words.tsv", "walk\tmany\n");
  CHECK(run({"train", "--words", (dir / "words.tsv").string(), "--out", (dir / "o").string()}).code == 2);
  write_file(dir / "words.tsv", "walk\t3\n");
  CHECK(run({"train", "--words", (dir / "words.tsv").string(), "--set", "alpha=lots"}).code == 1);
  CHECK(run({"train", "--words", (dir / "words.tsv").string(), "--alpha", "-1"}).code == 2);
  CHECK(run({"segment", "--model", (dir / "missing").string()}).code == 2);
  fs::remove_all(dir);
}

TEST_CASE("sweep writes one row per cell and resumes") {
  const auto dir = oracle::temp_dir("cli_sweep");
  const auto c = corpus_dir();
  const std::vector<std::string> args{
      "sweep", "--words", (c / "words.tsv").string(), "--extra-affixes", (c / "decoys.tsv").string(),
      "--gold", (c / "gold_seg.tsv").string(), "--config", (kFixtures / "synthetic.conf").string(),
      "--alphas", "0,0.3", "--betas", "0.5,1", "--out", (dir / "s").string(), "--set", "adam_iters=30",
      "--set", "rounds=2", "-j", "2"};
  auto r = run(args);
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto csv = read_file(dir / "s" / "sweep.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(csv.rfind("alpha,beta,P,R,F1\n0,0.5,", 0) == 0);

  // a doctored cell is reused, a removed cell is recomputed
  const auto kept = dir / "s" / "alpha_0_beta_1";
  write_file(kept / "eval.json", R"({"task":"segmentation","P":0.125,"R":0.25,"F1":0.1666})");
  fs::remove_all(dir / "s" / "alpha_0.3_beta_1");
  auto resumed = args;
  resumed.push_back("--resume");
  r = run(resumed);
  REQUIRE(r.code == 0);
  const auto csv2 = read_file(dir / "s" / "sweep.csv");
  CHECK(csv2.find("0,1,0.125,0.25,0.1666\n") != std::string::npos);
  CHECK(fs::exists(dir / "s" / "alpha_0.3_beta_1" / "eval.json"));
  fs::remove_all(dir);
}

TEST_CASE("extract-affixes") {
  const auto dir = oracle::temp_dir("cli_extract");
  write_file(dir / "w.tsv", "walk\t1\nwalks\t1\nwalked\t1\ntalk\t1\ntalks\t1\n");
  const auto r = run({"extract-affixes", "--words", (dir / "w.tsv").string(), "--set",
                      "min_affix_support=1", "--set", "language=none"});
  REQUIRE(r.code == 0);
  CHECK(r.out == "suffix\ts\t2\t1\nsuffix\ted\t1\t1\n");
  fs::remove_all(dir);
}
