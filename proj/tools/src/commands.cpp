#include "morphforest/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "morphforest/affixes.hpp"
#include "morphforest/config.hpp"
#include "morphforest/corpus.hpp"
#include "morphforest/error.hpp"
#include "morphforest/io.hpp"
#include "morphforest/metrics.hpp"
#include "morphforest/pipeline.hpp"
#include "morphforest/synth.hpp"
#include "morphforest/utf8.hpp"

namespace morphforest::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// A command-line flag that maps onto a config key; applied only when given.
struct Override {
  std::string key;
  std::string value;
  CLI::Option* option = nullptr;
};

struct ConfigFlags {
  std::string config_path;
  std::vector<std::string> sets;
  std::vector<std::unique_ptr<Override>> overrides;
  std::vector<std::pair<std::string, bool*>> switches;
  std::vector<std::unique_ptr<bool>> switch_storage;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "flat key = value config file")
        ->check(CLI::ExistingFile);
    app->add_option("--set", sets, "override any config key (key=value)");
  }
  void value(CLI::App* app, const std::string& flag, const std::string& key,
             const std::string& help) {
    auto o = std::make_unique<Override>();
    o->key = key;
    o->option = app->add_option(flag, o->value, help);
    overrides.push_back(std::move(o));
  }
  void flag(CLI::App* app, const std::string& flag, const std::string& key,
            const std::string& help) {
    switch_storage.push_back(std::make_unique<bool>(false));
    app->add_flag(flag, *switch_storage.back(), help);
    switches.emplace_back(key, switch_storage.back().get());
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_path.empty()) {
      cfg = parse_config(io::read_file(config_path), cfg, config_path);
    }
    for (const auto& o : overrides) {
      if (o->option->count() > 0 && o->key == "language") {
        set_config_value(cfg, o->key, o->value);
      }
    }
    for (const auto& o : overrides) {
      if (o->option->count() > 0 && o->key != "language") {
        set_config_value(cfg, o->key, o->value);
      }
    }
    for (const auto& [key, on] : switches) {
      if (*on) set_config_value(cfg, key, "true");
    }
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) {
        throw Error(ErrorKind::kUsage, "--set expects key=value, got '" + s + "'");
      }
      set_config_value(cfg, io::trim(std::string_view(s).substr(0, eq)),
                       io::trim(std::string_view(s).substr(eq + 1)));
    }
    validate(cfg);
    return cfg;
  }
};

ojson config_json(const RunConfig& cfg) {
  ojson j = ojson::object();
  for (const auto& kv : io::parse_key_values(serialize_config(cfg), "<config>")) {
    j[kv.key] = kv.value;
  }
  return j;
}

// ---------------------------------------------------------------- train

struct TrainInputs {
  std::string words;
  std::string vectors;
  std::string extra_affixes;
};

struct TrainRun {
  Vocabulary vocab;
  WordVectors vectors;
  TrainResult result;
};

TrainRun run_training(const RunConfig& cfg, const TrainInputs& in) {
  TrainRun run;
  run.vocab = load_wordlist(in.words, cfg.top_k, cfg.corpus);
  if (!in.vectors.empty()) {
    run.vectors = load_vectors(in.vectors, run.vocab, cfg.vector_retention, cfg.corpus);
  }
  AffixSet injected;
  if (!in.extra_affixes.empty()) {
    injected = parse_affixes(io::read_file(in.extra_affixes), in.extra_affixes);
  }
  run.result = train(run.vocab, run.vectors, cfg.train, injected);
  return run;
}

ojson round_json(const RoundReport& r) {
  ojson j{{"round", r.round},
          {"loss_first", r.losses.empty() ? 0.0 : r.losses.front()},
          {"loss_last", r.losses.empty() ? 0.0 : r.losses.back()},
          {"live_affixes_before", r.live_affixes_before},
          {"live_affixes", r.live_affixes},
          {"rejected", r.rejected},
          {"ilp_objective", r.ilp_objective},
          {"score", r.score},
          {"trees", r.trees}};
  j["proof"] = r.proof ? (*r.proof == Proof::kExact ? "exact" : "heuristic") : "none";
  j["nodes"] = r.nodes;
  if (!r.warning.empty()) j["warning"] = r.warning;
  return j;
}

void write_artifacts(const fs::path& dir, const RunConfig& cfg,
                     const TrainInputs& in, const TrainRun& run) {
  const auto& res = run.result;
  io::write_file(dir / "forest.tsv", serialize_forest(res.forest, res.affixes));
  io::write_file(dir / "affixes.tsv", serialize_affixes(res.affixes));
  io::write_file(dir / "model.tsv", serialize_weights(res.weights));
  io::write_file(dir / "siblings.tsv", serialize_siblings(res.siblings));
  io::write_file(dir / "vocab.tsv", serialize_wordlist(run.vocab));
  io::write_file(dir / "config.txt", serialize_config(cfg));

  ojson rounds = ojson::array();
  for (const auto& r : res.rounds) {
    rounds.push_back(round_json(r));
    io::write_file(dir / ("losses_round" + std::to_string(r.round) + ".csv"),
                   loss_curve_csv(r.losses));
  }
  ojson report{{"config", config_json(cfg)},
               {"rounds", rounds},
               {"final",
                {{"words", res.forest.size()},
                 {"trees", res.forest.tree_count()},
                 {"live_affixes", res.affixes.live_count()},
                 {"used_affixes", res.forest.used_affixes().size()},
                 {"score", res.rounds.empty() ? 0.0 : res.rounds.back().score}}}};
  io::write_file(dir / "report.json", report.dump(2) + "\n");

  ojson inputs = ojson::object();
  auto record = [&](const char* name, const std::string& path) {
    if (path.empty()) return;
    inputs[name] = {{"path", path}, {"fnv1a64", hex64(io::fnv1a64(io::read_file(path)))}};
  };
  record("words", in.words);
  record("vectors", in.vectors);
  record("extra_affixes", in.extra_affixes);
  ojson manifest{{"tool", "morphforest"},
                 {"version", std::string(version())},
                 {"config_hash", hex64(config_hash(cfg))},
                 {"inputs", inputs}};
  io::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

void print_rounds(std::ostream& out, const TrainResult& res) {
  out << "round  loss_start    loss_end      affixes  rejected  ilp_obj       score         trees  proof\n";
  for (const auto& r : res.rounds) {
    char line[256];
    std::snprintf(line, sizeof line,
                  "%5zu  %-12.6g  %-12.6g  %7zu  %8zu  %-12.6g  %-12.6g  %5zu  %s\n",
                  r.round, r.losses.empty() ? 0.0 : r.losses.front(),
                  r.losses.empty() ? 0.0 : r.losses.back(), r.live_affixes,
                  r.rejected, r.ilp_objective, r.score, r.trees,
                  r.proof ? (*r.proof == Proof::kExact ? "exact" : "heuristic")
                          : "none");
    out << line;
    if (!r.warning.empty()) out << "       warning: " << r.warning << '\n';
  }
}

std::string candidate_row(const Candidate& c, const AffixSet& affixes) {
  std::string labels;
  for (const auto& id : c.affix_ids) {
    if (!labels.empty()) labels += ',';
    labels += affixes.label(id);
  }
  return c.child + '\t' + c.parent + '\t' + std::string(to_string(c.dtype)) + '\t' +
         (labels.empty() ? "-" : labels);
}

void dump_candidates(const fs::path& dir, const RunConfig& cfg, const TrainRun& run,
                     bool candidates, bool features) {
  const auto& res = run.result;
  EdgeModel model(run.vocab, run.vectors, res.affixes, res.siblings, res.weights,
                  cfg.train);
  const FeatureContext ctx{run.vocab, run.vectors, res.affixes, res.siblings};
  std::string cand_out, feat_out;
  for (const auto& e : run.vocab.entries()) {
    for (const auto& c : model.scored_candidates(e.word)) {
      const auto row = candidate_row(c, res.affixes);
      if (candidates) cand_out += row + '\t' + io::format_double(c.log_prob) + '\n';
      if (features) {
        feat_out += row;
        for (const auto& [name, v] : feature_names(c, ctx, cfg.train.features)) {
          feat_out += '\t' + name + '=' + io::format_double(v);
        }
        feat_out += '\n';
      }
    }
  }
  if (candidates) io::write_file(dir / "candidates.tsv", cand_out);
  if (features) io::write_file(dir / "features.tsv", feat_out);
}

// ---------------------------------------------------------------- artifacts

struct Artifacts {
  RunConfig cfg;
  Vocabulary vocab;
  WordVectors vectors;
  AffixSet affixes;
  Weights weights;
  SiblingTable siblings;
  Forest forest;
  std::unique_ptr<EdgeModel> model;
};

std::unique_ptr<Artifacts> load_artifacts(const fs::path& dir,
                                          const std::string& vectors_path) {
  for (const char* name : {"config.txt", "vocab.tsv", "affixes.tsv", "model.tsv",
                           "siblings.tsv", "forest.tsv"}) {
    if (!fs::exists(dir / name)) {
      throw Error(ErrorKind::kIo, "model directory " + dir.string() + " lacks " + name +
                                      "; run 'train' first");
    }
  }
  auto a = std::make_unique<Artifacts>();
  a->cfg = parse_config(io::read_file(dir / "config.txt"), {},
                        (dir / "config.txt").string());
  a->vocab = parse_wordlist(io::read_file(dir / "vocab.tsv"),
                            std::numeric_limits<std::size_t>::max(),
                            CorpusOptions{false, false}, (dir / "vocab.tsv").string());
  a->affixes = parse_affixes(io::read_file(dir / "affixes.tsv"),
                             (dir / "affixes.tsv").string());
  a->weights = parse_weights(io::read_file(dir / "model.tsv"), (dir / "model.tsv").string());
  a->siblings = parse_siblings(io::read_file(dir / "siblings.tsv"),
                               (dir / "siblings.tsv").string());
  a->forest = parse_forest(io::read_file(dir / "forest.tsv"), a->affixes,
                           (dir / "forest.tsv").string());
  if (!vectors_path.empty()) {
    a->vectors = load_vectors(vectors_path, a->vocab, a->cfg.vector_retention,
                              a->cfg.corpus);
  }
  a->model = std::make_unique<EdgeModel>(a->vocab, a->vectors, a->affixes,
                                         a->siblings, a->weights, a->cfg.train);
  return a;
}

// First column of each non-blank, non-comment line, normalized.
std::vector<std::string> read_words(const std::string& path, const CorpusOptions& opts) {
  const std::string text = io::read_file(path);
  std::vector<std::string> out;
  StringSet seen;
  for (auto line : io::lines(text)) {
    line = io::trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto word = utf8::normalize(io::trim(io::split(line, '\t').front()), opts.lowercase);
    if (!word.empty() && seen.insert(word).second) out.push_back(word);
  }
  return out;
}

std::vector<std::string> words_or_vocab(const Artifacts& a, const std::string& input) {
  if (!input.empty()) return read_words(input, a.cfg.corpus);
  std::vector<std::string> out;
  for (const auto& e : a.forest.words()) out.push_back(e);
  return out;
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    io::write_file(path, text);
  }
}

std::string segment_lines(const Decoder& dec, const std::vector<std::string>& words) {
  std::string text;
  for (const auto& w : words) {
    const auto seg = dec.segment(w);
    text += w + '\t';
    for (std::size_t i = 0; i < seg.morphs.size(); ++i) {
      if (i > 0) text += ' ';
      text += seg.morphs[i];
    }
    text += '\n';
  }
  return text;
}

// ---------------------------------------------------------------- sweep

std::vector<double> parse_grid(const std::string& text, const char* what) {
  std::vector<double> out;
  for (auto item : io::split(text, ',')) {
    item = io::trim(item);
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      const double v = std::stod(std::string(item), &used);
      if (used != item.size() || !std::isfinite(v)) throw std::invalid_argument("");
      out.push_back(v);
    } catch (const std::exception&) {
      throw Error(ErrorKind::kUsage, std::string("bad ") + what + " value '" +
                                         std::string(item) + "'");
    }
  }
  if (out.empty()) throw Error(ErrorKind::kUsage, std::string("empty ") + what + " grid");
  return out;
}

struct CellResult {
  bool ok = false;
  PRF prf;
  std::string error;
};

CellResult run_cell(const fs::path& dir, const RunConfig& cfg, const TrainInputs& in,
                    const GoldSegmentations& gold, bool resume) {
  CellResult cell;
  const auto eval_path = dir / "eval.json";
  const auto manifest_path = dir / "manifest.json";
  if (resume && fs::exists(eval_path) && fs::exists(manifest_path)) {
    try {
      const auto manifest = nlohmann::json::parse(io::read_file(manifest_path));
      if (manifest.value("config_hash", "") == hex64(config_hash(cfg))) {
        const auto eval = nlohmann::json::parse(io::read_file(eval_path));
        cell.prf = {eval.at("P").get<double>(), eval.at("R").get<double>(),
                    eval.at("F1").get<double>()};
        cell.ok = true;
        return cell;
      }
    } catch (const std::exception&) {
      // Stale or damaged cell; recompute.
    }
  }
  try {
    fs::remove(eval_path);
    const TrainRun run = run_training(cfg, in);
    write_artifacts(dir, cfg, in, run);
    EdgeModel model(run.vocab, run.vectors, run.result.affixes, run.result.siblings,
                    run.result.weights, cfg.train);
    Decoder dec(run.result.forest, &model);
    StringMap<BoundarySet> pred;
    for (const auto& [word, _] : gold) {
      const auto seg = dec.segment(word);
      pred.emplace(word, BoundarySet(seg.boundaries.begin(), seg.boundaries.end()));
    }
    const BprResult r = bpr(pred, gold);
    io::write_file(eval_path, to_json(r) + "\n");
    cell.prf = r.prf;
    cell.ok = true;
  } catch (const std::exception& e) {
    cell.error = e.what();
    io::write_file(dir / "error.txt", cell.error + "\n");
  }
  return cell;
}

}  // namespace

int exit_code(const std::exception& error) {
  if (const auto* e = dynamic_cast<const Error*>(&error)) {
    switch (e->kind()) {
      case ErrorKind::kUsage: return 1;
      case ErrorKind::kIo:
      case ErrorKind::kParse:
      case ErrorKind::kFormat:
      case ErrorKind::kEmptyVocabulary:
      case ErrorKind::kValidation: return 2;
      case ErrorKind::kContract:
      case ErrorKind::kNumerical: return 3;
    }
  }
  if (dynamic_cast<const CLI::Error*>(&error)) return 1;
  return 3;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"morphforest: unsupervised morphological forests", "morphforest"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  // train
  auto* train_cmd = app.add_subcommand("train", "induce a forest from a word list");
  TrainInputs train_in;
  std::string train_out = "out";
  bool dump_cands = false, dump_feats = false;
  ConfigFlags train_flags;
  train_flags.attach(train_cmd);
  train_cmd->add_option("--words", train_in.words, "word<TAB>count list (.gz ok)")
      ->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--vectors", train_in.vectors, "word2vec text vectors")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--extra-affixes", train_in.extra_affixes,
                        "affix TSV added to the extracted inventory")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--out", train_out, "output directory");
  train_cmd->add_flag("--dump-candidates", dump_cands, "write candidates.tsv");
  train_cmd->add_flag("--dump-features", dump_feats, "write features.tsv");
  train_flags.value(train_cmd, "--top-k", "top_k", "vocabulary size");
  train_flags.value(train_cmd, "--affixes", "affixes_per_side", "affix budget per side");
  train_flags.value(train_cmd, "--alpha", "alpha", "affix cost");
  train_flags.value(train_cmd, "--beta", "beta", "tree cost");
  train_flags.value(train_cmd, "--rounds", "rounds", "alternating rounds");
  train_flags.value(train_cmd, "--ilp-mode", "ilp_mode", "exact, greedy or off");
  train_flags.value(train_cmd, "--exact-limit", "exact_limit", "max affixes for exact search");
  train_flags.value(train_cmd, "--node-budget", "node_budget", "branch-and-bound nodes");
  train_flags.value(train_cmd, "--seed", "seed", "random seed");
  train_flags.value(train_cmd, "--language", "language", "english, german or none");
  train_flags.value(train_cmd, "--adam-lr", "adam_lr", "Adam step size");
  train_flags.value(train_cmd, "--adam-iters", "adam_iters", "Adam iterations");
  train_flags.value(train_cmd, "--max-neighbors", "max_neighbors", "neighborhood cap");
  train_flags.flag(train_cmd, "--sibl", "sibl", "sibling feature");
  train_flags.flag(train_cmd, "--comp", "comp", "compound candidates");

  // segment / roots / families
  struct Apply {
    std::string model, input, output, vectors;
    bool flat = false;
    ConfigFlags flags;
  };
  Apply seg_args, root_args, fam_args;
  auto add_apply = [&](const char* name, const char* help, Apply& a, bool input) {
    auto* cmd = app.add_subcommand(name, help);
    a.flags.attach(cmd);
    cmd->add_option("--model", a.model, "trained output directory")->required();
    if (input) {
      cmd->add_option("--input", a.input, "words to process (default: vocabulary)")
          ->check(CLI::ExistingFile);
    }
    cmd->add_option("--output,-o", a.output, "output file (default: stdout)");
    cmd->add_option("--vectors", a.vectors, "vectors used at training time")
        ->check(CLI::ExistingFile);
    return cmd;
  };
  auto* seg_cmd = add_apply("segment", "segment words", seg_args, true);
  seg_cmd->add_flag("--no-recurse", seg_args.flat, "only the top derivation step");
  auto* root_cmd = add_apply("roots", "predict roots", root_args, true);
  auto* fam_cmd = add_apply("families", "list morphological families", fam_args, false);

  // eval-*
  struct Eval {
    std::string pred, gold, report;
    bool macro = false;
    ConfigFlags flags;
  };
  Eval seg_eval, clu_eval, root_eval;
  auto add_eval = [&](const char* name, const char* help, Eval& e) {
    auto* cmd = app.add_subcommand(name, help);
    e.flags.attach(cmd);
    cmd->add_option("--pred", e.pred, "predictions")->required()->check(CLI::ExistingFile);
    cmd->add_option("--gold", e.gold, "gold standard")->required()->check(CLI::ExistingFile);
    cmd->add_option("--report", e.report, "also write the JSON report here");
    return cmd;
  };
  auto* eval_seg_cmd = add_eval("eval-seg", "boundary precision/recall", seg_eval);
  eval_seg_cmd->add_flag("--macro", seg_eval.macro, "average per word");
  auto* eval_clu_cmd = add_eval("eval-cluster", "family clustering scores", clu_eval);
  auto* eval_root_cmd = add_eval("eval-root", "root accuracy", root_eval);

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "train and score over an alpha x beta grid");
  TrainInputs sweep_in;
  std::string sweep_gold, sweep_alphas, sweep_betas, sweep_out = "sweep";
  bool sweep_resume = false;
  unsigned sweep_jobs = 1;
  ConfigFlags sweep_flags;
  sweep_flags.attach(sweep_cmd);
  sweep_cmd->add_option("--words", sweep_in.words, "word list")->required()
      ->check(CLI::ExistingFile);
  sweep_cmd->add_option("--vectors", sweep_in.vectors, "vectors")->check(CLI::ExistingFile);
  sweep_cmd->add_option("--extra-affixes", sweep_in.extra_affixes, "affix TSV")
      ->check(CLI::ExistingFile);
  sweep_cmd->add_option("--gold", sweep_gold, "gold segmentations")->required()
      ->check(CLI::ExistingFile);
  sweep_cmd->add_option("--alphas", sweep_alphas, "comma-separated alpha values")->required();
  sweep_cmd->add_option("--betas", sweep_betas, "comma-separated beta values")->required();
  sweep_cmd->add_option("--out", sweep_out, "output directory");
  sweep_cmd->add_flag("--resume", sweep_resume, "skip cells that are already complete");
  sweep_cmd->add_option("--jobs,-j", sweep_jobs, "parallel cells")->check(CLI::PositiveNumber);
  sweep_flags.value(sweep_cmd, "--top-k", "top_k", "vocabulary size");
  sweep_flags.value(sweep_cmd, "--rounds", "rounds", "alternating rounds");
  sweep_flags.value(sweep_cmd, "--ilp-mode", "ilp_mode", "exact, greedy or off");
  sweep_flags.value(sweep_cmd, "--seed", "seed", "random seed");
  sweep_flags.value(sweep_cmd, "--language", "language", "english, german or none");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic fixture");
  std::string synth_spec, synth_out;
  std::optional<std::uint64_t> synth_seed;
  std::string synth_config;
  synth_cmd->add_option("--spec", synth_spec, "grammar spec (key = value)")
      ->check(CLI::ExistingFile);
  synth_cmd->add_option("--out", synth_out, "output directory")->required();
  synth_cmd->add_option("--seed", synth_seed, "override the grammar seed");
  synth_cmd->add_option("--config", synth_config, "alias of --spec")->check(CLI::ExistingFile);

  // extract-affixes
  auto* extract_cmd = app.add_subcommand("extract-affixes", "affix inventory as TSV");
  std::string extract_words, extract_out;
  ConfigFlags extract_flags;
  extract_flags.attach(extract_cmd);
  extract_cmd->add_option("--words", extract_words, "word list")->required()
      ->check(CLI::ExistingFile);
  extract_cmd->add_option("--out,-o", extract_out, "output file (default: stdout)");
  extract_flags.value(extract_cmd, "--top-k", "top_k", "vocabulary size");
  extract_flags.value(extract_cmd, "--affixes", "affixes_per_side", "affix budget per side");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << version() << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "morphforest: " << e.what() << '\n';
    if (auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front()) {
      err << "run 'morphforest " << sub->get_name() << " --help' for usage\n";
    } else {
      err << "run 'morphforest --help' for usage\n";
    }
    return 1;
  }

  try {
    if (train_cmd->parsed()) {
      const RunConfig cfg = train_flags.resolve();
      const fs::path dir = train_out;
      const TrainRun run = run_training(cfg, train_in);
      write_artifacts(dir, cfg, train_in, run);
      if (dump_cands || dump_feats) dump_candidates(dir, cfg, run, dump_cands, dump_feats);
      print_rounds(out, run.result);
      out << "wrote " << dir.string() << " (" << run.result.forest.size() << " words, "
          << run.result.forest.tree_count() << " trees, "
          << run.result.affixes.live_count() << " live affixes)\n";
      return 0;
    }

    for (auto [cmd, args] : {std::pair{seg_cmd, &seg_args}, std::pair{root_cmd, &root_args},
                             std::pair{fam_cmd, &fam_args}}) {
      if (!cmd->parsed()) continue;
      auto a = load_artifacts(args->model, args->vectors);
      if (!args->flags.config_path.empty() || !args->flags.sets.empty()) {
        // Only corpus normalization settings matter when applying a model.
        const RunConfig over = args->flags.resolve();
        a->cfg.corpus = over.corpus;
      }
      Decoder dec(a->forest, a->model.get());
      std::string text;
      if (cmd == seg_cmd) {
        const auto words = words_or_vocab(*a, args->input);
        if (args->flat) {
          for (const auto& w : words) {
            const auto seg = dec.segment(w, false);
            text += w + '\t';
            for (std::size_t i = 0; i < seg.morphs.size(); ++i) {
              text += (i > 0 ? " " : "") + seg.morphs[i];
            }
            text += '\n';
          }
        } else {
          text = segment_lines(dec, words);
        }
      } else if (cmd == root_cmd) {
        for (const auto& w : words_or_vocab(*a, args->input)) {
          text += w + '\t' + dec.root_of(w) + '\n';
        }
      } else {
        for (const auto& fam : dec.families()) {
          for (const auto& m : fam.members) text += fam.root + '\t' + m + '\n';
        }
      }
      emit(args->output, text, out);
      return 0;
    }

    if (eval_seg_cmd->parsed() || eval_clu_cmd->parsed() || eval_root_cmd->parsed()) {
      const Eval& e = eval_seg_cmd->parsed() ? seg_eval
                      : eval_clu_cmd->parsed() ? clu_eval
                                               : root_eval;
      const RunConfig cfg = e.flags.resolve();
      const bool lower = cfg.corpus.lowercase;
      const std::string pred_text = io::read_file(e.pred);
      const std::string gold_text = io::read_file(e.gold);
      std::string summary, json;
      if (&e == &seg_eval) {
        const auto r = bpr(parse_predicted_segmentations(pred_text, lower, e.pred),
                           parse_gold_segmentations(gold_text, lower, e.gold),
                           e.macro ? Averaging::kMacro : Averaging::kMicro);
        summary = "P " + fixed(r.prf.precision) + "  R " + fixed(r.prf.recall) + "  F1 " +
                  fixed(r.prf.f1) + "  (tp " + std::to_string(r.tp) + ", fp " +
                  std::to_string(r.fp) + ", fn " + std::to_string(r.fn) + ")";
        json = to_json(r);
      } else if (&e == &clu_eval) {
        const auto r = cluster_prf(parse_predicted_families(pred_text, lower, e.pred),
                                   parse_gold_clusters(gold_text, lower, e.gold));
        summary = "P " + fixed(r.prf.precision) + "  R " + fixed(r.prf.recall) + "  F1 " +
                  fixed(r.prf.f1) + "  (C " + fixed(r.correct) + ", I " +
                  fixed(r.inserted) + ", D " + fixed(r.deleted) + ")";
        json = to_json(r);
      } else {
        const auto r = root_accuracy(parse_predicted_roots(pred_text, lower, e.pred),
                                     parse_gold_roots(gold_text, lower, e.gold));
        summary = "accuracy " + fixed(r.accuracy) + "  (" + std::to_string(r.correct) +
                  "/" + std::to_string(r.words) + ")";
        json = to_json(r);
      }
      out << summary << '\n' << json << '\n';
      if (!e.report.empty()) io::write_file(e.report, json + "\n");
      return 0;
    }

    if (sweep_cmd->parsed()) {
      const RunConfig base = sweep_flags.resolve();
      const auto alphas = parse_grid(sweep_alphas, "alpha");
      const auto betas = parse_grid(sweep_betas, "beta");
      const auto gold = parse_gold_segmentations(io::read_file(sweep_gold),
                                                 base.corpus.lowercase, sweep_gold);
      struct Cell {
        double alpha, beta;
        fs::path dir;
        RunConfig cfg;
        CellResult result;
      };
      std::vector<Cell> cells;
      for (double a : alphas) {
        for (double b : betas) {
          Cell c{a, b, fs::path(sweep_out) /
                           ("alpha_" + io::format_double(a) + "_beta_" + io::format_double(b)),
                 base, {}};
          c.cfg.train.alpha = a;
          c.cfg.train.beta = b;
          validate(c.cfg);
          cells.push_back(std::move(c));
        }
      }
      std::atomic<std::size_t> next{0};
      std::mutex print;
      auto worker = [&]() {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
          auto& c = cells[i];
          c.result = run_cell(c.dir, c.cfg, sweep_in, gold, sweep_resume);
          std::lock_guard lock(print);
          out << "alpha " << io::format_double(c.alpha) << " beta "
              << io::format_double(c.beta) << ": "
              << (c.result.ok ? "F1 " + fixed(c.result.prf.f1) : "failed: " + c.result.error)
              << '\n';
        }
      };
      const unsigned jobs = std::max(1u, std::min<unsigned>(
                                             sweep_jobs, static_cast<unsigned>(cells.size())));
      std::vector<std::thread> pool;
      for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
      worker();
      for (auto& t : pool) t.join();

      std::string csv = "alpha,beta,P,R,F1\n";
      std::size_t failed = 0;
      for (const auto& c : cells) {
        csv += io::format_double(c.alpha) + ',' + io::format_double(c.beta) + ',';
        if (c.result.ok) {
          csv += io::format_double(c.result.prf.precision) + ',' +
                 io::format_double(c.result.prf.recall) + ',' +
                 io::format_double(c.result.prf.f1) + '\n';
        } else {
          csv += "nan,nan,nan\n";
          ++failed;
        }
      }
      io::write_file(fs::path(sweep_out) / "sweep.csv", csv);
      out << "wrote " << (fs::path(sweep_out) / "sweep.csv").string() << " ("
          << cells.size() << " cells, " << failed << " failed)\n";
      return failed == cells.size() ? 2 : 0;
    }

    if (synth_cmd->parsed()) {
      const std::string spec_path = synth_spec.empty() ? synth_config : synth_spec;
      GrammarSpec spec;
      if (!spec_path.empty()) spec = parse_spec(io::read_file(spec_path), spec_path);
      if (synth_seed) spec.seed = *synth_seed;
      const SynthCorpus corpus = generate(spec);
      write_corpus(corpus, synth_out);
      io::write_file(fs::path(synth_out) / "spec.txt", serialize_spec(spec));
      out << "wrote " << corpus.words.size() << " words, " << corpus.roots.size()
          << " roots, " << corpus.decoys.size() << " decoys to " << synth_out << '\n';
      return 0;
    }

    if (extract_cmd->parsed()) {
      const RunConfig cfg = extract_flags.resolve();
      const Vocabulary vocab = load_wordlist(extract_words, cfg.top_k, cfg.corpus);
      emit(extract_out, serialize_affixes(extract_affixes(vocab, cfg.train.extraction)), out);
      return 0;
    }
  } catch (const std::exception& e) {
    err << "morphforest: " << e.what() << '\n';
    return exit_code(e);
  }
  err << "morphforest: no command\n";
  return 1;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  for (const auto& a : args) argv.push_back(a.c_str());
  argv.push_back(nullptr);
  return run(static_cast<int>(args.size()), argv.data(), out, err);
}

}  // namespace morphforest::cli
