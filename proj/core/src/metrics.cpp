#include "morphforest/metrics.hpp"

#include <algorithm>
#include <map>
#include <utility>

#include <json.hpp>

#include "morphforest/error.hpp"
#include "morphforest/io.hpp"
#include "morphforest/utf8.hpp"

namespace morphforest {

PRF PRF::from(double precision, double recall) {
  PRF out{precision, recall, 0.0};
  if (precision + recall > 0.0) {
    out.f1 = 2.0 * precision * recall / (precision + recall);
  }
  return out;
}

BoundarySet boundaries_of(const std::vector<std::string>& morphs) {
  BoundarySet out;
  std::size_t pos = 0;
  for (std::size_t i = 0; i + 1 < morphs.size(); ++i) {
    pos += utf8::length(morphs[i]);
    out.insert(pos);
  }
  return out;
}

namespace {

struct Tally {
  std::size_t tp = 0, fp = 0, fn = 0;
};

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 1.0 : static_cast<double>(num) / static_cast<double>(den);
}

PRF prf_of(const Tally& t) {
  return PRF::from(ratio(t.tp, t.tp + t.fp), ratio(t.tp, t.tp + t.fn));
}

Tally compare(const BoundarySet& pred, const BoundarySet& gold) {
  Tally t;
  for (auto b : pred) {
    if (gold.contains(b)) {
      ++t.tp;
    } else {
      ++t.fp;
    }
  }
  t.fn = gold.size() - t.tp;
  return t;
}

}  // namespace

BprResult bpr(const StringMap<BoundarySet>& predicted,
              const GoldSegmentations& gold, Averaging averaging) {
  std::vector<std::string> missing;
  for (const auto& [word, _] : predicted) {
    if (!gold.contains(word)) missing.push_back(word);
  }
  if (!missing.empty()) {
    std::sort(missing.begin(), missing.end());
    std::string msg = "bpr: " + std::to_string(missing.size()) +
                      " predicted word(s) missing from gold:";
    for (std::size_t i = 0; i < missing.size() && i < 10; ++i) {
      msg += " " + missing[i];
    }
    if (missing.size() > 10) msg += " ...";
    throw Error(ErrorKind::kValidation, msg);
  }
  if (predicted.empty()) throw Error(ErrorKind::kValidation, "bpr: no predictions");

  BprResult out;
  Tally total;
  double sum_p = 0.0, sum_r = 0.0;
  for (const auto& [word, pred] : predicted) {
    const auto& alternatives = gold.find(word)->second;
    Tally best;
    double best_f1 = -1.0;
    for (const auto& alt : alternatives) {
      const Tally t = compare(pred, boundaries_of(alt));
      const double f1 = prf_of(t).f1;
      if (f1 > best_f1) {
        best_f1 = f1;
        best = t;
      }
    }
    total.tp += best.tp;
    total.fp += best.fp;
    total.fn += best.fn;
    const PRF w = prf_of(best);
    sum_p += w.precision;
    sum_r += w.recall;
    ++out.words;
  }
  out.tp = total.tp;
  out.fp = total.fp;
  out.fn = total.fn;
  if (averaging == Averaging::kMicro) {
    out.prf = prf_of(total);
  } else {
    const double n = static_cast<double>(out.words);
    out.prf = PRF::from(sum_p / n, sum_r / n);
  }
  return out;
}

ClusterResult cluster_prf(const StringMap<std::string>& predicted,
                          const GoldClusters& gold) {
  std::vector<std::pair<const std::string*, const std::string*>> shared;
  for (const auto& [word, pid] : predicted) {
    if (auto it = gold.find(word); it != gold.end()) {
      shared.emplace_back(&pid, &it->second);
    }
  }
  if (shared.empty()) {
    throw Error(ErrorKind::kValidation,
                "cluster_prf: predicted and gold clusters share no words");
  }
  std::map<std::string_view, double> pred_size, gold_size;
  std::map<std::pair<std::string_view, std::string_view>, double> both;
  for (auto [p, g] : shared) {
    pred_size[*p] += 1.0;
    gold_size[*g] += 1.0;
    both[{*p, *g}] += 1.0;
  }
  ClusterResult out;
  for (auto [p, g] : shared) {
    const double x = pred_size[*p];
    const double y = gold_size[*g];
    const double xy = both[{*p, *g}];
    out.correct += xy / y;
    out.inserted += (x - xy) / y;
    out.deleted += (y - xy) / y;
  }
  out.words = shared.size();
  const double p = out.correct / (out.correct + out.inserted);
  const double r = out.correct / (out.correct + out.deleted);
  out.prf = PRF::from(p, r);
  return out;
}

RootResult root_accuracy(const StringMap<std::string>& predicted,
                         const GoldRoots& gold) {
  RootResult out;
  for (const auto& [word, root] : predicted) {
    auto it = gold.find(word);
    if (it == gold.end()) continue;
    ++out.words;
    const auto& ok = it->second;
    if (std::find(ok.begin(), ok.end(), root) != ok.end()) ++out.correct;
  }
  if (out.words == 0) {
    throw Error(ErrorKind::kValidation,
                "root_accuracy: predicted and gold roots share no words");
  }
  out.accuracy = static_cast<double>(out.correct) / static_cast<double>(out.words);
  return out;
}

namespace {

struct Row {
  std::size_t line;
  std::string_view key;
  std::string_view value;
};

// Non-blank, non-comment `key<TAB>value` rows.
std::vector<Row> rows(std::string_view text, std::string_view source) {
  std::vector<Row> out;
  const auto all = io::lines(text);
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto line = all[i];
    if (io::trim(line).empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw ParseError(std::string(source), i + 1, "missing tab separator");
    }
    const auto key = io::trim(line.substr(0, tab));
    const auto value = io::trim(line.substr(tab + 1));
    if (key.empty() || value.empty()) {
      throw ParseError(std::string(source), i + 1, "empty field");
    }
    out.push_back({i + 1, key, value});
  }
  return out;
}

std::vector<std::string_view> tokens(std::string_view text) {
  std::vector<std::string_view> out;
  for (auto t : io::split(text, ' ')) {
    t = io::trim(t);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

// Morph tokens may carry `:label` annotations, which are dropped.
std::vector<std::string> parse_analysis(std::string_view text, bool lowercase) {
  std::vector<std::string> morphs;
  for (auto t : tokens(text)) {
    if (auto colon = t.find(':'); colon != std::string_view::npos && colon > 0) {
      t = t.substr(0, colon);
    }
    morphs.push_back(utf8::normalize(t, lowercase));
  }
  return morphs;
}

std::string concat(const std::vector<std::string>& morphs) {
  std::string out;
  for (const auto& m : morphs) out += m;
  return out;
}

}  // namespace

GoldSegmentations parse_gold_segmentations(std::string_view text, bool lowercase,
                                           std::string_view source) {
  GoldSegmentations out;
  for (const auto& row : rows(text, source)) {
    std::string word = utf8::normalize(row.key, lowercase);
    std::vector<std::vector<std::string>> alts;
    for (auto alt : io::split(row.value, ',')) {
      auto morphs = parse_analysis(alt, lowercase);
      if (morphs.empty()) {
        throw ParseError(std::string(source), row.line, "empty analysis");
      }
      if (concat(morphs) != word) {
        throw ParseError(std::string(source), row.line,
                         "morphs do not concatenate to '" + word + "'");
      }
      alts.push_back(std::move(morphs));
    }
    out.try_emplace(std::move(word), std::move(alts));
  }
  return out;
}

GoldClusters parse_gold_clusters(std::string_view text, bool lowercase,
                                 std::string_view source) {
  GoldClusters out;
  for (const auto& row : rows(text, source)) {
    out.try_emplace(utf8::normalize(row.key, lowercase), std::string(row.value));
  }
  return out;
}

GoldRoots parse_gold_roots(std::string_view text, bool lowercase,
                           std::string_view source) {
  GoldRoots out;
  for (const auto& row : rows(text, source)) {
    std::vector<std::string> roots;
    for (auto r : io::split(row.value, '|')) {
      r = io::trim(r);
      if (r.empty()) throw ParseError(std::string(source), row.line, "empty root");
      roots.push_back(utf8::normalize(r, lowercase));
    }
    out.try_emplace(utf8::normalize(row.key, lowercase), std::move(roots));
  }
  return out;
}

StringMap<BoundarySet> parse_predicted_segmentations(std::string_view text,
                                                     bool lowercase,
                                                     std::string_view source) {
  StringMap<BoundarySet> out;
  for (const auto& row : rows(text, source)) {
    std::string word = utf8::normalize(row.key, lowercase);
    const auto first = io::split(row.value, ',').front();
    const auto morphs = parse_analysis(first, lowercase);
    if (morphs.empty() || concat(morphs) != word) {
      throw ParseError(std::string(source), row.line,
                       "morphs do not concatenate to '" + word + "'");
    }
    out.try_emplace(std::move(word), boundaries_of(morphs));
  }
  return out;
}

StringMap<std::string> parse_predicted_families(std::string_view text,
                                                bool lowercase,
                                                std::string_view source) {
  StringMap<std::string> out;
  for (const auto& row : rows(text, source)) {
    out.try_emplace(utf8::normalize(row.value, lowercase), std::string(row.key));
  }
  return out;
}

StringMap<std::string> parse_predicted_roots(std::string_view text,
                                             bool lowercase,
                                             std::string_view source) {
  StringMap<std::string> out;
  for (const auto& row : rows(text, source)) {
    out.try_emplace(utf8::normalize(row.key, lowercase),
                    utf8::normalize(row.value, lowercase));
  }
  return out;
}

std::string to_json(const BprResult& r) {
  nlohmann::ordered_json j{
      {"task", "segmentation"},
      {"P", r.prf.precision},
      {"R", r.prf.recall},
      {"F1", r.prf.f1},
      {"counts", {{"tp", r.tp}, {"fp", r.fp}, {"fn", r.fn}, {"words", r.words}}}};
  return j.dump(2);
}

std::string to_json(const ClusterResult& r) {
  nlohmann::ordered_json j{{"task", "clustering"},
                           {"P", r.prf.precision},
                           {"R", r.prf.recall},
                           {"F1", r.prf.f1},
                           {"counts",
                            {{"C", r.correct},
                             {"I", r.inserted},
                             {"D", r.deleted},
                             {"words", r.words}}}};
  return j.dump(2);
}

std::string to_json(const RootResult& r) {
  nlohmann::ordered_json j{
      {"task", "root"},
      {"accuracy", r.accuracy},
      {"counts", {{"correct", r.correct}, {"words", r.words}}}};
  return j.dump(2);
}

}  // namespace morphforest
