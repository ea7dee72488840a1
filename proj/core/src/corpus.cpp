#include "morphforest/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "morphforest/error.hpp"
#include "morphforest/io.hpp"
#include "morphforest/utf8.hpp"

namespace morphforest {

namespace {

std::string source_name(const std::filesystem::path& path) {
  return path.string();
}

std::optional<std::uint64_t> parse_count(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(),
                                   value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  return value;
}

}  // namespace

Vocabulary Vocabulary::from_counts(std::vector<WordCount> counts,
                                   std::size_t top_k) {
  StringMap<std::uint64_t> merged;
  for (auto& wc : counts) merged[wc.word] += wc.count;

  Vocabulary vocab;
  vocab.entries_.reserve(merged.size());
  for (auto& [word, count] : merged) vocab.entries_.push_back({word, count});
  std::sort(vocab.entries_.begin(), vocab.entries_.end(),
            [](const WordCount& a, const WordCount& b) {
              if (a.count != b.count) return a.count > b.count;
              return a.word < b.word;
            });
  if (vocab.entries_.size() > top_k) vocab.entries_.resize(top_k);

  vocab.index_.reserve(vocab.entries_.size());
  for (std::size_t i = 0; i < vocab.entries_.size(); ++i) {
    vocab.index_.emplace(vocab.entries_[i].word, i);
    vocab.total_tokens_ += vocab.entries_[i].count;
  }
  return vocab;
}

std::optional<std::size_t> Vocabulary::rank(std::string_view word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t Vocabulary::count(std::string_view word) const {
  auto it = index_.find(word);
  return it == index_.end() ? 0 : entries_[it->second].count;
}

Vocabulary parse_wordlist(std::string_view text, std::size_t top_k,
                          const CorpusOptions& options,
                          std::string_view source) {
  if (top_k == 0) throw_contract("top_k must be at least 1");
  const std::string src(source);
  std::vector<WordCount> counts;
  const auto all = io::lines(text);
  for (std::size_t i = 0; i < all.size(); ++i) {
    const std::string_view line = all[i];
    const std::size_t lineno = i + 1;
    if (io::trim(line).empty() || line.front() == '#') continue;

    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw ParseError(src, lineno, "expected word<TAB>count");
    }
    const std::string_view raw_word = line.substr(0, tab);
    const std::string_view raw_count = line.substr(tab + 1);
    if (raw_word.empty()) throw ParseError(src, lineno, "empty word");
    if (utf8::has_whitespace(raw_word)) {
      throw ParseError(src, lineno, "word contains whitespace");
    }
    const auto count = parse_count(io::trim(raw_count));
    if (!count || *count == 0) {
      throw ParseError(src, lineno,
                       "count is not a positive integer: '" +
                           std::string(raw_count) + "'");
    }
    std::string word = utf8::normalize(raw_word, options.lowercase);
    if (options.filter_nonalpha && !utf8::is_alphabetic(word)) continue;
    counts.push_back({std::move(word), *count});
  }
  if (counts.empty()) {
    throw Error(ErrorKind::kEmptyVocabulary, src + ": no words");
  }
  return Vocabulary::from_counts(std::move(counts), top_k);
}

Vocabulary load_wordlist(const std::filesystem::path& path, std::size_t top_k,
                         const CorpusOptions& options) {
  return parse_wordlist(io::read_file(path), top_k, options,
                        source_name(path));
}

std::string serialize_wordlist(const Vocabulary& vocab) {
  std::string out;
  for (const auto& e : vocab.entries()) {
    out += e.word;
    out += '\t';
    out += std::to_string(e.count);
    out += '\n';
  }
  return out;
}

void WordVectors::insert(std::string word, std::vector<double> vector) {
  if (dim_ == 0) dim_ = vector.size();
  if (vector.size() != dim_) {
    throw Error(ErrorKind::kFormat,
                "vector for '" + word + "' has " +
                    std::to_string(vector.size()) + " components, expected " +
                    std::to_string(dim_));
  }
  for (double x : vector) {
    if (!std::isfinite(x)) {
      throw Error(ErrorKind::kFormat,
                  "vector for '" + word + "' has a non-finite component");
    }
  }
  table_.try_emplace(std::move(word), std::move(vector));
}

const std::vector<double>* WordVectors::find(std::string_view word) const {
  auto it = table_.find(word);
  return it == table_.end() ? nullptr : &it->second;
}

WordVectors parse_vectors(std::string_view text, const Vocabulary& vocab,
                          VectorRetention retention,
                          const CorpusOptions& options,
                          std::string_view source) {
  const std::string src(source);
  WordVectors vectors;
  std::size_t expected_dim = 0;
  bool first = true;
  const auto all = io::lines(text);
  for (std::size_t i = 0; i < all.size(); ++i) {
    const std::string_view line = io::trim(all[i]);
    const std::size_t lineno = i + 1;
    if (line.empty()) continue;

    std::vector<std::string_view> tokens;
    for (auto tok : io::split(line, ' ')) {
      if (!tok.empty()) tokens.push_back(tok);
    }
    if (first) {
      first = false;
      if (tokens.size() == 2 && parse_count(tokens[0]) &&
          parse_count(tokens[1])) {
        expected_dim = static_cast<std::size_t>(*parse_count(tokens[1]));
        if (expected_dim == 0) {
          throw ParseError(src, lineno, "header declares dimension 0");
        }
        vectors = WordVectors(expected_dim);
        continue;
      }
    }
    if (tokens.size() < 2) {
      throw ParseError(src, lineno, "expected word followed by components");
    }
    const std::size_t dim = tokens.size() - 1;
    if (expected_dim == 0) {
      expected_dim = dim;
      vectors = WordVectors(expected_dim);
    }
    if (dim != expected_dim) {
      throw Error(ErrorKind::kFormat,
                  src + ":" + std::to_string(lineno) + ": vector has " +
                      std::to_string(dim) + " components, expected " +
                      std::to_string(expected_dim));
    }
    std::string word = utf8::normalize(tokens[0], options.lowercase);
    if (retention == VectorRetention::kVocabulary && !vocab.contains(word)) {
      continue;
    }
    std::vector<double> values(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      const auto tok = tokens[d + 1];
      auto [ptr, ec] =
          std::from_chars(tok.data(), tok.data() + tok.size(), values[d]);
      if (ec != std::errc{} || ptr != tok.data() + tok.size() ||
          !std::isfinite(values[d])) {
        throw Error(ErrorKind::kFormat, src + ":" + std::to_string(lineno) +
                                            ": bad component '" +
                                            std::string(tok) + "'");
      }
    }
    vectors.insert(std::move(word), std::move(values));
  }
  return vectors;
}

WordVectors load_vectors(const std::filesystem::path& path,
                         const Vocabulary& vocab, VectorRetention retention,
                         const CorpusOptions& options) {
  return parse_vectors(io::read_file(path), vocab, retention, options,
                       source_name(path));
}

std::optional<double> cosine(std::span<const double> a,
                             std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::kContract, "cosine of vectors with lengths " +
                                          std::to_string(a.size()) + " and " +
                                          std::to_string(b.size()));
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return std::nullopt;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

}  // namespace morphforest
