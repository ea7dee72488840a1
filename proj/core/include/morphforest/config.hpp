#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "morphforest/corpus.hpp"
#include "morphforest/pipeline.hpp"

namespace morphforest {

// Everything that determines a training run besides its input files.
struct RunConfig {
  std::size_t top_k = 10000;
  CorpusOptions corpus;
  VectorRetention vector_retention = VectorRetention::kAll;
  std::string language = "english";
  TrainConfig train;
};

// Applies one `key = value` setting. Throws a kUsage error for unknown keys
// or unparsable values.
void set_config_value(RunConfig& config, std::string_view key,
                      std::string_view value);

// Flat `key = value` lines; `#` starts a comment. `language` is applied
// before the other keys so explicit profile keys override it.
RunConfig parse_config(std::string_view text, RunConfig base = {},
                       std::string_view source = "<config>");
// Every key, sorted; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

void validate(const RunConfig& config);

std::uint64_t config_hash(const RunConfig& config);

std::string_view version();

}  // namespace morphforest
