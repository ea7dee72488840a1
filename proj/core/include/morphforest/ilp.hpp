#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "morphforest/affixes.hpp"
#include "morphforest/candidates.hpp"

namespace morphforest {

struct IlpCandidate {
  double log_prob = 0.0;  // p_ij
  std::vector<std::uint32_t> affixes;  // dense affix indices, sorted
  std::string parent;     // tie-breaking and display only
};

struct IlpWord {
  std::string word;
  // candidates[0] is the stop candidate and uses no affix.
  std::vector<IlpCandidate> candidates;
};

// minimize -(1/|V|) sum x_ij p_ij + alpha sum y_k + (beta/|V|) sum x_i1
// s.t. sum_j x_ij = 1, x_ij <= y_k for every affix k of candidate j.
struct IlpInstance {
  std::vector<IlpWord> words;
  std::vector<std::string> affix_names;
  // AffixSet id of each dense affix index (empty for synthetic instances).
  std::vector<AffixId> affix_ids;
  double alpha = 0.0;
  double beta = 0.0;

  std::size_t vocab_size() const { return words.size(); }
  std::size_t num_affixes() const { return affix_names.size(); }
};

enum class Proof { kExact, kHeuristic };

struct IlpSolution {
  std::vector<std::uint32_t> choice;        // per word candidate index
  std::vector<std::uint32_t> open_affixes;  // sorted dense indices
  double objective = 0.0;
  Proof proof = Proof::kExact;
  std::uint64_t nodes = 0;
  std::string warning;
};

// Candidate sets must already carry log_probs. Affixes are the live ones
// of `affixes`; negative beta is clamped to zero unless allowed.
IlpInstance build_instance(std::span<const std::vector<Candidate>> candidates,
                           const AffixSet& affixes, double alpha, double beta,
                           bool allow_negative_beta = false);

// Throws if the stop-first or affix-range invariants are broken.
void validate(const IlpInstance& instance);

// Objective of a choice vector with the open set equal to the affixes used.
double objective_of(const IlpInstance& instance,
                    std::span<const std::uint32_t> choice);

// Affixes used by the chosen candidates, sorted.
std::vector<std::uint32_t> used_affixes(const IlpInstance& instance,
                                        std::span<const std::uint32_t> choice);

// Both constraint families hold and every open affix is used.
bool is_feasible(const IlpInstance& instance, const IlpSolution& solution);

// Branch-and-bound over the affix indicators. On budget exhaustion the best
// incumbent is returned with Proof::kHeuristic and a warning.
IlpSolution solve_exact(const IlpInstance& instance,
                        std::uint64_t node_budget = 2'000'000);

// Closes affixes one at a time while a closure lowers the objective.
IlpSolution solve_greedy(const IlpInstance& instance);

enum class IlpMode { kExact, kGreedy, kOff };
std::string_view to_string(IlpMode mode);

struct IlpOptions {
  IlpMode mode = IlpMode::kExact;
  // kExact falls back to greedy above this many referenced affixes.
  std::size_t exact_limit = 24;
  std::uint64_t node_budget = 2'000'000;
};

IlpSolution solve(const IlpInstance& instance, const IlpOptions& options);

// CPLEX LP format: binaries x_i_j and y_k, objective, constraints.
void export_lp(const IlpInstance& instance, std::ostream& out);
void export_lp(const IlpInstance& instance, const std::filesystem::path& path);

// One JSON object per word, preceded by a header object.
std::string serialize_instance(const IlpInstance& instance);
IlpInstance parse_instance(std::string_view text,
                           std::string_view source = "<instance>");

}  // namespace morphforest
