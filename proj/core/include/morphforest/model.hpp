#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "morphforest/candidates.hpp"
#include "morphforest/features.hpp"

namespace morphforest {

using Theta = std::vector<double>;

// Numerically stable log(sum(exp(x))); -inf for an empty span.
double logsumexp(std::span<const double> values);

// theta . phi(w, z) for each candidate.
std::vector<double> cand_logits(std::span<const SparseVector> features,
                                std::span<const double> theta);

// Logits normalized within the candidate set: logit - logsumexp(logits).
std::vector<double> normalize_log_probs(std::span<const double> logits);

// Fills each candidate's log_prob with its within-C(w) log-probability and
// returns the logits.
std::vector<double> score_candidates(std::span<Candidate> candidates,
                                     std::span<const SparseVector> features,
                                     std::span<const double> theta);

// Contrastive-estimation training data. A block holds the featurized
// candidate set C(s) of one string s; an example pairs a word's own block
// with the blocks of its neighborhood N(v) (which contains v itself).
class ContrastiveProblem {
 public:
  explicit ContrastiveProblem(std::size_t num_features = 0)
      : num_features_(num_features) {}

  std::uint32_t add_block(std::span<const SparseVector> candidates);
  // Throws if `neighborhood` is empty or a block id is unknown.
  void add_example(std::uint32_t own_block,
                   std::vector<std::uint32_t> neighborhood);

  void set_num_features(std::size_t n) { num_features_ = n; }
  std::size_t num_features() const { return num_features_; }
  std::size_t num_blocks() const { return block_begin_.size() - 1; }
  std::size_t num_examples() const { return examples_.size(); }
  std::size_t num_candidates() const { return cand_begin_.size() - 1; }

  struct Example {
    std::uint32_t own;
    std::vector<std::uint32_t> neighborhood;
  };
  std::span<const Example> examples() const { return examples_; }

  // Candidate range [first, last) of a block.
  std::pair<std::uint32_t, std::uint32_t> block_range(std::uint32_t b) const {
    return {block_begin_[b], block_begin_[b + 1]};
  }
  // Feature entries of a candidate.
  std::span<const std::uint32_t> ids(std::uint32_t c) const;
  std::span<const double> values(std::uint32_t c) const;

 private:
  std::size_t num_features_;
  std::vector<std::uint32_t> block_begin_{0};
  std::vector<std::uint64_t> cand_begin_{0};
  std::vector<std::uint32_t> ids_;
  std::vector<double> values_;
  std::vector<Example> examples_;
};

struct LossAndGrad {
  double loss = 0.0;
  std::vector<double> grad;
};

// L = -sum_v [ lse(C(v)) - lse(U_{v' in N(v)} C(v')) ] + l2/2 |theta|^2
LossAndGrad ce_loss_and_grad(const ContrastiveProblem& problem,
                             std::span<const double> theta, double l2 = 0.0);

struct AdamOptions {
  double lr = 0.5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::size_t iters = 300;
  double l2 = 0.0;
};

struct AdamState {
  std::uint64_t step = 0;
  std::vector<double> m;
  std::vector<double> v;
};

struct FitResult {
  Theta theta;
  // Loss evaluated before each update.
  std::vector<double> losses;
};

// Full-batch Adam. Throws a kNumerical error on a non-finite loss or
// gradient.
FitResult adam_fit(const ContrastiveProblem& problem, Theta theta0,
                   const AdamOptions& options, AdamState& state);
FitResult adam_fit(const ContrastiveProblem& problem, Theta theta0,
                   const AdamOptions& options);

// Named weights, the on-disk form of theta.
struct Weights {
  std::vector<std::string> names;
  std::vector<double> values;

  // theta aligned with `index`, taking values for names present here.
  Theta align(const FeatureIndex& index) const;
  static Weights from(const FeatureIndex& index, std::span<const double> theta);
};

// "# morphforest-model v1" header, then `name<TAB>weight` lines.
std::string serialize_weights(const Weights& weights);
Weights parse_weights(std::string_view text,
                      std::string_view source = "<model>");

// `iter,loss` CSV.
std::string loss_curve_csv(std::span<const double> losses);

}  // namespace morphforest
