#include "morphforest/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "morphforest/error.hpp"
#include "morphforest/io.hpp"

namespace morphforest {

double logsumexp(std::span<const double> values) {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double max = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(max)) return max;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - max);
  return max + std::log(sum);
}

std::vector<double> cand_logits(std::span<const SparseVector> features,
                                std::span<const double> theta) {
  std::vector<double> logits;
  logits.reserve(features.size());
  for (const auto& phi : features) logits.push_back(phi.dot(theta));
  return logits;
}

std::vector<double> normalize_log_probs(std::span<const double> logits) {
  const double lse = logsumexp(logits);
  std::vector<double> out(logits.begin(), logits.end());
  for (double& x : out) x -= lse;
  return out;
}

std::vector<double> score_candidates(std::span<Candidate> candidates,
                                     std::span<const SparseVector> features,
                                     std::span<const double> theta) {
  if (candidates.size() != features.size()) {
    throw_contract("score_candidates: candidate/feature count mismatch");
  }
  if (candidates.empty()) throw_contract("score_candidates: empty candidate set");
  auto logits = cand_logits(features, theta);
  const auto log_probs = normalize_log_probs(logits);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    candidates[i].log_prob = log_probs[i];
  }
  return logits;
}

std::uint32_t ContrastiveProblem::add_block(
    std::span<const SparseVector> candidates) {
  if (candidates.empty()) throw_contract("add_block: empty candidate set");
  for (const auto& phi : candidates) {
    for (const auto& [id, value] : phi.entries()) {
      if (id >= num_features_) num_features_ = id + 1;
      ids_.push_back(id);
      values_.push_back(value);
    }
    cand_begin_.push_back(ids_.size());
  }
  block_begin_.push_back(static_cast<std::uint32_t>(cand_begin_.size() - 1));
  return static_cast<std::uint32_t>(block_begin_.size() - 2);
}

void ContrastiveProblem::add_example(std::uint32_t own_block,
                                     std::vector<std::uint32_t> neighborhood) {
  if (neighborhood.empty()) {
    throw_contract("add_example: empty neighborhood");
  }
  const auto nb = num_blocks();
  if (own_block >= nb) throw_contract("add_example: unknown block");
  for (auto b : neighborhood) {
    if (b >= nb) throw_contract("add_example: unknown neighbor block");
  }
  examples_.push_back({own_block, std::move(neighborhood)});
}

std::span<const std::uint32_t> ContrastiveProblem::ids(std::uint32_t c) const {
  return {ids_.data() + cand_begin_[c], ids_.data() + cand_begin_[c + 1]};
}

std::span<const double> ContrastiveProblem::values(std::uint32_t c) const {
  return {values_.data() + cand_begin_[c], values_.data() + cand_begin_[c + 1]};
}

LossAndGrad ce_loss_and_grad(const ContrastiveProblem& problem,
                             std::span<const double> theta, double l2) {
  if (theta.size() != problem.num_features()) {
    throw_contract("ce_loss_and_grad: theta has " + std::to_string(theta.size()) +
                   " weights, problem has " +
                   std::to_string(problem.num_features()) + " features");
  }
  const auto nb = static_cast<std::uint32_t>(problem.num_blocks());
  const auto nc = problem.num_candidates();

  // Per-block log-partition and within-block softmax.
  std::vector<double> block_lse(nb);
  std::vector<double> prob(nc);
  for (std::uint32_t b = 0; b < nb; ++b) {
    const auto [first, last] = problem.block_range(b);
    double max = -std::numeric_limits<double>::infinity();
    for (auto c = first; c < last; ++c) {
      const auto ids = problem.ids(c);
      const auto vals = problem.values(c);
      double s = 0.0;
      for (std::size_t k = 0; k < ids.size(); ++k) s += theta[ids[k]] * vals[k];
      prob[c] = s;
      max = std::max(max, s);
    }
    double sum = 0.0;
    for (auto c = first; c < last; ++c) sum += std::exp(prob[c] - max);
    const double lse = max + std::log(sum);
    block_lse[b] = lse;
    for (auto c = first; c < last; ++c) prob[c] = std::exp(prob[c] - lse);
  }

  LossAndGrad out;
  out.grad.assign(theta.size(), 0.0);
  std::vector<double> coef(nb, 0.0);
  std::vector<double> scratch;
  for (const auto& ex : problem.examples()) {
    scratch.clear();
    for (auto b : ex.neighborhood) scratch.push_back(block_lse[b]);
    const double denom = logsumexp(scratch);
    out.loss += denom - block_lse[ex.own];
    for (auto b : ex.neighborhood) coef[b] += std::exp(block_lse[b] - denom);
    coef[ex.own] -= 1.0;
  }

  for (std::uint32_t b = 0; b < nb; ++b) {
    if (coef[b] == 0.0) continue;
    const auto [first, last] = problem.block_range(b);
    for (auto c = first; c < last; ++c) {
      const double w = coef[b] * prob[c];
      const auto ids = problem.ids(c);
      const auto vals = problem.values(c);
      for (std::size_t k = 0; k < ids.size(); ++k) {
        out.grad[ids[k]] += w * vals[k];
      }
    }
  }

  if (l2 != 0.0) {
    double sq = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      sq += theta[i] * theta[i];
      out.grad[i] += l2 * theta[i];
    }
    out.loss += 0.5 * l2 * sq;
  }
  return out;
}

namespace {

void check_finite(const LossAndGrad& lg, std::size_t iter) {
  if (!std::isfinite(lg.loss)) {
    throw Error(ErrorKind::kNumerical,
                "adam: non-finite loss at iteration " + std::to_string(iter));
  }
  for (std::size_t i = 0; i < lg.grad.size(); ++i) {
    if (!std::isfinite(lg.grad[i])) {
      throw Error(ErrorKind::kNumerical,
                  "adam: non-finite gradient for feature " + std::to_string(i) +
                      " at iteration " + std::to_string(iter));
    }
  }
}

}  // namespace

FitResult adam_fit(const ContrastiveProblem& problem, Theta theta0,
                   const AdamOptions& options, AdamState& state) {
  if (options.iters == 0) throw_contract("adam_fit: iters must be at least 1");
  const std::size_t n = problem.num_features();
  if (theta0.size() != n) {
    throw_contract("adam_fit: theta0 has " + std::to_string(theta0.size()) +
                   " weights, expected " + std::to_string(n));
  }
  if (state.m.empty() && state.v.empty()) {
    state.m.assign(n, 0.0);
    state.v.assign(n, 0.0);
  }
  if (state.m.size() != n || state.v.size() != n) {
    throw_contract("adam_fit: moment vectors do not match theta");
  }

  FitResult result{std::move(theta0), {}};
  Theta& theta = result.theta;
  result.losses.reserve(options.iters + 1);
  for (std::size_t it = 0; it < options.iters; ++it) {
    const auto lg = ce_loss_and_grad(problem, theta, options.l2);
    check_finite(lg, it);
    result.losses.push_back(lg.loss);

    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(options.beta1, t);
    const double c2 = 1.0 - std::pow(options.beta2, t);
    for (std::size_t i = 0; i < n; ++i) {
      const double g = lg.grad[i];
      state.m[i] = options.beta1 * state.m[i] + (1.0 - options.beta1) * g;
      state.v[i] = options.beta2 * state.v[i] + (1.0 - options.beta2) * g * g;
      const double mhat = state.m[i] / c1;
      const double vhat = state.v[i] / c2;
      theta[i] -= options.lr * mhat / (std::sqrt(vhat) + options.eps);
    }
  }
  const auto last = ce_loss_and_grad(problem, theta, options.l2);
  check_finite(last, options.iters);
  result.losses.push_back(last.loss);
  return result;
}

FitResult adam_fit(const ContrastiveProblem& problem, Theta theta0,
                   const AdamOptions& options) {
  AdamState state;
  return adam_fit(problem, std::move(theta0), options, state);
}

Theta Weights::align(const FeatureIndex& index) const {
  Theta theta(index.size(), 0.0);
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (auto id = index.find(names[i])) theta[*id] = values[i];
  }
  return theta;
}

Weights Weights::from(const FeatureIndex& index, std::span<const double> theta) {
  Weights w;
  w.names.assign(index.names().begin(), index.names().end());
  w.values.assign(theta.begin(), theta.end());
  return w;
}

std::string serialize_weights(const Weights& weights) {
  std::string out = "# morphforest-model v1\n";
  for (std::size_t i = 0; i < weights.names.size(); ++i) {
    out += weights.names[i];
    out += '\t';
    out += io::format_double(weights.values[i]);
    out += '\n';
  }
  return out;
}

Weights parse_weights(std::string_view text, std::string_view source) {
  const std::string src(source);
  const auto all = io::lines(text);
  if (all.empty() || all[0] != "# morphforest-model v1") {
    throw ParseError(src, 1, "missing '# morphforest-model v1' header");
  }
  Weights w;
  for (std::size_t i = 1; i < all.size(); ++i) {
    if (io::trim(all[i]).empty()) continue;
    const auto tab = all[i].rfind('\t');
    if (tab == std::string_view::npos) {
      throw ParseError(src, i + 1, "expected name<TAB>weight");
    }
    const auto value_text = all[i].substr(tab + 1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(value_text.data(),
                                     value_text.data() + value_text.size(), value);
    if (ec != std::errc{} || ptr != value_text.data() + value_text.size() ||
        !std::isfinite(value)) {
      throw ParseError(src, i + 1, "bad weight '" + std::string(value_text) + "'");
    }
    w.names.emplace_back(all[i].substr(0, tab));
    w.values.push_back(value);
  }
  return w;
}

std::string loss_curve_csv(std::span<const double> losses) {
  std::string out = "iter,loss\n";
  for (std::size_t i = 0; i < losses.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += io::format_double(losses[i]);
    out += '\n';
  }
  return out;
}

}  // namespace morphforest
