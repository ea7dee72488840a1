#include "morphforest/ilp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "morphforest/error.hpp"
#include "morphforest/io.hpp"

namespace morphforest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class AffixState : std::uint8_t { kClosed, kOpen, kUndecided };

// Per-word candidates sorted by cost with the deterministic tie-break:
// cheaper first, then stop, then the smaller parent string.
struct Prepared {
  std::size_t words = 0;
  std::size_t affixes = 0;
  double alpha = 0.0;
  std::vector<std::vector<std::uint32_t>> order;
  std::vector<std::vector<double>> cost;
  std::vector<bool> referenced;
};

Prepared prepare(const IlpInstance& inst) {
  validate(inst);
  Prepared p;
  p.words = inst.words.size();
  p.affixes = inst.num_affixes();
  p.alpha = inst.alpha;
  p.referenced.assign(p.affixes, false);
  const double inv = 1.0 / static_cast<double>(std::max<std::size_t>(1, p.words));
  p.order.resize(p.words);
  p.cost.resize(p.words);
  for (std::size_t i = 0; i < p.words; ++i) {
    const auto& cands = inst.words[i].candidates;
    auto& cost = p.cost[i];
    cost.resize(cands.size());
    for (std::size_t j = 0; j < cands.size(); ++j) {
      cost[j] = -cands[j].log_prob * inv + (j == 0 ? inst.beta * inv : 0.0);
      for (auto k : cands[j].affixes) p.referenced[k] = true;
    }
    auto& order = p.order[i];
    order.resize(cands.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      if (cost[a] != cost[b]) return cost[a] < cost[b];
      if ((a == 0) != (b == 0)) return a == 0;
      if (cands[a].parent != cands[b].parent) {
        return cands[a].parent < cands[b].parent;
      }
      return a < b;
    });
  }
  return p;
}

bool allowed(const IlpCandidate& c, std::span<const AffixState> state) {
  for (auto k : c.affixes) {
    if (state[k] == AffixState::kClosed) return false;
  }
  return true;
}

bool uses(const IlpCandidate& c, std::uint32_t k) {
  return std::binary_search(c.affixes.begin(), c.affixes.end(), k);
}

// First allowed candidate in cost order, optionally avoiding one affix.
std::uint32_t best_allowed(const IlpInstance& inst, const Prepared& p,
                           std::size_t i, std::span<const AffixState> state,
                           std::optional<std::uint32_t> avoid = std::nullopt) {
  const auto& cands = inst.words[i].candidates;
  for (auto j : p.order[i]) {
    if (!allowed(cands[j], state)) continue;
    if (avoid && uses(cands[j], *avoid)) continue;
    return j;
  }
  return 0;  // unreachable: stop is always allowed
}

double tolerance(double scale) {
  return 1e-12 * std::max(1.0, std::abs(scale));
}

class BranchAndBound {
 public:
  BranchAndBound(const IlpInstance& inst, const Prepared& p,
                 std::uint64_t budget)
      : inst_(inst), p_(p), budget_(budget),
        state_(p.affixes, AffixState::kUndecided),
        choice_(p.words, 0) {}

  void seed(const IlpSolution& incumbent) {
    best_choice_ = incumbent.choice;
    best_ = incumbent.objective;
  }

  void run() {
    for (std::size_t k = 0; k < p_.affixes; ++k) {
      if (!p_.referenced[k]) state_[k] = AffixState::kClosed;
    }
    // Static branching order by usage x potential saving at the root.
    std::vector<double> saving(p_.affixes, 0.0);
    std::vector<double> usage(p_.affixes, 0.0);
    evaluate(&saving);
    for (std::size_t i = 0; i < p_.words; ++i) {
      for (const auto& c : inst_.words[i].candidates) {
        for (auto k : c.affixes) usage[k] += 1.0;
      }
    }
    for (std::uint32_t k = 0; k < p_.affixes; ++k) {
      if (state_[k] == AffixState::kUndecided) order_.push_back(k);
    }
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::uint32_t a, std::uint32_t b) {
                       return usage[a] * saving[a] > usage[b] * saving[b];
                     });
    dfs(0);
  }

  bool exhausted() const { return exhausted_; }
  std::uint64_t nodes() const { return nodes_; }
  const std::vector<std::uint32_t>& best_choice() const { return best_choice_; }

 private:
  // Lower bound of the node; fills choice_ with the relaxed argmins and,
  // when requested, the per-affix regret sums D_k.
  double evaluate(std::vector<double>* regret_out) {
    std::vector<double>& regret = regret_;
    regret.assign(p_.affixes, 0.0);
    double bound = 0.0;
    std::size_t forced_open = 0;
    for (auto s : state_) forced_open += s == AffixState::kOpen;
    for (std::size_t i = 0; i < p_.words; ++i) {
      const auto j = best_allowed(inst_, p_, i, state_);
      choice_[i] = j;
      const double m = p_.cost[i][j];
      bound += m;
      double worst = 0.0;
      std::optional<std::uint32_t> rep;
      for (auto k : inst_.words[i].candidates[j].affixes) {
        if (state_[k] != AffixState::kUndecided) continue;
        const auto alt = best_allowed(inst_, p_, i, state_, k);
        const double delta = p_.cost[i][alt] - m;
        if (!rep || delta > worst) {
          worst = delta;
          rep = k;
        }
      }
      if (rep) regret[*rep] += worst;
    }
    bound += p_.alpha * static_cast<double>(forced_open);
    for (std::size_t k = 0; k < p_.affixes; ++k) {
      if (state_[k] == AffixState::kUndecided) {
        bound += std::min(p_.alpha, regret[k]);
      }
    }
    if (regret_out) *regret_out = regret;
    return bound;
  }

  void consider_incumbent() {
    const double obj = objective_of(inst_, choice_);
    if (best_choice_.empty() || obj < best_ - tolerance(best_)) {
      best_ = obj;
      best_choice_ = choice_;
    }
  }

  void dfs(std::size_t depth) {
    if (++nodes_ > budget_) {
      exhausted_ = true;
      return;
    }
    const double bound = evaluate(nullptr);
    consider_incumbent();
    if (bound >= best_ - tolerance(best_)) return;
    while (depth < order_.size() &&
           state_[order_[depth]] != AffixState::kUndecided) {
      ++depth;
    }
    if (depth == order_.size()) return;

    const auto k = order_[depth];
    const bool open_first = regret_[k] >= p_.alpha;
    for (int branch = 0; branch < 2 && !exhausted_; ++branch) {
      const bool open = (branch == 0) == open_first;
      state_[k] = open ? AffixState::kOpen : AffixState::kClosed;
      dfs(depth + 1);
    }
    state_[k] = AffixState::kUndecided;
  }

  const IlpInstance& inst_;
  const Prepared& p_;
  std::uint64_t budget_;
  std::vector<AffixState> state_;
  std::vector<std::uint32_t> choice_;
  std::vector<double> regret_;
  std::vector<std::uint32_t> order_;
  std::vector<std::uint32_t> best_choice_;
  double best_ = kInf;
  std::uint64_t nodes_ = 0;
  bool exhausted_ = false;
};

IlpSolution finish(const IlpInstance& inst, std::vector<std::uint32_t> choice,
                   Proof proof, std::uint64_t nodes) {
  IlpSolution s;
  s.open_affixes = used_affixes(inst, choice);
  s.objective = objective_of(inst, choice);
  s.choice = std::move(choice);
  s.proof = proof;
  s.nodes = nodes;
  return s;
}

}  // namespace

void validate(const IlpInstance& inst) {
  const auto K = inst.num_affixes();
  if (!inst.affix_ids.empty() && inst.affix_ids.size() != K) {
    throw_contract("ilp: affix id table does not match affix names");
  }
  if (!std::isfinite(inst.alpha) || !std::isfinite(inst.beta) ||
      inst.alpha < 0.0) {
    throw_contract("ilp: alpha must be finite and nonnegative, beta finite");
  }
  for (const auto& w : inst.words) {
    if (w.candidates.empty()) {
      throw_contract("ilp: word '" + w.word + "' has no candidates");
    }
    if (!w.candidates[0].affixes.empty()) {
      throw_contract("ilp: first candidate of '" + w.word +
                     "' must be the stop edge");
    }
    for (const auto& c : w.candidates) {
      if (!std::isfinite(c.log_prob)) {
        throw_contract("ilp: non-finite log-probability for '" + w.word + "'");
      }
      for (std::size_t a = 0; a < c.affixes.size(); ++a) {
        if (c.affixes[a] >= K) {
          throw_contract("ilp: candidate of '" + w.word +
                         "' references unknown affix " +
                         std::to_string(c.affixes[a]));
        }
        if (a > 0 && c.affixes[a] <= c.affixes[a - 1]) {
          throw_contract("ilp: candidate affixes must be sorted and unique");
        }
      }
    }
  }
}

IlpInstance build_instance(std::span<const std::vector<Candidate>> candidates,
                           const AffixSet& affixes, double alpha, double beta,
                           bool allow_negative_beta) {
  IlpInstance inst;
  inst.alpha = alpha;
  inst.beta = allow_negative_beta ? beta : std::max(0.0, beta);
  std::vector<std::int64_t> dense(affixes.size(), -1);
  for (AffixId id : affixes.live_ids()) {
    dense[id.value] = static_cast<std::int64_t>(inst.affix_names.size());
    inst.affix_names.push_back(affixes.label(id));
    inst.affix_ids.push_back(id);
  }
  inst.words.reserve(candidates.size());
  for (const auto& set : candidates) {
    if (set.empty()) throw_contract("build_instance: empty candidate set");
    if (set[0].dtype != DerivationType::kStop) {
      throw_contract("build_instance: first candidate of '" + set[0].child +
                     "' is not stop");
    }
    IlpWord word{set[0].child, {}};
    word.candidates.reserve(set.size());
    for (const auto& c : set) {
      IlpCandidate ic{c.log_prob, {}, c.parent};
      for (AffixId id : c.affix_ids) {
        if (id.value >= dense.size() || dense[id.value] < 0) {
          throw_contract("build_instance: candidate of '" + c.child +
                         "' uses a dead affix");
        }
        ic.affixes.push_back(static_cast<std::uint32_t>(dense[id.value]));
      }
      std::sort(ic.affixes.begin(), ic.affixes.end());
      word.candidates.push_back(std::move(ic));
    }
    inst.words.push_back(std::move(word));
  }
  validate(inst);
  return inst;
}

double objective_of(const IlpInstance& inst,
                    std::span<const std::uint32_t> choice) {
  const double n = static_cast<double>(std::max<std::size_t>(1, inst.words.size()));
  double sum_p = 0.0;
  std::size_t stops = 0;
  for (std::size_t i = 0; i < inst.words.size(); ++i) {
    sum_p += inst.words[i].candidates[choice[i]].log_prob;
    stops += choice[i] == 0;
  }
  const auto used = used_affixes(inst, choice);
  return -sum_p / n + inst.alpha * static_cast<double>(used.size()) +
         inst.beta * static_cast<double>(stops) / n;
}

std::vector<std::uint32_t> used_affixes(const IlpInstance& inst,
                                        std::span<const std::uint32_t> choice) {
  std::vector<bool> used(inst.num_affixes(), false);
  for (std::size_t i = 0; i < inst.words.size(); ++i) {
    for (auto k : inst.words[i].candidates[choice[i]].affixes) used[k] = true;
  }
  std::vector<std::uint32_t> out;
  for (std::uint32_t k = 0; k < used.size(); ++k) {
    if (used[k]) out.push_back(k);
  }
  return out;
}

bool is_feasible(const IlpInstance& inst, const IlpSolution& s) {
  if (s.choice.size() != inst.words.size()) return false;
  if (!std::is_sorted(s.open_affixes.begin(), s.open_affixes.end()) ||
      std::adjacent_find(s.open_affixes.begin(), s.open_affixes.end()) !=
          s.open_affixes.end()) {
    return false;
  }
  for (std::size_t i = 0; i < inst.words.size(); ++i) {
    if (s.choice[i] >= inst.words[i].candidates.size()) return false;
    for (auto k : inst.words[i].candidates[s.choice[i]].affixes) {
      if (!std::binary_search(s.open_affixes.begin(), s.open_affixes.end(), k)) {
        return false;
      }
    }
  }
  return used_affixes(inst, s.choice) == s.open_affixes;
}

IlpSolution solve_greedy(const IlpInstance& inst) {
  const Prepared p = prepare(inst);
  std::vector<AffixState> state(p.affixes, AffixState::kOpen);
  for (std::size_t k = 0; k < p.affixes; ++k) {
    if (!p.referenced[k]) state[k] = AffixState::kClosed;
  }
  std::vector<std::uint32_t> choice(p.words);
  for (std::size_t i = 0; i < p.words; ++i) {
    choice[i] = best_allowed(inst, p, i, state);
  }

  std::vector<std::vector<std::uint32_t>> users(p.affixes);
  std::vector<double> delta(p.affixes);
  for (;;) {
    for (auto& u : users) u.clear();
    for (std::uint32_t i = 0; i < p.words; ++i) {
      for (auto k : inst.words[i].candidates[choice[i]].affixes) {
        users[k].push_back(i);
      }
    }
    // An open affix nobody uses saves exactly alpha, the largest possible
    // saving of any single closure, so these go first.
    if (p.alpha > 0.0) {
      for (std::size_t k = 0; k < p.affixes; ++k) {
        if (state[k] == AffixState::kOpen && users[k].empty()) {
          state[k] = AffixState::kClosed;
        }
      }
    }
    std::optional<std::uint32_t> best;
    double best_delta = 0.0;
    for (std::uint32_t k = 0; k < p.affixes; ++k) {
      if (state[k] != AffixState::kOpen || users[k].empty()) continue;
      double d = -p.alpha;
      for (auto i : users[k]) {
        const auto alt = best_allowed(inst, p, i, state, k);
        d += p.cost[i][alt] - p.cost[i][choice[i]];
      }
      if (d < best_delta - 1e-15) {
        best_delta = d;
        best = k;
      }
    }
    if (!best) break;
    state[*best] = AffixState::kClosed;
    for (auto i : users[*best]) choice[i] = best_allowed(inst, p, i, state);
  }
  return finish(inst, std::move(choice), Proof::kHeuristic, 0);
}

IlpSolution solve_exact(const IlpInstance& inst, std::uint64_t node_budget) {
  const Prepared p = prepare(inst);
  IlpSolution incumbent = solve_greedy(inst);
  BranchAndBound bb(inst, p, node_budget);
  bb.seed(incumbent);
  bb.run();
  IlpSolution out = finish(inst, bb.best_choice(),
                           bb.exhausted() ? Proof::kHeuristic : Proof::kExact,
                           bb.nodes());
  if (bb.exhausted()) {
    out.warning = "branch-and-bound node budget of " +
                  std::to_string(node_budget) +
                  " exhausted; returning best incumbent";
  }
  return out;
}

std::string_view to_string(IlpMode mode) {
  switch (mode) {
    case IlpMode::kExact: return "exact";
    case IlpMode::kGreedy: return "greedy";
    case IlpMode::kOff: return "off";
  }
  return "?";
}

IlpSolution solve(const IlpInstance& inst, const IlpOptions& options) {
  switch (options.mode) {
    case IlpMode::kGreedy: return solve_greedy(inst);
    case IlpMode::kOff:
      throw_contract("solve: ILP mode is off");
    case IlpMode::kExact: break;
  }
  std::vector<bool> referenced(inst.num_affixes(), false);
  for (const auto& w : inst.words) {
    for (const auto& c : w.candidates) {
      for (auto k : c.affixes) referenced[k] = true;
    }
  }
  const auto K = static_cast<std::size_t>(
      std::count(referenced.begin(), referenced.end(), true));
  if (K > options.exact_limit) {
    IlpSolution s = solve_greedy(inst);
    s.warning = std::to_string(K) + " referenced affixes exceed the exact limit of " +
                std::to_string(options.exact_limit) + "; used greedy search";
    return s;
  }
  return solve_exact(inst, options.node_budget);
}

void export_lp(const IlpInstance& inst, std::ostream& out) {
  validate(inst);
  const double n = static_cast<double>(std::max<std::size_t>(1, inst.words.size()));
  auto x = [](std::size_t i, std::size_t j) {
    return "x_" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
  };
  auto y = [](std::size_t k) { return "y_" + std::to_string(k + 1); };
  auto term = [&out](double coef, const std::string& var) {
    out << (coef < 0 ? " - " : " + ") << io::format_double(std::abs(coef))
        << ' ' << var << '\n';
  };

  out << "\\ morphforest affix-selection program\n";
  out << "\\ words " << inst.words.size() << " affixes " << inst.num_affixes()
      << " alpha " << io::format_double(inst.alpha) << " beta "
      << io::format_double(inst.beta) << '\n';
  out << "Minimize\n obj:\n";
  for (std::size_t i = 0; i < inst.words.size(); ++i) {
    const auto& cands = inst.words[i].candidates;
    for (std::size_t j = 0; j < cands.size(); ++j) {
      term(-cands[j].log_prob / n + (j == 0 ? inst.beta / n : 0.0), x(i, j));
    }
  }
  for (std::size_t k = 0; k < inst.num_affixes(); ++k) term(inst.alpha, y(k));

  out << "Subject To\n";
  for (std::size_t i = 0; i < inst.words.size(); ++i) {
    out << " assign_" << i + 1 << ":";
    for (std::size_t j = 0; j < inst.words[i].candidates.size(); ++j) {
      out << (j == 0 ? " " : " + ") << x(i, j);
    }
    out << " = 1\n";
  }
  for (std::size_t i = 0; i < inst.words.size(); ++i) {
    const auto& cands = inst.words[i].candidates;
    for (std::size_t j = 0; j < cands.size(); ++j) {
      for (auto k : cands[j].affixes) {
        out << " link_" << i + 1 << '_' << j + 1 << '_' << k + 1 << ": "
            << x(i, j) << " - " << y(k) << " <= 0\n";
      }
    }
  }
  out << "Binaries\n";
  for (std::size_t i = 0; i < inst.words.size(); ++i) {
    for (std::size_t j = 0; j < inst.words[i].candidates.size(); ++j) {
      out << ' ' << x(i, j) << '\n';
    }
  }
  for (std::size_t k = 0; k < inst.num_affixes(); ++k) out << ' ' << y(k) << '\n';
  out << "End\n";
}

void export_lp(const IlpInstance& inst, const std::filesystem::path& path) {
  std::ostringstream ss;
  export_lp(inst, ss);
  io::write_file(path, ss.str());
}

std::string serialize_instance(const IlpInstance& inst) {
  using nlohmann::json;
  std::string out;
  json header{{"format", "morphforest-ilp-v1"},
              {"alpha", inst.alpha},
              {"beta", inst.beta},
              {"affixes", inst.affix_names}};
  out += header.dump() + "\n";
  for (const auto& w : inst.words) {
    json cands = json::array();
    for (const auto& c : w.candidates) {
      cands.push_back({{"parent", c.parent},
                       {"log_prob", c.log_prob},
                       {"affixes", c.affixes}});
    }
    out += json{{"word", w.word}, {"candidates", cands}}.dump() + "\n";
  }
  return out;
}

IlpInstance parse_instance(std::string_view text, std::string_view source) {
  using nlohmann::json;
  const std::string src(source);
  const auto all = io::lines(text);
  IlpInstance inst;
  bool have_header = false;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (io::trim(all[i]).empty()) continue;
    try {
      const json j = json::parse(all[i]);
      if (!have_header) {
        if (j.value("format", "") != "morphforest-ilp-v1") {
          throw ParseError(src, i + 1, "missing morphforest-ilp-v1 header");
        }
        inst.alpha = j.at("alpha").get<double>();
        inst.beta = j.at("beta").get<double>();
        inst.affix_names = j.at("affixes").get<std::vector<std::string>>();
        have_header = true;
        continue;
      }
      IlpWord w{j.at("word").get<std::string>(), {}};
      for (const auto& c : j.at("candidates")) {
        w.candidates.push_back({c.at("log_prob").get<double>(),
                                c.at("affixes").get<std::vector<std::uint32_t>>(),
                                c.value("parent", std::string())});
      }
      inst.words.push_back(std::move(w));
    } catch (const json::exception& e) {
      throw ParseError(src, i + 1, e.what());
    }
  }
  if (!have_header) throw ParseError(src, 0, "empty instance file");
  validate(inst);
  return inst;
}

}  // namespace morphforest
