#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "morphforest/error.hpp"
#include "morphforest/model.hpp"
#include "oracles.hpp"

using namespace morphforest;

namespace {

SparseVector sv(std::vector<SparseVector::Entry> e) {
  return SparseVector::from_entries(std::move(e));
}

double max_rel_error(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max({1.0, std::abs(a[i]), std::abs(b[i])});
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

}  // namespace

TEST_CASE("logsumexp") {
  const std::vector<double> big{1000.0, 1000.0};
  CHECK(logsumexp(big) == doctest::Approx(1000.0 + std::log(2.0)));
  CHECK(std::isinf(logsumexp(std::vector<double>{})));
  const std::vector<double> small{-1e4, 0.0};
  CHECK(logsumexp(small) == doctest::Approx(0.0));
}

TEST_CASE("candidate log-probabilities") {
  const std::vector<double> theta{1.0, -2.0};
  SUBCASE("zero weights are uniform") {
    const std::vector<double> zero{0.0, 0.0};
    const std::vector<SparseVector> f{sv({{0, 1}}), sv({{1, 3}}), sv({})};
    for (double lp : normalize_log_probs(cand_logits(f, zero))) {
      CHECK(lp == doctest::Approx(-std::log(3.0)));
    }
  }
  SUBCASE("a single candidate has log-probability zero") {
    const std::vector<SparseVector> f{sv({{0, 4}})};
    CHECK(normalize_log_probs(cand_logits(f, theta))[0] == 0.0);
  }
  SUBCASE("logits (1, 0)") {
    const std::vector<SparseVector> f{sv({{0, 1}}), sv({})};
    const auto lp = normalize_log_probs(cand_logits(f, theta));
    const double z = std::log(1.0 + std::exp(-1.0));
    CHECK(lp[0] == doctest::Approx(-z).epsilon(1e-14));
    CHECK(lp[1] == doctest::Approx(-1.0 - z).epsilon(1e-14));
  }
  SUBCASE("score_candidates fills log_prob") {
    std::vector<Candidate> cs(2);
    const std::vector<SparseVector> f{sv({{0, 1}}), sv({})};
    const auto logits = score_candidates(cs, f, theta);
    CHECK(logits == std::vector<double>{1.0, 0.0});
    CHECK(std::exp(cs[0].log_prob) + std::exp(cs[1].log_prob) == doctest::Approx(1.0));
  }
}

TEST_CASE("probabilities sum to one and are shift invariant") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 5.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> logits(1 + rng() % 30);
    for (auto& x : logits) x = n(rng);
    const auto lp = normalize_log_probs(logits);
    double sum = 0.0;
    for (double x : lp) sum += std::exp(x);
    CHECK(std::abs(sum - 1.0) <= 1e-9);
    const double shift = n(rng) * 100.0;
    auto shifted = logits;
    for (auto& x : shifted) x += shift;
    const auto lp2 = normalize_log_probs(shifted);
    for (std::size_t i = 0; i < lp.size(); ++i) CHECK(std::abs(lp[i] - lp2[i]) <= 1e-9);
  }
}

TEST_CASE("loss at zero weights has the closed form") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = oracle::random_problem(rng, 1 + rng() % 10, 5);
    const std::vector<double> zero(5, 0.0);
    double expected = 0.0;
    for (const auto& ex : p.examples()) {
      auto size = [&](std::uint32_t b) {
        const auto [first, last] = p.block_range(b);
        return static_cast<double>(last - first);
      };
      double total = 0.0;
      for (auto b : ex.neighborhood) total += size(b);
      expected += std::log(total / size(ex.own));
    }
    const auto lg = ce_loss_and_grad(p, zero);
    CHECK(lg.loss == doctest::Approx(expected).epsilon(1e-12));
    CHECK(lg.loss >= 0.0);
  }
}

TEST_CASE("a neighborhood of only the word gives zero loss and gradient") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n;
  ContrastiveProblem p(4);
  for (int w = 0; w < 6; ++w) {
    std::vector<SparseVector> cands;
    for (int j = 0; j < 3; ++j) cands.push_back(sv({{static_cast<std::uint32_t>(rng() % 4), n(rng)}}));
    const auto b = p.add_block(cands);
    p.add_example(b, {b});
  }
  const std::vector<double> theta{0.3, -1.0, 2.0, 0.5};
  const auto lg = ce_loss_and_grad(p, theta);
  CHECK(lg.loss == 0.0);
  for (double g : lg.grad) CHECK(g == 0.0);
}

TEST_CASE("gradient matches central finite differences") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t dim = 2 + rng() % 6;
    const auto p = oracle::random_problem(rng, 1 + rng() % 8, dim);
    std::vector<double> theta(dim);
    for (auto& t : theta) t = n(rng);
    for (double l2 : {0.0, 0.7}) {
      const auto analytic = ce_loss_and_grad(p, theta, l2).grad;
      const auto numeric = oracle::finite_difference(
          [&](const std::vector<double>& t) { return ce_loss_and_grad(p, t, l2).loss; }, theta);
      CHECK(max_rel_error(analytic, numeric) <= 1e-5);
    }
  }
}

TEST_CASE("loss is invariant under permutation of the batch") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> n;
  std::vector<std::vector<SparseVector>> blocks;
  for (int b = 0; b < 12; ++b) {
    std::vector<SparseVector> cands;
    for (std::size_t j = 0; j < 1 + rng() % 3; ++j) {
      cands.push_back(sv({{static_cast<std::uint32_t>(rng() % 5), n(rng)}}));
    }
    blocks.push_back(cands);
  }
  // example i: own block i, neighbors i and i+6
  auto build = [&](const std::vector<int>& order) {
    ContrastiveProblem p(5);
    std::vector<std::uint32_t> id(12);
    for (int b : order) id[b] = p.add_block(blocks[b]), id[b + 6] = p.add_block(blocks[b + 6]);
    for (int b : order) p.add_example(id[b], {id[b], id[b + 6]});
    return p;
  };
  const std::vector<double> theta{0.1, -0.4, 1.2, 0.0, 0.8};
  const auto a = ce_loss_and_grad(build({0, 1, 2, 3, 4, 5}), theta);
  const auto b = ce_loss_and_grad(build({5, 3, 1, 0, 4, 2}), theta);
  CHECK(a.loss == doctest::Approx(b.loss).epsilon(1e-12));
  for (std::size_t i = 0; i < 5; ++i) CHECK(a.grad[i] == doctest::Approx(b.grad[i]).epsilon(1e-12));
}

TEST_CASE("Adam reaches the grid-search minimum of a convex toy problem") {
  // two words, three features
  ContrastiveProblem p(3);
  const auto w1 = p.add_block(std::vector<SparseVector>{sv({{0, 1}}), sv({{1, 1}})});
  const auto n1 = p.add_block(std::vector<SparseVector>{sv({{2, 1}}), sv({{1, 0.5}})});
  const auto w2 = p.add_block(std::vector<SparseVector>{sv({{1, 1}, {2, 1}})});
  const auto n2 = p.add_block(std::vector<SparseVector>{sv({{0, 1}}), sv({{2, -1}})});
  p.add_example(w1, {w1, n1});
  p.add_example(w2, {w2, n2});
  const double l2 = 0.1;
  auto loss = [&](double a, double b, double c) {
    return ce_loss_and_grad(p, std::vector<double>{a, b, c}, l2).loss;
  };

  double best = std::numeric_limits<double>::infinity();
  double ca = 0, cb = 0, cc = 0;
  for (double span : {10.0, 1.0, 0.1, 0.01}) {
    const double step = span / 10.0;
    const double a0 = ca, b0 = cb, c0 = cc;
    for (int i = -10; i <= 10; ++i) {
      for (int j = -10; j <= 10; ++j) {
        for (int k = -10; k <= 10; ++k) {
          const double a = a0 + i * step, b = b0 + j * step, c = c0 + k * step;
          const double v = loss(a, b, c);
          if (v < best) best = v, ca = a, cb = b, cc = c;
        }
      }
    }
  }

  AdamOptions opt;
  opt.iters = 200;
  opt.lr = 0.5;
  opt.l2 = l2;
  const auto fit = adam_fit(p, {0, 0, 0}, opt);
  CHECK(fit.losses.size() == 201);
  CHECK(std::abs(fit.losses.back() - best) <= 1e-3);
}

TEST_CASE("Adam edge cases") {
  ContrastiveProblem empty(0);
  const auto b = empty.add_block(std::vector<SparseVector>{sv({})});
  empty.add_example(b, {b});
  AdamOptions opt;
  opt.iters = 5;
  CHECK(adam_fit(empty, {}, opt).theta.empty());

  std::mt19937_64 rng(1);
  const auto p = oracle::random_problem(rng, 3, 3);
  opt.iters = 0;
  CHECK_THROWS_AS(adam_fit(p, {0, 0, 0}, opt), Error);
  opt.iters = 3;
  try {
    adam_fit(p, {std::numeric_limits<double>::quiet_NaN(), 0, 0}, opt);
    FAIL("expected a numerical error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNumerical);
  }

  ContrastiveProblem bad(1);
  CHECK_THROWS_AS(bad.add_example(0, {}), Error);
  CHECK_THROWS_AS(bad.add_example(3, {3}), Error);
}

TEST_CASE("warm start continues from the saved moments") {
  std::mt19937_64 rng(77);
  const auto p = oracle::random_problem(rng, 6, 4);
  AdamOptions opt;
  opt.iters = 20;
  AdamState s1;
  const auto half = adam_fit(p, {0, 0, 0, 0}, opt, s1);
  const auto rest = adam_fit(p, half.theta, opt, s1);
  opt.iters = 40;
  const auto whole = adam_fit(p, {0, 0, 0, 0}, opt);
  for (std::size_t i = 0; i < 4; ++i) CHECK(rest.theta[i] == doctest::Approx(whole.theta[i]).epsilon(1e-12));
  CHECK(s1.step == 40);
}

TEST_CASE("weights serialize, parse and align by name") {
  FeatureIndex index;
  index.intern("type=STOP");
  index.intern("affix=suf:s");
  const std::vector<double> theta{0.1, -3.25e-7};
  const auto text = serialize_weights(Weights::from(index, theta));
  CHECK(text.rfind("# morphforest-model v1\n", 0) == 0);
  const auto w = parse_weights(text);
  CHECK(w.values == theta);

  FeatureIndex other;
  other.intern("affix=suf:s");
  other.intern("unknown");
  CHECK(w.align(other) == std::vector<double>{-3.25e-7, 0.0});

  CHECK_THROWS_AS(parse_weights("type\t1\n"), ParseError);
  CHECK(loss_curve_csv(std::vector<double>{2.0, 1.5}) == "iter,loss\n0,2\n1,1.5\n");
}
