#include <doctest.h>

#include <algorithm>
#include <random>

#include "morphforest/error.hpp"
#include "morphforest/metrics.hpp"
#include <nlohmann/json.hpp>

using namespace morphforest;

namespace {

GoldSegmentations gold_of(std::initializer_list<std::pair<const char*, std::vector<std::string>>> rows) {
  GoldSegmentations g;
  for (const auto& [w, morphs] : rows) g[w].push_back(morphs);
  return g;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::kContract;
}

}  // namespace

TEST_CASE("PRF and boundaries") {
  const auto p = PRF::from(0.5, 1.0);
  CHECK(p.f1 == doctest::Approx(2.0 / 3.0));
  CHECK(PRF::from(0.0, 0.0).f1 == 0.0);
  CHECK(boundaries_of({"paint", "s"}) == BoundarySet{5});
  CHECK(boundaries_of({"gas", "light", "s"}) == BoundarySet{3, 8});
  CHECK(boundaries_of({"caf\xC3\xA9", "s"}) == BoundarySet{4});
  CHECK(boundaries_of({"word"}).empty());
}

TEST_CASE("bpr on single words") {
  const auto gold = gold_of({{"paints", {"paint", "s"}}});
  auto exact = bpr({{"paints", {5}}}, gold);
  CHECK(exact.prf.f1 == 1.0);
  auto off = bpr({{"paints", {4}}}, gold);
  CHECK(off.tp == 0);
  CHECK(off.fp == 1);
  CHECK(off.fn == 1);
  CHECK(off.prf.f1 == 0.0);
}

TEST_CASE("bpr on a hand-counted three-word corpus") {
  // pred {}, {2}, {1,3} against gold {}, {2}, {1}: TP 2, FP 1, FN 0
  const auto gold = gold_of({{"abcd", {"abcd"}}, {"efgh", {"ef", "gh"}}, {"ijkl", {"i", "jkl"}}});
  const auto r = bpr({{"abcd", {}}, {"efgh", {2}}, {"ijkl", {1, 3}}}, gold);
  CHECK(r.tp == 2);
  CHECK(r.fp == 1);
  CHECK(r.fn == 0);
  CHECK(r.prf.precision == doctest::Approx(2.0 / 3.0));
  CHECK(r.prf.recall == 1.0);
  CHECK(r.prf.f1 == doctest::Approx(0.8));
  CHECK(r.words == 3);

  // per word: P = 1, 1, 1/2 and R = 1, 1, 1
  const auto m = bpr({{"abcd", {}}, {"efgh", {2}}, {"ijkl", {1, 3}}}, gold, Averaging::kMacro);
  CHECK(m.prf.precision == doctest::Approx(2.5 / 3.0));
  CHECK(m.prf.recall == 1.0);
}

TEST_CASE("bpr picks the best gold alternative") {
  GoldSegmentations g;
  g["walkers"] = {{"walk", "ers"}, {"walk", "er", "s"}};
  const auto r = bpr({{"walkers", {4, 6}}}, g);
  CHECK(r.prf.f1 == 1.0);
  const auto r2 = bpr({{"walkers", {4}}}, g);
  CHECK(r2.prf.f1 == 1.0);
}

TEST_CASE("bpr errors") {
  const auto gold = gold_of({{"paints", {"paint", "s"}}});
  CHECK(kind_of([&] { bpr({{"other", {}}}, gold); }) == ErrorKind::kValidation);
  CHECK(kind_of([&] { bpr({}, gold); }) == ErrorKind::kValidation);
}

TEST_CASE("bpr properties") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    StringMap<BoundarySet> pred, gold_sets;
    GoldSegmentations gold;
    std::vector<std::string> words;
    for (int i = 0; i < 20; ++i) {
      const std::string w = "w" + std::string(2 + rng() % 8, static_cast<char>('a' + i));
      words.push_back(w);
      BoundarySet a, b;
      for (std::size_t k = 1; k < w.size(); ++k) {
        if (rng() % 3 == 0) a.insert(k);
        if (rng() % 3 == 0) b.insert(k);
      }
      pred[w] = a;
      gold_sets[w] = b;
      std::vector<std::string> morphs;
      std::size_t start = 0;
      for (auto k : b) morphs.push_back(w.substr(start, k - start)), start = k;
      morphs.push_back(w.substr(start));
      gold[w] = {morphs};
    }
    const auto r = bpr(pred, gold);
    for (double v : {r.prf.precision, r.prf.recall, r.prf.f1}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }

    // swapping roles swaps precision and recall
    GoldSegmentations swapped;
    for (const auto& [w, a] : pred) {
      std::vector<std::string> morphs;
      std::size_t start = 0;
      for (auto k : a) morphs.push_back(w.substr(start, k - start)), start = k;
      morphs.push_back(w.substr(start));
      swapped[w] = {morphs};
    }
    const auto s = bpr(gold_sets, swapped);
    CHECK(s.prf.precision == doctest::Approx(r.prf.recall).epsilon(1e-12));
    CHECK(s.prf.recall == doctest::Approx(r.prf.precision).epsilon(1e-12));

    // insertion order does not matter
    std::shuffle(words.begin(), words.end(), rng);
    StringMap<BoundarySet> reordered;
    for (const auto& w : words) reordered[w] = pred[w];
    const auto o = bpr(reordered, gold);
    CHECK(o.tp == r.tp);
    CHECK(o.fp == r.fp);
    CHECK(o.fn == r.fn);
  }
}

TEST_CASE("cluster metrics on the paint example") {
  const StringMap<std::string> pred{{"paint", "1"}, {"paints", "1"}, {"pain", "1"}};
  const GoldClusters gold{{"paint", "a"}, {"paints", "a"}, {"pain", "b"}};
  const auto r = cluster_prf(pred, gold);
  CHECK(r.correct == doctest::Approx(3.0));
  CHECK(r.inserted == doctest::Approx(3.0));
  CHECK(r.deleted == doctest::Approx(0.0));
  CHECK(r.prf.precision == doctest::Approx(0.5));
  CHECK(r.prf.recall == doctest::Approx(1.0));
  CHECK(r.prf.f1 == doctest::Approx(2.0 / 3.0));

  const auto same = cluster_prf(gold, gold);
  CHECK(same.prf.f1 == doctest::Approx(1.0));
  CHECK(same.inserted == 0.0);

  const StringMap<std::string> singles{{"x", "1"}, {"y", "2"}};
  CHECK(cluster_prf(singles, GoldClusters{{"x", "p"}, {"y", "q"}}).prf.f1 == doctest::Approx(1.0));
  CHECK(kind_of([&] { cluster_prf(singles, gold); }) == ErrorKind::kValidation);
}

TEST_CASE("correct plus deleted equals the number of words") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 100; ++trial) {
    StringMap<std::string> pred;
    GoldClusters gold;
    const std::size_t n = 1 + rng() % 60;
    for (std::size_t i = 0; i < n; ++i) {
      const std::string w = "w" + std::to_string(i);
      pred[w] = std::to_string(rng() % (1 + rng() % 10));
      gold[w] = std::to_string(rng() % (1 + rng() % 10));
    }
    const auto r = cluster_prf(pred, gold);
    CHECK(r.correct + r.deleted == doctest::Approx(static_cast<double>(n)).epsilon(1e-12));
    CHECK(r.words == n);
    CHECK(r.prf.precision <= 1.0);
    CHECK(r.prf.recall <= 1.0);
  }
}

TEST_CASE("root accuracy") {
  const GoldRoots gold{{"a", {"a"}}, {"b", {"b"}}, {"c", {"x", "c"}}, {"d", {"d"}}};
  CHECK(root_accuracy({{"a", "a"}, {"b", "b"}, {"c", "c"}, {"d", "d"}}, gold).accuracy == 1.0);
  const auto half = root_accuracy({{"a", "a"}, {"b", "z"}, {"c", "x"}, {"d", "q"}}, gold);
  CHECK(half.accuracy == 0.5);
  CHECK(half.correct == 2);
  CHECK(kind_of([&] { root_accuracy({{"zz", "z"}}, gold); }) == ErrorKind::kValidation);
}

TEST_CASE("file parsers") {
  const auto g = parse_gold_segmentations("Walkers\twalk er s, walk ers\nwalkers\twalk ers\n");
  REQUIRE(g.size() == 1);
  CHECK(g.at("walkers").size() == 2);
  CHECK(g.at("walkers")[0] == std::vector<std::string>{"walk", "er", "s"});
  CHECK_THROWS_AS(parse_gold_segmentations("walks\twal s\n"), ParseError);
  CHECK_THROWS_AS(parse_gold_segmentations("walks\n"), ParseError);
  CHECK(parse_gold_segmentations("walks\twalk:N s:PL\n").at("walks")[0] ==
        std::vector<std::string>{"walk", "s"});

  const auto c = parse_gold_clusters("paint\t1\npaints\t1\n");
  CHECK(c.at("paints") == "1");
  const auto r = parse_gold_roots("taking\ttake|tak\n");
  CHECK(r.at("taking") == std::vector<std::string>{"take", "tak"});

  const auto ps = parse_predicted_segmentations("gaslights\tgas light s\n");
  CHECK(ps.at("gaslights") == BoundarySet{3, 8});
  const auto pf = parse_predicted_families("paint\tpaints\npaint\tpaint\npain\tpain\n");
  CHECK(pf.at("paints") == "paint");
  CHECK(pf.at("pain") == "pain");
  CHECK(parse_predicted_roots("paints\tpaint\n").at("paints") == "paint");
}

TEST_CASE("JSON reports") {
  using nlohmann::json;
  const auto gold = gold_of({{"paints", {"paint", "s"}}});
  const auto j = json::parse(to_json(bpr({{"paints", {5}}}, gold)));
  CHECK(j.at("task") == "segmentation");
  CHECK(j.at("F1") == 1.0);
  CHECK(j.at("counts").at("tp") == 1);
  const GoldClusters gc{{"a", "1"}};
  const auto c = json::parse(to_json(cluster_prf({{"a", "x"}}, gc)));
  CHECK(c.at("task") == "clustering");
  CHECK(c.at("counts").at("C") == 1);
  const auto r = json::parse(to_json(root_accuracy({{"a", "a"}}, GoldRoots{{"a", {"a"}}})));
  CHECK(r.at("accuracy") == 1.0);
}
