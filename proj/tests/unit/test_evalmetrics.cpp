#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "oracles.hpp"
#include "tocseg/evalmetrics.hpp"

using namespace tocseg;

namespace {

const std::vector<Span> kGold{{0, 5, Level::Title}, {10, 14, Level::Subtitle}};
const std::vector<Span> kPred{{0, 5, Level::Title}, {10, 14, Level::Title}, {20, 24, Level::Subtitle}};

Counts counts(std::size_t tp, std::size_t fp, std::size_t fn) { return {tp, fp, fn}; }

}  // namespace

TEST_CASE("match_spans examples") {
  CHECK(match_spans(kGold, kGold, EvalMode::Hierarchical).overall == counts(2, 0, 0));
  CHECK(match_spans(kGold, kPred, EvalMode::Hierarchical).overall == counts(1, 2, 1));
  CHECK(match_spans(kGold, kPred, EvalMode::Linear).overall == counts(2, 1, 0));
  CHECK(match_spans(kGold, {}, EvalMode::Hierarchical).overall == counts(0, 0, 2));

  const auto h = match_spans(kGold, kPred, EvalMode::Hierarchical);
  CHECK(h.of(Level::Title) == counts(1, 1, 0));
  CHECK(h.of(Level::Subtitle) == counts(0, 1, 1));

  CHECK_THROWS_AS(match_spans({{0, 5, Level::Title}, {3, 8, Level::Title}}, {}, EvalMode::Linear), Error);
  CHECK_THROWS_AS(match_spans({}, {{0, 5, Level::Title}, {4, 8, Level::Title}}, EvalMode::Linear), Error);
}

TEST_CASE("compute_metrics examples") {
  MatchCounts c;
  c.overall = counts(1, 2, 1);
  c.of(Level::Title) = c.overall;
  const auto r = compute_metrics(c, Aggregation::Micro);
  CHECK(r.precision == doctest::Approx(1.0 / 3.0));
  CHECK(r.recall == doctest::Approx(0.5));
  CHECK(r.f1 == doctest::Approx(0.4));

  const auto zero = compute_metrics(MatchCounts{}, Aggregation::Micro);
  CHECK(zero.precision == 0.0);
  CHECK(zero.recall == 0.0);
  CHECK(zero.f1 == 0.0);

  const auto perfect = compute_metrics(match_spans(kGold, kGold, EvalMode::Hierarchical), Aggregation::Micro);
  CHECK(perfect.precision == 1.0);
  CHECK(perfect.recall == 1.0);
  CHECK(perfect.f1 == 1.0);
}

TEST_CASE("macro averages the per-class scores") {
  const auto c = match_spans(kGold, kPred, EvalMode::Hierarchical);
  const auto r = compute_metrics(c, Aggregation::Macro);
  // title P=1/2 R=1 F1=2/3; subtitle all 0
  CHECK(r.precision == doctest::Approx(0.25));
  CHECK(r.recall == doctest::Approx(0.5));
  CHECK(r.f1 == doctest::Approx(1.0 / 3.0));
  REQUIRE(r.per_class.size() == 2);
  CHECK(r.per_class[0].scores.f1 == doctest::Approx(2.0 / 3.0));

  // a class with no gold and no predictions does not drag the mean down
  const auto only_titles = match_spans({{0, 5, Level::Title}}, {{0, 5, Level::Title}}, EvalMode::Hierarchical);
  CHECK(compute_metrics(only_titles, Aggregation::Macro).f1 == 1.0);

  const auto linear = match_spans(kGold, kPred, EvalMode::Linear);
  const auto lm = compute_metrics(linear, Aggregation::Macro);
  const auto li = compute_metrics(linear, Aggregation::Micro);
  CHECK(lm.precision == li.precision);
  CHECK(lm.f1 == li.f1);
}

TEST_CASE("match_spans equals the brute-force matcher") {
  oracle::Rng rng(1000);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto gold = oracle::random_disjoint_spans(rng, 10, 40);
    auto pred = oracle::random_disjoint_spans(rng, 10, 40);
    // bias toward hits: copy some gold spans into pred when they fit
    for (const Span& g : gold) {
      if (!rng.coin(40)) continue;
      Span s = g;
      if (rng.coin(30)) s.level = s.level == Level::Title ? Level::Subtitle : Level::Title;
      bool clash = false;
      for (const Span& p : pred) clash = clash || (s.start < p.end && p.start < s.end);
      if (!clash) pred.push_back(s);
    }
    for (const EvalMode mode : {EvalMode::Linear, EvalMode::Hierarchical}) {
      const auto brute = oracle::brute_force_match(gold, pred, mode);
      const auto got = match_spans_detailed(gold, pred, mode);
      REQUIRE(got.counts.overall == counts(brute.tp, brute.fp, brute.fn));
      const std::set<std::pair<std::size_t, std::size_t>> pairs(got.pairs.begin(), got.pairs.end());
      REQUIRE(pairs == brute.tp_pairs);

      Counts sum;
      for (const Counts& c : got.counts.per_class) sum += c;
      REQUIRE(sum == got.counts.overall);
    }
  }
}

TEST_CASE("symmetry and mode containment") {
  oracle::Rng rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto gold = oracle::random_disjoint_spans(rng, 10, 30);
    const auto pred = oracle::random_disjoint_spans(rng, 10, 30);
    for (const EvalMode mode : {EvalMode::Linear, EvalMode::Hierarchical}) {
      const auto gp = match_spans(gold, pred, mode);
      const auto pg = match_spans(pred, gold, mode);
      REQUIRE(gp.overall.true_positives == pg.overall.true_positives);
      const auto a = compute_metrics(gp, Aggregation::Micro);
      const auto b = compute_metrics(pg, Aggregation::Micro);
      REQUIRE(a.precision == doctest::Approx(b.recall));
    }

    const auto lin = match_spans_detailed(gold, pred, EvalMode::Linear);
    const auto hier = match_spans_detailed(gold, pred, EvalMode::Hierarchical);
    const std::set<std::pair<std::size_t, std::size_t>> lin_pairs(lin.pairs.begin(), lin.pairs.end());
    for (const auto& p : hier.pairs) REQUIRE(lin_pairs.contains(p));
    const auto lm = compute_metrics(lin.counts, Aggregation::Micro);
    const auto hm = compute_metrics(hier.counts, Aggregation::Micro);
    REQUIRE(lm.precision >= hm.precision);
    REQUIRE(lm.recall >= hm.recall);
    REQUIRE(lm.f1 >= hm.f1);
    for (const double v : {lm.precision, lm.recall, lm.f1, hm.precision, hm.recall, hm.f1}) {
      REQUIRE(v >= 0.0);
      REQUIRE(v <= 1.0);
    }
    const auto macro = compute_metrics(hier.counts, Aggregation::Macro);
    REQUIRE((macro.f1 >= 0.0 && macro.f1 <= 1.0));
  }
}

TEST_CASE("boundary slack") {
  const std::vector<Span> gold{{10, 20, Level::Title}};
  const std::vector<Span> near{{11, 19, Level::Title}};
  CHECK(match_spans(gold, near, EvalMode::Linear).overall == counts(0, 1, 1));
  CHECK(match_spans(gold, near, EvalMode::Linear, {.slack = 1}).overall == counts(1, 0, 0));
  CHECK(match_spans(gold, {{8, 20, Level::Title}}, EvalMode::Linear, {.slack = 1}).overall == counts(0, 1, 1));
}

TEST_CASE("evaluate_corpus") {
  const AnnotationSet gold{{"a", kGold}, {"b", {{3, 9, Level::Title}}}};
  const auto perfect = evaluate_corpus(gold, gold, EvalMode::Hierarchical, Aggregation::Micro);
  CHECK(perfect.f1 == 1.0);

  const AnnotationSet missing{{"a", kGold}};
  const auto r = evaluate_corpus(gold, missing, EvalMode::Hierarchical, Aggregation::Micro);
  CHECK(r.counts.overall == counts(2, 0, 1));

  const AnnotationSet pred{{"a", kPred}, {"b", {{3, 9, Level::Subtitle}}}};
  const auto h = evaluate_corpus(gold, pred, EvalMode::Hierarchical, Aggregation::Micro);
  const auto l = evaluate_corpus(gold, pred, EvalMode::Linear, Aggregation::Micro);
  CHECK(h.counts.overall == counts(1, 3, 2));
  CHECK(l.counts.overall == counts(3, 1, 0));
  CHECK(l.f1 >= h.f1);

  try {
    evaluate_corpus(gold, {{"zzz", {}}}, EvalMode::Linear, Aggregation::Micro);
    FAIL("unknown id accepted");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("zzz") != std::string::npos);
  }
}

TEST_CASE("report serialization") {
  const auto r = compute_metrics(match_spans(kGold, kPred, EvalMode::Hierarchical), Aggregation::Micro);
  const auto j = nlohmann::json::parse(format_report_json(r));
  CHECK(j["mode"] == "hierarchical");
  CHECK(j["aggregation"] == "micro");
  CHECK(j["precision"].get<double>() == doctest::Approx(1.0 / 3.0));
  CHECK(j["counts"]["overall"]["true_positives"] == 1);
  CHECK(j["counts"]["overall"]["false_positives"] == 2);
  CHECK(j["counts"]["overall"]["false_negatives"] == 1);
  CHECK(j["per_class"]["subtitle"]["counts"]["false_negatives"] == 1);
  CHECK(j["per_class"]["title"].contains("f1"));

  const std::string table = format_report_table(r);
  CHECK(table.find("title") != std::string::npos);
  CHECK(table.find("0.333") != std::string::npos);

  CHECK(parse_eval_mode("linear") == EvalMode::Linear);
  CHECK(parse_aggregation("macro") == Aggregation::Macro);
  CHECK_THROWS_AS(parse_eval_mode("flat"), Error);
}

TEST_CASE("time_segmenter") {
  std::vector<Document> corpus;
  for (int i = 0; i < 10; ++i) corpus.emplace_back("d" + std::to_string(i), "text");
  std::size_t calls = 0;
  const auto stats = time_segmenter([&](const Document&) { ++calls; }, corpus);
  CHECK(stats.documents == 10);
  CHECK(calls == 20);  // one warm-up pass plus the timed one
  CHECK(stats.min_ms <= stats.median_ms);
  CHECK(stats.median_ms <= stats.max_ms);
  CHECK(stats.mean_ms >= 0.0);

  const std::vector<Document> one{Document("x", "y")};
  const auto single = time_segmenter(
      [](const Document&) { std::this_thread::sleep_for(std::chrono::milliseconds(2)); }, one);
  CHECK(single.mean_ms == single.median_ms);
  CHECK(single.mean_ms >= 2.0);

  CHECK_THROWS_AS(time_segmenter([](const Document&) {}, std::vector<Document>{}), Error);
}
