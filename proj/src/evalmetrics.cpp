#include "tocseg/evalmetrics.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace tocseg {

std::string_view to_string(EvalMode m) { return m == EvalMode::Linear ? "linear" : "hierarchical"; }
std::string_view to_string(Aggregation a) { return a == Aggregation::Micro ? "micro" : "macro"; }

EvalMode parse_eval_mode(std::string_view s) {
  if (s == "linear") return EvalMode::Linear;
  if (s == "hierarchical") return EvalMode::Hierarchical;
  throw Error("unknown evaluation mode '" + std::string(s) + "'");
}

Aggregation parse_aggregation(std::string_view s) {
  if (s == "micro") return Aggregation::Micro;
  if (s == "macro") return Aggregation::Macro;
  throw Error("unknown aggregation '" + std::string(s) + "'");
}

MatchCounts& MatchCounts::operator+=(const MatchCounts& o) {
  for (std::size_t i = 0; i < per_class.size(); ++i) per_class[i] += o.per_class[i];
  overall += o.overall;
  return *this;
}

namespace {

std::vector<std::size_t> sorted_order(const std::vector<Span>& spans, const char* which) {
  std::vector<std::size_t> order(spans.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return span_less(spans[a], spans[b]); });
  for (std::size_t k = 1; k < order.size(); ++k) {
    const Span& prev = spans[order[k - 1]];
    const Span& cur = spans[order[k]];
    if (cur.start < prev.end)
      throw Error(std::string(which) + " spans overlap: [" + std::to_string(prev.start) + ", " +
                  std::to_string(prev.end) + ") and [" + std::to_string(cur.start) + ", " +
                  std::to_string(cur.end) + ")");
  }
  return order;
}

std::size_t distance(std::size_t a, std::size_t b) { return a > b ? a - b : b - a; }

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

MatchResult match_spans_detailed(const std::vector<Span>& gold, const std::vector<Span>& pred, EvalMode mode,
                                 MatchOptions options) {
  const auto gold_order = sorted_order(gold, "gold");
  const auto pred_order = sorted_order(pred, "predicted");

  MatchResult result;
  result.counts.mode = mode;
  std::vector<bool> gold_used(gold.size(), false);
  std::vector<bool> pred_used(pred.size(), false);

  // Both lists are disjoint, so each prediction is compatible with a
  // contiguous run of gold spans; taking the earliest free one is optimal.
  std::size_t lo = 0;
  for (const std::size_t pi : pred_order) {
    const Span& p = pred[pi];
    while (lo < gold_order.size() && gold[gold_order[lo]].start + options.slack < p.start) ++lo;
    for (std::size_t k = lo; k < gold_order.size(); ++k) {
      const std::size_t gi = gold_order[k];
      const Span& g = gold[gi];
      if (g.start > p.start + options.slack) break;
      if (gold_used[gi] || distance(g.start, p.start) > options.slack || distance(g.end, p.end) > options.slack)
        continue;
      if (mode == EvalMode::Hierarchical && g.level != p.level) continue;
      gold_used[gi] = true;
      pred_used[pi] = true;
      result.pairs.emplace_back(gi, pi);
      break;
    }
  }

  MatchCounts& c = result.counts;
  for (std::size_t gi = 0; gi < gold.size(); ++gi) {
    if (gold_used[gi]) {
      ++c.of(gold[gi].level).true_positives;
    } else {
      ++c.of(gold[gi].level).false_negatives;
    }
  }
  for (std::size_t pi = 0; pi < pred.size(); ++pi) {
    if (!pred_used[pi]) ++c.of(pred[pi].level).false_positives;
  }
  for (const Counts& pc : c.per_class) c.overall += pc;
  std::sort(result.pairs.begin(), result.pairs.end());
  return result;
}

MatchCounts match_spans(const std::vector<Span>& gold, const std::vector<Span>& pred, EvalMode mode,
                        MatchOptions options) {
  return match_spans_detailed(gold, pred, mode, options).counts;
}

Scores scores_from(const Counts& c) {
  Scores s;
  s.precision = ratio(c.true_positives, c.true_positives + c.false_positives);
  s.recall = ratio(c.true_positives, c.true_positives + c.false_negatives);
  s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

MetricsReport compute_metrics(const MatchCounts& counts, Aggregation aggregation) {
  MetricsReport report;
  report.mode = counts.mode;
  report.aggregation = aggregation;
  report.counts = counts;
  for (const Level level : {Level::Title, Level::Subtitle}) {
    report.per_class.push_back({level, scores_from(counts.of(level)), counts.of(level)});
  }

  Scores total = scores_from(counts.overall);
  if (aggregation == Aggregation::Macro && counts.mode == EvalMode::Hierarchical) {
    total = {};
    std::size_t classes = 0;
    for (const ClassReport& cr : report.per_class) {
      const Counts& c = cr.counts;
      if (c.true_positives + c.false_positives + c.false_negatives == 0) continue;
      total.precision += cr.scores.precision;
      total.recall += cr.scores.recall;
      total.f1 += cr.scores.f1;
      ++classes;
    }
    if (classes > 0) {
      total.precision /= static_cast<double>(classes);
      total.recall /= static_cast<double>(classes);
      total.f1 /= static_cast<double>(classes);
    }
  }
  report.precision = total.precision;
  report.recall = total.recall;
  report.f1 = total.f1;
  return report;
}

MatchCounts pool_counts(const AnnotationSet& gold, const AnnotationSet& pred, EvalMode mode,
                        MatchOptions options) {
  for (const auto& [id, spans] : pred) {
    if (!gold.contains(id)) throw Error("prediction for unknown doc_id '" + id + "'");
  }
  MatchCounts pooled;
  pooled.mode = mode;
  static const std::vector<Span> kEmpty;
  for (const auto& [id, gold_spans] : gold) {
    const auto it = pred.find(id);
    try {
      pooled += match_spans(gold_spans, it == pred.end() ? kEmpty : it->second, mode, options);
    } catch (const Error& e) {
      throw Error("document '" + id + "': " + e.what());
    }
  }
  return pooled;
}

MetricsReport evaluate_corpus(const AnnotationSet& gold, const AnnotationSet& pred, EvalMode mode,
                              Aggregation aggregation, MatchOptions options) {
  return compute_metrics(pool_counts(gold, pred, mode, options), aggregation);
}

std::string format_report_table(const MetricsReport& report) {
  std::ostringstream out;
  out << "mode: " << to_string(report.mode) << "  aggregation: " << to_string(report.aggregation) << '\n';
  out << std::left << std::setw(10) << "class" << std::right << std::setw(11) << "precision" << std::setw(9)
      << "recall" << std::setw(9) << "f1" << std::setw(7) << "tp" << std::setw(7) << "fp" << std::setw(7)
      << "fn" << '\n';
  auto row = [&](std::string_view name, double p, double r, double f, const Counts& c) {
    out << std::left << std::setw(10) << name << std::right << std::fixed << std::setprecision(3)
        << std::setw(11) << p << std::setw(9) << r << std::setw(9) << f << std::setw(7) << c.true_positives
        << std::setw(7) << c.false_positives << std::setw(7) << c.false_negatives << '\n';
  };
  for (const ClassReport& cr : report.per_class)
    row(to_string(cr.level), cr.scores.precision, cr.scores.recall, cr.scores.f1, cr.counts);
  row("overall", report.precision, report.recall, report.f1, report.counts.overall);
  return out.str();
}

std::string format_report_json(const MetricsReport& report) {
  using nlohmann::json;
  auto counts_json = [](const Counts& c) {
    return json{{"true_positives", c.true_positives},
                {"false_positives", c.false_positives},
                {"false_negatives", c.false_negatives}};
  };
  json per_class = json::object();
  for (const ClassReport& cr : report.per_class) {
    per_class[std::string(to_string(cr.level))] = {{"precision", cr.scores.precision},
                                                   {"recall", cr.scores.recall},
                                                   {"f1", cr.scores.f1},
                                                   {"counts", counts_json(cr.counts)}};
  }
  json counts = {{"title", counts_json(report.counts.of(Level::Title))},
                 {"subtitle", counts_json(report.counts.of(Level::Subtitle))},
                 {"overall", counts_json(report.counts.overall)}};
  json j = {{"mode", to_string(report.mode)},
            {"aggregation", to_string(report.aggregation)},
            {"precision", report.precision},
            {"recall", report.recall},
            {"f1", report.f1},
            {"per_class", per_class},
            {"counts", counts}};
  return j.dump(2) + "\n";
}

LatencyStats time_segmenter(const std::function<void(const Document&)>& segmenter,
                            std::span<const Document> corpus, std::size_t warmup_passes) {
  if (corpus.empty()) throw Error("cannot time a segmenter on an empty corpus");
  using clock = std::chrono::steady_clock;
  for (std::size_t pass = 0; pass < warmup_passes; ++pass) {
    for (const Document& doc : corpus) segmenter(doc);
  }
  std::vector<double> ms;
  ms.reserve(corpus.size());
  for (const Document& doc : corpus) {
    const auto t0 = clock::now();
    segmenter(doc);
    ms.push_back(std::chrono::duration<double, std::milli>(clock::now() - t0).count());
  }

  LatencyStats stats;
  stats.documents = ms.size();
  stats.mean_ms = std::accumulate(ms.begin(), ms.end(), 0.0) / static_cast<double>(ms.size());
  std::vector<double> sorted = ms;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  stats.median_ms = n % 2 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
  stats.min_ms = sorted.front();
  stats.max_ms = sorted.back();
  return stats;
}

}  // namespace tocseg
