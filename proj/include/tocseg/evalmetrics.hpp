#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tocseg/docmodel.hpp"

namespace tocseg {

// Linear ignores the heading level when matching; Hierarchical requires it.
enum class EvalMode { Linear, Hierarchical };
enum class Aggregation { Micro, Macro };

std::string_view to_string(EvalMode m);
std::string_view to_string(Aggregation a);
EvalMode parse_eval_mode(std::string_view s);
Aggregation parse_aggregation(std::string_view s);

struct Counts {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;

  Counts& operator+=(const Counts& o) {
    true_positives += o.true_positives;
    false_positives += o.false_positives;
    false_negatives += o.false_negatives;
    return *this;
  }
  friend bool operator==(const Counts&, const Counts&) = default;
};

// Per-class counts index by Level. A true positive and a false negative
// are booked under the gold level, a false positive under the predicted
// level, so overall always equals the per-class sum.
struct MatchCounts {
  EvalMode mode = EvalMode::Hierarchical;
  std::array<Counts, 2> per_class{};
  Counts overall;

  Counts& of(Level l) { return per_class[static_cast<std::size_t>(l)]; }
  const Counts& of(Level l) const { return per_class[static_cast<std::size_t>(l)]; }
  MatchCounts& operator+=(const MatchCounts& o);
};

struct MatchOptions {
  // Boundary tolerance in bytes on each edge; 0 means exact.
  std::size_t slack = 0;
};

struct MatchResult {
  MatchCounts counts;
  // (gold index, pred index) of every true positive.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

// Throws Error when either list has overlapping spans.
MatchResult match_spans_detailed(const std::vector<Span>& gold, const std::vector<Span>& pred, EvalMode mode,
                                 MatchOptions options = {});
MatchCounts match_spans(const std::vector<Span>& gold, const std::vector<Span>& pred, EvalMode mode,
                        MatchOptions options = {});

struct Scores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

Scores scores_from(const Counts& c);

struct ClassReport {
  Level level;
  Scores scores;
  Counts counts;
};

struct MetricsReport {
  EvalMode mode = EvalMode::Hierarchical;
  Aggregation aggregation = Aggregation::Micro;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::vector<ClassReport> per_class;
  MatchCounts counts;
};

// Micro pools counts; macro averages per-class P/R/F1 over the classes with
// any gold or predicted span. In linear mode there is a single heading class,
// so macro equals micro. 0/0 is taken as 0.
MetricsReport compute_metrics(const MatchCounts& counts, Aggregation aggregation);

// doc_id -> spans. Ordered so iteration is deterministic.
using AnnotationSet = std::map<std::string, std::vector<Span>>;

// Gold documents missing from `pred` count as empty predictions. A
// prediction for an id absent from gold throws Error naming it.
MetricsReport evaluate_corpus(const AnnotationSet& gold, const AnnotationSet& pred, EvalMode mode,
                              Aggregation aggregation, MatchOptions options = {});
MatchCounts pool_counts(const AnnotationSet& gold, const AnnotationSet& pred, EvalMode mode,
                        MatchOptions options = {});

std::string format_report_table(const MetricsReport& report);
std::string format_report_json(const MetricsReport& report);

struct LatencyStats {
  std::size_t documents = 0;
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double min_ms = 0.0;
  double max_ms = 0.0;
};

// Runs `segmenter` over the corpus `warmup_passes` times untimed, then once
// timed per document. Throws Error on an empty corpus.
LatencyStats time_segmenter(const std::function<void(const Document&)>& segmenter,
                            std::span<const Document> corpus, std::size_t warmup_passes = 1);

}  // namespace tocseg
