#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "tocseg/docmodel.hpp"
#include "tocseg/evalmetrics.hpp"
#include "tocseg/tocregex.hpp"

namespace tocseg {

enum class CorpusFormat { TextDir, JsonLines };

std::string_view to_string(CorpusFormat f);
CorpusFormat parse_corpus_format(std::string_view s);

using Corpus = std::vector<Document>;

// Streams documents one at a time in a stable order (TextDir: *.txt files
// sorted by name, id = file stem; JsonLines: line order, fields doc_id and
// text). Throws Error with file/line on unreadable input, malformed records
// and duplicate ids. Returns the number of documents visited.
std::size_t stream_corpus(const std::string& path, CorpusFormat format,
                          const std::function<void(Document&&)>& sink);
Corpus ingest(const std::string& path, CorpusFormat format);

// TextDir writes <dir>/<doc_id>.txt, JsonLines writes one record per line.
void write_corpus(const std::string& path, CorpusFormat format, const Corpus& corpus);
std::string format_jsonl_corpus(const Corpus& corpus);

// Annotation file: one JSON record per line,
// {"doc_id": "...", "spans": [{"start": 0, "end": 5, "level": "title"}]}.
AnnotationSet read_annotations(std::istream& in, const std::string& source = "<annotations>");
AnnotationSet load_annotations(const std::string& path);
std::string format_annotations(const AnnotationSet& set);

struct FrequencyRow {
  std::string title;
  std::size_t count = 0;
  friend bool operator==(const FrequencyRow&, const FrequencyRow&) = default;
};

// Sorted by count descending, then title ascending.
using FrequencyTable = std::vector<FrequencyRow>;

// Counts detections per normalized title with the denylist off, so false
// positives stay visible for curation.
FrequencyTable title_frequencies(const Corpus& corpus, const Engine& engine);

struct CorpusStats {
  std::size_t document_count = 0;
  // Lengths count word tokens: pretokenize tokens holding a letter or digit.
  double mean_length = 0.0;
  double median_length = 0.0;
  double mean_headings = 0.0;
  std::size_t unique_titles = 0;
  std::size_t total_headings = 0;
};

std::size_t word_count(std::string_view text);
// Headings are detections after denylist filtering.
CorpusStats corpus_stats(const Corpus& corpus, const Engine& engine);

enum class NoiseProfile { Off, Denylisted };

struct SyntheticOptions {
  std::uint64_t seed = 1;
  std::size_t doc_count = 10;
  std::size_t headings_per_doc = 5;
  NoiseProfile noise = NoiseProfile::Off;
  // Body words after each heading, drawn uniformly from [min, max].
  std::size_t min_body_words = 8;
  std::size_t max_body_words = 40;
  // Denylisted lines planted per document when noise is on.
  std::size_t noise_lines_per_doc = 2;
};

struct SyntheticCorpus {
  Corpus corpus;
  AnnotationSet gold;
};

// Deterministic in the options. Headings come from a fixed clinical lexicon
// and body text never holds a colon, so the default patterns recover the
// gold spans exactly; noise lines are denylisted "Field: value" lines that
// never appear in gold.
SyntheticCorpus generate_synthetic(const SyntheticOptions& options);

// Union of normalized entries from `existing` and the additions file.
Denylist merge_denylist(const Denylist& existing, std::string_view additions,
                        const std::string& source = "<additions>");

}  // namespace tocseg
