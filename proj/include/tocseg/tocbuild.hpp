#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "tocseg/docmodel.hpp"

namespace tocseg {

// One heading and the section it opens. The section body starts right
// after the heading and runs to the next heading of the same or a higher
// level (or the parent's end).
struct TocNode {
  Span heading;
  std::string heading_text;
  std::size_t section_start = 0;
  std::size_t section_end = 0;
  std::vector<TocNode> children;
  // Stand-in root for subtitles that precede the first title; its heading
  // is the empty span at preamble_end.
  bool synthetic = false;
};

struct TocTree {
  std::string doc_id;
  std::size_t preamble_end = 0;
  std::vector<TocNode> roots;
};

// Spans must be sorted and disjoint; throws Error otherwise.
TocTree build_toc(const Document& doc, const std::vector<Span>& spans);

struct SectionSlice {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string text;
};

// Bodies of every node whose normalized heading equals the (normalized)
// query, in document order.
std::vector<SectionSlice> extract_sections(const Document& doc, const TocTree& tree,
                                           const std::string& query);

// Byte ranges [heading.start, section_end) removed for `removal`, merged
// and sorted.
std::vector<std::pair<std::size_t, std::size_t>> removal_extents(const TocTree& tree,
                                                                 const std::set<std::string>& removal);

// Drops heading and body of every node whose normalized heading is in
// `removal`. Returns a document with the same id.
Document clean_document(const Document& doc, const TocTree& tree, const std::set<std::string>& removal);

// Heading spans in tree order, synthetic roots skipped.
std::vector<Span> flatten_headings(const TocTree& tree);

// Plain-text export: "# doc: <id> preamble_end: <n>", then one line per
// node: depth, heading start, heading end, section start, section end and
// heading text, tab separated. Synthetic roots show depth 1 and "(preamble)".
std::string format_toc_text(const TocTree& tree);
// One JSON object (single line): doc_id, preamble_end and a flat "spans"
// array of {start, end, level, section_start, section_end, text}.
std::string format_toc_json(const TocTree& tree);

}  // namespace tocseg
