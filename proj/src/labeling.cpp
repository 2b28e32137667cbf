#include "tocseg/labeling.hpp"

#include <algorithm>
#include <cmath>

namespace tocseg {

namespace {

std::string where(const Token& t) {
  return "token '" + t.text + "' [" + std::to_string(t.start) + ", " + std::to_string(t.end) + ")";
}

std::string where(const Span& s) {
  return "span [" + std::to_string(s.start) + ", " + std::to_string(s.end) + ", " +
         std::string(to_string(s.level)) + "]";
}

Level level_for(Label label) { return label == Label::ITitle ? Level::Title : Level::Subtitle; }

std::vector<Span> merge_runs(const std::vector<Token>& tokens, const std::vector<Label>& labels,
                             std::string_view text, bool check_gap) {
  if (tokens.size() != labels.size())
    throw Error("label count " + std::to_string(labels.size()) + " does not match token count " +
                std::to_string(tokens.size()));
  auto gap_is_blank = [&](const Token& a, const Token& b) {
    if (b.start < a.end) return false;
    if (!check_gap) return true;
    if (b.start > text.size()) throw Error(where(b) + " lies beyond the text");
    return is_blank(text.substr(a.end, b.start - a.end));
  };

  std::vector<Span> spans;
  for (std::size_t i = 0; i < tokens.size();) {
    if (labels[i] == Label::O) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < tokens.size() && labels[j + 1] == labels[i] && gap_is_blank(tokens[j], tokens[j + 1])) ++j;
    spans.push_back({tokens[i].start, tokens[j].end, level_for(labels[i])});
    i = j + 1;
  }
  return spans;
}

}  // namespace

std::vector<Label> spans_to_iob(const std::vector<Token>& tokens, const std::vector<Span>& spans) {
  std::vector<Span> sorted = spans;
  std::sort(sorted.begin(), sorted.end(), span_less);
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].start < sorted[i - 1].end)
      throw Error(where(sorted[i]) + " overlaps " + where(sorted[i - 1]));
  }

  std::vector<Label> labels(tokens.size(), Label::O);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    // First span ending after the token start is the only candidate overlap
    // among disjoint sorted spans.
    auto it = std::upper_bound(sorted.begin(), sorted.end(), t.start,
                               [](std::size_t pos, const Span& s) { return pos < s.end; });
    for (; it != sorted.end() && it->start < t.end; ++it) {
      if (t.start >= it->start && t.end <= it->end) {
        labels[i] = label_for(it->level);
      } else if (t.end > t.start) {
        throw AlignmentError(where(t) + " crosses the edge of " + where(*it));
      }
    }
  }
  return labels;
}

std::vector<Span> iob_to_spans(std::string_view text, const std::vector<Token>& tokens,
                               const std::vector<Label>& labels) {
  return merge_runs(tokens, labels, text, true);
}

std::vector<Span> iob_to_spans(const std::vector<Token>& tokens, const std::vector<Label>& labels) {
  return merge_runs(tokens, labels, {}, false);
}

std::vector<Label> project_labels(const std::vector<LabeledToken>& words,
                                  const std::vector<SubwordToken>& subwords) {
  std::vector<Label> out;
  out.reserve(subwords.size());
  for (const SubwordToken& sw : subwords) {
    // Words intersecting [sw.start, max(sw.end, sw.start + 1)).
    const std::size_t lo = sw.start;
    const std::size_t hi = std::max(sw.end, sw.start + 1);
    auto first = std::upper_bound(words.begin(), words.end(), lo,
                                  [](std::size_t pos, const LabeledToken& w) { return pos < w.token.end; });
    std::vector<const LabeledToken*> hits;
    for (auto it = first; it != words.end() && it->token.start < hi; ++it) hits.push_back(&*it);

    const std::string name = "subword '" + sw.text + "' [" + std::to_string(sw.start) + ", " +
                             std::to_string(sw.end) + ")";
    if (sw.end == sw.start) {
      // Zero-width markers ([CLS], [SEP]) carry no text of their own.
      out.push_back(Label::O);
    } else if (hits.empty()) {
      out.push_back(Label::O);
    } else if (hits.size() > 1) {
      throw AlignmentError(name + " straddles " + where(hits[0]->token) + " and " + where(hits[1]->token));
    } else if (sw.start < hits[0]->token.start) {
      throw AlignmentError(name + " starts outside " + where(hits[0]->token) + " but overlaps it");
    } else {
      out.push_back(hits[0]->label);
    }
  }
  return out;
}

std::vector<Window> make_windows(const std::string& doc_id, const std::vector<LabeledToken>& tokens,
                                 std::size_t window_size) {
  if (window_size == 0) throw Error("window size must be at least 1");
  std::vector<Window> windows;
  for (std::size_t begin = 0; begin < tokens.size(); begin += window_size) {
    const std::size_t end = std::min(tokens.size(), begin + window_size);
    windows.push_back({doc_id, windows.size(),
                       {tokens.begin() + static_cast<std::ptrdiff_t>(begin),
                        tokens.begin() + static_cast<std::ptrdiff_t>(end)}});
  }
  return windows;
}

std::size_t subword_budget(std::size_t word_count, double words_per_token) {
  if (!(words_per_token > 0.0)) throw Error("words_per_token must be positive");
  const double q = static_cast<double>(word_count) / words_per_token;
  // Ratios like 0.7 are inexact in binary; snap quotients that are integral
  // up to rounding noise before taking the ceiling.
  const double nearest = std::round(q);
  if (std::abs(q - nearest) <= 1e-9 * std::max(1.0, q)) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::ceil(q));
}

std::vector<LabeledToken> zip_labels(const std::vector<Token>& tokens, const std::vector<Label>& labels) {
  if (tokens.size() != labels.size())
    throw Error("label count " + std::to_string(labels.size()) + " does not match token count " +
                std::to_string(tokens.size()));
  std::vector<LabeledToken> out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) out.push_back({tokens[i], labels[i]});
  return out;
}

}  // namespace tocseg
