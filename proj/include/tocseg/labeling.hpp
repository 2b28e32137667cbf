#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "tocseg/docmodel.hpp"

namespace tocseg {

inline constexpr std::size_t kDefaultWindowSize = 384;
inline constexpr double kWordsPerSubword = 0.75;

struct LabeledToken {
  Token token;
  Label label = Label::O;

  friend bool operator==(const LabeledToken&, const LabeledToken&) = default;
};

struct SubwordToken {
  std::string text;
  std::size_t start = 0;
  std::size_t end = 0;
  bool is_continuation = false;
};

struct Window {
  std::string doc_id;
  std::size_t index = 0;
  std::vector<LabeledToken> tokens;

  friend bool operator==(const Window&, const Window&) = default;
};

// Raised when a token or subword straddles an annotation or word boundary.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

// A token gets I-title / I-Stitle iff it lies entirely inside a span of that
// level. Throws AlignmentError on a token that crosses a span edge.
std::vector<Label> spans_to_iob(const std::vector<Token>& tokens, const std::vector<Span>& spans);

// Merges maximal runs of equal non-O labels into spans. Two neighbouring
// tokens belong to one run only if nothing but whitespace lies between them
// in `text`.
std::vector<Span> iob_to_spans(std::string_view text, const std::vector<Token>& tokens,
                               const std::vector<Label>& labels);
// Text-free form for token streams that cover every non-whitespace
// character, as produced by pretokenize: consecutive tokens are always
// whitespace-adjacent.
std::vector<Span> iob_to_spans(const std::vector<Token>& tokens, const std::vector<Label>& labels);

// Each subword takes the label of the word holding its start offset; a
// subword outside every word gets O. AlignmentError if a subword overlaps
// two words or starts outside a word it overlaps.
std::vector<Label> project_labels(const std::vector<LabeledToken>& words,
                                  const std::vector<SubwordToken>& subwords);

std::vector<Window> make_windows(const std::string& doc_id, const std::vector<LabeledToken>& tokens,
                                 std::size_t window_size = kDefaultWindowSize);

// Estimated subword demand, ceil(word_count / words_per_token).
std::size_t subword_budget(std::size_t word_count, double words_per_token = kWordsPerSubword);

std::vector<LabeledToken> zip_labels(const std::vector<Token>& tokens, const std::vector<Label>& labels);

// Window file: "# doc: <id> window: <index>" header, then one
// "text\tstart\tend\tlabel" line per token, blank line between windows.
void write_windows(std::ostream& out, const std::vector<Window>& windows);
std::string format_windows(const std::vector<Window>& windows);
// Throws Error with the line number on malformed input.
std::vector<Window> read_windows(std::istream& in, const std::string& source = "<windows>");

}  // namespace tocseg
