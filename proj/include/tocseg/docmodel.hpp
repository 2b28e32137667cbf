#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tocseg {

// Base for every recoverable data problem (bad input, bad annotation,
// misaligned offsets). The CLI maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Level { Title, Subtitle };

std::string_view to_string(Level level);
// Accepts "title" / "subtitle"; throws Error otherwise.
Level parse_level(std::string_view s);

// Half-open byte range [start, end) over a document's text.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  Level level = Level::Title;

  std::size_t length() const { return end - start; }
  friend bool operator==(const Span&, const Span&) = default;
};

bool span_less(const Span& a, const Span& b);

struct Token {
  std::string text;
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const Token&, const Token&) = default;
};

enum class Label { O, ITitle, IStitle };

std::string_view to_string(Label label);
// Accepts exactly "O", "I-title", "I-Stitle".
Label parse_label(std::string_view s);
Label label_for(Level level);

// Identified UTF-8 text. Construction normalizes CRLF to LF and rejects
// invalid UTF-8 or an empty id, so every Document in flight is well formed.
class Document {
 public:
  Document(std::string doc_id, std::string text);

  const std::string& id() const { return id_; }
  const std::string& text() const { return text_; }
  std::size_t size() const { return text_.size(); }
  std::string_view slice(std::size_t start, std::size_t end) const;
  std::string_view slice(const Span& span) const { return slice(span.start, span.end); }

  // True when `offset` does not fall inside a multi-byte sequence.
  bool is_boundary(std::size_t offset) const;

 private:
  std::string id_;
  std::string text_;
};

bool is_valid_utf8(std::string_view s);
std::string normalize_line_endings(std::string_view s);

// Alphanumeric runs become one token, every other non-whitespace code point
// is its own token. Code points above U+007F count as alphanumeric unless
// they are Unicode space separators.
std::vector<Token> pretokenize(std::string_view text);
inline std::vector<Token> pretokenize(const Document& doc) { return pretokenize(doc.text()); }

// Lowercase (ASCII), trim, collapse internal whitespace, drop the trailing colon.
std::string normalize_title(std::string_view raw);

bool is_ascii_space(char c);
// True when every code point in `s` is whitespace in the pretokenize sense.
bool is_blank(std::string_view s);

enum class ViolationKind { OutOfBounds, ZeroLength, Overlap, NotOnBoundary };

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::size_t span_index;
  Span span;
  // Index of the other span for Overlap, otherwise equal to span_index.
  std::size_t other_index;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate_annotation(const Document& doc, const std::vector<Span>& spans);
// Bounds-free variant used when only the text length is known.
ValidationReport validate_annotation(std::size_t text_length, const std::vector<Span>& spans);

}  // namespace tocseg
