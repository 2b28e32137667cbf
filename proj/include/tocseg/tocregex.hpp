#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <regex>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tocseg/docmodel.hpp"

namespace tocseg {

// What has to precede the heading line.
enum class PrefixClass {
  LineStart,  // "\n"
  BlankLine,  // "\n\n"
  DocStart,   // offset 0
};

// What has to follow the heading content.
enum class TerminatorClass {
  ColonNewline,  // ':' then optional spaces/tabs, then '\n' or end of text
  ColonInline,   // ':' then more text on the same line
};

enum class FirstChar { Alnum, Alpha, Upper };

// Whether the content may, must, or must not open with an enumeration
// marker such as "3. " or "12) ". A required marker is consumed as part of
// the prefix and is not included in the detected span.
enum class Enumeration { Any, Forbidden, Required };

std::string_view to_string(PrefixClass v);
std::string_view to_string(TerminatorClass v);
std::string_view to_string(FirstChar v);
std::string_view to_string(Enumeration v);

// A named definition of what counts as heading text.
struct ContentClass {
  std::string name;
  std::size_t min_chars = 1;
  std::size_t max_chars = 60;
  std::size_t max_words = 10;
  FirstChar first_char = FirstChar::Alnum;
  bool require_letter = true;
  bool forbid_lowercase = false;
  // Allowed characters besides letters and digits (ASCII only; every
  // non-ASCII code point is treated as a letter).
  std::string extra_chars = " -/()'.,*";
  Enumeration enumeration = Enumeration::Forbidden;
  // Optional ECMAScript pattern the content must match in full.
  std::string regex;
};

struct PatternSpec {
  std::string id;
  PrefixClass prefix = PrefixClass::LineStart;
  std::string content_rule = "title";
  TerminatorClass terminator = TerminatorClass::ColonNewline;
  Level level = Level::Title;
};

using Denylist = std::set<std::string>;

struct PatternSet {
  std::vector<ContentClass> content_classes;
  // Order is precedence: an earlier spec wins ties.
  std::vector<PatternSpec> specs;
  Denylist denylist;
};

// The built-in configuration: three line-start variants of a plain heading
// ("\n", "\n\n", start of document) followed by a colon on its own line,
// then the same three for numbered headings, all-caps headings and inline
// ("Neck: supple") subheadings.
PatternSet default_pattern_set();
Denylist default_denylist();

class PatternError : public Error {
 public:
  PatternError(std::string spec_id, const std::string& what)
      : Error("pattern '" + spec_id + "': " + what), spec_id_(std::move(spec_id)) {}
  const std::string& spec_id() const { return spec_id_; }

 private:
  std::string spec_id_;
};

struct Detection {
  Span span;
  std::string pattern_id;
  std::string matched_text;

  friend bool operator==(const Detection&, const Detection&) = default;
};

struct MatchTrace {
  std::string pattern_id;
  Level level = Level::Title;
  // Byte ranges of the three parts of the match. `prefix` covers the
  // newline anchor plus any enumeration marker.
  Span prefix;
  Span content;
  Span terminator;
  std::string content_text;
};

enum class DenylistMode { Apply, Ignore };

class Engine {
 public:
  std::size_t size() const { return specs_.size(); }
  const std::vector<PatternSpec>& specs() const { return specs_; }
  const Denylist& denylist() const { return denylist_; }

  std::vector<Detection> detect(const Document& doc, DenylistMode mode = DenylistMode::Apply) const;
  // Trace of the detection covering `offset` (heading, anchors and colon
  // included), or nullopt. Throws Error when offset > doc.size().
  std::optional<MatchTrace> explain(const Document& doc, std::size_t offset) const;

  // Same engine with a different denylist.
  Engine with_denylist(Denylist denylist) const;

 private:
  friend Engine compile(const PatternSet& set);

  struct CompiledClass {
    ContentClass def;
    std::array<bool, 128> allowed{};
    std::shared_ptr<const std::regex> regex;
  };
  struct Candidate {
    MatchTrace trace;
    std::size_t precedence;
  };

  std::vector<Candidate> candidates(const Document& doc, DenylistMode mode) const;
  std::optional<std::pair<std::size_t, std::size_t>> match_content(
      const CompiledClass& cls, std::string_view text, std::size_t begin, std::size_t end) const;

  std::vector<PatternSpec> specs_;
  std::vector<std::size_t> class_of_spec_;
  std::vector<CompiledClass> classes_;
  Denylist denylist_;
};

// Throws PatternError naming the offending spec (or content class).
Engine compile(const PatternSet& set);

inline std::vector<Detection> detect(const Engine& engine, const Document& doc) {
  return engine.detect(doc);
}

// Runs detect over every document on `threads` workers. Output order
// follows input order and does not depend on the thread count.
std::vector<std::vector<Detection>> detect_batch(const Engine& engine,
                                                 std::span<const Document> docs,
                                                 unsigned threads = 1,
                                                 DenylistMode mode = DenylistMode::Apply);

std::vector<Span> spans_of(const std::vector<Detection>& detections);

// Pattern config (JSON) and denylist (one entry per line) files.
PatternSet parse_pattern_set(std::string_view json_text);
PatternSet load_pattern_set(const std::string& path);
std::string dump_pattern_set(const PatternSet& set);

// '#' lines and blank lines are skipped, trailing whitespace is stripped and
// entries are normalized. Throws Error with the line number on a line that
// is not valid UTF-8 or carries control characters.
Denylist parse_denylist(std::string_view content, const std::string& source = "<denylist>");
Denylist load_denylist(const std::string& path);
std::string format_denylist(const Denylist& denylist);

}  // namespace tocseg
