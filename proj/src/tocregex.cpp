#include "tocseg/tocregex.hpp"

#include <algorithm>
#include <thread>

namespace tocseg {

std::string_view to_string(PrefixClass v) {
  switch (v) {
    case PrefixClass::LineStart: return "line_start";
    case PrefixClass::BlankLine: return "blank_line";
    case PrefixClass::DocStart: return "doc_start";
  }
  return "?";
}

std::string_view to_string(TerminatorClass v) {
  return v == TerminatorClass::ColonNewline ? "colon_newline" : "colon_inline";
}

std::string_view to_string(FirstChar v) {
  switch (v) {
    case FirstChar::Alnum: return "alnum";
    case FirstChar::Alpha: return "alpha";
    case FirstChar::Upper: return "upper";
  }
  return "?";
}

std::string_view to_string(Enumeration v) {
  switch (v) {
    case Enumeration::Any: return "any";
    case Enumeration::Forbidden: return "forbidden";
    case Enumeration::Required: return "required";
  }
  return "?";
}

PatternSet default_pattern_set() {
  PatternSet set;

  ContentClass title;
  title.name = "title";

  ContentClass numbered = title;
  numbered.name = "numbered";
  numbered.enumeration = Enumeration::Required;

  ContentClass allcaps;
  allcaps.name = "allcaps";
  allcaps.max_chars = 80;
  allcaps.max_words = 12;
  allcaps.first_char = FirstChar::Upper;
  allcaps.forbid_lowercase = true;
  allcaps.extra_chars = " -/()'.,*&#+";

  set.content_classes = {title, numbered, allcaps};

  struct Family {
    const char* stem;
    const char* content;
    TerminatorClass terminator;
    Level level;
  };
  const Family families[] = {
      {"P1", "title", TerminatorClass::ColonNewline, Level::Title},
      {"numbered", "numbered", TerminatorClass::ColonNewline, Level::Title},
      {"allcaps", "allcaps", TerminatorClass::ColonNewline, Level::Title},
      {"inline", "title", TerminatorClass::ColonInline, Level::Subtitle},
  };
  const std::pair<PrefixClass, const char*> prefixes[] = {
      {PrefixClass::LineStart, "newline"},
      {PrefixClass::BlankLine, "blankline"},
      {PrefixClass::DocStart, "docstart"},
  };
  for (const auto& f : families) {
    for (const auto& [prefix, suffix] : prefixes) {
      set.specs.push_back(
          {std::string(f.stem) + "-" + suffix, prefix, f.content, f.terminator, f.level});
    }
  }
  set.denylist = default_denylist();
  return set;
}

Denylist default_denylist() {
  // Medication-list fields that look like "Field: value" lines.
  return {"tablet(s)*refills", "sig", "disp", "refills"};
}

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_alpha(char c) { return is_upper(c) || is_lower(c); }
bool is_hspace(char c) { return c == ' ' || c == '\t'; }

// Length of an enumeration marker ("3. ", "12) ") at text[pos], or 0.
std::size_t enumeration_marker(std::string_view text, std::size_t pos, std::size_t end) {
  std::size_t i = pos;
  while (i < end && i - pos < 2 && is_digit(text[i])) ++i;
  if (i == pos || i >= end || (text[i] != '.' && text[i] != ')')) return 0;
  ++i;
  const std::size_t after_punct = i;
  while (i < end && text[i] == ' ') ++i;
  return i > after_punct ? i - pos : 0;
}

bool prefix_applies(PrefixClass prefix, std::string_view text, std::size_t line_start) {
  switch (prefix) {
    case PrefixClass::DocStart: return line_start == 0;
    case PrefixClass::LineStart: return line_start >= 1 && text[line_start - 1] == '\n';
    case PrefixClass::BlankLine:
      return line_start >= 2 && text[line_start - 1] == '\n' && text[line_start - 2] == '\n';
  }
  return false;
}

std::size_t prefix_length(PrefixClass prefix) {
  switch (prefix) {
    case PrefixClass::DocStart: return 0;
    case PrefixClass::LineStart: return 1;
    case PrefixClass::BlankLine: return 2;
  }
  return 0;
}

}  // namespace

std::optional<std::pair<std::size_t, std::size_t>> Engine::match_content(
    const CompiledClass& cls, std::string_view text, std::size_t begin, std::size_t end) const {
  const ContentClass& def = cls.def;
  const std::size_t marker = enumeration_marker(text, begin, end);
  if (def.enumeration == Enumeration::Required) {
    if (marker == 0) return std::nullopt;
    begin += marker;
  } else if (def.enumeration == Enumeration::Forbidden && marker != 0) {
    return std::nullopt;
  }

  // Trailing blanks before the colon are tolerated but not part of the span.
  while (end > begin && text[end - 1] == ' ') --end;
  if (begin >= end) return std::nullopt;

  const char first = text[begin];
  const bool first_ascii = static_cast<unsigned char>(first) < 0x80;
  switch (def.first_char) {
    case FirstChar::Alnum:
      if (first_ascii && !is_alpha(first) && !is_digit(first)) return std::nullopt;
      break;
    case FirstChar::Alpha:
      if (first_ascii && !is_alpha(first)) return std::nullopt;
      break;
    case FirstChar::Upper:
      if (!is_upper(first)) return std::nullopt;
      break;
  }

  std::size_t chars = 0;
  std::size_t words = 0;
  bool letter = false;
  bool prev_space = true;
  for (std::size_t i = begin; i < end; ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if ((c & 0xC0) == 0x80) continue;  // continuation byte
    ++chars;
    if (c >= 0x80) {
      letter = true;
    } else {
      if (!cls.allowed[c]) return std::nullopt;
      if (is_alpha(static_cast<char>(c))) letter = true;
      if (def.forbid_lowercase && is_lower(static_cast<char>(c))) return std::nullopt;
    }
    const bool space = c == ' ';
    if (!space && prev_space) ++words;
    prev_space = space;
  }
  if (chars < def.min_chars || chars > def.max_chars) return std::nullopt;
  if (words > def.max_words) return std::nullopt;
  if (def.require_letter && !letter) return std::nullopt;
  if (cls.regex && !std::regex_match(text.begin() + static_cast<std::ptrdiff_t>(begin),
                                     text.begin() + static_cast<std::ptrdiff_t>(end), *cls.regex))
    return std::nullopt;
  return std::pair{begin, end};
}

std::vector<Engine::Candidate> Engine::candidates(const Document& doc, DenylistMode mode) const {
  const std::string_view text = doc.text();
  std::vector<Candidate> out;
  std::size_t line_start = 0;
  while (line_start < text.size()) {
    std::size_t line_end = text.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = text.size();
    const std::size_t colon = text.find(':', line_start);

    if (colon < line_end) {
      std::size_t after = colon + 1;
      while (after < line_end && is_hspace(text[after])) ++after;
      const bool alone = after == line_end;

      for (std::size_t k = 0; k < specs_.size(); ++k) {
        const PatternSpec& spec = specs_[k];
        if (alone != (spec.terminator == TerminatorClass::ColonNewline)) continue;
        if (!prefix_applies(spec.prefix, text, line_start)) continue;
        const auto content = match_content(classes_[class_of_spec_[k]], text, line_start, colon);
        if (!content) continue;

        MatchTrace trace;
        trace.pattern_id = spec.id;
        trace.level = spec.level;
        trace.prefix = {line_start - prefix_length(spec.prefix), content->first, spec.level};
        trace.content = {content->first, content->second, spec.level};
        const std::size_t term_end =
            spec.terminator == TerminatorClass::ColonNewline ? std::min(line_end + 1, text.size())
                                                             : colon + 1;
        trace.terminator = {content->second, term_end, spec.level};
        trace.content_text = std::string(text.substr(content->first, content->second - content->first));

        if (mode == DenylistMode::Apply && denylist_.contains(normalize_title(trace.content_text)))
          continue;
        out.push_back({std::move(trace), k});
      }
    }
    line_start = line_end + 1;
  }

  // Earliest start, then longest, then precedence; keep a disjoint prefix.
  std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    if (a.trace.content.start != b.trace.content.start)
      return a.trace.content.start < b.trace.content.start;
    if (a.trace.content.length() != b.trace.content.length())
      return a.trace.content.length() > b.trace.content.length();
    return a.precedence < b.precedence;
  });
  std::vector<Candidate> kept;
  std::size_t frontier = 0;
  for (auto& c : out) {
    if (!kept.empty() && c.trace.content.start < frontier) continue;
    frontier = c.trace.content.end;
    kept.push_back(std::move(c));
  }
  return kept;
}

std::vector<Detection> Engine::detect(const Document& doc, DenylistMode mode) const {
  std::vector<Detection> detections;
  for (auto& c : candidates(doc, mode)) {
    detections.push_back({c.trace.content, std::move(c.trace.pattern_id), std::move(c.trace.content_text)});
  }
  return detections;
}

std::optional<MatchTrace> Engine::explain(const Document& doc, std::size_t offset) const {
  if (offset > doc.size())
    throw Error("offset " + std::to_string(offset) + " is out of bounds for document '" + doc.id() +
                "' of length " + std::to_string(doc.size()));
  for (auto& c : candidates(doc, DenylistMode::Apply)) {
    const std::size_t lo = c.trace.prefix.start;
    const std::size_t hi = c.trace.terminator.end;
    if (offset >= lo && offset < hi) return std::move(c.trace);
  }
  return std::nullopt;
}

Engine Engine::with_denylist(Denylist denylist) const {
  Engine copy = *this;
  copy.denylist_ = std::move(denylist);
  return copy;
}

Engine compile(const PatternSet& set) {
  Engine engine;
  for (const ContentClass& def : set.content_classes) {
    if (def.name.empty()) throw PatternError("<content class>", "content class without a name");
    for (const auto& existing : engine.classes_) {
      if (existing.def.name == def.name)
        throw PatternError(def.name, "duplicate content class name");
    }
    if (def.min_chars == 0 || def.min_chars > def.max_chars)
      throw PatternError(def.name, "content class needs 1 <= min_chars <= max_chars");
    if (def.max_words == 0) throw PatternError(def.name, "content class needs max_words >= 1");

    Engine::CompiledClass cls;
    cls.def = def;
    for (char c = '0'; c <= '9'; ++c) cls.allowed[static_cast<unsigned char>(c)] = true;
    for (char c = 'a'; c <= 'z'; ++c) cls.allowed[static_cast<unsigned char>(c)] = true;
    for (char c = 'A'; c <= 'Z'; ++c) cls.allowed[static_cast<unsigned char>(c)] = true;
    for (const char c : def.extra_chars) {
      const auto u = static_cast<unsigned char>(c);
      if (u >= 0x80 || c == ':' || c == '\n')
        throw PatternError(def.name, "extra_chars may only hold ASCII characters other than ':' and newline");
      cls.allowed[u] = true;
    }
    if (!def.regex.empty()) {
      try {
        cls.regex = std::make_shared<const std::regex>(def.regex, std::regex::ECMAScript);
      } catch (const std::regex_error& e) {
        throw PatternError(def.name, std::string("invalid regex: ") + e.what());
      }
    }
    engine.classes_.push_back(std::move(cls));
  }

  std::set<std::string> ids;
  for (const PatternSpec& spec : set.specs) {
    if (spec.id.empty()) throw PatternError("<unnamed>", "pattern without an id");
    if (!ids.insert(spec.id).second) throw PatternError(spec.id, "duplicate pattern id");
    const auto it = std::find_if(engine.classes_.begin(), engine.classes_.end(),
                                 [&](const auto& c) { return c.def.name == spec.content_rule; });
    if (it == engine.classes_.end())
      throw PatternError(spec.id, "unknown content rule '" + spec.content_rule + "'");
    engine.specs_.push_back(spec);
    engine.class_of_spec_.push_back(static_cast<std::size_t>(it - engine.classes_.begin()));
  }

  for (const auto& entry : set.denylist) engine.denylist_.insert(normalize_title(entry));
  return engine;
}

std::vector<std::vector<Detection>> detect_batch(const Engine& engine, std::span<const Document> docs,
                                                 unsigned threads, DenylistMode mode) {
  std::vector<std::vector<Detection>> results(docs.size());
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(docs.size())));
  if (threads <= 1) {
    for (std::size_t i = 0; i < docs.size(); ++i) results[i] = engine.detect(docs[i], mode);
    return results;
  }
  // Static striding keeps each slot written by exactly one worker.
  std::vector<std::jthread> workers;
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      for (std::size_t i = t; i < docs.size(); i += threads) results[i] = engine.detect(docs[i], mode);
    });
  }
  workers.clear();
  return results;
}

std::vector<Span> spans_of(const std::vector<Detection>& detections) {
  std::vector<Span> spans;
  spans.reserve(detections.size());
  for (const auto& d : detections) spans.push_back(d.span);
  return spans;
}

}  // namespace tocseg
