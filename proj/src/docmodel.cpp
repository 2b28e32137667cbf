#include "tocseg/docmodel.hpp"

#include <algorithm>
#include <numeric>

namespace tocseg {

std::string_view to_string(Level level) {
  return level == Level::Title ? "title" : "subtitle";
}

Level parse_level(std::string_view s) {
  if (s == "title") return Level::Title;
  if (s == "subtitle") return Level::Subtitle;
  throw Error("unknown span level '" + std::string(s) + "'");
}

bool span_less(const Span& a, const Span& b) {
  if (a.start != b.start) return a.start < b.start;
  return a.end < b.end;
}

std::string_view to_string(Label label) {
  switch (label) {
    case Label::O: return "O";
    case Label::ITitle: return "I-title";
    case Label::IStitle: return "I-Stitle";
  }
  return "O";
}

Label parse_label(std::string_view s) {
  if (s == "O") return Label::O;
  if (s == "I-title") return Label::ITitle;
  if (s == "I-Stitle") return Label::IStitle;
  throw Error("unknown label '" + std::string(s) + "'");
}

Label label_for(Level level) {
  return level == Level::Title ? Label::ITitle : Label::IStitle;
}

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

namespace {

// Length of the UTF-8 sequence starting at s[i], or 0 when malformed.
std::size_t sequence_length(std::string_view s, std::size_t i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  std::size_t len;
  char32_t min;
  if (b0 < 0x80) return 1;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    min = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    min = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    min = 0x10000;
  } else {
    return 0;
  }
  if (i + len > s.size()) return 0;
  char32_t cp = b0 & (0x7F >> len);
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
  return len;
}

char32_t decode_at(std::string_view s, std::size_t i, std::size_t len) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (len == 1) return b0;
  char32_t cp = b0 & (0x7F >> len);
  for (std::size_t k = 1; k < len; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
  return cp;
}

bool is_unicode_space(char32_t cp) {
  return cp == 0x85 || cp == 0xA0 || cp == 0x1680 || (cp >= 0x2000 && cp <= 0x200A) ||
         cp == 0x2028 || cp == 0x2029 || cp == 0x202F || cp == 0x205F || cp == 0x3000;
}

bool is_ascii_alnum(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

}  // namespace

bool is_valid_utf8(std::string_view s) {
  for (std::size_t i = 0; i < s.size();) {
    const std::size_t len = sequence_length(s, i);
    if (len == 0) return false;
    i += len;
  }
  return true;
}

std::string normalize_line_endings(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\r' && i + 1 < s.size() && s[i + 1] == '\n') continue;
    out.push_back(s[i]);
  }
  return out;
}

Document::Document(std::string doc_id, std::string text)
    : id_(std::move(doc_id)), text_(normalize_line_endings(text)) {
  if (id_.empty()) throw Error("document id must not be empty");
  if (!is_valid_utf8(text_)) throw Error("document '" + id_ + "' is not valid UTF-8");
}

std::string_view Document::slice(std::size_t start, std::size_t end) const {
  if (start > end || end > text_.size())
    throw Error("slice [" + std::to_string(start) + ", " + std::to_string(end) +
                ") out of bounds for document '" + id_ + "'");
  return std::string_view(text_).substr(start, end - start);
}

bool Document::is_boundary(std::size_t offset) const {
  if (offset >= text_.size()) return offset == text_.size();
  return (static_cast<unsigned char>(text_[offset]) & 0xC0) != 0x80;
}

std::vector<Token> pretokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t run_start = 0;
  bool in_run = false;
  auto close_run = [&](std::size_t end) {
    if (in_run) tokens.push_back({std::string(text.substr(run_start, end - run_start)), run_start, end});
    in_run = false;
  };

  for (std::size_t i = 0; i < text.size();) {
    std::size_t len = sequence_length(text, i);
    if (len == 0) len = 1;  // stray byte: treat as its own symbol
    bool word = false;
    bool space = false;
    if (len == 1) {
      const char c = text[i];
      word = is_ascii_alnum(c);
      space = is_ascii_space(c);
    } else {
      const char32_t cp = decode_at(text, i, len);
      space = is_unicode_space(cp);
      word = !space;
    }

    if (word) {
      if (!in_run) {
        run_start = i;
        in_run = true;
      }
    } else {
      close_run(i);
      if (!space) tokens.push_back({std::string(text.substr(i, len)), i, i + len});
    }
    i += len;
  }
  close_run(text.size());
  return tokens;
}

bool is_blank(std::string_view s) {
  for (std::size_t i = 0; i < s.size();) {
    const std::size_t len = sequence_length(s, i);
    if (len == 0) return false;
    if (len == 1 ? !is_ascii_space(s[i]) : !is_unicode_space(decode_at(s, i, len))) return false;
    i += len;
  }
  return true;
}

std::string normalize_title(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (const char c : raw) {
    if (is_ascii_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c);
  }
  // The whole trailing run of colons goes, otherwise "a::" would not be a
  // fixed point.
  while (!out.empty() && (out.back() == ':' || out.back() == ' ')) out.pop_back();
  return out;
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::OutOfBounds: return "out-of-bounds";
    case ViolationKind::ZeroLength: return "zero-length";
    case ViolationKind::Overlap: return "overlap";
    case ViolationKind::NotOnBoundary: return "not-on-boundary";
  }
  return "unknown";
}

namespace {

std::string describe(const Span& s) {
  return "[" + std::to_string(s.start) + ", " + std::to_string(s.end) + ", " +
         std::string(to_string(s.level)) + "]";
}

ValidationReport validate_impl(std::size_t text_length, const std::vector<Span>& spans,
                               const Document* doc) {
  ValidationReport report;
  auto add = [&](ViolationKind kind, std::size_t i, std::size_t other, std::string msg) {
    report.violations.push_back({kind, i, spans[i], other, std::move(msg)});
  };

  for (std::size_t i = 0; i < spans.size(); ++i) {
    const Span& s = spans[i];
    if (s.start >= s.end) {
      add(ViolationKind::ZeroLength, i, i, "span " + describe(s) + " is empty or reversed");
    } else if (s.end > text_length) {
      add(ViolationKind::OutOfBounds, i, i,
          "span " + describe(s) + " exceeds text length " + std::to_string(text_length));
    } else if (doc && (!doc->is_boundary(s.start) || !doc->is_boundary(s.end))) {
      add(ViolationKind::NotOnBoundary, i, i,
          "span " + describe(s) + " splits a UTF-8 sequence");
    }
  }

  // Sweep in start order; every earlier span still open at s.start overlaps s.
  std::vector<std::size_t> order(spans.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return span_less(spans[a], spans[b]); });
  std::vector<std::size_t> open;
  for (const std::size_t i : order) {
    const Span& s = spans[i];
    if (s.start >= s.end) continue;
    std::erase_if(open, [&](std::size_t j) { return spans[j].end <= s.start; });
    for (const std::size_t j : open) {
      add(ViolationKind::Overlap, i, j,
          "span " + describe(s) + " overlaps span " + describe(spans[j]));
    }
    open.push_back(i);
  }
  return report;
}

}  // namespace

ValidationReport validate_annotation(const Document& doc, const std::vector<Span>& spans) {
  return validate_impl(doc.size(), spans, &doc);
}

ValidationReport validate_annotation(std::size_t text_length, const std::vector<Span>& spans) {
  return validate_impl(text_length, spans, nullptr);
}

}  // namespace tocseg
