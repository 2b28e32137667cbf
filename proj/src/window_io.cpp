#include <charconv>
#include <sstream>

#include "tocseg/labeling.hpp"

namespace tocseg {

void write_windows(std::ostream& out, const std::vector<Window>& windows) {
  bool first = true;
  for (const Window& w : windows) {
    if (!first) out << '\n';
    first = false;
    out << "# doc: " << w.doc_id << " window: " << w.index << '\n';
    for (const LabeledToken& lt : w.tokens) {
      out << lt.token.text << '\t' << lt.token.start << '\t' << lt.token.end << '\t'
          << to_string(lt.label) << '\n';
    }
  }
}

std::string format_windows(const std::vector<Window>& windows) {
  std::ostringstream out;
  write_windows(out, windows);
  return out.str();
}

namespace {

std::size_t parse_offset(std::string_view field, const std::string& loc) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty())
    throw Error(loc + ": expected an offset, got '" + std::string(field) + "'");
  return value;
}

}  // namespace

std::vector<Window> read_windows(std::istream& in, const std::string& source) {
  static constexpr std::string_view kDoc = "# doc: ";
  static constexpr std::string_view kWindow = " window: ";

  std::vector<Window> windows;
  bool open = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string loc = source + ":" + std::to_string(line_no);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      open = false;
      continue;
    }
    std::string_view view = line;
    if (view.starts_with(kDoc)) {
      const std::size_t cut = view.rfind(kWindow);
      if (cut == std::string_view::npos || cut < kDoc.size())
        throw Error(loc + ": malformed window header");
      Window w;
      w.doc_id = std::string(view.substr(kDoc.size(), cut - kDoc.size()));
      if (w.doc_id.empty()) throw Error(loc + ": empty doc id in window header");
      w.index = parse_offset(view.substr(cut + kWindow.size()), loc);
      windows.push_back(std::move(w));
      open = true;
      continue;
    }
    if (!open) throw Error(loc + ": token line outside a window (missing header)");

    std::string_view fields[4];
    std::size_t n = 0;
    std::size_t pos = 0;
    while (n < 4) {
      const std::size_t tab = view.find('\t', pos);
      fields[n++] = view.substr(pos, tab == std::string_view::npos ? std::string_view::npos : tab - pos);
      if (tab == std::string_view::npos) {
        pos = std::string_view::npos;
        break;
      }
      pos = tab + 1;
    }
    if (n != 4 || pos != std::string_view::npos)
      throw Error(loc + ": expected 4 tab-separated columns");
    LabeledToken lt;
    lt.token.text = std::string(fields[0]);
    lt.token.start = parse_offset(fields[1], loc);
    lt.token.end = parse_offset(fields[2], loc);
    if (lt.token.end < lt.token.start) throw Error(loc + ": token end precedes start");
    try {
      lt.label = parse_label(fields[3]);
    } catch (const Error& e) {
      throw Error(loc + ": " + e.what());
    }
    windows.back().tokens.push_back(std::move(lt));
  }
  return windows;
}

}  // namespace tocseg
