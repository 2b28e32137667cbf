#include <algorithm>
#include <fstream>

#include "json.hpp"
#include "tocseg/corpus.hpp"

namespace tocseg {

AnnotationSet read_annotations(std::istream& in, const std::string& source) {
  AnnotationSet set;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string loc = source + ":" + std::to_string(line_no);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(loc + ": malformed annotation record: " + e.what());
    }
    if (!record.is_object() || !record.contains("doc_id") || !record["doc_id"].is_string() ||
        !record.contains("spans") || !record["spans"].is_array())
      throw Error(loc + ": record needs a string 'doc_id' and a 'spans' array");
    const std::string id = record["doc_id"].get<std::string>();
    if (id.empty()) throw Error(loc + ": empty doc_id");

    std::vector<Span> spans;
    for (const auto& s : record["spans"]) {
      if (!s.is_object() || !s.contains("start") || !s["start"].is_number_unsigned() || !s.contains("end") ||
          !s["end"].is_number_unsigned() || !s.contains("level") || !s["level"].is_string())
        throw Error(loc + ": span needs unsigned 'start', 'end' and a string 'level'");
      Span span;
      span.start = s["start"].get<std::size_t>();
      span.end = s["end"].get<std::size_t>();
      try {
        span.level = parse_level(s["level"].get<std::string>());
      } catch (const Error& e) {
        throw Error(loc + ": " + e.what());
      }
      if (span.start >= span.end)
        throw Error(loc + ": span [" + std::to_string(span.start) + ", " + std::to_string(span.end) +
                    ") is empty");
      spans.push_back(span);
    }
    std::sort(spans.begin(), spans.end(), span_less);
    if (!set.emplace(id, std::move(spans)).second) throw Error(loc + ": duplicate doc_id '" + id + "'");
  }
  return set;
}

AnnotationSet load_annotations(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read annotations '" + path + "'");
  return read_annotations(in, path);
}

std::string format_annotations(const AnnotationSet& set) {
  std::string out;
  for (const auto& [id, spans] : set) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Span& s : spans) arr.push_back({{"start", s.start}, {"end", s.end}, {"level", to_string(s.level)}});
    out += nlohmann::json{{"doc_id", id}, {"spans", arr}}.dump();
    out += '\n';
  }
  return out;
}

}  // namespace tocseg
