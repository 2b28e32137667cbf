#include "tocseg/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <unordered_map>

#include "json.hpp"
#include "tocseg/fileio.hpp"

namespace fs = std::filesystem;

namespace tocseg {

std::string_view to_string(CorpusFormat f) { return f == CorpusFormat::TextDir ? "textdir" : "jsonl"; }

CorpusFormat parse_corpus_format(std::string_view s) {
  if (s == "textdir") return CorpusFormat::TextDir;
  if (s == "jsonl") return CorpusFormat::JsonLines;
  throw Error("unknown corpus format '" + std::string(s) + "'");
}

namespace {

std::size_t stream_textdir(const std::string& path, const std::function<void(Document&&)>& sink) {
  std::error_code ec;
  if (!fs::is_directory(path, ec)) throw Error("'" + path + "' is not a readable directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  if (ec) throw Error("cannot list '" + path + "': " + ec.message());
  std::sort(files.begin(), files.end());

  std::size_t n = 0;
  for (const fs::path& file : files) {
    try {
      sink(Document(file.stem().string(), read_file(file.string())));
    } catch (const Error& e) {
      throw Error(file.string() + ": " + e.what());
    }
    ++n;
  }
  return n;
}

std::size_t stream_jsonl(const std::string& path, const std::function<void(Document&&)>& sink) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::unordered_map<std::string, std::size_t> seen;
  std::string line;
  std::size_t line_no = 0;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string loc = path + ":" + std::to_string(line_no);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(loc + ": malformed record: " + e.what());
    }
    if (!record.is_object() || !record.contains("doc_id") || !record["doc_id"].is_string() ||
        !record.contains("text") || !record["text"].is_string())
      throw Error(loc + ": record needs string fields 'doc_id' and 'text'");
    std::string id = record["doc_id"].get<std::string>();
    if (const auto [it, fresh] = seen.emplace(id, line_no); !fresh)
      throw Error(loc + ": duplicate doc_id '" + id + "' (first seen on line " + std::to_string(it->second) + ")");
    try {
      sink(Document(std::move(id), record["text"].get<std::string>()));
    } catch (const Error& e) {
      throw Error(loc + ": " + e.what());
    }
    ++n;
  }
  return n;
}

}  // namespace

std::size_t stream_corpus(const std::string& path, CorpusFormat format,
                          const std::function<void(Document&&)>& sink) {
  return format == CorpusFormat::TextDir ? stream_textdir(path, sink) : stream_jsonl(path, sink);
}

Corpus ingest(const std::string& path, CorpusFormat format) {
  Corpus corpus;
  stream_corpus(path, format, [&](Document&& doc) { corpus.push_back(std::move(doc)); });
  return corpus;
}

std::string format_jsonl_corpus(const Corpus& corpus) {
  std::string out;
  for (const Document& doc : corpus) {
    out += nlohmann::json{{"doc_id", doc.id()}, {"text", doc.text()}}.dump();
    out += '\n';
  }
  return out;
}

void write_corpus(const std::string& path, CorpusFormat format, const Corpus& corpus) {
  if (format == CorpusFormat::JsonLines) {
    write_file_atomic(path, format_jsonl_corpus(corpus));
    return;
  }
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) throw Error("cannot create directory '" + path + "': " + ec.message());
  for (const Document& doc : corpus) {
    const std::string& id = doc.id();
    if (id == "." || id == ".." || id.find('/') != std::string::npos)
      throw Error("doc_id '" + id + "' cannot be used as a file name");
    write_file_atomic((fs::path(path) / (id + ".txt")).string(), doc.text());
  }
}

FrequencyTable title_frequencies(const Corpus& corpus, const Engine& engine) {
  std::map<std::string, std::size_t> counts;
  for (const Document& doc : corpus) {
    for (const Detection& d : engine.detect(doc, DenylistMode::Ignore)) ++counts[normalize_title(d.matched_text)];
  }
  FrequencyTable table;
  table.reserve(counts.size());
  for (auto& [title, count] : counts) table.push_back({title, count});
  std::stable_sort(table.begin(), table.end(),
                   [](const FrequencyRow& a, const FrequencyRow& b) { return a.count > b.count; });
  return table;
}

std::size_t word_count(std::string_view text) {
  std::size_t n = 0;
  for (const Token& t : pretokenize(text)) {
    const bool word = std::any_of(t.text.begin(), t.text.end(), [](char c) {
      const auto u = static_cast<unsigned char>(c);
      return u >= 0x80 || (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    });
    if (word) ++n;
  }
  return n;
}

CorpusStats corpus_stats(const Corpus& corpus, const Engine& engine) {
  CorpusStats stats;
  stats.document_count = corpus.size();
  if (corpus.empty()) return stats;

  std::vector<std::size_t> lengths;
  lengths.reserve(corpus.size());
  std::set<std::string> titles;
  for (const Document& doc : corpus) {
    lengths.push_back(word_count(doc.text()));
    for (const Detection& d : engine.detect(doc)) {
      titles.insert(normalize_title(d.matched_text));
      ++stats.total_headings;
    }
  }
  const double n = static_cast<double>(corpus.size());
  double sum = 0.0;
  for (const std::size_t l : lengths) sum += static_cast<double>(l);
  stats.mean_length = sum / n;
  std::sort(lengths.begin(), lengths.end());
  const std::size_t m = lengths.size();
  stats.median_length = m % 2 ? static_cast<double>(lengths[m / 2])
                              : (static_cast<double>(lengths[m / 2 - 1]) + static_cast<double>(lengths[m / 2])) / 2.0;
  stats.mean_headings = static_cast<double>(stats.total_headings) / n;
  stats.unique_titles = titles.size();
  return stats;
}

Denylist merge_denylist(const Denylist& existing, std::string_view additions, const std::string& source) {
  Denylist merged;
  for (const auto& e : existing) {
    std::string n = normalize_title(e);
    if (!n.empty()) merged.insert(std::move(n));
  }
  merged.merge(parse_denylist(additions, source));
  return merged;
}

}  // namespace tocseg
