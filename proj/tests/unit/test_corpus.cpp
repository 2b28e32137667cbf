#include <filesystem>
#include <map>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "oracles.hpp"
#include "tocseg/corpus.hpp"
#include "tocseg/fileio.hpp"

using namespace tocseg;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("tocseg-corpus-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
  fs::path path;
};

const Engine& engine() {
  static const Engine e = compile(default_pattern_set());
  return e;
}

std::string words(std::size_t n) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) out += i ? " w" : "w";
  return out;
}

}  // namespace

TEST_CASE("ingest a text directory") {
  TempDir dir;
  write_file_atomic(dir / "b.txt", "Neck: ok\r\n");
  write_file_atomic(dir / "a.txt", "Plan:\nrest\n");
  write_file_atomic(dir / "c.txt", "");
  write_file_atomic(dir / "notes.md", "ignored");
  const Corpus corpus = ingest(dir.path.string(), CorpusFormat::TextDir);
  REQUIRE(corpus.size() == 3);
  CHECK(corpus[0].id() == "a");
  CHECK(corpus[1].id() == "b");
  CHECK(corpus[1].text() == "Neck: ok\n");
  CHECK(corpus[2].size() == 0);

  TempDir empty;
  CHECK(ingest(empty.path.string(), CorpusFormat::TextDir).empty());
  CHECK_THROWS_AS(ingest(dir / "missing", CorpusFormat::TextDir), Error);
}

TEST_CASE("ingest JSON lines") {
  TempDir dir;
  write_file_atomic(dir / "c.jsonl",
                    "{\"doc_id\":\"x\",\"text\":\"Plan:\\r\\nrest\"}\n\n{\"doc_id\":\"y\",\"text\":\"caf\\u00e9\"}\n");
  const Corpus corpus = ingest(dir / "c.jsonl", CorpusFormat::JsonLines);
  REQUIRE(corpus.size() == 2);
  CHECK(corpus[0].text() == "Plan:\nrest");
  CHECK(corpus[1].text() == "caf\xc3\xa9");

  write_file_atomic(dir / "dup.jsonl", "{\"doc_id\":\"x\",\"text\":\"a\"}\n{\"doc_id\":\"x\",\"text\":\"b\"}\n");
  try {
    ingest(dir / "dup.jsonl", CorpusFormat::JsonLines);
    FAIL("duplicate accepted");
  } catch (const Error& e) {
    const std::string what = e.what();
    CHECK(what.find("'x'") != std::string::npos);
    CHECK(what.find(":2") != std::string::npos);
  }

  write_file_atomic(dir / "bad.jsonl", "{\"doc_id\":\"x\",\"text\":\"a\"}\n{\"doc_id\":3}\n");
  try {
    ingest(dir / "bad.jsonl", CorpusFormat::JsonLines);
    FAIL("malformed accepted");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
}

TEST_CASE("serialize then ingest preserves text") {
  const auto synth = generate_synthetic({.seed = 4, .doc_count = 12, .headings_per_doc = 6,
                                         .noise = NoiseProfile::Denylisted});
  Corpus corpus = synth.corpus;
  corpus.emplace_back("unicode", "caf\xc3\xa9\xc2\xa0\"quoted\"\ttab\n\xf0\x9f\x98\x80");
  TempDir dir;
  for (const CorpusFormat f : {CorpusFormat::TextDir, CorpusFormat::JsonLines}) {
    const std::string target = f == CorpusFormat::TextDir ? dir / "docs" : dir / "docs.jsonl";
    write_corpus(target, f, corpus);
    Corpus back = ingest(target, f);
    REQUIRE(back.size() == corpus.size());
    std::map<std::string, std::string> by_id;
    for (const Document& d : back) by_id[d.id()] = d.text();
    for (const Document& d : corpus) CHECK(by_id.at(d.id()) == d.text());
  }
  CHECK_THROWS_AS(write_corpus(dir / "x", CorpusFormat::TextDir, {Document("a/b", "t")}), Error);
}

TEST_CASE("title frequencies") {
  std::string text;
  for (int i = 0; i < 7; ++i) text += "\nHistory of Present Illness:\nstable\n";
  text += "Tablet(s)*Refills:\n";
  const Corpus corpus{Document("a", text), Document("b", "HISTORY OF PRESENT ILLNESS:\nok\nNeck: fine\n")};
  const auto table = title_frequencies(corpus, engine());
  REQUIRE(table.size() == 3);
  CHECK(table[0] == FrequencyRow{"history of present illness", 8});
  CHECK(table[1] == FrequencyRow{"neck", 1});
  CHECK(table[2] == FrequencyRow{"tablet(s)*refills", 1});

  CHECK(title_frequencies({}, engine()).empty());
}

TEST_CASE("frequencies agree with generator bookkeeping") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto synth = generate_synthetic({.seed = seed, .doc_count = 30, .headings_per_doc = 9});
    std::map<std::string, std::size_t> expect;
    std::size_t total = 0;
    for (const Document& d : synth.corpus) {
      for (const Span& s : synth.gold.at(d.id())) {
        ++expect[normalize_title(d.slice(s))];
        ++total;
      }
    }
    const auto table = title_frequencies(synth.corpus, engine());
    std::size_t sum = 0;
    for (std::size_t i = 0; i < table.size(); ++i) {
      CHECK(expect.at(table[i].title) == table[i].count);
      sum += table[i].count;
      if (i > 0) CHECK(table[i - 1].count >= table[i].count);
    }
    CHECK(table.size() == expect.size());
    CHECK(sum == total);
  }
}

TEST_CASE("noise surfaces in frequencies but not in stats") {
  const auto synth = generate_synthetic({.seed = 2, .doc_count = 20, .headings_per_doc = 5,
                                         .noise = NoiseProfile::Denylisted});
  const auto table = title_frequencies(synth.corpus, engine());
  std::size_t detections = 0;
  for (const Document& d : synth.corpus) detections += engine().detect(d, DenylistMode::Ignore).size();
  std::size_t sum = 0;
  bool noisy = false;
  for (const auto& row : table) {
    sum += row.count;
    noisy = noisy || engine().denylist().contains(row.title);
  }
  CHECK(sum == detections);
  CHECK(noisy);
  CHECK(corpus_stats(synth.corpus, engine()).mean_headings == 5.0);
}

TEST_CASE("corpus statistics") {
  const Corpus two{Document("a", words(100)), Document("b", words(300))};
  const auto s = corpus_stats(two, engine());
  CHECK(s.document_count == 2);
  CHECK(s.mean_length == 200.0);
  CHECK(s.median_length == 200.0);
  CHECK(s.total_headings == 0);

  const auto synth = generate_synthetic({.seed = 1, .doc_count = 10, .headings_per_doc = 5});
  const auto g = corpus_stats(synth.corpus, engine());
  CHECK(g.mean_headings == 5.0);
  CHECK(g.total_headings == 50);
  double total_words = 0;
  for (const Document& d : synth.corpus) total_words += static_cast<double>(word_count(d.text()));
  CHECK(g.mean_length == doctest::Approx(total_words / 10.0));

  const auto none = corpus_stats({}, engine());
  CHECK(none.document_count == 0);
  CHECK(none.mean_length == 0.0);
  CHECK(none.mean_headings == 0.0);
  CHECK(none.unique_titles == 0);

  CHECK(word_count("Neck: NC/AT, 2150") == 4);
}

TEST_CASE("generator") {
  const auto a = generate_synthetic({.seed = 1, .doc_count = 10, .headings_per_doc = 5});
  CHECK(a.corpus.size() == 10);
  std::size_t spans = 0;
  for (const auto& [id, list] : a.gold) spans += list.size();
  CHECK(spans == 50);

  const auto b = generate_synthetic({.seed = 1, .doc_count = 10, .headings_per_doc = 5});
  CHECK(format_jsonl_corpus(a.corpus) == format_jsonl_corpus(b.corpus));
  CHECK(format_annotations(a.gold) == format_annotations(b.gold));
  const auto c = generate_synthetic({.seed = 2, .doc_count = 10, .headings_per_doc = 5});
  CHECK(format_jsonl_corpus(a.corpus) != format_jsonl_corpus(c.corpus));

  CHECK(generate_synthetic({.doc_count = 0}).corpus.empty());

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto s = generate_synthetic({.seed = seed, .doc_count = 10, .headings_per_doc = 7,
                                       .noise = NoiseProfile::Denylisted});
    for (const Document& d : s.corpus) {
      const auto& gold = s.gold.at(d.id());
      REQUIRE(validate_annotation(d, gold).ok());
      for (const Span& g : gold) REQUIRE_FALSE(engine().denylist().contains(normalize_title(d.slice(g))));
    }
  }
  std::size_t planted = 0;
  const auto noisy = generate_synthetic({.seed = 3, .doc_count = 10, .headings_per_doc = 5,
                                         .noise = NoiseProfile::Denylisted});
  for (const Document& d : noisy.corpus) {
    std::istringstream lines(d.text());
    for (std::string line; std::getline(lines, line);) {
      for (const char* key : {"Tablet(s)*Refills:", "Sig:", "Disp:", "Refills:"}) planted += line.rfind(key, 0) == 0;
    }
  }
  CHECK(planted == 20);
}

TEST_CASE("merge_denylist") {
  const Denylist one = merge_denylist({}, "tablet(s)*refills\n");
  CHECK(one.size() == 1);
  CHECK(merge_denylist(one, format_denylist(one)) == one);
  CHECK(merge_denylist({}, "Sig\n  sig  \nSIG:\n") == Denylist{"sig"});
  try {
    merge_denylist({}, "ok\n\x01\n", "add.txt");
    FAIL("control character accepted");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("add.txt:2") != std::string::npos);
  }
}

TEST_CASE("annotation file") {
  const AnnotationSet set{{"a", {{0, 4, Level::Title}, {6, 9, Level::Subtitle}}}, {"b", {}}};
  std::istringstream in(format_annotations(set));
  CHECK(read_annotations(in) == set);

  std::istringstream unsorted(R"({"doc_id":"a","spans":[{"start":6,"end":9,"level":"subtitle"},{"start":0,"end":4,"level":"title"}]})");
  CHECK(read_annotations(unsorted).at("a").front().start == 0);

  std::istringstream dup("{\"doc_id\":\"a\",\"spans\":[]}\n{\"doc_id\":\"a\",\"spans\":[]}\n");
  CHECK_THROWS_AS(read_annotations(dup), Error);
  std::istringstream bad_level(R"({"doc_id":"a","spans":[{"start":0,"end":4,"level":"heading"}]})");
  CHECK_THROWS_AS(read_annotations(bad_level), Error);
  std::istringstream empty_span(R"({"doc_id":"a","spans":[{"start":4,"end":4,"level":"title"}]})");
  CHECK_THROWS_AS(read_annotations(empty_span), Error);
}
