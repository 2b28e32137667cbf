#include "tocseg/cli.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tocseg/corpus.hpp"
#include "tocseg/evalmetrics.hpp"
#include "tocseg/fileio.hpp"
#include "tocseg/labeling.hpp"
#include "tocseg/tocbuild.hpp"
#include "tocseg/tocregex.hpp"

namespace tocseg::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string input;
  std::string format = "textdir";
  std::string patterns;
  std::string denylist;
  bool no_denylist = false;
  std::size_t window_size = kDefaultWindowSize;
  std::string mode = "hierarchical";
  std::string agg = "micro";
  std::size_t slack = 0;
  std::uint64_t seed = 1;
  std::string out;
  unsigned threads = 1;

  // command specific
  std::string gold;
  std::string pred;
  std::string annotations;
  std::string windows;
  std::string export_format = "text";
  std::string remove_file;
  std::vector<std::string> remove_titles;
  std::size_t docs = 10;
  std::size_t headings = 5;
  std::string noise = "off";
  std::string gold_out;
  std::size_t top = 35;
  std::string add_file;
  std::string doc_id;
  std::size_t offset = 0;
  bool json = false;
};

void require_file(const std::string& path, const char* what) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec))
    throw UsageError(std::string(what) + " file '" + path + "' does not exist");
}

Engine build_engine(const Config& cfg) {
  PatternSet set = default_pattern_set();
  if (!cfg.patterns.empty()) {
    require_file(cfg.patterns, "pattern");
    set = load_pattern_set(cfg.patterns);
  }
  if (!cfg.denylist.empty()) {
    require_file(cfg.denylist, "denylist");
    set.denylist = load_denylist(cfg.denylist);
  }
  if (cfg.no_denylist) set.denylist.clear();
  return compile(set);
}

Corpus load_input(const Config& cfg) { return ingest(cfg.input, parse_corpus_format(cfg.format)); }

void emit(const Config& cfg, std::ostream& out, std::string_view content) {
  if (cfg.out.empty() || cfg.out == "-") {
    out << content;
  } else {
    write_file_atomic(cfg.out, content);
  }
}

const Document* find_doc(const Corpus& corpus, const std::string& id) {
  for (const Document& d : corpus) {
    if (d.id() == id) return &d;
  }
  return nullptr;
}

// Rejects annotation records naming documents absent from the corpus and
// spans that break the Span invariants.
void check_alignment(const Corpus& corpus, const AnnotationSet& set, const char* what) {
  for (const auto& [id, spans] : set) {
    const Document* doc = find_doc(corpus, id);
    if (!doc) throw Error(std::string(what) + " names unknown doc_id '" + id + "'");
    const ValidationReport report = validate_annotation(*doc, spans);
    if (!report.ok()) throw Error("document '" + id + "': " + report.violations.front().message);
  }
}

std::vector<Span> spans_for(const AnnotationSet& set, const std::string& id) {
  const auto it = set.find(id);
  return it == set.end() ? std::vector<Span>{} : it->second;
}

int cmd_detect(const Config& cfg, std::ostream& out, std::ostream& err) {
  const Engine engine = build_engine(cfg);
  const Corpus corpus = load_input(cfg);
  if (corpus.empty()) err << "warning: corpus '" << cfg.input << "' is empty\n";
  const auto results = detect_batch(engine, corpus, cfg.threads);
  AnnotationSet predictions;
  for (std::size_t i = 0; i < corpus.size(); ++i) predictions.emplace(corpus[i].id(), spans_of(results[i]));
  emit(cfg, out, format_annotations(predictions));
  return kOk;
}

int cmd_label(const Config& cfg, std::ostream& out, std::ostream&) {
  if (cfg.window_size == 0) throw UsageError("--window-size must be at least 1");
  const Corpus corpus = load_input(cfg);
  const AnnotationSet gold = load_annotations(cfg.gold);
  check_alignment(corpus, gold, "gold");

  std::vector<Window> windows;
  for (const Document& doc : corpus) {
    const auto tokens = pretokenize(doc);
    std::vector<Label> labels;
    try {
      labels = spans_to_iob(tokens, spans_for(gold, doc.id()));
    } catch (const AlignmentError& e) {
      throw Error("document '" + doc.id() + "': " + e.what());
    }
    auto doc_windows = make_windows(doc.id(), zip_labels(tokens, labels), cfg.window_size);
    std::move(doc_windows.begin(), doc_windows.end(), std::back_inserter(windows));
  }
  emit(cfg, out, format_windows(windows));
  return kOk;
}

int cmd_decode(const Config& cfg, std::ostream& out, std::ostream&) {
  std::ifstream in(cfg.windows, std::ios::binary);
  if (!in) throw Error("cannot read window file '" + cfg.windows + "'");
  const auto windows = read_windows(in, cfg.windows);

  // Reassemble each document from its windows in index order, so entities
  // cut by a window boundary merge back.
  std::map<std::string, std::map<std::size_t, const Window*>> by_doc;
  for (const Window& w : windows) {
    if (!by_doc[w.doc_id].emplace(w.index, &w).second)
      throw Error("window file repeats window " + std::to_string(w.index) + " of document '" + w.doc_id + "'");
  }
  AnnotationSet set;
  for (const auto& [id, parts] : by_doc) {
    std::vector<Token> tokens;
    std::vector<Label> labels;
    for (const auto& [index, w] : parts) {
      for (const LabeledToken& lt : w->tokens) {
        tokens.push_back(lt.token);
        labels.push_back(lt.label);
      }
    }
    set.emplace(id, iob_to_spans(tokens, labels));
  }
  emit(cfg, out, format_annotations(set));
  return kOk;
}

int cmd_eval(const Config& cfg, std::ostream& out, std::ostream&) {
  const EvalMode mode = parse_eval_mode(cfg.mode);
  const Aggregation agg = parse_aggregation(cfg.agg);
  const AnnotationSet gold = load_annotations(cfg.gold);
  const AnnotationSet pred = load_annotations(cfg.pred);
  const MetricsReport report = evaluate_corpus(gold, pred, mode, agg, {cfg.slack});
  out << format_report_table(report);
  if (!cfg.out.empty()) write_file_atomic(cfg.out, format_report_json(report));
  return kOk;
}

int cmd_toc(const Config& cfg, std::ostream& out, std::ostream&) {
  if (cfg.export_format != "text" && cfg.export_format != "json")
    throw UsageError("--export must be 'text' or 'json'");
  const Corpus corpus = load_input(cfg);
  const AnnotationSet ann = load_annotations(cfg.annotations);
  check_alignment(corpus, ann, "annotations");
  std::string result;
  for (const Document& doc : corpus) {
    const TocTree tree = build_toc(doc, spans_for(ann, doc.id()));
    if (cfg.export_format == "json") {
      result += format_toc_json(tree);
      result += '\n';
    } else {
      result += format_toc_text(tree);
    }
  }
  emit(cfg, out, result);
  return kOk;
}

int cmd_clean(const Config& cfg, std::ostream& out, std::ostream&) {
  const CorpusFormat format = parse_corpus_format(cfg.format);
  if (format == CorpusFormat::TextDir && cfg.out.empty()) throw UsageError("clean with --format textdir needs --out");
  std::set<std::string> removal;
  if (!cfg.remove_file.empty()) {
    require_file(cfg.remove_file, "removal list");
    removal = load_denylist(cfg.remove_file);
  }
  for (const auto& t : cfg.remove_titles) removal.insert(normalize_title(t));

  const Corpus corpus = load_input(cfg);
  const AnnotationSet ann = load_annotations(cfg.annotations);
  check_alignment(corpus, ann, "annotations");
  Corpus cleaned;
  for (const Document& doc : corpus) cleaned.push_back(clean_document(doc, build_toc(doc, spans_for(ann, doc.id())), removal));

  if (format == CorpusFormat::JsonLines) {
    emit(cfg, out, format_jsonl_corpus(cleaned));
  } else {
    write_corpus(cfg.out, format, cleaned);
  }
  return kOk;
}

int cmd_stats(const Config& cfg, std::ostream& out, std::ostream&) {
  const CorpusStats s = corpus_stats(load_input(cfg), build_engine(cfg));
  if (cfg.json) {
    nlohmann::json j = {{"document_count", s.document_count}, {"mean_length", s.mean_length},
                        {"median_length", s.median_length},   {"mean_headings", s.mean_headings},
                        {"unique_titles", s.unique_titles},   {"total_headings", s.total_headings}};
    emit(cfg, out, j.dump(2) + "\n");
  } else {
    std::ostringstream o;
    o << "documents\t" << s.document_count << "\nmean_length\t" << s.mean_length << "\nmedian_length\t"
      << s.median_length << "\nmean_headings\t" << s.mean_headings << "\nunique_titles\t" << s.unique_titles
      << "\ntotal_headings\t" << s.total_headings << '\n';
    emit(cfg, out, o.str());
  }
  return kOk;
}

int cmd_freq(const Config& cfg, std::ostream& out, std::ostream&) {
  const FrequencyTable table = title_frequencies(load_input(cfg), build_engine(cfg));
  std::ostringstream o;
  for (std::size_t i = 0; i < table.size() && (cfg.top == 0 || i < cfg.top); ++i)
    o << table[i].count << '\t' << table[i].title << '\n';
  emit(cfg, out, o.str());
  return kOk;
}

int cmd_generate(const Config& cfg, std::ostream&, std::ostream&) {
  if (cfg.out.empty() || cfg.gold_out.empty()) throw UsageError("generate needs --out and --gold-out");
  SyntheticOptions opts;
  opts.seed = cfg.seed;
  opts.doc_count = cfg.docs;
  opts.headings_per_doc = cfg.headings;
  if (cfg.noise == "off") {
    opts.noise = NoiseProfile::Off;
  } else if (cfg.noise == "denylisted") {
    opts.noise = NoiseProfile::Denylisted;
  } else {
    throw UsageError("--noise must be 'off' or 'denylisted'");
  }
  const SyntheticCorpus synth = generate_synthetic(opts);
  write_corpus(cfg.out, parse_corpus_format(cfg.format), synth.corpus);
  write_file_atomic(cfg.gold_out, format_annotations(synth.gold));
  return kOk;
}

int cmd_patterns(const Config& cfg, std::ostream& out, std::ostream&) {
  PatternSet set = default_pattern_set();
  if (!cfg.patterns.empty()) {
    require_file(cfg.patterns, "pattern");
    set = load_pattern_set(cfg.patterns);
  }
  compile(set);
  emit(cfg, out, dump_pattern_set(set));
  return kOk;
}

int cmd_denylist(const Config& cfg, std::ostream& out, std::ostream&) {
  Denylist existing;
  if (!cfg.denylist.empty()) {
    require_file(cfg.denylist, "denylist");
    existing = load_denylist(cfg.denylist);
  }
  require_file(cfg.add_file, "additions");
  emit(cfg, out, format_denylist(merge_denylist(existing, read_file(cfg.add_file), cfg.add_file)));
  return kOk;
}

int cmd_explain(const Config& cfg, std::ostream& out, std::ostream&) {
  const Engine engine = build_engine(cfg);
  const Corpus corpus = load_input(cfg);
  const Document* doc = find_doc(corpus, cfg.doc_id);
  if (!doc) throw Error("no document '" + cfg.doc_id + "' in '" + cfg.input + "'");
  const auto trace = engine.explain(*doc, cfg.offset);
  if (!trace) {
    out << "no detection covers offset " << cfg.offset << '\n';
    return kOk;
  }
  auto range = [](const Span& s) { return "[" + std::to_string(s.start) + ", " + std::to_string(s.end) + ")"; };
  out << "pattern\t" << trace->pattern_id << "\nlevel\t" << to_string(trace->level) << "\nprefix\t"
      << range(trace->prefix) << "\ncontent\t" << range(trace->content) << '\t' << trace->content_text
      << "\nterminator\t" << range(trace->terminator) << '\n';
  return kOk;
}

int cmd_time(const Config& cfg, std::ostream& out, std::ostream&) {
  const Engine engine = build_engine(cfg);
  const Corpus corpus = load_input(cfg);
  const LatencyStats s = time_segmenter([&](const Document& d) { (void)engine.detect(d); }, corpus);
  out << "documents\t" << s.documents << "\nmean_ms\t" << s.mean_ms << "\nmedian_ms\t" << s.median_ms
      << "\nmin_ms\t" << s.min_ms << "\nmax_ms\t" << s.max_ms << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hierarchical title/subtitle segmentation toolkit", "tocseg"};
  app.require_subcommand(1);
  Config cfg;

  auto add_input = [&](CLI::App* sub) {
    sub->add_option("--input,-i", cfg.input, "Corpus path (directory or JSONL file)")->required();
    sub->add_option("--format", cfg.format, "Corpus format")
        ->check(CLI::IsMember({"textdir", "jsonl"}))
        ->capture_default_str();
  };
  auto add_engine = [&](CLI::App* sub) {
    sub->add_option("--patterns", cfg.patterns, "Pattern config (JSON); built-in set if omitted");
    sub->add_option("--denylist", cfg.denylist, "Denylist file replacing the configured one");
    sub->add_flag("--no-denylist", cfg.no_denylist, "Disable denylist filtering");
  };
  auto add_out = [&](CLI::App* sub) { sub->add_option("--out,-o", cfg.out, "Output path ('-' or omitted: stdout)"); };

  auto* detect = app.add_subcommand("detect", "Detect titles and subtitles, write an annotation file");
  add_input(detect);
  add_engine(detect);
  add_out(detect);
  detect->add_option("--threads", cfg.threads, "Worker threads")->check(CLI::Range(1u, 256u));

  auto* label = app.add_subcommand("label", "Write IOB token-label training windows");
  add_input(label);
  label->add_option("--gold", cfg.gold, "Gold annotation file")->required();
  label->add_option("--window-size", cfg.window_size, "Tokens per window")->capture_default_str();
  add_out(label);

  auto* decode = app.add_subcommand("decode", "Convert a token-label window file to an annotation file");
  decode->add_option("--windows", cfg.windows, "Window file")->required();
  add_out(decode);

  auto* eval = app.add_subcommand("eval", "Score predictions against gold annotations");
  eval->add_option("--gold", cfg.gold, "Gold annotation file")->required();
  eval->add_option("--pred", cfg.pred, "Predicted annotation file")->required();
  eval->add_option("--mode", cfg.mode)->check(CLI::IsMember({"linear", "hierarchical"}))->capture_default_str();
  eval->add_option("--agg", cfg.agg)->check(CLI::IsMember({"micro", "macro"}))->capture_default_str();
  eval->add_option("--slack", cfg.slack, "Boundary tolerance in bytes")->capture_default_str();
  eval->add_option("--out,-o", cfg.out, "Write the JSON report here");

  auto* toc = app.add_subcommand("toc", "Export the table of contents of each document");
  add_input(toc);
  toc->add_option("--annotations", cfg.annotations, "Annotation file")->required();
  toc->add_option("--export", cfg.export_format, "text or json")->capture_default_str();
  add_out(toc);

  auto* clean = app.add_subcommand("clean", "Remove sections by normalized title");
  add_input(clean);
  clean->add_option("--annotations", cfg.annotations, "Annotation file")->required();
  clean->add_option("--remove", cfg.remove_file, "File of titles to remove (denylist format)");
  clean->add_option("--remove-title", cfg.remove_titles, "Title to remove (repeatable)");
  add_out(clean);

  auto* stats = app.add_subcommand("stats", "Corpus statistics");
  add_input(stats);
  add_engine(stats);
  stats->add_flag("--json", cfg.json, "Emit JSON");
  add_out(stats);

  auto* freq = app.add_subcommand("freq", "Candidate title frequencies (denylist not applied)");
  add_input(freq);
  add_engine(freq);
  freq->add_option("--top", cfg.top, "Rows to print, 0 for all")->capture_default_str();
  add_out(freq);

  auto* generate = app.add_subcommand("generate", "Write a synthetic corpus with gold annotations");
  generate->add_option("--seed", cfg.seed)->capture_default_str();
  generate->add_option("--docs", cfg.docs)->capture_default_str();
  generate->add_option("--headings", cfg.headings, "Headings per document")->capture_default_str();
  generate->add_option("--noise", cfg.noise, "off or denylisted")->capture_default_str();
  generate->add_option("--format", cfg.format)->check(CLI::IsMember({"textdir", "jsonl"}))->capture_default_str();
  generate->add_option("--out,-o", cfg.out, "Corpus output path");
  generate->add_option("--gold-out", cfg.gold_out, "Gold annotation output path");

  auto* patterns = app.add_subcommand("patterns", "Print the (validated) pattern config");
  patterns->add_option("--patterns", cfg.patterns, "Pattern config to validate instead of the built-in set");
  add_out(patterns);

  auto* denylist = app.add_subcommand("denylist-merge", "Merge denylist additions into an existing denylist");
  denylist->add_option("--denylist", cfg.denylist, "Existing denylist");
  denylist->add_option("--add", cfg.add_file, "Additions file")->required();
  add_out(denylist);

  auto* explain = app.add_subcommand("explain", "Show which pattern covers an offset");
  add_input(explain);
  add_engine(explain);
  explain->add_option("--doc-id", cfg.doc_id)->required();
  explain->add_option("--offset", cfg.offset)->required();

  auto* timing = app.add_subcommand("time", "Per-document detection latency");
  add_input(timing);
  add_engine(timing);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "tocseg: " << e.what() << '\n';
    return kUsage;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "detect") return cmd_detect(cfg, out, err);
    if (name == "label") return cmd_label(cfg, out, err);
    if (name == "decode") return cmd_decode(cfg, out, err);
    if (name == "eval") return cmd_eval(cfg, out, err);
    if (name == "toc") return cmd_toc(cfg, out, err);
    if (name == "clean") return cmd_clean(cfg, out, err);
    if (name == "stats") return cmd_stats(cfg, out, err);
    if (name == "freq") return cmd_freq(cfg, out, err);
    if (name == "generate") return cmd_generate(cfg, out, err);
    if (name == "patterns") return cmd_patterns(cfg, out, err);
    if (name == "denylist-merge") return cmd_denylist(cfg, out, err);
    if (name == "explain") return cmd_explain(cfg, out, err);
    if (name == "time") return cmd_time(cfg, out, err);
    err << "tocseg: unknown command '" << name << "'\n";
    return kUsage;
  } catch (const UsageError& e) {
    err << "tocseg: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "tocseg: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    err << "tocseg: internal error: " << e.what() << '\n';
    return kInternal;
  }
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace tocseg::cli
