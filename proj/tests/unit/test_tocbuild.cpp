#include <nlohmann/json.hpp>

#include "doctest.h"
#include "oracles.hpp"
#include "tocseg/tocbuild.hpp"
#include "tocseg/tocregex.hpp"

using namespace tocseg;

namespace {

const char* kExam =
    "Physical Exam:\n"
    "HEENT: NC/AT, PERRLA\n"
    "Neck: supple, no JVD\n"
    "Lungs: CTA b/l\n"
    "Extremities: no edema\n";

std::vector<Span> spans_in(const Document& doc) {
  static const Engine engine = compile(default_pattern_set());
  return spans_of(engine.detect(doc));
}

// Random text with headings planted at known offsets.
std::pair<Document, std::vector<Span>> random_tree_doc(oracle::Rng& rng) {
  static const char* titles[] = {"Allergies", "Discharge Medications", "Admission Labs", "Plan", "caf\xc3\xa9"};
  std::string text;
  std::vector<Span> spans;
  if (rng.coin()) text += "preamble text\n";
  const std::size_t n = rng.below(9);
  for (std::size_t i = 0; i < n; ++i) {
    if (!text.empty() && rng.coin(30)) text += "\n";
    const std::string name = titles[rng.below(std::size(titles))];
    spans.push_back({text.size(), text.size() + name.size(), rng.coin() ? Level::Title : Level::Subtitle});
    text += name + ":";
    const std::size_t body = rng.below(4);
    for (std::size_t k = 0; k < body; ++k) text += " body";
    text += "\n";
  }
  return {Document("r", text), spans};
}

}  // namespace

TEST_CASE("one title with four subtitles") {
  const Document doc("fig", kExam);
  const auto spans = spans_in(doc);
  const TocTree tree = build_toc(doc, spans);
  REQUIRE(tree.roots.size() == 1);
  const TocNode& root = tree.roots[0];
  CHECK(root.heading_text == "Physical Exam");
  CHECK(root.section_start == root.heading.end);
  CHECK(root.section_end == doc.size());
  REQUIRE(root.children.size() == 4);
  const char* names[] = {"HEENT", "Neck", "Lungs", "Extremities"};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(root.children[i].heading_text == names[i]);
    CHECK(root.children[i].section_start == root.children[i].heading.end);
    const std::size_t next = i + 1 < 4 ? root.children[i + 1].heading.start : doc.size();
    CHECK(root.children[i].section_end == next);
  }
  CHECK(tree.preamble_end == 0);
  CHECK(flatten_headings(tree) == spans);
}

TEST_CASE("no spans leaves only a preamble") {
  const Document doc("p", "nothing to see\n");
  const TocTree tree = build_toc(doc, {});
  CHECK(tree.roots.empty());
  CHECK(tree.preamble_end == doc.size());
}

TEST_CASE("build_toc rejects bad span lists") {
  const Document doc("p", std::string(50, 'x'));
  CHECK_THROWS_AS(build_toc(doc, {{10, 12, Level::Title}, {2, 4, Level::Title}}), Error);
  CHECK_THROWS_AS(build_toc(doc, {{2, 8, Level::Title}, {5, 9, Level::Subtitle}}), Error);
  CHECK_THROWS_AS(build_toc(doc, {{40, 60, Level::Title}}), Error);
  CHECK_THROWS_AS(build_toc(doc, {{4, 4, Level::Title}}), Error);
}

TEST_CASE("subtitle before any title goes under a synthetic root") {
  const Document doc("s", "intro\nNeck: ok\nLungs: clear\nPlan:\ngo home\n");
  const TocTree tree = build_toc(doc, spans_in(doc));
  REQUIRE(tree.roots.size() == 2);
  CHECK(tree.roots[0].synthetic);
  CHECK(tree.roots[0].heading == Span{6, 6, Level::Title});
  CHECK(tree.roots[0].children.size() == 2);
  CHECK(tree.roots[1].heading_text == "Plan");
  CHECK(format_toc_text(tree).find("(preamble)") != std::string::npos);
}

TEST_CASE("tree matches the nesting oracle") {
  oracle::Rng rng(404);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto [doc, spans] = random_tree_doc(rng);
    const TocTree tree = build_toc(doc, spans);
    const auto expect = oracle::nest(spans, doc.size());

    // Rebuild the oracle's view from the tree.
    std::vector<oracle::FlatNode> got;
    for (const TocNode& root : tree.roots) {
      int root_index = -2;
      if (!root.synthetic) {
        root_index = static_cast<int>(got.size());
        got.push_back({root.heading, -1, root.section_end});
      }
      for (const TocNode& child : root.children) got.push_back({child.heading, root_index, child.section_end});
    }
    REQUIRE(got.size() == expect.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      REQUIRE(got[i].heading == expect[i].heading);
      REQUIRE(got[i].parent == expect[i].parent);
      REQUIRE(got[i].section_end == expect[i].section_end);
    }
    REQUIRE(flatten_headings(tree) == spans);
    REQUIRE(tree.preamble_end == (spans.empty() ? doc.size() : spans.front().start));

    // Root extents tile [preamble_end, len) in order.
    std::size_t cursor = tree.preamble_end;
    for (const TocNode& root : tree.roots) {
      REQUIRE(root.heading.start == cursor);
      REQUIRE(root.section_start == root.heading.end);
      REQUIRE(root.section_end >= root.section_start);
      for (const TocNode& child : root.children) {
        REQUIRE(child.heading.start >= root.section_start);
        REQUIRE(child.section_end <= root.section_end);
      }
      cursor = root.section_end;
    }
    REQUIRE(cursor == doc.size());
  }
}

TEST_CASE("extract_sections") {
  const Document doc("fig", kExam);
  const TocTree tree = build_toc(doc, spans_in(doc));
  const auto exam = extract_sections(doc, tree, "physical exam");
  REQUIRE(exam.size() == 1);
  CHECK(exam[0].text == std::string(kExam).substr(13));
  CHECK(exam[0].text.find("Extremities") != std::string::npos);
  CHECK(extract_sections(doc, tree, "nonexistent").empty());
  CHECK(extract_sections(doc, tree, "  NECK: ").size() == 1);

  const Document twice("t", "Plan:\nrest\nAllergies:\nnone\nPlan:\nfollow up\n");
  const auto plans = extract_sections(twice, build_toc(twice, spans_in(twice)), "plan");
  REQUIRE(plans.size() == 2);
  CHECK(plans[0].start == 4);
  CHECK(plans[0].end == 11);
  CHECK(plans[0].text == twice.slice(4, 11));
  CHECK(plans[1].start < plans[1].end);
  CHECK(plans[1].text == twice.slice(plans[1].start, plans[1].end));
  CHECK(plans[1].text == ":\nfollow up\n");
}

TEST_CASE("clean_document") {
  const std::string text =
      "Chief Complaint:\nchest pain\n"
      "Discharge Medications:\naspirin daily\n"
      "Followup Instructions:\nsee PCP\n";
  const Document doc("c", text);
  const TocTree tree = build_toc(doc, spans_in(doc));

  const Document cleaned = clean_document(doc, tree, {"discharge medications"});
  CHECK(cleaned.id() == "c");
  CHECK(cleaned.text() == "Chief Complaint:\nchest pain\nFollowup Instructions:\nsee PCP\n");
  CHECK(cleaned.size() == doc.size() - std::string("Discharge Medications:\naspirin daily\n").size());

  CHECK(clean_document(doc, tree, {}).text() == text);

  const Document exam("fig", kExam);
  const TocTree exam_tree = build_toc(exam, spans_in(exam));
  CHECK(clean_document(exam, exam_tree, {"neck"}).text() ==
        "Physical Exam:\nHEENT: NC/AT, PERRLA\nLungs: CTA b/l\nExtremities: no edema\n");
  CHECK(removal_extents(exam_tree, {"neck", "lungs"}) ==
        std::vector<std::pair<std::size_t, std::size_t>>{{36, 72}});
}

TEST_CASE("cleaning matches the mask oracle on random trees") {
  oracle::Rng rng(99);
  const std::set<std::string> vocab[] = {{}, {"plan"}, {"allergies", "admission labs"}, {"caf\xc3\xa9", "plan"}};
  for (int trial = 0; trial < 1000; ++trial) {
    const auto [doc, spans] = random_tree_doc(rng);
    const TocTree tree = build_toc(doc, spans);
    const auto& removal = vocab[rng.below(std::size(vocab))];
    const Document out = clean_document(doc, tree, removal);

    std::size_t removed = 0;
    for (const auto& [a, b] : removal_extents(tree, removal)) removed += b - a;
    REQUIRE(out.size() == doc.size() - removed);
    REQUIRE(out.text() == oracle::clean_by_mask(doc.text(), spans, removal));
    REQUIRE(oracle::is_subsequence(out.text(), doc.text()));
  }
}

TEST_CASE("exports") {
  const Document doc("fig", kExam);
  const TocTree tree = build_toc(doc, spans_in(doc));
  const std::string text = format_toc_text(tree);
  CHECK(text.rfind("# doc: fig preamble_end: 0\n1\t0\t13\t13\t" + std::to_string(doc.size()) + "\tPhysical Exam\n", 0) ==
        0);
  CHECK(text.find("2\t15\t20\t20\t36\tHEENT\n") != std::string::npos);

  const auto j = nlohmann::json::parse(format_toc_json(tree));
  CHECK(j["doc_id"] == "fig");
  CHECK(j["preamble_end"] == 0);
  REQUIRE(j["spans"].size() == 5);
  CHECK(j["spans"][0]["level"] == "title");
  CHECK(j["spans"][1]["level"] == "subtitle");
  CHECK(j["spans"][1]["start"] == 15);
  CHECK(j["spans"][1]["section_end"] == 36);
  CHECK(j["spans"][4]["text"] == "Extremities");
  CHECK(format_toc_json(tree).find('\n') == std::string::npos);
}
