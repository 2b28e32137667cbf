#include "tocseg/tocbuild.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace tocseg {

TocTree build_toc(const Document& doc, const std::vector<Span>& spans) {
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const Span& s = spans[i];
    if (s.start >= s.end || s.end > doc.size())
      throw Error("span [" + std::to_string(s.start) + ", " + std::to_string(s.end) +
                  ") is empty or out of bounds in document '" + doc.id() + "'");
    if (i > 0 && s.start < spans[i - 1].end)
      throw Error("spans of document '" + doc.id() + "' are unsorted or overlapping at index " +
                  std::to_string(i));
  }

  TocTree tree;
  tree.doc_id = doc.id();
  tree.preamble_end = spans.empty() ? doc.size() : spans.front().start;

  auto make_node = [&](const Span& s) {
    TocNode node;
    node.heading = s;
    node.heading_text = std::string(doc.slice(s));
    node.section_start = s.end;
    return node;
  };

  for (std::size_t i = 0; i < spans.size(); ++i) {
    const Span& s = spans[i];
    const std::size_t next = i + 1 < spans.size() ? spans[i + 1].start : doc.size();
    if (s.level == Level::Title) {
      tree.roots.push_back(make_node(s));
      continue;
    }
    if (tree.roots.empty()) {
      TocNode root;
      root.synthetic = true;
      root.heading = {tree.preamble_end, tree.preamble_end, Level::Title};
      root.section_start = tree.preamble_end;
      tree.roots.push_back(std::move(root));
    }
    TocNode child = make_node(s);
    child.section_end = next;
    tree.roots.back().children.push_back(std::move(child));
  }

  // A root's section runs to the next root heading.
  for (std::size_t r = 0; r < tree.roots.size(); ++r) {
    tree.roots[r].section_end =
        r + 1 < tree.roots.size() ? tree.roots[r + 1].heading.start : doc.size();
  }
  return tree;
}

namespace {

template <typename Fn>
void visit(const std::vector<TocNode>& nodes, std::size_t depth, Fn&& fn) {
  for (const TocNode& n : nodes) {
    fn(n, depth);
    visit(n.children, depth + 1, fn);
  }
}

}  // namespace

std::vector<SectionSlice> extract_sections(const Document& doc, const TocTree& tree,
                                           const std::string& query) {
  const std::string key = normalize_title(query);
  std::vector<SectionSlice> out;
  visit(tree.roots, 1, [&](const TocNode& n, std::size_t) {
    if (n.synthetic || normalize_title(n.heading_text) != key) return;
    out.push_back({n.section_start, n.section_end, std::string(doc.slice(n.section_start, n.section_end))});
  });
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> removal_extents(const TocTree& tree,
                                                                 const std::set<std::string>& removal) {
  std::set<std::string> keys;
  for (const auto& r : removal) keys.insert(normalize_title(r));

  std::vector<std::pair<std::size_t, std::size_t>> extents;
  visit(tree.roots, 1, [&](const TocNode& n, std::size_t) {
    if (!n.synthetic && keys.contains(normalize_title(n.heading_text)))
      extents.emplace_back(n.heading.start, n.section_end);
  });
  std::sort(extents.begin(), extents.end());

  // Nested or touching extents collapse into one range.
  std::vector<std::pair<std::size_t, std::size_t>> merged;
  for (const auto& e : extents) {
    if (!merged.empty() && e.first <= merged.back().second) {
      merged.back().second = std::max(merged.back().second, e.second);
    } else {
      merged.push_back(e);
    }
  }
  return merged;
}

Document clean_document(const Document& doc, const TocTree& tree, const std::set<std::string>& removal) {
  const auto extents = removal_extents(tree, removal);
  if (extents.empty()) return doc;
  std::string text;
  text.reserve(doc.size());
  std::size_t cursor = 0;
  for (const auto& [start, end] : extents) {
    text.append(doc.text(), cursor, start - cursor);
    cursor = end;
  }
  text.append(doc.text(), cursor, std::string::npos);
  return Document(doc.id(), std::move(text));
}

std::vector<Span> flatten_headings(const TocTree& tree) {
  std::vector<Span> spans;
  visit(tree.roots, 1, [&](const TocNode& n, std::size_t) {
    if (!n.synthetic) spans.push_back(n.heading);
  });
  return spans;
}

std::string format_toc_text(const TocTree& tree) {
  std::ostringstream out;
  out << "# doc: " << tree.doc_id << " preamble_end: " << tree.preamble_end << '\n';
  visit(tree.roots, 1, [&](const TocNode& n, std::size_t depth) {
    out << depth << '\t' << n.heading.start << '\t' << n.heading.end << '\t' << n.section_start << '\t'
        << n.section_end << '\t' << (n.synthetic ? std::string("(preamble)") : n.heading_text) << '\n';
  });
  return out.str();
}

std::string format_toc_json(const TocTree& tree) {
  nlohmann::json spans = nlohmann::json::array();
  visit(tree.roots, 1, [&](const TocNode& n, std::size_t) {
    if (n.synthetic) return;
    spans.push_back({{"start", n.heading.start},
                     {"end", n.heading.end},
                     {"level", to_string(n.heading.level)},
                     {"section_start", n.section_start},
                     {"section_end", n.section_end},
                     {"text", n.heading_text}});
  });
  nlohmann::json j = {{"doc_id", tree.doc_id}, {"preamble_end", tree.preamble_end}, {"spans", spans}};
  return j.dump();
}

}  // namespace tocseg
