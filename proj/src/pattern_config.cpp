#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tocseg/tocregex.hpp"

namespace tocseg {

using nlohmann::json;

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(const std::string& owner, const std::string& field, const std::string& value,
                const std::pair<const char*, Enum> (&table)[N]) {
  for (const auto& [name, v] : table) {
    if (value == name) return v;
  }
  throw PatternError(owner, "unknown " + field + " '" + value + "'");
}

constexpr std::pair<const char*, PrefixClass> kPrefixes[] = {
    {"line_start", PrefixClass::LineStart},
    {"blank_line", PrefixClass::BlankLine},
    {"doc_start", PrefixClass::DocStart},
};
constexpr std::pair<const char*, TerminatorClass> kTerminators[] = {
    {"colon_newline", TerminatorClass::ColonNewline},
    {"colon_inline", TerminatorClass::ColonInline},
};
constexpr std::pair<const char*, FirstChar> kFirstChars[] = {
    {"alnum", FirstChar::Alnum},
    {"alpha", FirstChar::Alpha},
    {"upper", FirstChar::Upper},
};
constexpr std::pair<const char*, Enumeration> kEnumerations[] = {
    {"any", Enumeration::Any},
    {"forbidden", Enumeration::Forbidden},
    {"required", Enumeration::Required},
};
constexpr std::pair<const char*, Level> kLevels[] = {
    {"title", Level::Title},
    {"subtitle", Level::Subtitle},
};

template <typename T>
T get_or(const json& j, const char* key, const std::string& owner, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw PatternError(owner, std::string("field '") + key + "' has the wrong type");
  }
}

std::string require_string(const json& j, const char* key, const std::string& owner) {
  if (!j.contains(key) || !j.at(key).is_string())
    throw PatternError(owner, std::string("missing string field '") + key + "'");
  return j.at(key).get<std::string>();
}

}  // namespace

PatternSet parse_pattern_set(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("pattern config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw Error("pattern config must be a JSON object");

  PatternSet set;
  const ContentClass defaults;
  for (const json& c : root.value("content_classes", json::array())) {
    ContentClass cls;
    cls.name = require_string(c, "name", "<content class>");
    const std::string& who = cls.name;
    cls.min_chars = get_or<std::size_t>(c, "min_chars", who, defaults.min_chars);
    cls.max_chars = get_or<std::size_t>(c, "max_chars", who, defaults.max_chars);
    cls.max_words = get_or<std::size_t>(c, "max_words", who, defaults.max_words);
    cls.first_char = parse_enum(who, "first_char",
                                get_or<std::string>(c, "first_char", who, "alnum"), kFirstChars);
    cls.require_letter = get_or<bool>(c, "require_letter", who, defaults.require_letter);
    cls.forbid_lowercase = get_or<bool>(c, "forbid_lowercase", who, defaults.forbid_lowercase);
    cls.extra_chars = get_or<std::string>(c, "extra_chars", who, defaults.extra_chars);
    cls.enumeration = parse_enum(who, "enumeration",
                                 get_or<std::string>(c, "enumeration", who, "forbidden"), kEnumerations);
    cls.regex = get_or<std::string>(c, "regex", who, "");
    set.content_classes.push_back(std::move(cls));
  }

  for (const json& p : root.value("patterns", json::array())) {
    PatternSpec spec;
    spec.id = require_string(p, "id", "<unnamed>");
    spec.prefix = parse_enum(spec.id, "prefix", require_string(p, "prefix", spec.id), kPrefixes);
    spec.content_rule = require_string(p, "content", spec.id);
    spec.terminator =
        parse_enum(spec.id, "terminator", require_string(p, "terminator", spec.id), kTerminators);
    spec.level = parse_enum(spec.id, "level", require_string(p, "level", spec.id), kLevels);
    set.specs.push_back(std::move(spec));
  }

  for (const json& d : root.value("denylist", json::array())) {
    if (!d.is_string()) throw Error("pattern config: denylist entries must be strings");
    set.denylist.insert(normalize_title(d.get<std::string>()));
  }
  return set;
}

PatternSet load_pattern_set(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read pattern config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_pattern_set(buf.str());
}

std::string dump_pattern_set(const PatternSet& set) {
  json root;
  root["content_classes"] = json::array();
  for (const auto& c : set.content_classes) {
    json j;
    j["name"] = c.name;
    j["min_chars"] = c.min_chars;
    j["max_chars"] = c.max_chars;
    j["max_words"] = c.max_words;
    j["first_char"] = to_string(c.first_char);
    j["require_letter"] = c.require_letter;
    j["forbid_lowercase"] = c.forbid_lowercase;
    j["extra_chars"] = c.extra_chars;
    j["enumeration"] = to_string(c.enumeration);
    if (!c.regex.empty()) j["regex"] = c.regex;
    root["content_classes"].push_back(std::move(j));
  }
  root["patterns"] = json::array();
  for (const auto& s : set.specs) {
    root["patterns"].push_back({{"id", s.id},
                                {"prefix", to_string(s.prefix)},
                                {"content", s.content_rule},
                                {"terminator", to_string(s.terminator)},
                                {"level", to_string(s.level)}});
  }
  root["denylist"] = json::array();
  for (const auto& d : set.denylist) root["denylist"].push_back(d);
  return root.dump(2) + "\n";
}

Denylist parse_denylist(std::string_view content, const std::string& source) {
  Denylist out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    std::size_t nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    std::string_view line = content.substr(pos, nl - pos);
    ++line_no;
    pos = nl + 1;

    while (!line.empty() && is_ascii_space(line.back())) line.remove_suffix(1);
    if (line.empty() || line.front() == '#') {
      if (nl == content.size()) break;
      continue;
    }
    if (!is_valid_utf8(line))
      throw Error(source + ":" + std::to_string(line_no) + ": not valid UTF-8");
    for (const char c : line) {
      const auto u = static_cast<unsigned char>(c);
      if ((u < 0x20 && c != '\t') || u == 0x7F)
        throw Error(source + ":" + std::to_string(line_no) + ": control character in entry");
    }
    std::string entry = normalize_title(line);
    if (!entry.empty()) out.insert(std::move(entry));
    if (nl == content.size()) break;
  }
  return out;
}

Denylist load_denylist(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read denylist '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_denylist(buf.str(), path);
}

std::string format_denylist(const Denylist& denylist) {
  std::string out;
  for (const auto& entry : denylist) {
    out += entry;
    out += '\n';
  }
  return out;
}

}  // namespace tocseg
