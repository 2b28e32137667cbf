#include <cstdio>
#include <random>

#include "tocseg/corpus.hpp"

namespace tocseg {

namespace {

constexpr const char* kTitles[] = {
    "Chief Complaint",
    "History of Present Illness",
    "Past Medical History",
    "Family History",
    "Social History",
    "Physical Exam",
    "Allergies",
    "Major Surgical or Invasive Procedure",
    "Pertinent Results",
    "Brief Hospital Course",
    "Medications on Admission",
    "Discharge Medications",
    "Discharge Disposition",
    "Discharge Diagnosis",
    "Discharge Condition",
    "Discharge Instructions",
    "Followup Instructions",
    "Admission Labs",
    "Imaging",
    "Service",
};

constexpr const char* kSubtitles[] = {
    "HEENT", "Neck", "Lungs", "Extremities", "Cardiac", "Abdomen", "Neuro", "Skin",
    "General", "Pulses", "CV", "Resp", "GU", "Psych", "Vitals", "Heme",
};

constexpr const char* kWords[] = {
    "patient",  "denies",    "fever",     "chills",     "stable",     "afebrile",  "normal",    "rate",
    "rhythm",   "no",        "murmurs",   "clear",      "to",         "auscultation", "bilaterally", "soft",
    "nontender", "nondistended", "with",  "history",    "of",         "hypertension", "and",   "diabetes",
    "presented", "the",      "emergency", "department", "mg",         "daily",     "was",       "started",
    "on",       "admitted",  "for",       "management", "chest",      "pain",      "shortness", "breath",
    "improved", "discharged", "home",     "follow",     "up",         "with",      "PCP",       "in",
    "two",      "weeks",     "2150",      "120/80",     "x3",         "b/l",       "s/p",       "CABG",
};

// Medication-list fields from the default denylist. The first sits alone on
// its line (a Title-shaped false positive), the rest read like subtitles.
constexpr const char* kNoiseLines[] = {
    "Tablet(s)*Refills:",
    "Sig: one tablet by mouth daily",
    "Disp: 30 tablets",
    "Refills: 2",
};

template <typename T, std::size_t N>
constexpr std::size_t count_of(const T (&)[N]) {
  return N;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  // mt19937_64 output is fixed by the standard; the modulo keeps the draw
  // independent of library-specific distribution code.
  std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(engine_() % n); }
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
  bool chance(unsigned percent) { return below(100) < percent; }

 private:
  std::mt19937_64 engine_;
};

std::string upper(std::string s) {
  for (char& c : s) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return s;
}

// Colon-free prose wrapped at ~12 words per line; every line ends in '\n'.
std::string body(Rng& rng, std::size_t words) {
  std::string out;
  std::size_t on_line = 0;
  bool sentence_start = true;
  for (std::size_t i = 0; i < words; ++i) {
    if (on_line > 0) out += ' ';
    std::string word = kWords[rng.below(count_of(kWords))];
    if (sentence_start && word[0] >= 'a' && word[0] <= 'z') word[0] = static_cast<char>(word[0] - 'a' + 'A');
    out += word;
    ++on_line;
    const bool last = i + 1 == words;
    sentence_start = last || rng.chance(8);
    if (sentence_start) {
      out += '.';
    } else if (rng.chance(5)) {
      out += ',';
    }
    if (last || on_line >= 12) {
      out += '\n';
      on_line = 0;
    }
  }
  return out;
}

}  // namespace

SyntheticCorpus generate_synthetic(const SyntheticOptions& options) {
  if (options.min_body_words == 0 || options.min_body_words > options.max_body_words)
    throw Error("synthetic generator needs 1 <= min_body_words <= max_body_words");
  Rng rng(options.seed);
  SyntheticCorpus out;

  for (std::size_t d = 0; d < options.doc_count; ++d) {
    char id[32];
    std::snprintf(id, sizeof id, "synth-%05zu", d + 1);
    std::string text;
    std::vector<Span> gold;

    if (rng.chance(50)) {
      text += "Admission Date  2150 01 " + std::to_string(rng.between(10, 28)) + "\n";
      text += "Discharge Date  2150 02 " + std::to_string(rng.between(10, 28)) + "\n";
    }

    // Lines queued for insertion after the heading with the given index.
    std::vector<std::size_t> noise_after;
    if (options.noise == NoiseProfile::Denylisted) {
      for (std::size_t k = 0; k < options.noise_lines_per_doc; ++k)
        noise_after.push_back(rng.below(std::max<std::size_t>(options.headings_per_doc, 1)));
    }
    auto plant_noise = [&](std::size_t heading_index) {
      for (const std::size_t at : noise_after) {
        if (at != heading_index) continue;
        if (!text.empty() && text.back() != '\n') text += '\n';
        text += kNoiseLines[rng.below(count_of(kNoiseLines))];
        text += '\n';
      }
    };

    for (std::size_t h = 0; h < options.headings_per_doc; ++h) {
      const bool title = h == 0 || rng.chance(45);
      const std::size_t words = rng.between(options.min_body_words, options.max_body_words);
      if (title) {
        std::string name = kTitles[rng.below(count_of(kTitles))];
        const std::size_t style = rng.below(10);
        if (!text.empty()) text += '\n';
        if (style == 0) text += std::to_string(rng.between(1, 9)) + ". ";
        if (style == 1 || style == 2) name = upper(name);
        gold.push_back({text.size(), text.size() + name.size(), Level::Title});
        text += name + ":\n";
        plant_noise(h);
        text += body(rng, words);
      } else {
        const std::string name = kSubtitles[rng.below(count_of(kSubtitles))];
        gold.push_back({text.size(), text.size() + name.size(), Level::Subtitle});
        text += name + ": " + body(rng, words);
        plant_noise(h);
      }
    }
    if (options.headings_per_doc == 0) plant_noise(0);

    out.gold.emplace(id, std::move(gold));
    out.corpus.emplace_back(id, std::move(text));
  }
  return out;
}

}  // namespace tocseg
