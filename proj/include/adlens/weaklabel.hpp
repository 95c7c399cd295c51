#pragma once

// Weak labelers: nearest-phrase theme assignment over sentence vectors and
// lexicon-count moral-foundation assignment, plus cluster purity and label
// quality scoring against gold annotations.

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "adlens/corpus.hpp"
#include "adlens/embed.hpp"
#include "adlens/labels.hpp"
#include "adlens/metrics.hpp"

namespace adlens::weaklabel {

// ---- moral foundations -----------------------------------------------------

struct LexiconEntry {
  std::string stem;
  bool wildcard = false;  // trailing '*': prefix match
  MoralFoundation foundation = MoralFoundation::kCare;

  bool matches(std::string_view token) const;
};

struct Lexicon {
  std::vector<LexiconEntry> entries;
  int liberty_min = 2;
};

// One "stem[*]\tFoundationName" per line; '#' starts a comment.
Lexicon parse_lexicon(std::istream& in);
Lexicon load_lexicon(const std::filesystem::path& path);
// Small built-in lexicon covering all six foundations.
const Lexicon& default_lexicon();

// Indexed by foundation (Care .. Liberty); None is never counted.
struct MfCounts {
  std::array<int, kFoundationCount> counts{};

  int operator[](MoralFoundation f) const { return counts.at(static_cast<std::size_t>(f)); }
  int& operator[](MoralFoundation f) { return counts.at(static_cast<std::size_t>(f)); }
  bool operator==(const MfCounts&) const = default;
};

// Each token adds one to every foundation it matches at least one entry of.
MfCounts score_mf(std::string_view body, const Lexicon& lexicon);

// Argmax over eligible foundations with a positive count; Liberty is only
// eligible at liberty_min hits or more. Ties go to the earlier foundation.
MoralFoundation assign_mf(const MfCounts& counts, int liberty_min);

// ---- themes ----------------------------------------------------------------

struct Phrase {
  Theme theme = Theme::kUnassigned;
  std::string text;
  embed::Vector vector;
};

struct PhraseBank {
  std::vector<Phrase> phrases;

  std::size_t dim() const { return phrases.empty() ? 0 : phrases.front().vector.size(); }
};

using PhraseTexts = std::vector<std::pair<Theme, std::string>>;

// Built-in theme phrase list (every theme covered).
const PhraseTexts& default_phrase_texts();
// JSON object: theme name -> array of phrase strings.
PhraseTexts parse_phrase_json(std::istream& in);
PhraseTexts load_phrase_file(const std::filesystem::path& path);

// Vectors come from sidecar keys "theme:<name>:<idx>" (idx counts within a
// theme) or the hashing fallback. Every theme must be represented.
PhraseBank build_phrase_bank(const PhraseTexts& texts, const embed::EmbeddingSource& source);

inline constexpr double kDefaultThreshold = 0.5;

struct ThemeAssignment {
  Theme theme = Theme::kUnassigned;
  double distance = 1.0;        // cosine distance to the nearest phrase
  std::size_t phrase_index = 0;  // index of the nearest phrase
};

ThemeAssignment assign_theme(std::span<const double> doc, const PhraseBank& bank, double threshold);

// Mean silhouette with cosine distance; singleton-cluster points contribute
// 0. `labels` and `points` are parallel. Throws when fewer than two clusters.
double silhouette_score(std::span<const int> labels, std::span<const embed::Vector> points);

// Unassigned documents are left out.
double silhouette(const std::map<std::string, Theme>& assignments,
                  const std::map<std::string, embed::Vector>& vectors);

struct QualityReport {
  TaskMetrics theme;
  TaskMetrics mf;
};

// Scored over ad ids present in both maps.
QualityReport weak_quality(const std::map<std::string, corpus::LabelPair>& weak,
                           const std::map<std::string, corpus::LabelPair>& gold);

struct WeakLabelRun {
  std::vector<corpus::LabelPair> labels;  // one per record, input order
  std::vector<double> distances;
  std::vector<MfCounts> mf_counts;
  std::optional<double> silhouette;  // absent with fewer than two clusters
};

WeakLabelRun generate_weak_labels(const corpus::Dataset& dataset, const Lexicon& lexicon,
                                  const PhraseBank& bank, const embed::EmbeddingSource& source,
                                  double threshold);

}  // namespace adlens::weaklabel
