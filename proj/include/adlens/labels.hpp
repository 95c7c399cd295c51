#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace adlens {

// The 15 messaging themes, in annotation-guideline order. Unassigned marks
// an ad the weak labeler declined to label.
enum class Theme : int {
  kEncourageVaccination = 0,
  kVaccineMandate,
  kVaccineEquity,
  kVaccineEfficacy,
  kGovDistrust,
  kGovTrust,
  kVaccineRollout,
  kVaccineSymptom,
  kVaccineStatus,
  kVaccineReligion,
  kVaccineDevelopment,
  kCovidPlan,
  kVaccineMisinformation,
  kNaturalImmunity,
  kVote,
  kUnassigned,
};

inline constexpr std::size_t kThemeCount = 15;

// Six moral foundations plus None. The declaration order doubles as the
// tie-break order for lexicon-based assignment.
enum class MoralFoundation : int {
  kCare = 0,
  kFairness,
  kLoyalty,
  kAuthority,
  kSanctity,
  kLiberty,
  kNone,
};

inline constexpr std::size_t kFoundationCount = 6;
inline constexpr std::size_t kMfClassCount = 7;

enum class LabelSource { kGold, kWeak };

std::string_view theme_name(Theme theme);
std::string_view mf_name(MoralFoundation mf);
std::string_view source_name(LabelSource source);

// Accept canonical names ("VaccineMandate") case-insensitively, plus
// snake/space variants ("vaccine mandate", "vaccine_mandate").
std::optional<Theme> parse_theme(std::string_view text);
// Accepts "CareHarm", "Care", "care/harm", "care_harm" and "None".
std::optional<MoralFoundation> parse_mf(std::string_view text);
std::optional<LabelSource> parse_source(std::string_view text);

inline constexpr int index_of(Theme t) { return static_cast<int>(t); }
inline constexpr int index_of(MoralFoundation m) { return static_cast<int>(m); }

Theme theme_from_index(int index);
MoralFoundation mf_from_index(int index);

const std::array<Theme, kThemeCount>& all_themes();
const std::array<MoralFoundation, kMfClassCount>& all_mfs();

}  // namespace adlens
