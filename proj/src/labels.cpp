#include "adlens/labels.hpp"

#include <algorithm>
#include <cctype>

#include "adlens/error.hpp"

namespace adlens {
namespace {

constexpr std::array<std::string_view, kThemeCount> kThemeNames = {
    "EncourageVaccination", "VaccineMandate",     "VaccineEquity",
    "VaccineEfficacy",      "GovDistrust",        "GovTrust",
    "VaccineRollout",       "VaccineSymptom",     "VaccineStatus",
    "VaccineReligion",      "VaccineDevelopment", "CovidPlan",
    "VaccineMisinformation", "NaturalImmunity",   "Vote",
};

constexpr std::array<std::string_view, kMfClassCount> kMfNames = {
    "CareHarm",           "FairnessCheating",    "LoyaltyBetrayal",
    "AuthoritySubversion", "SanctityDegradation", "LibertyOppression",
    "None",
};

constexpr std::array<std::string_view, kMfClassCount> kMfShortNames = {
    "care", "fairness", "loyalty", "authority", "sanctity", "liberty", "none",
};

// Lowercase and drop separators so "Vaccine Mandate", "vaccine_mandate" and
// "care/harm" compare equal to their canonical spellings.
std::string squash(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

}  // namespace

std::string_view theme_name(Theme theme) {
  if (theme == Theme::kUnassigned) return "Unassigned";
  return kThemeNames.at(static_cast<std::size_t>(theme));
}

std::string_view mf_name(MoralFoundation mf) {
  return kMfNames.at(static_cast<std::size_t>(mf));
}

std::string_view source_name(LabelSource source) {
  return source == LabelSource::kGold ? "gold" : "weak";
}

std::optional<Theme> parse_theme(std::string_view text) {
  const std::string key = squash(text);
  if (key == "unassigned") return Theme::kUnassigned;
  for (std::size_t i = 0; i < kThemeNames.size(); ++i) {
    if (squash(kThemeNames[i]) == key) return static_cast<Theme>(i);
  }
  return std::nullopt;
}

std::optional<MoralFoundation> parse_mf(std::string_view text) {
  const std::string key = squash(text);
  for (std::size_t i = 0; i < kMfNames.size(); ++i) {
    if (squash(kMfNames[i]) == key || kMfShortNames[i] == key) {
      return static_cast<MoralFoundation>(i);
    }
  }
  return std::nullopt;
}

std::optional<LabelSource> parse_source(std::string_view text) {
  const std::string key = squash(text);
  if (key == "gold") return LabelSource::kGold;
  if (key == "weak") return LabelSource::kWeak;
  return std::nullopt;
}

Theme theme_from_index(int index) {
  if (index < 0 || index > static_cast<int>(kThemeCount)) {
    throw Error(ErrorCode::kInvalidArgument,
                "theme index out of range: " + std::to_string(index));
  }
  return static_cast<Theme>(index);
}

MoralFoundation mf_from_index(int index) {
  if (index < 0 || index >= static_cast<int>(kMfClassCount)) {
    throw Error(ErrorCode::kInvalidArgument,
                "moral foundation index out of range: " + std::to_string(index));
  }
  return static_cast<MoralFoundation>(index);
}

const std::array<Theme, kThemeCount>& all_themes() {
  static const auto themes = [] {
    std::array<Theme, kThemeCount> out{};
    for (std::size_t i = 0; i < kThemeCount; ++i) out[i] = static_cast<Theme>(i);
    return out;
  }();
  return themes;
}

const std::array<MoralFoundation, kMfClassCount>& all_mfs() {
  static const auto mfs = [] {
    std::array<MoralFoundation, kMfClassCount> out{};
    for (std::size_t i = 0; i < kMfClassCount; ++i) {
      out[i] = static_cast<MoralFoundation>(i);
    }
    return out;
  }();
  return mfs;
}

}  // namespace adlens
