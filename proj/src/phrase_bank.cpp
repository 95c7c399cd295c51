#include <fstream>
#include <set>

#include <json.hpp>

#include "adlens/weaklabel.hpp"

namespace adlens::weaklabel {
namespace {

struct ThemePhrases {
  Theme theme;
  std::vector<std::string_view> phrases;
};

const std::vector<ThemePhrases>& builtin_phrases() {
  static const std::vector<ThemePhrases> table = {
      {Theme::kEncourageVaccination,
       {"Get your vaccine",
        "Get the shot",
        "Get jabbed",
        "Protect our community by getting vaccinated",
        "We can all do our part",
        "Your shot matters",
        "I encourage everyone to get their shot when they can",
        "Getting vaccinated is the best way to protect yourself and everyone around you",
        "Take your best shot",
        "Be the part of the solution",
        "Win lottery by getting vaccinated",
        "Sleeve up",
        "Vaccines save lives",
        "Collect your vaccine incentives",
        "Take the vaccine for your family, for your friends, for your country",
        "Get vaccinated",
        "Get free vaccine and free lunch",
        "Get boosted",
        "Vax up",
        "Call us and we will answer your questions regarding COVID vaccine",
        "Do your part to stop pandemic",
        "This is our best shot",
        "Join a discussion about vaccine"}},
      {Theme::kVaccineMandate,
       {"Forcing people to take experimental vaccines is oppression",
        "The vaccine has nothing to do with COVID-19, it's about the vaccine passport and tyranny",
        "The vaccine mandate is unconstitutional",
        "I'm not against the vaccine but I am against the mandate",
        "I have freedom to choose not to take the vaccine",
        "I choose not to take the vaccine",
        "I am free to refuse the vaccine",
        "It is not about COVID, it is about control",
        "My body my choice",
        "Medical segregation based on vaccine mandates is discrimination",
        "The vaccine mandate violates my rights",
        "I support vaccine mandate",
        "Firing over vaccine mandates is oppression",
        "Vaccine passports are medical tyranny",
        "I won't let the government tell me what I should do with my body",
        "I won't have the government tell me what to do",
        "The vaccine mandate is not oppression because vaccines lower hospitalizations and death rates",
        "The vaccine mandate is not oppression because it will help to end this pandemic",
        "The vaccine mandate will help us end the pandemic",
        "If you don't get the vaccine based on your freedom of choice, don't come crawling to the "
        "emergency room when you get COVID",
        "If you refuse a free FDA-approved vaccine for non-medical reasons, then the government "
        "shouldn't continue to give you free COVID tests",
        "You are free not to take the vaccine, businesses are also free to deny you entry",
        "We need a vaccine mandate to end this pandemic",
        "You are free not to take the vaccine, businesses are free to protect their customers and "
        "employees",
        "Support vaccine passport",
        "If you choose not to take the vaccine, you have to deal with the consequences",
        "We don't support vaccine passport",
        "If it is your body your choice, then insurance companies should stop paying for your "
        "hospitalization costs for COVID",
        "Check vaccine card for events",
        "Airlines require vaccine passport",
        "Proof of vaccine is required",
        "Vaccine passport is useful for reopen",
        "Workers have declined COVID-19 Vaccine",
        "Falsely labeling the injection as a vaccine is illegal"}},
      {Theme::kVaccineEquity,
       {"Vaccine should be available for everyone",
        "Vaccine should be free of cost",
        "Everyone has right to get free COVID vaccine",
        "We don't have equal access to vaccine",
        "We should ensure vaccine access to vulnerable communities"}},
      {Theme::kVaccineEfficacy,
       {"The vaccine works",
        "The vaccine is safe",
        "Vaccines do work, ask a doctor or consult with an expert",
        "The COVID vaccine helps to stop the spread",
        "Unvaccinated people are dying at a rapid rate from COVID-19",
        "There is a lot of research supporting that vaccines work",
        "The research on the COVID vaccine has been going on for a long time",
        "Millions have been vaccinated with only mild side effects",
        "Millions have been safely vaccinated against COVID",
        "The benefits of the vaccine outweigh its risks",
        "Vaccine is safe for pregnant woman",
        "The vaccine has benefits",
        "The vaccine is safe for women and kids",
        "The vaccine won't make you sick",
        "The vaccine isn't dangerous",
        "The vaccine won't kill you",
        "The COVID vaccine isn't a death jab",
        "The COVID vaccine doesn't harm women and kids",
        "COVID-19 vaccine ingredients are safe"}},
      {Theme::kGovDistrust,
       {"We have lack of trust in the government",
        "The government is a total failure",
        "Never trust the government",
        "Biden is a failure",
        "Biden lied people die",
        "The government and Fauci have been dishonest",
        "The government always lies",
        "The government has a strong record of screwing things up",
        "The government is good at screwing things up",
        "The government is screwing things up",
        "The government is lying",
        "The government only cares about money",
        "The government doesn't work logically",
        "Do not trust the government",
        "The government doesn't care about people's health",
        "The government won't tell you the truth about the vaccine",
        "Biden will not hold China accountable"}},
      {Theme::kGovTrust,
       {"We trust the government",
        "Biden is tackling COVID",
        "The government cares for people",
        "We are thankful to the government for the vaccine availability",
        "Hats off to the government for tackling the pandemic",
        "It is a good thing to be skeptical of the government, but they are right about the COVID "
        "vaccine",
        "It is a good thing to be skeptical of the government, but they haven't lied about the "
        "COVID vaccine",
        "Biden is helping to end the pandemic",
        "The government can be corrupt, but they are telling the truth about the COVID vaccine",
        "Trump initiated COVID vaccine",
        "The government can be corrupt, but they are not lying about the COVID vaccine",
        "Biden will hold China accountable"}},
      {Theme::kVaccineRollout,
       {"Vaccine appointment is available",
        "Schedule your vaccine appointment",
        "No appointment needed",
        "Walk-in vaccine clinic is available",
        "Drive through vaccine site is available",
        "Mobile clinic is available here",
        "Vaccine clinic has been set up",
        "New vaccine center has been opened",
        "CDC recommends vaccine for kids",
        "FDA authorized COVID vaccine for children ages 5 to 11 years old"}},
      {Theme::kVaccineSymptom,
       {"I got fever after taking the vaccine",
        "Know the vaccine symptom",
        "COVID vaccines can cause blood clots",
        "The vaccine has side effects",
        "The vaccine is dangerous for people with medical conditions",
        "I won't take the vaccine due to medical reasons"}},
      {Theme::kVaccineStatus,
       {"Half of the population are fully vaccinated",
        "Here is the vaccine statistics",
        "Update of vaccine status",
        "COVID-19 update",
        "COVID death is real",
        "Sign up fod vaccine update",
        "We need volunteers for vaccine site",
        "Vaccination rate is slow",
        "Vaccination rate is high",
        "Infection rate is lower",
        "COVID vaccine information is here",
        "The pandemic is not a lie, hospitalizations are on the rise"}},
      {Theme::kVaccineReligion,
       {"The vaccine is against religion",
        "The vaccines are the mark of the beast",
        "The vaccine is a tool of Satan",
        "The vaccine is haram",
        "The vaccine is not halal",
        "I will protect my body from a man made vaccine",
        "I put it all in God's hands",
        "God will decide our fate",
        "Allah will protect us",
        "The vaccine contains bovine, which conflicts with my religion",
        "The vaccine contains aborted fetal tissue which is against my religion",
        "The vaccine contains pork, muslims can't take the vaccine",
        "Jesus will protect me",
        "The vaccine doesn't protect you from getting or spreading COVID, God does",
        "The COVID vaccine is another religion",
        "The vaccine is not against religion, get the vaccine",
        "No religion ask members to refuse the vaccine",
        "Religious exemptions are bogus",
        "When turning in your religious exemption forms for the vaccine, remember ignorance is not "
        "a religion",
        "Disregard for others' lives isn't part of your religion",
        "Jesus is trying to protect us from COVID by divinely inspiring scientists to create "
        "vaccines"}},
      {Theme::kVaccineDevelopment,
       {"COVID vaccine research has been going on for a while",
        "Plenty of research has been done on the COVID vaccine",
        "The technologies used to develop the COVID-19 vaccines have been in development for years "
        "to prepare for outbreaks of infectious viruses",
        "The testing processes for the vaccines were thorough didn't skip any steps",
        "The vaccine received FDA approval",
        "Vaccine uses mRNA technology",
        "the vaccine is not properly tested, it has been developed too quickly",
        "COVID-19 vaccines have not been through the same rigorous testing as other vaccines",
        "The COVID vaccine is experimental",
        "The COVID vaccine was rushed through trials",
        "The approval of the experimental vaccine was rushed"}},
      {Theme::kCovidPlan,
       {"Expand vaccine distribution",
        "We are working on vaccine distribution",
        "COVID rescue plan",
        "Cash relief",
        "More COVID testing center",
        "Seting up vaccine clinic",
        "Support small business",
        "Reopen country",
        "Reopen school",
        "Rebuilding economy",
        "COVID stimulus check",
        "Unemployment benefit",
        "Expand mask and PPE supply"}},
      {Theme::kVaccineMisinformation,
       {"Animal shelters are empty because Dr Fauci allowed experimenting of various COVID "
        "vaccines/drugs on dogs and other domestic pets",
        "Fauci tortures dogs and puppies",
        "The COVID vaccine is a ploy to microchip people",
        "Don't trust vaccine conspiracy",
        "Bill Gates wants to use vaccines to implant microchips in people",
        "Globalists support a covert mass chip implantation through the COVID vaccine",
        "There is aborted fetal tissue in the COVID Vaccines",
        "COVID vaccines contain aborted fetal cells",
        "The COVID vaccine will make you sterile",
        "COVID vaccine will affect your fertility",
        "The vaccine will not make you sterile",
        "The COVID vaccine will not affect your fertility",
        "No difference if fertility rate has been found between vaccinated and unvaccinated people",
        "Vaccines were tested on fetal tissues, but do not contain fetal cells",
        "Vaccines do not contain aborted fetal cells",
        "Vaccine misinformation is floating around",
        "Don't believe in vaccine misinformation"}},
      {Theme::kNaturalImmunity,
       {"Natural methods of protection against the disease are better than vaccines",
        "Herd immunity is broad, protective, and durable",
        "Natural immunity has higher level of protection than the vaccine",
        "Embrace population immunity",
        "I trust my immune system",
        "I have antibodies I do not need the vaccine",
        "Natural immunity is effective",
        "Natural immunity would require a lot of people getting sick",
        "Experts recommend the vaccine over natural immunity",
        "The vaccine has better long term protection than to natural immunity",
        "Natural immunity is not effective",
        "Experts aren't sure how long hybrid immunity lasts",
        "Natural immunity is highly variable"}},
      {Theme::kVote, {"Please vote", "Your vote matters", "Go vote", "Vote today"}},
  };
  return table;
}

void check_coverage(const PhraseTexts& texts) {
  std::set<Theme> seen;
  for (const auto& [theme, text] : texts) {
    if (theme == Theme::kUnassigned) {
      throw Error(ErrorCode::kInvalidArgument, "phrase bank cannot target Unassigned");
    }
    seen.insert(theme);
  }
  for (Theme t : all_themes()) {
    if (!seen.count(t)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "phrase bank has no phrase for theme " + std::string(theme_name(t)));
    }
  }
}

}  // namespace

const PhraseTexts& default_phrase_texts() {
  static const PhraseTexts texts = [] {
    PhraseTexts out;
    for (const auto& group : builtin_phrases()) {
      for (auto p : group.phrases) out.emplace_back(group.theme, std::string(p));
    }
    return out;
  }();
  return texts;
}

PhraseTexts parse_phrase_json(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("phrase bank: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::kParse, "phrase bank must be a JSON object");
  PhraseTexts out;
  // Canonical theme order rather than file key order, so results do not
  // depend on how the file was written.
  std::map<Theme, std::vector<std::string>> by_theme;
  for (const auto& [key, value] : doc.items()) {
    const auto theme = parse_theme(key);
    if (!theme || *theme == Theme::kUnassigned) {
      throw Error(ErrorCode::kParse, "phrase bank: unknown theme \"" + key + "\"");
    }
    if (!value.is_array()) {
      throw Error(ErrorCode::kParse, "phrase bank: theme \"" + key + "\" must map to an array");
    }
    for (const auto& p : value) {
      if (!p.is_string()) throw Error(ErrorCode::kParse, "phrase bank: phrases must be strings");
      by_theme[*theme].push_back(p.get<std::string>());
    }
  }
  for (auto& [theme, phrases] : by_theme) {
    for (auto& p : phrases) out.emplace_back(theme, std::move(p));
  }
  return out;
}

PhraseTexts load_phrase_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open phrase bank " + path.string());
  return parse_phrase_json(in);
}

PhraseBank build_phrase_bank(const PhraseTexts& texts, const embed::EmbeddingSource& source) {
  check_coverage(texts);
  PhraseBank bank;
  std::map<Theme, std::size_t> next_index;
  for (const auto& [theme, text] : texts) {
    const std::size_t idx = next_index[theme]++;
    const std::string key = "theme:" + std::string(theme_name(theme)) + ":" + std::to_string(idx);
    bank.phrases.push_back({theme, text, embed::lookup_or_hash(key, text, source)});
  }
  return bank;
}

}  // namespace adlens::weaklabel
