#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "adlens/text.hpp"
#include "adlens/weaklabel.hpp"

namespace adlens::weaklabel {
namespace {

// Starter lexicon in the MFD style (unigram stems, '*' = prefix). The liberty
// block is kept separate because that foundation is scored with its own
// minimum-hit rule.
constexpr std::string_view kDefaultLexicon = R"(# care / harm
safe*	CareHarm
protect*	CareHarm
care	CareHarm
caring	CareHarm
health*	CareHarm
harm*	CareHarm
hurt*	CareHarm
suffer*	CareHarm
vulnerab*	CareHarm
help*	CareHarm
heal*	CareHarm
shelter*	CareHarm
danger*	CareHarm
sick*	CareHarm
compassion*	CareHarm
defend*	CareHarm
guard*	CareHarm
threat*	CareHarm
kill	CareHarm
cruel*	CareHarm
wound*	CareHarm
# fairness / cheating
fair*	FairnessCheating
unfair*	FairnessCheating
equal*	FairnessCheating
equit*	FairnessCheating
justice	FairnessCheating
right	FairnessCheating
rights	FairnessCheating
discriminat*	FairnessCheating
bias*	FairnessCheating
honest*	FairnessCheating
dishonest*	FairnessCheating
cheat*	FairnessCheating
fraud*	FairnessCheating
segregat*	FairnessCheating
impartial*	FairnessCheating
reciproc*	FairnessCheating
tolerant	FairnessCheating
# loyalty / betrayal
loyal*	LoyaltyBetrayal
communit*	LoyaltyBetrayal
famil*	LoyaltyBetrayal
nation*	LoyaltyBetrayal
country	LoyaltyBetrayal
patriot*	LoyaltyBetrayal
together	LoyaltyBetrayal
solidarity	LoyaltyBetrayal
unite*	LoyaltyBetrayal
team*	LoyaltyBetrayal
allies	LoyaltyBetrayal
fellow*	LoyaltyBetrayal
betray*	LoyaltyBetrayal
traitor*	LoyaltyBetrayal
member*	LoyaltyBetrayal
collective*	LoyaltyBetrayal
# authority / subversion
authorit*	AuthoritySubversion
obey*	AuthoritySubversion
obedien*	AuthoritySubversion
respect*	AuthoritySubversion
law	AuthoritySubversion
laws	AuthoritySubversion
lawful*	AuthoritySubversion
legal*	AuthoritySubversion
illegal*	AuthoritySubversion
order*	AuthoritySubversion
tradition*	AuthoritySubversion
leader*	AuthoritySubversion
duty	AuthoritySubversion
official*	AuthoritySubversion
command*	AuthoritySubversion
control*	AuthoritySubversion
comply*	AuthoritySubversion
complian*	AuthoritySubversion
trust*	AuthoritySubversion
subver*	AuthoritySubversion
defy*	AuthoritySubversion
# sanctity / degradation
sacred*	SanctityDegradation
holy	SanctityDegradation
pure*	SanctityDegradation
purity	SanctityDegradation
clean*	SanctityDegradation
god*	SanctityDegradation
religio*	SanctityDegradation
church*	SanctityDegradation
spirit*	SanctityDegradation
sin	SanctityDegradation
sins	SanctityDegradation
sinful	SanctityDegradation
disgust*	SanctityDegradation
dirty	SanctityDegradation
contagio*	SanctityDegradation
sacrific*	SanctityDegradation
wholesom*	SanctityDegradation
soul*	SanctityDegradation
pray*	SanctityDegradation
bless*	SanctityDegradation
divine*	SanctityDegradation
jesus	SanctityDegradation
allah	SanctityDegradation
# liberty / oppression
freedom*	LibertyOppression
liberty	LibertyOppression
liberties	LibertyOppression
free	LibertyOppression
oppress*	LibertyOppression
tyrann*	LibertyOppression
tyrant*	LibertyOppression
choice*	LibertyOppression
choose	LibertyOppression
mandat*	LibertyOppression
forc*	LibertyOppression
coerc*	LibertyOppression
dictator*	LibertyOppression
autonom*	LibertyOppression
restrict*	LibertyOppression
refus*	LibertyOppression
overreach*	LibertyOppression
dominat*	LibertyOppression
bully*	LibertyOppression
)";

}  // namespace

bool LexiconEntry::matches(std::string_view token) const {
  if (wildcard) return token.size() >= stem.size() && token.compare(0, stem.size(), stem) == 0;
  return token == stem;
}

Lexicon parse_lexicon(std::istream& in) {
  Lexicon lex;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string_view content = text::trim(std::string_view(raw).substr(0, hash));
    if (content.empty()) continue;
    const auto where = "lexicon line " + std::to_string(line) + ": ";
    const auto tab = content.find('\t');
    if (tab == std::string_view::npos) {
      throw Error(ErrorCode::kParse, where + "expected \"stem[*]<TAB>Foundation\"");
    }
    std::string stem = text::to_lower(text::trim(content.substr(0, tab)));
    const std::string_view name = text::trim(content.substr(tab + 1));
    LexiconEntry entry;
    if (!stem.empty() && stem.back() == '*') {
      entry.wildcard = true;
      stem.pop_back();
    }
    if (stem.empty()) throw Error(ErrorCode::kParse, where + "empty stem");
    const auto mf = parse_mf(name);
    if (!mf || *mf == MoralFoundation::kNone) {
      throw Error(ErrorCode::kParse, where + "unknown foundation \"" + std::string(name) + "\"");
    }
    entry.stem = std::move(stem);
    entry.foundation = *mf;
    lex.entries.push_back(std::move(entry));
  }
  return lex;
}

Lexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open lexicon " + path.string());
  return parse_lexicon(in);
}

const Lexicon& default_lexicon() {
  static const Lexicon lex = [] {
    std::istringstream in{std::string(kDefaultLexicon)};
    return parse_lexicon(in);
  }();
  return lex;
}

MfCounts score_mf(std::string_view body, const Lexicon& lexicon) {
  MfCounts counts;
  for (const auto& token : text::alpha_tokens(body)) {
    std::array<bool, kFoundationCount> hit{};
    for (const LexiconEntry& e : lexicon.entries) {
      if (e.matches(token)) hit[static_cast<std::size_t>(e.foundation)] = true;
    }
    for (std::size_t f = 0; f < kFoundationCount; ++f) {
      if (hit[f]) ++counts.counts[f];
    }
  }
  return counts;
}

MoralFoundation assign_mf(const MfCounts& counts, int liberty_min) {
  MoralFoundation best = MoralFoundation::kNone;
  int best_count = 0;
  for (std::size_t f = 0; f < kFoundationCount; ++f) {
    const auto foundation = static_cast<MoralFoundation>(f);
    const int c = counts.counts[f];
    if (foundation == MoralFoundation::kLiberty && c < liberty_min) continue;
    if (c > best_count) {
      best = foundation;
      best_count = c;
    }
  }
  return best;
}

}  // namespace adlens::weaklabel
