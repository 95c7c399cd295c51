#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "adlens/corpus.hpp"
#include "adlens/text.hpp"

namespace adlens {

Date parse_date(std::string_view text) {
  const auto fail = [&] {
    return Error(ErrorCode::kParse, "invalid date \"" + std::string(text) + "\" (want YYYY-MM-DD)");
  };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') throw fail();
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  const char* p = text.data();
  if (std::from_chars(p, p + 4, y).ptr != p + 4 || std::from_chars(p + 5, p + 7, m).ptr != p + 7 ||
      std::from_chars(p + 8, p + 10, d).ptr != p + 10) {
    throw fail();
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                        std::chrono::day{d}};
  if (!ymd.ok()) throw fail();
  return Date{ymd};
}

std::string format_date(Date date) {
  const std::chrono::year_month_day ymd{date};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

}  // namespace adlens

namespace adlens::corpus {
namespace {

using nlohmann::json;

Error line_error(std::size_t line, const std::string& message) {
  return Error(ErrorCode::kParse, "line " + std::to_string(line) + ": " + message);
}

double to_number(const json& v, std::string_view field) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec == std::errc() && ptr == s.data() + s.size()) return out;
  }
  throw Error(ErrorCode::kParse, "field \"" + std::string(field) + "\" is not a number");
}

double parse_double(std::string_view s, std::string_view field) {
  const std::string_view t = text::trim(s);
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw Error(ErrorCode::kParse, "field \"" + std::string(field) + "\" is not a number: \"" +
                                       std::string(s) + "\"");
  }
  return out;
}

ValueRange range_from_json(const json& v, std::string_view field) {
  ValueRange r;
  if (!v.is_object()) {
    throw Error(ErrorCode::kParse, "field \"" + std::string(field) + "\" must be an object");
  }
  for (auto key : {"lower", "lower_bound"}) {
    if (v.contains(key)) r.lower = to_number(v.at(key), field);
  }
  for (auto key : {"upper", "upper_bound"}) {
    if (v.contains(key)) r.upper = to_number(v.at(key), field);
  }
  // Open-ended API ranges ("1M+") carry no upper bound.
  if (!v.contains("upper") && !v.contains("upper_bound")) r.upper = r.lower;
  return r;
}

std::string string_field(const json& obj, const char* key, bool required) {
  if (!obj.contains(key) || obj.at(key).is_null()) {
    if (required) {
      throw Error(ErrorCode::kParse, std::string("missing required field \"") + key + "\"");
    }
    return {};
  }
  const json& v = obj.at(key);
  if (!v.is_string()) {
    throw Error(ErrorCode::kParse, std::string("field \"") + key + "\" must be a string");
  }
  return v.get<std::string>();
}

AdRecord record_from_json(const json& obj) {
  if (!obj.is_object()) throw Error(ErrorCode::kParse, "row is not a JSON object");
  AdRecord r;
  r.id = string_field(obj, "id", true);
  r.body = string_field(obj, "body", true);
  r.funding_entity = string_field(obj, "funding_entity", false);
  r.entity_type = parse_entity_type(string_field(obj, "entity_type", false));
  r.political_view = parse_political_view(string_field(obj, "political_view", false));
  if (obj.contains("spend")) r.spend = range_from_json(obj.at("spend"), "spend");
  if (obj.contains("impressions")) {
    r.impressions = range_from_json(obj.at("impressions"), "impressions");
  }
  if (obj.contains("demographics") && !obj.at("demographics").is_null()) {
    for (const json& d : obj.at("demographics")) {
      DemographicShare s;
      s.age = parse_age_bucket(string_field(d, "age", false));
      s.gender = parse_gender(string_field(d, "gender", false));
      s.share = to_number(d.at("share"), "demographics.share");
      r.demographics.push_back(s);
    }
  }
  if (obj.contains("regions") && !obj.at("regions").is_null()) {
    for (const json& d : obj.at("regions")) {
      RegionShare s;
      s.state = string_field(d, "state", true);
      s.share = to_number(d.at("share"), "regions.share");
      r.regions.push_back(std::move(s));
    }
  }
  r.start_date = parse_date(string_field(obj, "start_date", true));
  return r;
}

void add_record(Dataset& out, std::set<std::string>& seen, AdRecord record, std::size_t line) {
  try {
    validate_record(record);
  } catch (const Error& e) {
    throw line_error(line, e.what());
  }
  if (!seen.insert(record.id).second) {
    throw line_error(line, "duplicate id \"" + record.id + "\"");
  }
  out.records.push_back(std::move(record));
}

// RFC 4180 records; returns false at end of input. `line` is advanced past
// every physical line consumed.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  char c = 0;
  while (in.get(c)) {
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      ++line;
      break;
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  if (!any) return false;
  if (in_quotes) throw line_error(line, "unterminated quoted field");
  fields.push_back(std::move(field));
  return true;
}

std::vector<std::string> split_on(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t pos = s.find(sep, start);
    const std::size_t end = pos == std::string_view::npos ? s.size() : pos;
    const auto piece = text::trim(s.substr(start, end - start));
    if (!piece.empty()) parts.emplace_back(piece);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

Dataset parse_ads_jsonl(std::istream& in) {
  Dataset out;
  std::set<std::string> seen;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (text::trim(raw).empty()) continue;
    AdRecord record;
    try {
      record = record_from_json(json::parse(raw));
    } catch (const json::exception& e) {
      throw line_error(line, std::string("malformed JSON: ") + e.what());
    } catch (const Error& e) {
      throw line_error(line, e.what());
    }
    add_record(out, seen, std::move(record), line);
  }
  return out;
}

Dataset parse_ads_csv(std::istream& in) {
  Dataset out;
  std::set<std::string> seen;
  std::vector<std::string> fields;
  std::size_t line = 1;
  if (!read_csv_record(in, fields, line)) return out;
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < fields.size(); ++i) column[text::to_lower(text::trim(fields[i]))] = i;
  for (const char* required : {"id", "body", "start_date"}) {
    if (!column.count(required)) {
      throw line_error(1, std::string("header lacks required column \"") + required + "\"");
    }
  }
  std::size_t record_line = line;
  while (read_csv_record(in, fields, line)) {
    const std::size_t this_line = record_line;
    record_line = line;
    if (fields.size() == 1 && text::trim(fields[0]).empty()) continue;
    const auto get = [&](const char* name) -> std::string {
      auto it = column.find(name);
      if (it == column.end() || it->second >= fields.size()) return {};
      return fields[it->second];
    };
    AdRecord r;
    try {
      r.id = get("id");
      r.body = get("body");
      if (r.id.empty()) throw Error(ErrorCode::kParse, "missing required field \"id\"");
      if (column.at("body") >= fields.size()) {
        throw Error(ErrorCode::kParse, "missing required field \"body\"");
      }
      r.funding_entity = get("funding_entity");
      r.entity_type = parse_entity_type(get("entity_type"));
      r.political_view = parse_political_view(get("political_view"));
      const auto num = [&](const char* name) {
        const std::string v = get(name);
        return v.empty() ? 0.0 : parse_double(v, name);
      };
      r.spend = {num("spend_lower"), num("spend_upper")};
      r.impressions = {num("impressions_lower"), num("impressions_upper")};
      for (const auto& item : split_on(get("demographics"), ';')) {
        const auto parts = split_on(item, ':');
        if (parts.size() != 3) {
          throw Error(ErrorCode::kParse, "demographic entry \"" + item + "\" is not age:gender:share");
        }
        r.demographics.push_back({parse_age_bucket(parts[0]), parse_gender(parts[1]),
                                  parse_double(parts[2], "demographics.share")});
      }
      for (const auto& item : split_on(get("regions"), ';')) {
        const auto parts = split_on(item, ':');
        if (parts.size() != 2) {
          throw Error(ErrorCode::kParse, "region entry \"" + item + "\" is not state:share");
        }
        r.regions.push_back({parts[0], parse_double(parts[1], "regions.share")});
      }
      r.start_date = parse_date(text::trim(get("start_date")));
    } catch (const Error& e) {
      throw line_error(this_line, e.what());
    }
    add_record(out, seen, std::move(r), this_line);
  }
  return out;
}

Dataset load_ads(const std::filesystem::path& path, AdFormat format) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open ads file " + path.string());
  return format == AdFormat::kJsonl ? parse_ads_jsonl(in) : parse_ads_csv(in);
}

void write_ads_jsonl(std::ostream& out, const Dataset& dataset) {
  for (const AdRecord& r : dataset.records) {
    json obj;
    obj["id"] = r.id;
    obj["body"] = r.body;
    obj["funding_entity"] = r.funding_entity;
    obj["entity_type"] = entity_type_name(r.entity_type);
    obj["political_view"] = political_view_name(r.political_view);
    obj["spend"] = {{"lower", r.spend.lower}, {"upper", r.spend.upper}};
    obj["impressions"] = {{"lower", r.impressions.lower}, {"upper", r.impressions.upper}};
    json demo = json::array();
    for (const auto& d : r.demographics) {
      demo.push_back({{"age", age_bucket_name(d.age)},
                      {"gender", gender_name(d.gender)},
                      {"share", d.share}});
    }
    obj["demographics"] = std::move(demo);
    json regions = json::array();
    for (const auto& s : r.regions) regions.push_back({{"state", s.state}, {"share", s.share}});
    obj["regions"] = std::move(regions);
    obj["start_date"] = format_date(r.start_date);
    out << obj.dump() << '\n';
  }
}

std::vector<LabelPair> parse_labels_jsonl(std::istream& in, LabelSource default_source) {
  std::vector<LabelPair> labels;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (text::trim(raw).empty()) continue;
    try {
      const json obj = json::parse(raw);
      LabelPair p;
      p.ad_id = string_field(obj, "ad_id", true);
      const std::string theme = string_field(obj, "theme", true);
      const std::string mf = string_field(obj, "mf", true);
      const auto t = parse_theme(theme);
      if (!t) throw Error(ErrorCode::kParse, "unknown theme \"" + theme + "\"");
      const auto m = parse_mf(mf);
      if (!m) throw Error(ErrorCode::kParse, "unknown moral foundation \"" + mf + "\"");
      p.theme = *t;
      p.mf = *m;
      p.source = default_source;
      if (obj.contains("source")) {
        const auto s = parse_source(string_field(obj, "source", false));
        if (!s) throw Error(ErrorCode::kParse, "unknown label source");
        p.source = *s;
      }
      labels.push_back(std::move(p));
    } catch (const json::exception& e) {
      throw line_error(line, std::string("malformed JSON: ") + e.what());
    } catch (const Error& e) {
      throw line_error(line, e.what());
    }
  }
  return labels;
}

std::vector<LabelPair> load_labels(const std::filesystem::path& path, LabelSource default_source) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open labels file " + path.string());
  return parse_labels_jsonl(in, default_source);
}

void write_labels_jsonl(std::ostream& out, std::span<const LabelPair> labels) {
  for (const LabelPair& p : labels) {
    json obj;
    obj["ad_id"] = p.ad_id;
    obj["theme"] = theme_name(p.theme);
    obj["mf"] = mf_name(p.mf);
    obj["source"] = source_name(p.source);
    out << obj.dump() << '\n';
  }
}

void attach_labels(Dataset& dataset, std::span<const LabelPair> labels) {
  std::set<std::string_view> ids;
  for (const AdRecord& r : dataset.records) ids.insert(r.id);
  for (const LabelPair& p : labels) {
    if (!ids.count(p.ad_id)) {
      throw Error(ErrorCode::kNotFound, "label references unknown ad id \"" + p.ad_id + "\"");
    }
  }
  for (const LabelPair& p : labels) dataset.labels[p.ad_id] = p;
}

TimeSeries parse_deaths_csv(std::istream& in) {
  TimeSeries ts;
  ts.name = "Deaths(t)";
  std::string raw;
  std::size_t line = 0;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++line;
    const auto trimmed = text::trim(raw);
    if (trimmed.empty()) continue;
    if (!header_seen) {
      if (text::normalize_content(trimmed) != "date,new_deaths") {
        throw line_error(line, "expected header \"date,new_deaths\"");
      }
      header_seen = true;
      continue;
    }
    const auto comma = trimmed.find(',');
    if (comma == std::string_view::npos) throw line_error(line, "expected two columns");
    try {
      const Date d = parse_date(text::trim(trimmed.substr(0, comma)));
      const double v = parse_double(trimmed.substr(comma + 1), "new_deaths");
      if (!std::isfinite(v)) throw Error(ErrorCode::kParse, "non-finite death count");
      if (!ts.dates.empty() && d != ts.dates.back() + std::chrono::days{1}) {
        throw Error(ErrorCode::kParse, "dates must be consecutive days, got " + format_date(d) +
                                           " after " + format_date(ts.dates.back()));
      }
      ts.dates.push_back(d);
      ts.values.push_back(v);
    } catch (const Error& e) {
      throw line_error(line, e.what());
    }
  }
  if (!header_seen) throw Error(ErrorCode::kParse, "deaths CSV is empty");
  return ts;
}

TimeSeries load_deaths_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open deaths file " + path.string());
  return parse_deaths_csv(in);
}

void write_deaths_csv(std::ostream& out, const TimeSeries& deaths) {
  out << "date,new_deaths\n";
  for (std::size_t i = 0; i < deaths.size(); ++i) {
    out << format_date(deaths.dates[i]) << ',' << json(deaths.values[i]).dump() << '\n';
  }
}

std::string dataset_digest(const Dataset& dataset) {
  std::uint64_t h = text::fnv1a64("adlens-dataset-v1");
  for (const AdRecord& r : dataset.records) {
    h = text::fnv1a64(r.id, h);
    h = text::fnv1a64(std::string_view("\x1f", 1), h);
    h = text::fnv1a64(r.body, h);
    h = text::fnv1a64(std::string_view("\x1e", 1), h);
  }
  for (const auto& [id, p] : dataset.labels) {
    h = text::fnv1a64(id, h);
    h = text::fnv1a64(theme_name(p.theme), h);
    h = text::fnv1a64(mf_name(p.mf), h);
    h = text::fnv1a64(source_name(p.source), h);
  }
  return text::hex64(h);
}

}  // namespace adlens::corpus
