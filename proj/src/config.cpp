#include "adlens/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>

#include "adlens/error.hpp"
#include "adlens/text.hpp"

namespace adlens::config {
namespace {

using Setter = std::function<void(Settings&, std::string_view)>;

template <class T>
T parse_number(std::string_view key, std::string_view v) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw Error(ErrorCode::kParse, "config key " + std::string(key) + ": invalid value \"" +
                                       std::string(v) + "\"");
  }
  return out;
}

template <class T>
Setter number(T mtlnet::ModelConfig::*field) {
  return [field](Settings& s, std::string_view v) { s.model.*field = parse_number<T>("model", v); };
}

template <class T>
Setter strategy_number(T train::StrategyConfig::*field) {
  return [field](Settings& s, std::string_view v) {
    s.strategy.*field = parse_number<T>("strategy", v);
  };
}

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"seq_len", number(&mtlnet::ModelConfig::seq_len)},
      {"embed_dim", number(&mtlnet::ModelConfig::embed_dim)},
      {"hidden_dim", number(&mtlnet::ModelConfig::hidden_dim)},
      {"repr_dim", number(&mtlnet::ModelConfig::repr_dim)},
      {"dropout", number(&mtlnet::ModelConfig::dropout)},
      {"l2", number(&mtlnet::ModelConfig::l2)},
      {"gamma", number(&mtlnet::ModelConfig::l2)},
      {"learning_rate", number(&mtlnet::ModelConfig::learning_rate)},
      {"lr", number(&mtlnet::ModelConfig::learning_rate)},
      {"batch_size", number(&mtlnet::ModelConfig::batch_size)},
      {"max_epochs", number(&mtlnet::ModelConfig::max_epochs)},
      {"patience", number(&mtlnet::ModelConfig::patience)},
      {"seed", number(&mtlnet::ModelConfig::seed)},
      {"strategy",
       [](Settings& s, std::string_view v) {
         const auto st = train::parse_strategy(v);
         if (!st) throw Error(ErrorCode::kParse, "unknown strategy \"" + std::string(v) + "\"");
         s.strategy.strategy = *st;
       }},
      {"gold_mix_fraction", strategy_number(&train::StrategyConfig::gold_mix_fraction)},
      {"weak_mix_fraction", strategy_number(&train::StrategyConfig::weak_mix_fraction)},
      {"split_seed", strategy_number(&train::StrategyConfig::split_seed)},
      {"model_seed", strategy_number(&train::StrategyConfig::model_seed)},
  };
  return table;
}

}  // namespace

void set_value(Settings& settings, std::string_view key, std::string_view value) {
  const auto it = setters().find(key);
  if (it == setters().end()) {
    throw Error(ErrorCode::kParse, "unknown config key \"" + std::string(key) + "\"");
  }
  try {
    it->second(settings, value);
  } catch (const Error& e) {
    throw Error(ErrorCode::kParse, "config key " + std::string(key) + ": " + e.what());
  }
}

void apply_override(Settings& settings, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw Error(ErrorCode::kParse, "expected key=value, got \"" + std::string(assignment) + "\"");
  }
  set_value(settings, text::trim(assignment.substr(0, eq)), text::trim(assignment.substr(eq + 1)));
}

void apply_stream(Settings& settings, std::istream& in) {
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view content = raw;
    content = content.substr(0, std::min(content.find('#'), content.find(';')));
    content = text::trim(content);
    if (content.empty() || content.front() == '[') continue;
    try {
      apply_override(settings, content);
    } catch (const Error& e) {
      throw Error(ErrorCode::kParse, "config line " + std::to_string(line) + ": " + e.what());
    }
  }
}

void apply_file(Settings& settings, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path.string());
  apply_stream(settings, in);
}

std::optional<std::filesystem::path> env_config_path() {
  const char* v = std::getenv(kConfigEnv);
  if (!v || !*v) return std::nullopt;
  return std::filesystem::path(v);
}

std::vector<std::string> known_keys() {
  std::vector<std::string> out;
  for (const auto& [k, _] : setters()) out.push_back(k);
  return out;
}

}  // namespace adlens::config
