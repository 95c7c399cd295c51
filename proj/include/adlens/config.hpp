#pragma once

// key = value configuration mirroring ModelConfig and StrategyConfig field
// names. '#' and ';' start comments; [section] headers are accepted and
// ignored.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adlens/mtlnet.hpp"
#include "adlens/train.hpp"

namespace adlens::config {

inline constexpr const char* kConfigEnv = "ADLENS_CONFIG";

struct Settings {
  mtlnet::ModelConfig model;
  train::StrategyConfig strategy;
};

// Throws kParse on an unknown key or a malformed value.
void set_value(Settings& settings, std::string_view key, std::string_view value);

void apply_stream(Settings& settings, std::istream& in);
void apply_file(Settings& settings, const std::filesystem::path& path);

// "key=value" override as given on the command line.
void apply_override(Settings& settings, std::string_view assignment);

// Path named by ADLENS_CONFIG, if set and non-empty.
std::optional<std::filesystem::path> env_config_path();

std::vector<std::string> known_keys();

}  // namespace adlens::config
