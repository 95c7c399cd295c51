#pragma once

// JSON checkpoint: model config plus every tensor in declared order and an
// FNV-1a checksum over the raw tensor bits.

#include <filesystem>
#include <iosfwd>
#include <string>

#include "adlens/mtlnet.hpp"

namespace adlens::mtlnet {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  ModelConfig config;
  ModelParams params;
};

std::string params_checksum(const ModelParams& params);

void write_checkpoint(std::ostream& out, const ModelConfig& cfg, const ModelParams& params);
void save_checkpoint(const std::filesystem::path& path, const ModelConfig& cfg,
                     const ModelParams& params);

// Throws kParse on malformed content, wrong version, shape mismatch or a
// checksum that does not match the tensors.
Checkpoint read_checkpoint(std::istream& in);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace adlens::mtlnet
