#include "adlens/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "adlens/error.hpp"
#include "adlens/text.hpp"

namespace adlens::mtlnet {
namespace {

using nlohmann::json;

constexpr std::string_view kFormat = "adlens-checkpoint";

json config_json(const ModelConfig& c) {
  return {{"seq_len", c.seq_len},         {"embed_dim", c.embed_dim},
          {"hidden_dim", c.hidden_dim},   {"repr_dim", c.repr_dim},
          {"theme_classes", c.theme_classes}, {"mf_classes", c.mf_classes},
          {"dropout", c.dropout},         {"l2", c.l2},
          {"learning_rate", c.learning_rate}, {"batch_size", c.batch_size},
          {"max_epochs", c.max_epochs},   {"patience", c.patience},
          {"seed", c.seed}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.seq_len = j.at("seq_len").get<std::size_t>();
  c.embed_dim = j.at("embed_dim").get<std::size_t>();
  c.hidden_dim = j.at("hidden_dim").get<std::size_t>();
  c.repr_dim = j.at("repr_dim").get<std::size_t>();
  c.theme_classes = j.at("theme_classes").get<std::size_t>();
  c.mf_classes = j.at("mf_classes").get<std::size_t>();
  c.dropout = j.at("dropout").get<double>();
  c.l2 = j.at("l2").get<double>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.max_epochs = j.at("max_epochs").get<std::size_t>();
  c.patience = j.at("patience").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

}  // namespace

std::string params_checksum(const ModelParams& params) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& t : tensors(params)) {
    h = text::fnv1a64(t.name, h);
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      const auto bits = std::bit_cast<std::uint64_t>(t.data[i]);
      char bytes[8];
      for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xff);
      h = text::fnv1a64(std::string_view(bytes, 8), h);
    }
  }
  return text::hex64(h);
}

void write_checkpoint(std::ostream& out, const ModelConfig& cfg, const ModelParams& params) {
  check_shapes(params, cfg);
  json tensors_json = json::array();
  for (const auto& t : tensors(params)) {
    tensors_json.push_back({{"name", t.name},
                            {"rows", t.rows},
                            {"cols", t.cols},
                            {"data", std::vector<double>(t.data, t.data + t.size())}});
  }
  const json doc = {{"format", kFormat},
                    {"version", kCheckpointVersion},
                    {"config", config_json(cfg)},
                    {"tensors", std::move(tensors_json)},
                    {"checksum", params_checksum(params)}};
  out << doc.dump() << '\n';
}

void save_checkpoint(const std::filesystem::path& path, const ModelConfig& cfg,
                     const ModelParams& params) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write checkpoint " + path.string());
  write_checkpoint(out, cfg, params);
  if (!out) throw Error(ErrorCode::kIo, "failed writing checkpoint " + path.string());
}

Checkpoint read_checkpoint(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != kFormat) {
      throw Error(ErrorCode::kParse, "not an adlens checkpoint");
    }
    if (doc.at("version").get<int>() != kCheckpointVersion) {
      throw Error(ErrorCode::kParse, "unsupported checkpoint version");
    }
    Checkpoint ck{config_from_json(doc.at("config")), {}};
    ck.config.validate();
    ck.params = ModelParams::zeros(ck.config);
    auto views = tensors(ck.params);
    const json& arr = doc.at("tensors");
    if (arr.size() != views.size()) throw Error(ErrorCode::kParse, "checkpoint tensor count mismatch");
    for (std::size_t k = 0; k < views.size(); ++k) {
      const json& t = arr[k];
      if (t.at("name").get<std::string>() != views[k].name ||
          t.at("rows").get<Eigen::Index>() != views[k].rows ||
          t.at("cols").get<Eigen::Index>() != views[k].cols) {
        throw Error(ErrorCode::kParse, "checkpoint tensor " + std::string(views[k].name) +
                                           " has the wrong name or shape");
      }
      const auto data = t.at("data").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(data.size()) != views[k].size()) {
        throw Error(ErrorCode::kParse, "checkpoint tensor " + std::string(views[k].name) +
                                           " has the wrong element count");
      }
      std::copy(data.begin(), data.end(), views[k].data);
    }
    if (doc.at("checksum").get<std::string>() != params_checksum(ck.params)) {
      throw Error(ErrorCode::kParse, "checkpoint checksum mismatch");
    }
    return ck;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed checkpoint: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidArgument) throw Error(ErrorCode::kParse, e.what());
    throw;
  }
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

}  // namespace adlens::mtlnet
