#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "adlens/corpus.hpp"
#include "adlens/date.hpp"

namespace testutil {

inline adlens::corpus::AdRecord ad(std::string id, std::string body, double spend_lo = 0.0,
                                   double spend_hi = 0.0, double imp_lo = 0.0, double imp_hi = 0.0,
                                   std::string date = "2021-03-01") {
  adlens::corpus::AdRecord r;
  r.id = std::move(id);
  r.body = std::move(body);
  r.spend = {spend_lo, spend_hi};
  r.impressions = {imp_lo, imp_hi};
  r.start_date = adlens::parse_date(date);
  return r;
}

inline adlens::corpus::LabelPair label(std::string id, adlens::Theme t, adlens::MoralFoundation m,
                                       adlens::LabelSource s = adlens::LabelSource::kGold) {
  return {std::move(id), t, m, s};
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("adlens_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

}  // namespace testutil
