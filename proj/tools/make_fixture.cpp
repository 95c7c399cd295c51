// Writes the synthetic ad fixture: ads.jsonl, gold.jsonl (the annotated
// subset), truth.jsonl (every ad's planted labels) and deaths.csv.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "adlens/corpus.hpp"
#include "adlens/error.hpp"
#include "adlens/synth.hpp"

namespace fs = std::filesystem;

namespace {

std::ofstream open(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw adlens::Error(adlens::ErrorCode::kIo, "cannot write " + path.string());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate the synthetic ad fixture"};
  adlens::synth::FixtureOptions opt;
  std::string out_dir;
  app.add_option("--out", out_dir, "Output directory")->required();
  app.add_option("--ads", opt.ads, "Number of ads")->capture_default_str();
  app.add_option("--gold", opt.gold, "Number of gold-labeled ads")->capture_default_str();
  app.add_option("--lag", opt.planted_lag, "Planted deaths-to-impressions lag")->capture_default_str();
  app.add_option("--seed", opt.seed, "Seed")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    const auto fx = adlens::synth::make_fixture(opt);
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    auto ads = open(dir / "ads.jsonl");
    adlens::corpus::write_ads_jsonl(ads, fx.ads);
    auto gold = open(dir / "gold.jsonl");
    adlens::corpus::write_labels_jsonl(gold, fx.gold);
    auto truth = open(dir / "truth.jsonl");
    adlens::corpus::write_labels_jsonl(truth, fx.truth);
    auto deaths = open(dir / "deaths.csv");
    adlens::corpus::write_deaths_csv(deaths, fx.deaths);
  } catch (const adlens::Error& e) {
    std::cerr << adlens::error_code_name(e.code()) << ": " << e.what() << "\n";
    return 2;
  }
  return 0;
}
