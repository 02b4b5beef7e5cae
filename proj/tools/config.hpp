#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "posture/experiment.hpp"
#include "posture/synth.hpp"
#include "posture/types.hpp"

namespace posture::cli {

/// Bad flags or configuration; the tool exits with the usage code.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Command-line values that override the configuration file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> out;
  std::optional<std::string> manifest;
  std::optional<std::string> model;
  std::vector<std::string> models;
  std::optional<std::string> split;
  std::vector<std::string> locations;
  std::vector<std::string> postures;
  std::optional<std::size_t> subjects;
};

/// Fully resolved settings. `effective` is the merged JSON document that
/// determines every output together with the seed.
struct ExperimentConfig {
  nlohmann::json effective;
  std::uint64_t seed = 42;
  unsigned threads = 1;
  std::string out = "out";
  std::optional<std::string> manifest;
  SynthConfig synth;
  ModelSpec model;
  std::vector<ModelSpec> compare_models;
  SplitSpec split;
  std::vector<SensorLocation> locations;  // empty: every location in the data
  LabelSet postures;                      // empty: the data's label set
};

/// Merges the JSON file at `config_path` (if any) with the overrides.
ExperimentConfig resolve_config(const std::optional<std::string>& config_path, const Overrides& overrides);
ExperimentConfig resolve_config(const nlohmann::json& config, const Overrides& overrides = {});

SynthConfig synth_from_json(const nlohmann::json& j, SynthConfig base = {});
ModelSpec model_from_json(const nlohmann::json& j);
SplitSpec parse_split(const std::string& text);

/// FNV-1a over the compact dump of `j`.
std::string config_hash(const nlohmann::json& j);

/// `{command, config_hash, seed, version}` attached to every output.
nlohmann::json provenance(const std::string& command, const ExperimentConfig& cfg);

/// The dataset named by the config (manifest or generated), restricted to the
/// configured locations and postures.
Dataset load_dataset(const ExperimentConfig& cfg);

}  // namespace posture::cli
