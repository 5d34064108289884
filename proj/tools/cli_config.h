#ifndef TCL_TOOLS_CLI_CONFIG_H_
#define TCL_TOOLS_CLI_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "tcl/corpus.h"
#include "tcl/curriculum.h"

namespace tcl::cli {

// Everything a subcommand may need. Loaded from a flat JSON object whose
// keys are listed in kConfigKeys; unknown keys are rejected.
struct CliConfig {
  RunConfig run;
  SynthConfig synth;
  Scheme scheme = Scheme::kSegmentation;
  std::filesystem::path train;
  std::filesystem::path dev;
  std::filesystem::path test;
  std::filesystem::path out_dir = "runs";
};

// Applies the keys of a flat JSON object on top of config. Throws
// ConfigError on unknown keys or values of the wrong type.
void ApplyJson(const nlohmann::json &doc, CliConfig &config);

// Reads and applies a config file. A missing or unparsable file is a
// ConfigError.
void ApplyFile(const std::filesystem::path &path, CliConfig &config);

// TCL_SEED, if set. Throws ConfigError when it is not an unsigned integer.
std::optional<uint64_t> SeedFromEnv();

// Flat JSON view of the resolved config, with the same keys ApplyJson reads.
nlohmann::ordered_json ToJson(const CliConfig &config);
nlohmann::ordered_json SynthToJson(const SynthConfig &synth);

// FNV-1a over the compact dump of SynthToJson, as 16 hex digits.
std::string SynthHash(const SynthConfig &synth);

// Creates and returns a new directory <out_dir>/<prefix>-<UTC timestamp>,
// suffixed with -2, -3, ... if that name is already taken.
std::filesystem::path FreshRunDir(const std::filesystem::path &out_dir, const std::string &prefix);

}  // namespace tcl::cli

#endif  // TCL_TOOLS_CLI_CONFIG_H_
