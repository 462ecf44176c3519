#pragma once

#include <filesystem>
#include <string>

#include "cevi/simulation.hpp"

namespace cevi::io {

// Flat key = value study configuration. Recognized keys (all optional except
// family): family, beta0, beta1, burr_eta, burr_tau, x_stars, p_levels, n, R,
// h, k_grid, kinds, master_seed, censor_family, no_censoring,
// ww_kl_spacing_form, ppd_fix_tau. Lists are comma separated; k_grid also
// accepts lo:hi:step. Unknown keys are rejected. A JSON run manifest (as
// produced by write_results) is accepted in place of a flat file and yields
// the exact config of the original run.
StudyConfig parse_config(const std::filesystem::path& path);
StudyConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");

// Emits the flat form of `config`; parse_config(write_config(c)) == c.
void write_config(const StudyConfig& config, const std::filesystem::path& path);
std::string config_to_text(const StudyConfig& config);

// Applies one key = value pair on top of an existing config (CLI flag
// overrides use the same key names and value syntax as the file).
void apply_config_override(StudyConfig& config, const std::string& key,
                           const std::string& value);

// Non-empty when the configured study is paper scale and worth a warning.
std::string runtime_warning(const StudyConfig& config);

struct RunManifest {
  StudyConfig config;
  std::string tool_version;
  std::string started_at;  // UTC, informational only
  std::uint64_t master_seed = 0;
};

std::string manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const std::string& text);

}  // namespace cevi::io
