#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcf/diagnostics.hpp"
#include "qcf/integrator.hpp"
#include "qcf/models.hpp"
#include "qcf/presets.hpp"

namespace qcf {

struct LoopSpec {
  std::array<double, 3> center{0.0, 0.0, 0.0};
  double radius = 0.0;
  int points = 64;
  int axis = 2;
};

/// Everything a run needs. Produced by parse_config; also buildable in code.
struct RunConfig {
  Grid grid;
  ModelOptions model;
  HamiltonianSpec hamiltonian;
  StateSpec initial;
  IntegratorConfig integrator;
  int diagnostics_every = 1;
  int snapshot_every = 0;
  std::vector<LoopSpec> loops;
  std::filesystem::path output_dir;
  std::uint64_t seed = 0;
  /// The document as read, echoed into the manifest.
  nlohmann::ordered_json echo;

  /// Cross-field checks; throws config-error listing every violation.
  void validate() const;
};

/// Strict JSON parsing: duplicate keys are parse errors carrying the line
/// number, unknown keys and type or range violations are collected and
/// reported together as one config-error.
nlohmann::ordered_json parse_json_strict(const std::string& text, const std::string& source = "<config>");
RunConfig config_from_json(const nlohmann::ordered_json& doc);
RunConfig parse_config_text(const std::string& text, const std::string& source = "<config>");
RunConfig parse_config(const std::filesystem::path& path);

}  // namespace qcf
