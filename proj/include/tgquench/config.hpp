#pragma once

// Run configuration: plain `key = value` text, one setting per line, `#` comments.
// See README.md for the full key list.

#include "tgquench/hamiltonian.hpp"

#include <filesystem>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace tgq {

using ConfigMap = std::map<std::string, std::string>;

/// Parses `key = value` lines. Later keys override earlier ones.
ConfigMap parse_config_text(const std::string& text);
ConfigMap read_config_file(const std::filesystem::path& path);
/// Applies a `key=value` override.
void apply_override(ConfigMap& map, const std::string& assignment);

/// Names of the shipped presets, sorted.
std::vector<std::string> preset_names();
std::optional<std::string> preset_text(const std::string& name);

struct RunConfig {
  std::string preset;

  double g_A = 25.0;
  std::vector<double> g_AB;

  int n_tot = 16;
  int n_max = 16;
  int quad_order = 34;
  Representation representation = Representation::ComGround;
  std::string integral_cache;

  double t_end = 6.0 * std::numbers::pi;  // three trap periods
  std::optional<double> dt;  // empty: largest step allowed by the Nyquist rule
  int observable_points = 241;

  bool loschmidt = true;
  bool densities = false;
  bool entropy = false;
  bool occupations = false;
  bool subsystem_le = false;
  bool spectrum = false;
  bool spectrum_windowed = false;

  double density_x_min = -6.0;
  double density_x_max = 6.0;
  int density_points = 241;

  double eta = 0.05;
  double omega_min = -200.0;
  double omega_max = 50.0;
  int omega_points = 25001;
  double window_t_end = 200.0;  // length of the nu(t) record for the windowed transform

  double entropy_window_lo = 1.25;  // in units of pi / omega
  double entropy_window_hi = 1.75;

  std::filesystem::path output_dir = "out";
  int workers = 1;
  bool record_timings = false;

  /// Resolved settings as `key = value` lines, in a fixed order.
  std::string to_text() const;
};

struct ConfigIssue {
  std::string field;
  std::string message;
};

struct ConfigOutcome {
  RunConfig config;
  std::vector<ConfigIssue> errors;
  std::vector<ConfigIssue> warnings;

  bool ok() const { return errors.empty(); }
};

/// Resolves defaults and checks every field. A `preset` key pulls in the named preset
/// first; explicit keys then override it.
ConfigOutcome validate_config(const ConfigMap& map);

/// Nyquist check of an explicit time step against the spectral width of the largest
/// quench in the sweep; fills in the step when it is left automatic.
std::optional<ConfigIssue> resolve_time_step(RunConfig& config, double spectral_width);

}  // namespace tgq
