#pragma once

// Sweep orchestration: one engine shared by every g_AB point, one output subdirectory per
// point, manifests written atomically.

#include "tgquench/config.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tgq {

inline constexpr int kManifestFormatVersion = 1;

struct PointRecord {
  std::size_t index = 0;
  double g_AB = 0.0;
  bool ok = false;
  std::string error;
  double weight_sum = 0.0;
  double residual_norm = 0.0;
  double orthonormality_error = 0.0;
  double min_le = 0.0;
};

struct RunSummary {
  int exit_code = 0;
  std::string reason;  // single line, set when exit_code != 0
  std::vector<PointRecord> points;
};

/// Point directory name, e.g. point_007.
std::string point_directory(std::size_t index);

/// Writes `text` to a temporary sibling and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& text);

/// Builds the engine for the strongest quench of the sweep and applies the Nyquist rule
/// to `config.dt`. No-op for an empty sweep.
std::optional<ConfigIssue> resolve_dynamics(RunConfig& config);

/// Runs a validated configuration. Failures at a single sweep point are recorded in that
/// point's manifest and do not stop the others.
RunSummary run(RunConfig config);

}  // namespace tgq
