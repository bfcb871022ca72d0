// tgquench: sweep runner, config validation, preset listing and oracle fixture regeneration.

#include "tgquench/config.hpp"
#include "tgquench/runner.hpp"
#include "tgquench/text_format.hpp"

#include "two_body_oracle.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#ifndef TGQ_SOURCE_DIR
#define TGQ_SOURCE_DIR "."
#endif

namespace {

struct CommonFlags {
  std::string config_path;
  std::string preset;
  std::string out;
  int workers = 0;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "Config file (key = value lines)");
  cmd->add_option("--preset", f.preset, "Named preset; see `tgquench presets`");
  cmd->add_option("--out", f.out, "Output directory (output.dir)");
  cmd->add_option("--workers", f.workers, "Concurrent sweep points (run.workers)")->check(CLI::PositiveNumber);
  cmd->add_option("--override", f.overrides, "key=value, applied last; repeatable")->allow_extra_args(false);
}

// Config file first, then --preset, then explicit flags and overrides.
tgq::ConfigMap assemble(const CommonFlags& f) {
  tgq::ConfigMap map;
  if (!f.config_path.empty()) map = tgq::read_config_file(f.config_path);
  if (!f.preset.empty()) map["preset"] = f.preset;
  if (!f.out.empty()) map["output.dir"] = f.out;
  if (f.workers > 0) map["run.workers"] = std::to_string(f.workers);
  for (const auto& o : f.overrides) tgq::apply_override(map, o);
  return map;
}

// One machine-readable line per problem on stderr.
void report(const char* level, const std::vector<tgq::ConfigIssue>& issues) {
  for (const auto& i : issues) std::cerr << level << ": " << i.field << ": " << i.message << '\n';
}

int cmd_validate(const CommonFlags& f) {
  auto outcome = tgq::validate_config(assemble(f));
  report("warning", outcome.warnings);
  if (!outcome.ok()) {
    report("error", outcome.errors);
    return 2;
  }
  if (const auto issue = tgq::resolve_dynamics(outcome.config)) {
    std::cerr << "error: " << issue->field << ": " << issue->message << '\n';
    return 2;
  }
  std::cout << outcome.config.to_text();
  return 0;
}

int cmd_run(const CommonFlags& f) {
  auto outcome = tgq::validate_config(assemble(f));
  report("warning", outcome.warnings);
  if (!outcome.ok()) {
    const auto& e = outcome.errors.front();
    std::cerr << "error: invalid_config: " << e.field << ": " << e.message << '\n';
    return 2;
  }
  const auto summary = tgq::run(outcome.config);
  if (summary.exit_code != 0) {
    std::cerr << "error: " << summary.reason << '\n';
    return summary.exit_code;
  }
  std::cout << "wrote " << summary.points.size() << " sweep points to " << outcome.config.output_dir.string() << '\n';
  return 0;
}

int cmd_presets(const std::string& show) {
  if (show.empty()) {
    for (const auto& n : tgq::preset_names()) std::cout << n << '\n';
    return 0;
  }
  const auto text = tgq::preset_text(show);
  if (!text) {
    std::cerr << "error: preset: unknown preset '" << show << "'\n";
    return 2;
  }
  std::cout << *text;
  return 0;
}

int cmd_oracle_regenerate(const std::string& path) {
  namespace o = tgq::oracle;
  const o::RelativeGridOptions opt;
  const double couplings[] = {0.0, 1.0, 2.0, 5.0, 10.0, 25.0, 50.0};
  std::ostringstream os;
  os << "# Two bosons with contact repulsion in a harmonic trap: ground energies.\n"
     << "# E_rel: finite-difference relative Hamiltonian, Richardson extrapolated.\n"
     << "# E_total = E_rel + 0.5 (centre of mass).\n"
     << "# generator = tgquench oracle regenerate\n"
     << "# half_width = " << tgq::format_number(opt.half_width) << "\n"
     << "# coarse_points = " << opt.coarse_points << "\n"
     << "# refinements = " << opt.refinements << "\n"
     << "# columns: g E_rel E_total observed_order closed_form_E_rel\n";
  for (double g : couplings) {
    const auto r = o::two_boson_relative_energy(g, opt);
    const double closed = g > 0.0 ? o::closed_form_relative_energy(g) : 0.5;
    char row[160];
    std::snprintf(row, sizeof row, "%.15g %.15g %.15g %.6g %.15g\n", g, r.extrapolated, r.extrapolated + 0.5,
                  r.observed_order, closed);
    os << row;
  }
  std::filesystem::create_directories(std::filesystem::path(path).parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    std::cerr << "error: cannot write " << path << '\n';
    return 1;
  }
  out << os.str();
  std::cout << "wrote " << path << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quench dynamics of two trapped bosons and an impurity"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  auto* run = app.add_subcommand("run", "Run a g_AB sweep");
  add_common(run, run_flags);

  CommonFlags validate_flags;
  auto* validate = app.add_subcommand("validate", "Resolve and check a configuration");
  add_common(validate, validate_flags);

  std::string show;
  auto* presets = app.add_subcommand("presets", "List presets, or print one");
  presets->add_option("name", show, "Preset to print");

  auto* oracle = app.add_subcommand("oracle", "Reference-value fixtures");
  oracle->require_subcommand(1);
  std::string fixture = std::string(TGQ_SOURCE_DIR) + "/tests/fixtures/two_boson_oracle.txt";
  auto* regenerate = oracle->add_subcommand("regenerate", "Recompute the two-boson oracle fixture");
  regenerate->add_option("--out", fixture, "Fixture path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_flags);
    if (*validate) return cmd_validate(validate_flags);
    if (*presets) return cmd_presets(show);
    if (*regenerate) return cmd_oracle_regenerate(fixture);
  } catch (const std::exception& e) {
    std::string msg = e.what();
    for (auto& ch : msg) {
      if (ch == '\n') ch = ' ';
    }
    std::cerr << "error: " << msg << '\n';
    return 2;
  }
  return 1;
}
