#include "tgquench/config.hpp"

#include "tgquench/presets_data.hpp"
#include "tgquench/quench.hpp"
#include "tgquench/text_format.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tgq {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::optional<double> parse_double(std::string_view text) {
  const std::string s = trim(text);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// Accepts "6pi", "6*pi", "pi" and plain numbers.
std::optional<double> parse_time(std::string_view text) {
  std::string s = trim(text);
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
    s.resize(s.size() - 2);
    s = trim(s);
    if (!s.empty() && s.back() == '*') s.pop_back();
    if (s.empty()) return std::numbers::pi;
    const auto f = parse_double(s);
    if (!f) return std::nullopt;
    return *f * std::numbers::pi;
  }
  return parse_double(s);
}

std::optional<long> parse_int(std::string_view text) {
  const std::string s = trim(text);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<bool> parse_bool(std::string_view text) {
  const std::string s = trim(text);
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  return std::nullopt;
}

std::optional<std::vector<double>> parse_list(std::string_view text) {
  std::vector<double> out;
  std::string s = trim(text);
  if (s.empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto v = parse_double(item);
    if (!v) return std::nullopt;
    out.push_back(*v);
  }
  return out;
}

// start:stop:count, endpoints included.
std::optional<std::vector<double>> parse_range(std::string_view text) {
  const std::string s = trim(text);
  const auto c1 = s.find(':');
  const auto c2 = c1 == std::string::npos ? c1 : s.find(':', c1 + 1);
  if (c2 == std::string::npos) return std::nullopt;
  const auto lo = parse_double(s.substr(0, c1));
  const auto hi = parse_double(s.substr(c1 + 1, c2 - c1 - 1));
  const auto n = parse_int(s.substr(c2 + 1));
  if (!lo || !hi || !n || *n < 0) return std::nullopt;
  std::vector<double> out;
  for (long i = 0; i < *n; ++i) {
    out.push_back(*n == 1 ? *lo : *lo + (*hi - *lo) * static_cast<double>(i) / static_cast<double>(*n - 1));
  }
  return out;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "preset",
      "physics.g_A", "physics.g_AB", "physics.g_AB_ratio", "physics.g_AB_ratio_range",
      "basis.N_tot", "basis.n_max", "basis.quad_order", "basis.representation", "basis.integral_cache",
      "dynamics.t_end", "dynamics.dt", "dynamics.observable_points",
      "observables.loschmidt", "observables.densities", "observables.entropy", "observables.occupations",
      "observables.subsystem_le", "observables.spectrum",
      "density.x_min", "density.x_max", "density.points",
      "entropy.window_lo", "entropy.window_hi",
      "spectrum.eta", "spectrum.omega_min", "spectrum.omega_max", "spectrum.points", "spectrum.windowed",
      "spectrum.window_t_end",
      "output.dir", "run.workers", "run.record_timings",
  };
  return keys;
}

std::string join(const std::vector<std::string>& items, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap map;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    if (key.empty()) throw std::invalid_argument("line " + std::to_string(line_no) + ": empty key");
    map[key] = trim(std::string_view(body).substr(eq + 1));
  }
  return map;
}

ConfigMap read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void apply_override(ConfigMap& map, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw std::invalid_argument("override '" + assignment + "' is not key=value");
  const std::string key = trim(std::string_view(assignment).substr(0, eq));
  if (key.empty()) throw std::invalid_argument("override '" + assignment + "' has an empty key");
  map[key] = trim(std::string_view(assignment).substr(eq + 1));
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, text] : detail::kPresets) names.emplace_back(name);
  std::sort(names.begin(), names.end());
  return names;
}

std::optional<std::string> preset_text(const std::string& name) {
  for (const auto& [n, text] : detail::kPresets) {
    if (n == name) return std::string(text);
  }
  return std::nullopt;
}

std::string RunConfig::to_text() const {
  std::ostringstream os;
  const auto num = [](double v) { return format_number(v); };
  const auto flag = [](bool b) { return b ? "true" : "false"; };
  std::vector<std::string> g;
  for (double v : g_AB) g.push_back(num(v));
  if (!preset.empty()) os << "# expanded from preset " << preset << '\n';
  os << "physics.g_A = " << num(g_A) << '\n'
     << "physics.g_AB = " << join(g, ", ") << '\n'
     << "basis.N_tot = " << n_tot << '\n'
     << "basis.n_max = " << n_max << '\n'
     << "basis.quad_order = " << quad_order << '\n'
     << "basis.representation = " << to_string(representation) << '\n'
     << "basis.integral_cache = " << integral_cache << '\n'
     << "dynamics.t_end = " << num(t_end) << '\n'
     << "dynamics.dt = " << (dt ? num(*dt) : std::string("auto")) << '\n'
     << "dynamics.observable_points = " << observable_points << '\n'
     << "observables.loschmidt = " << flag(loschmidt) << '\n'
     << "observables.densities = " << flag(densities) << '\n'
     << "observables.entropy = " << flag(entropy) << '\n'
     << "observables.occupations = " << flag(occupations) << '\n'
     << "observables.subsystem_le = " << flag(subsystem_le) << '\n'
     << "observables.spectrum = " << flag(spectrum) << '\n'
     << "density.x_min = " << num(density_x_min) << '\n'
     << "density.x_max = " << num(density_x_max) << '\n'
     << "density.points = " << density_points << '\n'
     << "entropy.window_lo = " << num(entropy_window_lo) << '\n'
     << "entropy.window_hi = " << num(entropy_window_hi) << '\n'
     << "spectrum.eta = " << num(eta) << '\n'
     << "spectrum.omega_min = " << num(omega_min) << '\n'
     << "spectrum.omega_max = " << num(omega_max) << '\n'
     << "spectrum.points = " << omega_points << '\n'
     << "spectrum.windowed = " << flag(spectrum_windowed) << '\n'
     << "spectrum.window_t_end = " << num(window_t_end) << '\n'
     << "output.dir = " << output_dir.generic_string() << '\n'
     << "run.workers = " << workers << '\n'
     << "run.record_timings = " << flag(record_timings) << '\n';
  return os.str();
}

ConfigOutcome validate_config(const ConfigMap& input) {
  ConfigOutcome out;
  RunConfig& c = out.config;
  const auto error = [&](const std::string& field, const std::string& msg) { out.errors.push_back({field, msg}); };
  const auto warn = [&](const std::string& field, const std::string& msg) { out.warnings.push_back({field, msg}); };

  ConfigMap map;
  if (const auto it = input.find("preset"); it != input.end() && !it->second.empty()) {
    const auto text = preset_text(it->second);
    if (!text) {
      error("preset", "unknown preset '" + it->second + "'; available: " + join(preset_names(), ", "));
      return out;
    }
    map = parse_config_text(*text);
    c.preset = it->second;
  }
  for (const auto& [k, v] : input) map[k] = v;

  for (const auto& [k, v] : map) {
    if (!known_keys().contains(k)) error(k, "unknown key");
  }

  const auto get = [&](const std::string& key) -> const std::string* {
    const auto it = map.find(key);
    return it == map.end() ? nullptr : &it->second;
  };
  const auto real = [&](const std::string& key, double& target) {
    if (const auto* v = get(key)) {
      if (const auto d = parse_double(*v)) target = *d;
      else error(key, "expected a number, got '" + *v + "'");
    }
  };
  const auto integer = [&](const std::string& key, int& target) {
    if (const auto* v = get(key)) {
      if (const auto d = parse_int(*v)) target = static_cast<int>(*d);
      else error(key, "expected an integer, got '" + *v + "'");
    }
  };
  const auto boolean = [&](const std::string& key, bool& target) {
    if (const auto* v = get(key)) {
      if (const auto b = parse_bool(*v)) target = *b;
      else error(key, "expected true or false, got '" + *v + "'");
    }
  };

  real("physics.g_A", c.g_A);
  if (c.g_A < 0.0) error("physics.g_A", "must be >= 0");

  const char* sweep_keys[] = {"physics.g_AB", "physics.g_AB_ratio", "physics.g_AB_ratio_range"};
  int sweep_given = 0;
  for (const char* k : sweep_keys) sweep_given += get(k) != nullptr;
  if (sweep_given > 1) {
    error("physics.g_AB", "give only one of physics.g_AB, physics.g_AB_ratio, physics.g_AB_ratio_range");
  }
  if (const auto* v = get("physics.g_AB")) {
    if (const auto l = parse_list(*v)) c.g_AB = *l;
    else error("physics.g_AB", "expected a comma-separated list of numbers");
  } else if (const auto* v = get("physics.g_AB_ratio")) {
    if (const auto l = parse_list(*v)) {
      for (double r : *l) c.g_AB.push_back(r * c.g_A);
    } else {
      error("physics.g_AB_ratio", "expected a comma-separated list of numbers");
    }
  } else if (const auto* v = get("physics.g_AB_ratio_range")) {
    if (const auto l = parse_range(*v)) {
      for (double r : *l) c.g_AB.push_back(r * c.g_A);
    } else {
      error("physics.g_AB_ratio_range", "expected start:stop:count");
    }
  } else {
    // Default sweep: 64 points over [0, g_A].
    const auto ratios = parse_range("0:1:64");
    for (double r : *ratios) c.g_AB.push_back(r * c.g_A);
  }
  for (double g : c.g_AB) {
    if (g < 0.0) error("physics.g_AB", "couplings must be >= 0, got " + format_number(g));
    else if (g > c.g_A) warn("physics.g_AB", "g_AB = " + format_number(g) + " exceeds g_A = " + format_number(c.g_A));
  }

  integer("basis.N_tot", c.n_tot);
  c.n_max = c.n_tot;
  integer("basis.n_max", c.n_max);
  c.quad_order = 2 * c.n_max + 2;
  integer("basis.quad_order", c.quad_order);
  if (c.n_tot < 0) error("basis.N_tot", "must be >= 0");
  if (c.n_max < 1) error("basis.n_max", "must be >= 1");
  if (c.n_max >= 0 && c.n_tot > 3 * c.n_max) error("basis.N_tot", "exceeds 3 n_max");
  if (c.quad_order < 2 * c.n_max + 2) {
    error("basis.quad_order", "must be >= 2 n_max + 2 = " + std::to_string(2 * c.n_max + 2));
  }
  if (const auto* v = get("basis.representation")) {
    if (*v == "full") c.representation = Representation::Full;
    else if (*v == "com_ground") c.representation = Representation::ComGround;
    else error("basis.representation", "expected full or com_ground, got '" + *v + "'");
  }
  if (c.representation == Representation::ComGround && c.n_max < c.n_tot) {
    error("basis.representation", "com_ground needs basis.n_max >= basis.N_tot");
  }
  if (const auto* v = get("basis.integral_cache")) c.integral_cache = *v;

  if (const auto* v = get("dynamics.t_end")) {
    if (const auto t = parse_time(*v)) c.t_end = *t;
    else error("dynamics.t_end", "expected a time such as 18.85 or 6pi, got '" + *v + "'");
  }
  if (c.t_end < 0.0) error("dynamics.t_end", "must be >= 0");
  if (const auto* v = get("dynamics.dt"); v && *v != "auto") {
    if (const auto t = parse_time(*v)) c.dt = *t;
    else error("dynamics.dt", "expected auto or a positive number, got '" + *v + "'");
    if (c.dt && *c.dt <= 0.0) error("dynamics.dt", "must be > 0");
  }
  c.observable_points = 241;
  integer("dynamics.observable_points", c.observable_points);
  if (c.observable_points < 2) error("dynamics.observable_points", "must be >= 2");

  boolean("observables.loschmidt", c.loschmidt);
  boolean("observables.densities", c.densities);
  boolean("observables.entropy", c.entropy);
  boolean("observables.occupations", c.occupations);
  boolean("observables.subsystem_le", c.subsystem_le);
  boolean("observables.spectrum", c.spectrum);

  real("density.x_min", c.density_x_min);
  real("density.x_max", c.density_x_max);
  integer("density.points", c.density_points);
  if (c.density_x_max <= c.density_x_min) error("density.x_max", "must exceed density.x_min");
  if (c.density_points < 2) error("density.points", "must be >= 2");

  if (const auto* v = get("entropy.window_lo")) {
    if (const auto d = parse_double(*v)) c.entropy_window_lo = *d;
    else error("entropy.window_lo", "expected a number (units of pi)");
  }
  if (const auto* v = get("entropy.window_hi")) {
    if (const auto d = parse_double(*v)) c.entropy_window_hi = *d;
    else error("entropy.window_hi", "expected a number (units of pi)");
  }
  if (c.entropy_window_hi <= c.entropy_window_lo) error("entropy.window_hi", "must exceed entropy.window_lo");
  if (c.entropy && c.entropy_window_hi * std::numbers::pi > c.t_end) {
    error("entropy.window_hi", "averaging window ends after dynamics.t_end");
  }

  real("spectrum.eta", c.eta);
  real("spectrum.omega_min", c.omega_min);
  real("spectrum.omega_max", c.omega_max);
  integer("spectrum.points", c.omega_points);
  boolean("spectrum.windowed", c.spectrum_windowed);
  real("spectrum.window_t_end", c.window_t_end);
  if (c.eta <= 0.0) error("spectrum.eta", "must be > 0");
  if (c.omega_max <= c.omega_min) error("spectrum.omega_max", "must exceed spectrum.omega_min");
  if (c.omega_points < 2) error("spectrum.points", "must be >= 2");
  if (c.spectrum_windowed && c.window_t_end <= 0.0) error("spectrum.window_t_end", "must be > 0");
  if (c.spectrum_windowed && c.window_t_end * c.eta < 10.0) {
    warn("spectrum.window_t_end", "shorter than 10/eta; the windowed transform is truncated");
  }

  if (const auto* v = get("output.dir")) {
    if (v->empty()) error("output.dir", "must not be empty");
    else c.output_dir = *v;
  }
  integer("run.workers", c.workers);
  if (c.workers < 1) error("run.workers", "must be >= 1");
  boolean("run.record_timings", c.record_timings);
  return out;
}

std::optional<ConfigIssue> resolve_time_step(RunConfig& config, double spectral_width) {
  const double bound = nyquist_step(spectral_width);
  if (!config.dt) {
    config.dt = bound;
    return std::nullopt;
  }
  if (*config.dt > bound) {
    return ConfigIssue{"dynamics.dt", "dt = " + format_number(*config.dt) + " violates the Nyquist bound dt <= " +
                                          format_number(bound) + " (pi / (4 (E_max - E_0)))"};
  }
  return std::nullopt;
}

}  // namespace tgq
