#include "tgquench/runner.hpp"

#include "tgquench/observables.hpp"
#include "tgquench/quench.hpp"
#include "tgquench/text_format.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace tgq {

namespace fs = std::filesystem;

std::string point_directory(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "point_%03zu", index);
  return buf;
}

void write_atomic(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

namespace {

// Largest finite coupling of the sweep; non-finite entries fail at their own point.
double strongest(const std::vector<double>& g) {
  double best = 0.0;
  for (double v : g)
    if (std::isfinite(v)) best = std::max(best, v);
  return best;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct PointContext {
  const RunConfig& config;
  const QuenchEngine& engine;
  TimeGrid le_grid;
  std::vector<double> obs_times;
  Eigen::VectorXcd psi0;
  Rspdm rho0_A;
  Rspdm rho0_B;
};

std::ofstream open_data(const fs::path& path, const RunConfig& c, double g_ab) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << "# manifest: manifest.txt\n"
     << "# g_A = " << format_number(c.g_A) << ", g_AB = " << format_number(g_ab) << ", N_tot = " << c.n_tot
     << ", n_max = " << c.n_max << "\n";
  return os;
}

void write_le(const PointContext& ctx, const QuenchResult& q, const fs::path& dir, double g_ab, PointRecord& rec) {
  auto os = open_data(dir / "le.dat", ctx.config, g_ab);
  write_le_series(os, q, ctx.le_grid);
  double lo = 1.0;
  for (std::size_t i = 0; i < ctx.le_grid.size(); ++i) lo = std::min(lo, loschmidt_echo(q, ctx.le_grid.t(i)));
  rec.min_le = lo;
}

struct TimeSeries {
  std::vector<Rspdm> rho_A;
  std::vector<Rspdm> rho_B;
  std::vector<double> s_pair;
};

TimeSeries reduced_states(const PointContext& ctx, const QuenchResult& q, bool need_pair) {
  TimeSeries ts;
  for (double t : ctx.obs_times) {
    const Eigen::VectorXcd psi = evolve_state(q, t);
    ts.rho_A.push_back(rspdm_A(psi, ctx.engine.basis()));
    ts.rho_B.push_back(rspdm_B(psi, ctx.engine.basis()));
    if (need_pair) ts.s_pair.push_back(pair_entropy(psi, ctx.engine.basis()));
  }
  return ts;
}

void write_times_header(std::ostream& os, const std::vector<double>& times) {
  os << "# times:";
  for (double t : times) os << ' ' << format_number(t);
  os << '\n';
}

void write_density(const PointContext& ctx, const std::vector<Rspdm>& rho, Species s, const fs::path& dir, double g_ab) {
  const auto& c = ctx.config;
  std::vector<double> x(static_cast<std::size_t>(c.density_points));
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = c.density_x_min + (c.density_x_max - c.density_x_min) * static_cast<double>(i) / static_cast<double>(x.size() - 1);
  }
  std::vector<DensityProfile> profiles;
  for (const auto& r : rho) profiles.push_back(density(r, x));
  auto os = open_data(dir / (std::string("density_") + to_string(s) + ".dat"), c, g_ab);
  os << "# species " << to_string(s) << ", normalized to " << particle_number(s) << "\n";
  write_times_header(os, ctx.obs_times);
  os << "# columns: x rho(t_0) .. rho(t_" << ctx.obs_times.size() - 1 << ")\n";
  std::vector<double> row(profiles.size() + 1);
  for (std::size_t i = 0; i < x.size(); ++i) {
    row[0] = x[i];
    for (std::size_t k = 0; k < profiles.size(); ++k) row[k + 1] = profiles[k].values[i];
    write_row(os, row);
  }
}

void write_entropy(const PointContext& ctx, const TimeSeries& ts, const fs::path& dir, double g_ab,
                   std::ostringstream& manifest) {
  std::vector<double> s_a;
  std::vector<double> s_b;
  auto os = open_data(dir / "entropy.dat", ctx.config, g_ab);
  os << "# entropies in bits; S_AB: A pair vs impurity, S_A and S_B: single particle\n"
     << "# columns: t S_AB S_A S_B\n";
  for (std::size_t i = 0; i < ctx.obs_times.size(); ++i) {
    s_a.push_back(vne(ts.rho_A[i]));
    s_b.push_back(vne(ts.rho_B[i]));
    write_row(os, {ctx.obs_times[i], ts.s_pair[i], s_a.back(), s_b.back()});
  }
  const double pi = std::numbers::pi;
  const double lo = ctx.config.entropy_window_lo * pi;
  const double hi = ctx.config.entropy_window_hi * pi;
  manifest << "entropy_window = " << format_number(lo) << " " << format_number(hi) << "\n"
           << "entropy_A_average = " << format_number(time_averaged_entropy(ctx.obs_times, s_a, lo, hi)) << "\n"
           << "entropy_B_average = " << format_number(time_averaged_entropy(ctx.obs_times, s_b, lo, hi)) << "\n";
}

void write_occupations(const PointContext& ctx, const TimeSeries& ts, const fs::path& dir, double g_ab) {
  const int keep = std::min(8, ctx.config.n_max + 1);
  auto os = open_data(dir / "occupations.dat", ctx.config, g_ab);
  os << "# natural-orbital occupations, descending, first " << keep << " per species\n# columns: t";
  for (int k = 0; k < keep; ++k) os << " lambda_A" << k;
  for (int k = 0; k < keep; ++k) os << " lambda_B" << k;
  os << '\n';
  std::vector<double> row;
  for (std::size_t i = 0; i < ctx.obs_times.size(); ++i) {
    row.assign(1, ctx.obs_times[i]);
    const auto a = natural_orbitals(ts.rho_A[i]).occupations;
    const auto b = natural_orbitals(ts.rho_B[i]).occupations;
    for (int k = 0; k < keep; ++k) row.push_back(a[k]);
    for (int k = 0; k < keep; ++k) row.push_back(b[k]);
    write_row(os, row);
  }
}

void write_subsystem_le(const PointContext& ctx, const QuenchResult& q, const TimeSeries& ts, const fs::path& dir,
                        double g_ab) {
  const Eigen::VectorXd ground_coords = q.post->vectors.col(0);
  const Eigen::VectorXcd ground = q.post->space->lift(Eigen::VectorXcd(ground_coords.cast<std::complex<double>>()));
  const ReducedStateEcho echo_A(ctx.rho0_A.rho, rspdm_A(ground, ctx.engine.basis()).rho);
  const ReducedStateEcho echo_B(ctx.rho0_B.rho, rspdm_B(ground, ctx.engine.basis()).rho);
  auto os = open_data(dir / "subsystem_le.dat", ctx.config, g_ab);
  os << "# L_*_literal: reduced-state echo with rho from Psi_0 and rho' from the post-quench ground state\n"
     << "# F_*: Uhlmann fidelity between the initial and the evolved reduced state\n"
     << "# columns: t L_A_literal F_A L_B_literal F_B\n";
  for (std::size_t i = 0; i < ctx.obs_times.size(); ++i) {
    const double t = ctx.obs_times[i];
    write_row(os, {t, echo_A(t), uhlmann_fidelity(ctx.rho0_A.rho, ts.rho_A[i].rho), echo_B(t),
                   uhlmann_fidelity(ctx.rho0_B.rho, ts.rho_B[i].rho)});
  }
}

void write_spectrum_file(const fs::path& path, const PointContext& ctx, const Spectrum& s, double g_ab,
                         const char* method) {
  auto os = open_data(path, ctx.config, g_ab);
  os << "# " << method << ", eta = " << format_number(s.eta) << "\n# columns: omega A\n";
  for (std::size_t i = 0; i < s.omega.size(); ++i) write_row(os, {s.omega[i], s.values[i]});
}

void write_spectra(const PointContext& ctx, const QuenchResult& q, const fs::path& dir, double g_ab,
                   std::ostringstream& manifest) {
  const auto& c = ctx.config;
  const auto omega = frequency_grid(c.omega_min, c.omega_max, static_cast<std::size_t>(c.omega_points));
  const Spectrum s = spectral_function(q, c.eta, omega);
  write_spectrum_file(dir / "spectrum.dat", ctx, s, g_ab, "Lorentzian eigen-sum");
  manifest << "spectrum_sum_rule = " << format_number(s.sum_rule()) << "\n"
           << "spectrum_peak_omega = " << format_number(s.omega[s.argmax()]) << "\n";
  if (!c.spectrum_windowed) return;
  const TimeGrid grid = TimeGrid::covering(c.window_t_end, *c.dt);
  std::vector<std::complex<double>> nu(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) nu[i] = loschmidt_amplitude(q, grid.t(i));
  const Spectrum w = spectral_function_windowed(nu, grid.dt, c.eta, omega);
  write_spectrum_file(dir / "spectrum_windowed.dat", ctx, w, g_ab, "damped transform of nu(t)");
  manifest << "spectrum_windowed_t_end = " << format_number(grid.end()) << "\n"
           << "spectrum_windowed_dt = " << format_number(grid.dt) << "\n";
}

PointRecord run_point(const PointContext& ctx, std::size_t index, double g_ab, const fs::path& root) {
  const auto& c = ctx.config;
  PointRecord rec;
  rec.index = index;
  rec.g_AB = g_ab;
  const fs::path dir = root / point_directory(index);
  std::ostringstream manifest;
  manifest << "format_version = " << kManifestFormatVersion << "\n"
           << "run_manifest = ../manifest.txt\n"
           << "index = " << index << "\n"
           << "g_A = " << format_number(c.g_A) << "\n"
           << "g_AB = " << format_number(g_ab) << "\n";
  std::vector<std::string> files;
  try {
    fs::create_directories(dir);
    const QuenchResult q = ctx.engine.quench(g_ab);
    rec.weight_sum = q.weight_sum;
    rec.residual_norm = q.post->residual_norm;
    rec.orthonormality_error = q.post->orthonormality_error;
    manifest << "e0 = " << format_number(q.e0) << "\n"
             << "weight_sum = " << format_number(q.weight_sum) << "\n"
             << "residual_norm = " << format_number(q.post->residual_norm) << "\n"
             << "orthonormality_error = " << format_number(q.post->orthonormality_error) << "\n"
             << "ground_energy_post = " << format_number(q.energies[0]) << "\n"
             << "spectral_width = " << format_number(q.spectral_width()) << "\n"
             << "inverse_participation = " << format_number(q.inverse_participation()) << "\n"
             << "overlap_ground = " << format_number(q.overlaps[0]) << "\n";
    if (c.loschmidt) {
      write_le(ctx, q, dir, g_ab, rec);
      files.push_back("le.dat");
      manifest << "le_min = " << format_number(rec.min_le) << "\n";
    }
    const bool need_states = c.densities || c.entropy || c.occupations || c.subsystem_le;
    if (need_states) {
      const TimeSeries ts = reduced_states(ctx, q, c.entropy);
      if (c.densities) {
        write_density(ctx, ts.rho_A, Species::A, dir, g_ab);
        write_density(ctx, ts.rho_B, Species::B, dir, g_ab);
        files.push_back("density_A.dat");
        files.push_back("density_B.dat");
      }
      if (c.entropy) {
        write_entropy(ctx, ts, dir, g_ab, manifest);
        files.push_back("entropy.dat");
      }
      if (c.occupations) {
        write_occupations(ctx, ts, dir, g_ab);
        files.push_back("occupations.dat");
      }
      if (c.subsystem_le) {
        write_subsystem_le(ctx, q, ts, dir, g_ab);
        files.push_back("subsystem_le.dat");
      }
    }
    if (c.spectrum) {
      write_spectra(ctx, q, dir, g_ab, manifest);
      files.push_back("spectrum.dat");
      if (c.spectrum_windowed) files.push_back("spectrum_windowed.dat");
    }
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
    std::replace(rec.error.begin(), rec.error.end(), '\n', ' ');
  }
  manifest << "status = " << (rec.ok ? "ok" : "error") << "\n";
  if (!rec.ok) manifest << "error = " << rec.error << "\n";
  manifest << "files =";
  for (const auto& f : files) manifest << ' ' << f;
  manifest << "\n";
  try {
    fs::create_directories(dir);
    write_atomic(dir / "manifest.txt", manifest.str());
  } catch (const std::exception& e) {
    if (rec.ok) {
      rec.ok = false;
      rec.error = e.what();
    }
  }
  return rec;
}

std::shared_ptr<const DeltaIntegralTable> integral_table(const RunConfig& c) {
  const HoParams params{c.n_max, c.quad_order};
  if (c.integral_cache.empty()) return std::make_shared<const DeltaIntegralTable>(params);
  const fs::path path = c.integral_cache;
  if (fs::exists(path)) {
    try {
      return std::make_shared<const DeltaIntegralTable>(DeltaIntegralTable::load(path, params));
    } catch (const BasisError&) {
      // stale or corrupt cache: rebuild below
    }
  }
  auto table = std::make_shared<const DeltaIntegralTable>(params);
  table->save(path);
  return table;
}

}  // namespace

std::optional<ConfigIssue> resolve_dynamics(RunConfig& config) {
  if (config.g_AB.empty()) return std::nullopt;
  const QuenchSetup setup{config.n_tot, config.n_max, config.quad_order, config.g_A, config.representation};
  const QuenchEngine engine(setup, integral_table(config));
  const double g_max = strongest(config.g_AB);
  return resolve_time_step(config, engine.quench(g_max).spectral_width());
}

RunSummary run(RunConfig config) {
  RunSummary summary;
  const fs::path root = config.output_dir;
  std::vector<std::pair<std::string, double>> timings;
  auto stage = Clock::now();

  fs::create_directories(root);
  const ManyBodyBasis basis = ManyBodyBasis::enumerate(config.n_max, config.n_tot);

  std::ostringstream manifest;
  manifest << "format_version = " << kManifestFormatVersion << "\n\n[config]\n";
  std::ostringstream body;
  body << "\n[basis]\n"
       << "size = " << basis.size() << "\n"
       << "dim_even = " << basis.block(Parity::Even).size() << "\n"
       << "dim_odd = " << basis.block(Parity::Odd).size() << "\n";

  if (!config.g_AB.empty()) {
    const QuenchSetup setup{config.n_tot, config.n_max, config.quad_order, config.g_A, config.representation};
    std::unique_ptr<QuenchEngine> engine;
    try {
      engine = std::make_unique<QuenchEngine>(setup, integral_table(config));
    } catch (const std::exception& e) {
      summary.exit_code = 3;
      summary.reason = std::string("setup_failed: ") + e.what();
      return summary;
    }
    timings.emplace_back("setup", seconds_since(stage));
    stage = Clock::now();

    // The widest spectrum belongs to the strongest quench.
    const double g_max = strongest(config.g_AB);
    double width = 0.0;
    try {
      width = engine->quench(g_max).spectral_width();
    } catch (const std::exception& e) {
      summary.exit_code = 3;
      summary.reason = std::string("solver_failed: g_AB = ") + format_number(g_max) + ": " + e.what();
      return summary;
    }
    const bool dt_was_auto = !config.dt;
    if (const auto issue = resolve_time_step(config, width)) {
      summary.exit_code = 2;
      summary.reason = "invalid_config: " + issue->field + ": " + issue->message;
      return summary;
    }
    timings.emplace_back("time_step", seconds_since(stage));
    stage = Clock::now();

    body << "block_dim_even = " << engine->operators().space()->dim() << "\n"
         << "representation = " << to_string(config.representation) << "\n"
         << "\n[dynamics]\n"
         << "spectral_width_max = " << format_number(width) << "\n"
         << "dt_nyquist_bound = " << format_number(nyquist_step(width)) << "\n"
         << "dt_source = " << (dt_was_auto ? "nyquist" : "config") << "\n";

    PointContext ctx{config, *engine, TimeGrid::covering(config.t_end, *config.dt), {}, {}, {}, {}};
    const auto n_obs = static_cast<std::size_t>(config.observable_points);
    for (std::size_t i = 0; i < n_obs; ++i) {
      ctx.obs_times.push_back(config.t_end * static_cast<double>(i) / static_cast<double>(n_obs - 1));
    }
    ctx.psi0 = engine->initial_state();
    ctx.rho0_A = rspdm_A(ctx.psi0, engine->basis());
    ctx.rho0_B = rspdm_B(ctx.psi0, engine->basis());
    body << "le_dt = " << format_number(ctx.le_grid.dt) << "\n"
         << "le_steps = " << ctx.le_grid.steps << "\n"
         << "initial_energy = " << format_number(engine->initial().energy) << "\n";

    summary.points.resize(config.g_AB.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
      for (std::size_t i = next++; i < config.g_AB.size(); i = next++) {
        summary.points[i] = run_point(ctx, i, config.g_AB[i], root);
      }
    };
    const int n_workers = std::min<int>(config.workers, static_cast<int>(config.g_AB.size()));
    {
      std::vector<std::jthread> pool;
      for (int w = 1; w < n_workers; ++w) pool.emplace_back(worker);
      worker();
    }
    timings.emplace_back("points", seconds_since(stage));
  }

  manifest << config.to_text() << body.str() << "\n[points]\n";
  std::size_t failed = 0;
  for (const auto& p : summary.points) {
    manifest << point_directory(p.index) << " = " << (p.ok ? "ok" : "error") << " g_AB=" << format_number(p.g_AB)
             << " weight_sum=" << format_number(p.weight_sum) << " residual=" << format_number(p.residual_norm);
    if (!p.ok) manifest << " error=\"" << p.error << "\"";
    manifest << "\n";
    failed += !p.ok;
  }
  if (config.record_timings) {
    manifest << "\n[timings]\n";
    for (const auto& [name, sec] : timings) manifest << name << "_seconds = " << format_number(sec) << "\n";
  }
  write_atomic(root / "manifest.txt", manifest.str());
  if (failed) {
    summary.exit_code = 3;
    summary.reason = "points_failed: " + std::to_string(failed) + " of " + std::to_string(summary.points.size());
  }
  return summary;
}

}  // namespace tgq
