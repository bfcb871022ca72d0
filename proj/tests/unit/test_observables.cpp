#include "tgquench/observables.hpp"

#include "realspace_oracle.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace tgq;

namespace {

QuenchEngine make_engine(int n_tot, double g_A = 25.0) {
  QuenchSetup setup;
  setup.n_tot = n_tot;
  setup.g_A = g_A;
  return QuenchEngine(setup);
}

void check_rspdm(const Rspdm& r) {
  CHECK((r.rho - r.rho.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(std::abs(r.trace() - 1.0) <= 1e-10);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r.rho);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10);
}

std::vector<double> uniform(double lo, double hi, int n) {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = lo + (hi - lo) * i / (n - 1);
  return x;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return s;
}

}  // namespace

TEST_CASE("initial reduced states") {
  const auto engine = make_engine(16);
  const auto psi0 = engine.initial_state();
  const auto rb = rspdm_B(psi0, engine.basis());
  Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(rb.rho.rows(), rb.rho.cols());
  expect(0, 0) = 1.0;
  CHECK((rb.rho - expect).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(vne(pair_reduced_state(psi0, engine.basis())) <= 1e-8);

  const auto free = make_engine(8, 0.0);
  const auto ra = rspdm_A(free.initial_state(), free.basis());
  Eigen::MatrixXcd e0 = Eigen::MatrixXcd::Zero(ra.rho.rows(), ra.rho.cols());
  e0(0, 0) = 1.0;
  CHECK((ra.rho - e0).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(natural_orbitals(ra).occupations[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("reduced states stay valid along the evolution") {
  const auto engine = make_engine(16);
  const auto q = engine.quench(20.0);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> time(0.0, 20.0);
  for (int i = 0; i < 50; ++i) {
    const auto psi = evolve_state(q, time(rng));
    const auto ra = rspdm_A(psi, engine.basis());
    const auto rb = rspdm_B(psi, engine.basis());
    check_rspdm(ra);
    check_rspdm(rb);
    const auto occ = natural_orbitals(rb).occupations;
    CHECK(std::abs(vne(rb) - entropy_bits(occ)) <= 1e-12);
    const double s_pair = vne(pair_reduced_state(psi, engine.basis()));
    CHECK(std::abs(s_pair - vne(rb)) <= 1e-8);
    CHECK(std::abs(pair_entropy(psi, engine.basis()) - s_pair) <= 1e-10);
    for (Eigen::Index k = 1; k < occ.size(); ++k) CHECK(occ[k] <= occ[k - 1]);
    CHECK(occ.sum() == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("reduced states match the ordered-basis partial trace") {
  const auto engine = make_engine(8);
  const auto q = engine.quench(17.0);
  for (double t : {0.0, 0.4, 1.9, 7.3}) {
    const auto psi = evolve_state(q, t);
    const auto ra = rspdm_A(psi, engine.basis());
    const auto rb = rspdm_B(psi, engine.basis());
    CHECK((ra.rho - oracle::partial_trace_A(psi, engine.basis())).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((rb.rho - oracle::partial_trace_B(psi, engine.basis())).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("B decoupled at g_AB = 0") {
  const auto engine = make_engine(12);
  const auto q = engine.quench(0.0);
  for (double t : {0.5, 2.0, 9.0}) {
    const auto rb = rspdm_B(evolve_state(q, t), engine.basis());
    CHECK(natural_orbitals(rb).occupations[0] == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("densities") {
  const auto engine = make_engine(16);
  const auto psi0 = engine.initial_state();
  const auto x = uniform(-10.0, 10.0, 2001);
  const auto db = density(rspdm_B(psi0, engine.basis()), x);
  CHECK(db.values[1000] == doctest::Approx(1.0 / std::sqrt(std::numbers::pi)).epsilon(1e-10));
  const auto da = density(rspdm_A(psi0, engine.basis()), x);
  double peak = 0.0;
  for (double v : da.values) peak = std::max(peak, v);
  CHECK(da.values[1000] < peak);
  CHECK(trapezoid(x, da.values) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(trapezoid(x, db.values) == doctest::Approx(1.0).epsilon(1e-6));

  const auto q = engine.quench(10.0);
  for (double t : {0.9, 3.3}) {
    const auto psi = evolve_state(q, t);
    const auto a = density(rspdm_A(psi, engine.basis()), x);
    const auto b = density(rspdm_B(psi, engine.basis()), x);
    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(std::abs(a.values[i] - a.values[x.size() - 1 - i]) <= 1e-8);
      CHECK(std::abs(b.values[i] - b.values[x.size() - 1 - i]) <= 1e-8);
      CHECK(a.values[i] >= -1e-12);
    }
    CHECK(std::abs(trapezoid(x, a.values) - 2.0) <= 1e-6);
    CHECK(std::abs(trapezoid(x, b.values) - 1.0) <= 1e-6);
  }
}

TEST_CASE("entropy helpers") {
  Eigen::MatrixXcd half = Eigen::MatrixXcd::Identity(2, 2) * 0.5;
  CHECK(vne(half) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(entropy_bits(Eigen::Vector3d(1.0, 0.0, 1e-13)) == 0.0);
  const std::vector<double> t{0.0, 1.0, 2.0, 3.0, 4.0};
  const std::vector<double> s(5, 0.37);
  CHECK(time_averaged_entropy(t, s, 0.5, 3.5) == doctest::Approx(0.37));
  const std::vector<double> ramp{0.0, 1.0, 2.0, 3.0, 4.0};
  CHECK(time_averaged_entropy(t, ramp, 0.5, 3.5) == doctest::Approx(2.0));
  CHECK_THROWS_AS(time_averaged_entropy(t, s, 3.0, 9.0), ObservableError);
  CHECK_THROWS_AS(time_averaged_entropy(t, s, -1.0, 2.0), ObservableError);
}

TEST_CASE("occupations move closer after a strong quench") {
  const auto engine = make_engine(16);
  const auto psi0 = engine.initial_state();
  const auto occ0 = natural_orbitals(rspdm_A(psi0, engine.basis())).occupations;
  const auto q = engine.quench(25.0);
  const auto occ = natural_orbitals(rspdm_A(evolve_state(q, 1.5 * std::numbers::pi), engine.basis())).occupations;
  CHECK(occ[0] - occ[1] < occ0[0] - occ0[1]);
}

TEST_CASE("reduced-state echo") {
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(2, 2);
  rho(0, 0) = 1.0;
  // rho' = |+><+|: eigenvectors rotated by 45 degrees, eigenvalues (1, 0).
  Eigen::MatrixXcd rho_p = Eigen::MatrixXcd::Constant(2, 2, 0.5);
  const ReducedStateEcho echo(rho, rho_p);
  // Hand evaluation: ((1 + cos t)^2 + sin^2 t) / 4 = (1 + cos t) / 2.
  CHECK(echo(1.0) == doctest::Approx(0.7701511529340699).epsilon(1e-13));
  CHECK(echo(0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(echo(std::numbers::pi) == doctest::Approx(0.0).epsilon(1e-14));

  const auto engine = make_engine(10);
  const auto rb = rspdm_A(engine.initial_state(), engine.basis());
  const ReducedStateEcho same(rb.rho, rb.rho);
  for (double t : {0.0, 1.0, 4.0, 11.0}) CHECK(same(t) == doctest::Approx(1.0).epsilon(1e-10));

  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Zero(2, 2);
  bad(0, 0) = 1.5;
  bad(1, 1) = -0.5;
  CHECK_THROWS_AS(ReducedStateEcho(bad, rho), ObservableError);
  CHECK_THROWS_AS(ReducedStateEcho(rho, bad), ObservableError);
}

TEST_CASE("subsystem echoes are identically one without coupling") {
  const auto engine = make_engine(10);
  const auto q = engine.quench(0.0);
  const auto psi0 = engine.initial_state();
  const auto ground = q.post->space->lift(Eigen::VectorXcd(q.post->vectors.col(0).cast<std::complex<double>>()));
  for (Species s : {Species::A, Species::B}) {
    const auto r0 = s == Species::A ? rspdm_A(psi0, engine.basis()) : rspdm_B(psi0, engine.basis());
    const auto rg = s == Species::A ? rspdm_A(ground, engine.basis()) : rspdm_B(ground, engine.basis());
    const ReducedStateEcho echo(r0.rho, rg.rho);
    for (double t : {0.0, 0.8, 5.0}) {
      const auto psi = evolve_state(q, t);
      const auto rt = s == Species::A ? rspdm_A(psi, engine.basis()) : rspdm_B(psi, engine.basis());
      CHECK(echo(t) == doctest::Approx(1.0).epsilon(1e-8));
      CHECK(uhlmann_fidelity(r0.rho, rt.rho) == doctest::Approx(1.0).epsilon(1e-8));
    }
  }
}

TEST_CASE("Uhlmann fidelity") {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2, 2);
  a(0, 0) = 1.0;
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(2, 2);
  b(1, 1) = 1.0;
  CHECK(uhlmann_fidelity(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(uhlmann_fidelity(a, b) == doctest::Approx(0.0).epsilon(1e-12));
  const Eigen::MatrixXcd mixed = Eigen::MatrixXcd::Identity(2, 2) * 0.5;
  CHECK(uhlmann_fidelity(a, mixed) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("spectral function without coupling is a single Lorentzian at zero") {
  const auto engine = make_engine(8);
  const auto q = engine.quench(0.0);
  const auto omega = frequency_grid(-5.0, 5.0, 1001);
  const auto s = spectral_function(q, 0.05, omega);
  CHECK(s.omega[s.argmax()] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(s.values[s.argmax()] == doctest::Approx(2.0 / 0.05).epsilon(1e-8));
  CHECK(s.local_maxima().size() == 1);
  CHECK_THROWS_AS(spectral_function(q, 0.0, omega), ObservableError);
  CHECK_THROWS_AS(spectral_function(q, -1.0, omega), ObservableError);
}

TEST_CASE("spectral sum rule and cross-method agreement") {
  const auto engine = make_engine(16);
  const auto q = engine.quench(7.5);
  const double eta = 0.05;
  const auto omega = frequency_grid(-200.0, 50.0, 25001);
  const auto s = spectral_function(q, eta, omega);
  CHECK(std::abs(s.sum_rule() - 1.0) <= 1e-3);
  for (std::size_t i : s.local_maxima()) CHECK(s.omega[i] <= 0.0 + 0.01);

  const auto zoom = frequency_grid(-30.0, 5.0, 3501);
  const auto direct = spectral_function(q, eta, zoom);
  const auto grid = TimeGrid::covering(10.0 / eta, nyquist_step(q.spectral_width()));
  std::vector<std::complex<double>> nu(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) nu[i] = loschmidt_amplitude(q, grid.t(i));
  const auto windowed = spectral_function_windowed(nu, grid.dt, eta, zoom);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < zoom.size(); ++i) {
    num += std::pow(windowed.values[i] - direct.values[i], 2);
    den += std::pow(direct.values[i], 2);
  }
  CHECK(std::sqrt(num / den) <= 1e-3);
  CHECK_THROWS_AS(spectral_function_windowed(nu, grid.dt, 0.0, zoom), ObservableError);
}
