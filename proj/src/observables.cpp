#include "tgquench/observables.hpp"

#include "tgquench/ho_basis.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tgq {

namespace {

std::size_t pair_slot(int n1, int n2) { return static_cast<std::size_t>(n2) * (n2 + 1) / 2 + n1; }

void check_state(const Eigen::VectorXcd& psi, const ManyBodyBasis& basis) {
  if (static_cast<std::size_t>(psi.size()) != basis.size()) {
    throw ObservableError("state has " + std::to_string(psi.size()) + " amplitudes, basis has " +
                          std::to_string(basis.size()));
  }
}

// C[pair slot, m].
Eigen::MatrixXcd pair_by_b(const Eigen::VectorXcd& psi, const ManyBodyBasis& basis) {
  const int n = basis.n_max();
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(pair_slot(n, n) + 1), n + 1);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto& s = basis[i];
    c(static_cast<Eigen::Index>(pair_slot(s.pair.n1, s.pair.n2)), s.m) = psi[static_cast<Eigen::Index>(i)];
  }
  return c;
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hermitian_eigen(const Eigen::MatrixXcd& m) {
  const Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success) throw ObservableError("hermitian eigensolver failed");
  return es;
}

void require_psd(const Eigen::VectorXd& eigenvalues, const char* what) {
  if (eigenvalues.size() && eigenvalues.minCoeff() < -1e-10) {
    throw ObservableError(std::string(what) + " is not positive semidefinite (min eigenvalue " +
                          std::to_string(eigenvalues.minCoeff()) + ")");
  }
}

Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& m) {
  const auto es = hermitian_eigen(m);
  const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

const char* to_string(Species s) { return s == Species::A ? "A" : "B"; }

Rspdm rspdm_B(const Eigen::VectorXcd& psi, const ManyBodyBasis& basis) {
  check_state(psi, basis);
  const Eigen::MatrixXcd c = pair_by_b(psi, basis);
  // rho_B[m, m'] = sum_P C[P, m] conj(C[P, m'])
  return {Species::B, c.transpose() * c.conjugate()};
}

Rspdm rspdm_A(const Eigen::VectorXcd& psi, const ManyBodyBasis& basis) {
  check_state(psi, basis);
  const int n = basis.n_max() + 1;
  // Ordered amplitudes psi(p, q, m): |S(a,b)> = N (|ab> + |ba>), so each ordered term carries C N,
  // and the a == b term appears twice (2 * 1/2).
  Eigen::MatrixXcd ordered = Eigen::MatrixXcd::Zero(n, static_cast<Eigen::Index>(n) * n);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto& s = basis[i];
    const auto amp = psi[static_cast<Eigen::Index>(i)];
    const int a = s.pair.n1;
    const int b = s.pair.n2;
    ordered(a, static_cast<Eigen::Index>(b) * n + s.m) += amp * s.pair.norm();
    ordered(b, static_cast<Eigen::Index>(a) * n + s.m) += amp * s.pair.norm();
  }
  return {Species::A, ordered * ordered.adjoint()};
}

Eigen::MatrixXcd pair_reduced_state(const Eigen::VectorXcd& psi, const ManyBodyBasis& basis) {
  check_state(psi, basis);
  const Eigen::MatrixXcd c = pair_by_b(psi, basis);
  return c * c.adjoint();
}

double pair_entropy(const Eigen::VectorXcd& psi, const ManyBodyBasis& basis) {
  check_state(psi, basis);
  const Eigen::MatrixXcd c = pair_by_b(psi, basis);
  // c c^dagger and c^dagger c share their nonzero spectrum; the latter is impurity-sized.
  return vne(Eigen::MatrixXcd(c.adjoint() * c));
}

DensityProfile density(const Rspdm& rspdm, std::span<const double> x) {
  const auto n = rspdm.rho.rows();
  DensityProfile out;
  out.species = rspdm.species;
  out.x.assign(x.begin(), x.end());
  out.values.resize(x.size());
  const double count = particle_number(rspdm.species);
  std::vector<double> phi(static_cast<std::size_t>(n));
  Eigen::Map<const Eigen::VectorXd> phi_vec(phi.data(), n);
  for (std::size_t i = 0; i < x.size(); ++i) {
    eval_ho_all(static_cast<int>(n - 1), x[i], phi);
    const Eigen::VectorXcd phic = phi_vec.cast<std::complex<double>>();
    out.values[i] = count * (phic.transpose() * rspdm.rho * phic).value().real();
  }
  return out;
}

NaturalOrbitals natural_orbitals(const Rspdm& rspdm) {
  const auto es = hermitian_eigen(rspdm.rho);
  NaturalOrbitals no;
  no.occupations = es.eigenvalues().reverse();
  no.orbitals = es.eigenvectors().rowwise().reverse();
  return no;
}

double entropy_bits(const Eigen::VectorXd& eigenvalues) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    const double l = eigenvalues[i];
    if (l > 1e-12) s -= l * std::log2(l);
  }
  return std::max(s, 0.0);
}

double vne(const Eigen::MatrixXcd& rho) { return entropy_bits(hermitian_eigen(rho).eigenvalues()); }

double time_averaged_entropy(std::span<const double> times, std::span<const double> entropy, double lo, double hi) {
  if (times.size() != entropy.size() || times.empty()) throw ObservableError("entropy series is empty or ragged");
  if (!(lo < hi) || lo < times.front() || hi > times.back()) {
    throw ObservableError("averaging window lies outside the time series");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] > lo && times[i] < hi) {
      sum += entropy[i];
      ++count;
    }
  }
  if (count == 0) throw ObservableError("no samples inside the averaging window");
  return sum / static_cast<double>(count);
}

double uhlmann_fidelity(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma) {
  require_psd(hermitian_eigen(rho).eigenvalues(), "fidelity argument");
  require_psd(hermitian_eigen(sigma).eigenvalues(), "fidelity argument");
  const Eigen::MatrixXcd root = psd_sqrt(rho);
  const Eigen::VectorXd lambda = hermitian_eigen(root * sigma * root).eigenvalues().cwiseMax(0.0);
  const double tr = lambda.cwiseSqrt().sum();
  return tr * tr;
}

ReducedStateEcho::ReducedStateEcho(const Eigen::MatrixXcd& rho_initial, const Eigen::MatrixXcd& rho_final) {
  if (rho_initial.rows() != rho_final.rows()) throw ObservableError("reduced states differ in dimension");
  const auto ei = hermitian_eigen(rho_initial);
  const auto ef = hermitian_eigen(rho_final);
  require_psd(ei.eigenvalues(), "initial reduced state");
  require_psd(ef.eigenvalues(), "final reduced state");
  weights_ = ei.eigenvalues();
  frequencies_ = ef.eigenvalues();
  overlap_ = (ei.eigenvectors().adjoint() * ef.eigenvectors()).cwiseAbs2();
}

double ReducedStateEcho::operator()(double t) const {
  const Eigen::VectorXd c = (frequencies_ * t).array().cos();
  const Eigen::VectorXd s = (frequencies_ * t).array().sin();
  const Eigen::VectorXd re = overlap_ * c;
  const Eigen::VectorXd im = overlap_ * s;
  return weights_.dot((re.array().square() + im.array().square()).matrix());
}

double Spectrum::sum_rule() const {
  double integral = 0.0;
  for (std::size_t i = 1; i < omega.size(); ++i) {
    integral += 0.5 * (values[i] + values[i - 1]) * (omega[i] - omega[i - 1]);
  }
  return integral / (2.0 * std::numbers::pi);
}

std::size_t Spectrum::argmax() const {
  if (values.empty()) throw ObservableError("empty spectrum");
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

std::vector<std::size_t> Spectrum::local_maxima() const {
  std::vector<std::size_t> peaks;
  for (std::size_t i = 1; i + 1 < values.size(); ++i) {
    if (values[i] > values[i - 1] && values[i] > values[i + 1]) peaks.push_back(i);
  }
  return peaks;
}

std::vector<double> frequency_grid(double lo, double hi, std::size_t points) {
  if (points < 2 || !(hi > lo)) throw ObservableError("invalid frequency grid");
  std::vector<double> w(points);
  for (std::size_t i = 0; i < points; ++i) w[i] = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
  return w;
}

Spectrum spectral_function(const QuenchResult& quench, double eta, std::span<const double> omega) {
  if (!(eta > 0.0)) throw ObservableError("broadening eta must be positive");
  Spectrum sp;
  sp.eta = eta;
  sp.omega.assign(omega.begin(), omega.end());
  sp.values.assign(omega.size(), 0.0);
  for (Eigen::Index k = 0; k < quench.overlaps.size(); ++k) {
    const double w = quench.overlaps[k] * quench.overlaps[k];
    const double centre = quench.e0 - quench.energies[k];
    for (std::size_t i = 0; i < omega.size(); ++i) {
      const double d = omega[i] - centre;
      sp.values[i] += w * 2.0 * eta / (d * d + eta * eta);
    }
  }
  return sp;
}

Spectrum spectral_function_windowed(std::span<const std::complex<double>> nu, double dt, double eta,
                                    std::span<const double> omega) {
  if (!(eta > 0.0)) throw ObservableError("broadening eta must be positive");
  if (nu.size() < 2 || !(dt > 0.0)) throw ObservableError("need at least two samples of nu(t)");
  const std::size_t intervals = nu.size() - 1;

  std::vector<double> weight(nu.size(), 0.0);
  const auto simpson = [&](std::size_t from, std::size_t to) {  // even number of intervals
    for (std::size_t j = from; j < to; j += 2) {
      weight[j] += dt / 3.0;
      weight[j + 1] += 4.0 * dt / 3.0;
      weight[j + 2] += dt / 3.0;
    }
  };
  if (intervals == 1) {
    weight[0] = weight[1] = 0.5 * dt;
  } else if (intervals % 2 == 0) {
    simpson(0, intervals);
  } else {
    simpson(0, intervals - 3);
    const std::size_t j = intervals - 3;
    weight[j] += 3.0 * dt / 8.0;
    weight[j + 1] += 9.0 * dt / 8.0;
    weight[j + 2] += 9.0 * dt / 8.0;
    weight[j + 3] += 3.0 * dt / 8.0;
  }

  std::vector<std::complex<double>> damped(nu.size());
  for (std::size_t j = 0; j < nu.size(); ++j) damped[j] = weight[j] * nu[j] * std::exp(-eta * dt * j);

  Spectrum sp;
  sp.eta = eta;
  sp.omega.assign(omega.begin(), omega.end());
  sp.values.resize(omega.size());
  for (std::size_t i = 0; i < omega.size(); ++i) {
    const std::complex<double> step = std::polar(1.0, -omega[i] * dt);
    std::complex<double> phase{1.0, 0.0};
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t j = 0; j < damped.size(); ++j) {
      if (j % 512 == 0) phase = std::polar(1.0, -omega[i] * dt * static_cast<double>(j));
      acc += phase * damped[j];
      phase *= step;
    }
    sp.values[i] = 2.0 * acc.real();
  }
  return sp;
}

}  // namespace tgq
