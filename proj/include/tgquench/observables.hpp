#pragma once

// Reduced states, densities, entropies, subsystem echoes and the spectral function.

#include "tgquench/many_body_space.hpp"
#include "tgquench/quench.hpp"

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

namespace tgq {

class ObservableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Species { A, B };

const char* to_string(Species s);
inline int particle_number(Species s) { return s == Species::A ? 2 : 1; }

/// Reduced single-particle density matrix over oscillator indices 0..n_max, unit trace.
struct Rspdm {
  Species species = Species::B;
  Eigen::MatrixXcd rho;

  double trace() const { return rho.trace().real(); }
};

/// psi is indexed by the global composite basis.
Rspdm rspdm_B(const Eigen::VectorXcd& psi, const ManyBodyBasis& basis);
Rspdm rspdm_A(const Eigen::VectorXcd& psi, const ManyBodyBasis& basis);

/// Two-particle reduced state of the A pair (B traced out) over symmetrized pair states,
/// ordered by pair slot n2 (n2 + 1) / 2 + n1.
Eigen::MatrixXcd pair_reduced_state(const Eigen::VectorXcd& psi, const ManyBodyBasis& basis);
/// vne(pair_reduced_state(psi)) without forming the pair-sized matrix.
double pair_entropy(const Eigen::VectorXcd& psi, const ManyBodyBasis& basis);

struct DensityProfile {
  Species species = Species::B;
  std::vector<double> x;
  std::vector<double> values;
};

/// rho(x) = N_species sum_{n,n'} rho[n,n'] phi_n(x) phi_n'(x).
DensityProfile density(const Rspdm& rspdm, std::span<const double> x);

struct NaturalOrbitals {
  Eigen::VectorXd occupations;  // descending
  Eigen::MatrixXcd orbitals;    // column k belongs to occupations[k]
};

NaturalOrbitals natural_orbitals(const Rspdm& rspdm);

/// -sum lambda log2 lambda; eigenvalues below 1e-12 contribute nothing.
double entropy_bits(const Eigen::VectorXd& eigenvalues);
double vne(const Eigen::MatrixXcd& rho);
inline double vne(const Rspdm& r) { return vne(r.rho); }

/// Mean of the samples with lo < t < hi.
double time_averaged_entropy(std::span<const double> times, std::span<const double> entropy, double lo, double hi);

/// (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double uhlmann_fidelity(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma);

/// Subsystem echo built from the eigendecompositions of two reduced states:
/// sum_m w_m [(sum_n cos(w'_n t) |<psi_m|phi'_n>|^2)^2 + (sum_n sin(w'_n t) |<psi_m|phi'_n>|^2)^2].
class ReducedStateEcho {
 public:
  /// Throws ObservableError if either matrix is not positive semidefinite.
  ReducedStateEcho(const Eigen::MatrixXcd& rho_initial, const Eigen::MatrixXcd& rho_final);

  double operator()(double t) const;

 private:
  Eigen::VectorXd weights_;        // w_m
  Eigen::VectorXd frequencies_;    // w'_n
  Eigen::MatrixXd overlap_;        // |<psi_m|phi'_n>|^2
};

struct Spectrum {
  std::vector<double> omega;
  std::vector<double> values;
  double eta = 0.0;

  /// (1/2pi) \int A d omega, trapezoid on the frequency grid.
  double sum_rule() const;
  std::size_t argmax() const;
  /// Interior strict local maxima, ascending in omega.
  std::vector<std::size_t> local_maxima() const;
};

/// Uniform frequency grid of `points` values from lo to hi.
std::vector<double> frequency_grid(double lo, double hi, std::size_t points);

/// A(omega) = sum_k |c_k|^2 2 eta / ((omega - (E_0 - E_k))^2 + eta^2).
Spectrum spectral_function(const QuenchResult& quench, double eta, std::span<const double> omega);

/// A(omega) = 2 Re \int_0^T exp(-i omega t) nu(t) exp(-eta t) dt from samples nu(j dt),
/// j = 0..M (composite Simpson). Equivalent to the full-line transform of the hermitian
/// extension nu(-t) = conj(nu(t)).
Spectrum spectral_function_windowed(std::span<const std::complex<double>> nu, double dt, double eta,
                                    std::span<const double> omega);

}  // namespace tgq
