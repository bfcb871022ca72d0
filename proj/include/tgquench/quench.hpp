#pragma once

// Sudden quench of the inter-species coupling: ground state at g_AB = 0, expanded in the
// eigenbasis of the post-quench Hamiltonian and propagated exactly.

#include "tgquench/hamiltonian.hpp"
#include "tgquench/spectral_solver.hpp"

#include <complex>
#include <iosfwd>
#include <memory>
#include <numbers>
#include <vector>

namespace tgq {

/// Uniform grid t_i = i * dt, i = 0 .. steps.
struct TimeGrid {
  double dt = 0.0;
  std::size_t steps = 0;

  double t(std::size_t i) const { return static_cast<double>(i) * dt; }
  double end() const { return t(steps); }
  std::size_t size() const { return steps + 1; }

  /// Finest grid ending exactly at `end` whose step does not exceed `max_dt`.
  static TimeGrid covering(double end, double max_dt);
};

/// Largest step with (E_max - E_0) * dt <= pi/4.
double nyquist_step(double spectral_width);

struct InitialState {
  Eigen::VectorXd coords;  // coordinates of the block space
  double energy = 0.0;     // Rayleigh quotient against H_i
};

/// Ground state of H(g_A, g_AB = 0) on the block.
InitialState prepare_initial(const BlockOperators& ops, double g_A);

struct QuenchResult {
  double e0 = 0.0;
  Eigen::VectorXd overlaps;  // c_k = <E_k|Psi_0>
  Eigen::VectorXd energies;  // post-quench E_k, ascending
  double weight_sum = 0.0;
  std::shared_ptr<const EigenSystem> post;

  /// E_max - E_0.
  double spectral_width() const;
  /// sum_k |c_k|^4.
  double inverse_participation() const;
};

/// c_k = v_k^T Psi_0 and E_0 = Psi_0^T H_i Psi_0.
QuenchResult project(const Eigen::VectorXd& psi0, std::shared_ptr<const EigenSystem> post,
                     const HamiltonianBlock& initial_hamiltonian);

/// nu(t) = sum_k |c_k|^2 exp(i (E_0 - E_k) t).
std::complex<double> loschmidt_amplitude(const QuenchResult& result, double t);
inline double loschmidt_echo(const QuenchResult& result, double t) { return std::norm(loschmidt_amplitude(result, t)); }

/// Psi(t) = sum_k c_k exp(-i E_k t) v_k in block-space coordinates.
Eigen::VectorXcd evolve_coords(const QuenchResult& result, double t);
/// Psi(t) on the full composite basis.
Eigen::VectorXcd evolve_state(const QuenchResult& result, double t);

/// Columns t, Re nu, Im nu, L.
void write_le_series(std::ostream& os, const QuenchResult& result, const TimeGrid& grid);

struct QuenchSetup {
  int n_tot = 16;
  int n_max = -1;      // < 0 means n_max = N_tot
  int quad_order = -1; // < 0 means 2 n_max + 2
  double g_A = 25.0;
  Representation representation = Representation::ComGround;
};

/// Basis, integrals, coupling operators of the even block, and the initial state, built
/// once and shared by every sweep point.
class QuenchEngine {
 public:
  explicit QuenchEngine(QuenchSetup setup, std::shared_ptr<const DeltaIntegralTable> table = nullptr);

  const QuenchSetup& setup() const { return setup_; }
  const ManyBodyBasis& basis() const { return basis_; }
  const DeltaIntegralTable& table() const { return *table_; }
  const BlockOperators& operators() const { return *ops_; }
  const InitialState& initial() const { return initial_; }
  const HamiltonianBlock& initial_hamiltonian() const { return h_initial_; }

  /// Global composite-basis amplitudes of Psi_0.
  Eigen::VectorXcd initial_state() const;

  QuenchResult quench(double g_ab) const;

 private:
  QuenchSetup setup_;
  ManyBodyBasis basis_;
  std::shared_ptr<const DeltaIntegralTable> table_;
  std::unique_ptr<BlockOperators> ops_;
  HamiltonianBlock h_initial_;
  InitialState initial_;
};

}  // namespace tgq
