#pragma once

// Hamiltonian of two A bosons plus one B atom with contact couplings, assembled per
// parity block as H = D + g_A W_AA + g_AB W_AB.

#include "tgquench/ho_basis.hpp"
#include "tgquench/many_body_space.hpp"

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <vector>

namespace tgq {

struct CouplingParams {
  double g_A = 0.0;
  double g_AB = 0.0;

  void validate() const;
};

enum class Representation {
  /// Every composite state of the parity block.
  Full,
  /// Only states whose centre of mass is in its oscillator ground state. Exact for
  /// observables of states with an unexcited centre of mass, including every quench
  /// started from the ground state. Requires n_max >= N_tot.
  ComGround,
};

const char* to_string(Representation r);

/// Coordinate space of a Hamiltonian block: either the plain parity block of the
/// composite basis, or an orthonormal subspace of it given shell by shell.
class BlockSpace {
 public:
  static std::shared_ptr<const BlockSpace> make(const ManyBodyBasis& basis, Parity parity, Representation rep);

  Parity parity() const { return parity_; }
  Representation representation() const { return rep_; }
  std::size_t dim() const { return dim_; }
  /// Size of the underlying parity block of the composite basis.
  std::size_t block_size() const { return members_.size(); }
  std::size_t basis_size() const { return basis_size_; }
  /// Global composite indices of the parity block.
  std::span<const std::size_t> members() const { return members_; }
  /// Total quanta carried by coordinate k (every coordinate sits inside one shell).
  int quanta(std::size_t k) const { return coord_quanta_[k]; }

  /// Coordinates -> amplitudes on the full composite basis (zero outside the block).
  Eigen::VectorXcd lift(const Eigen::VectorXcd& coords) const;
  Eigen::VectorXd lift(const Eigen::VectorXd& coords) const;
  /// Composite-basis amplitudes -> coordinates (orthogonal projection).
  Eigen::VectorXd restrict(const Eigen::VectorXd& global) const;

  /// One dense isometry block per shell: rows [row_begin, row_begin + rows) of the
  /// parity block map onto coordinates [col_begin, col_begin + cols).
  struct Shell {
    int quanta = 0;
    std::size_t row_begin = 0;
    std::size_t col_begin = 0;
    Eigen::MatrixXd isometry;
  };
  std::span<const Shell> shells() const { return shells_; }
  /// Shell containing a block-local row.
  std::size_t shell_of_row(std::size_t local_row) const { return row_shell_[local_row]; }

 private:
  Parity parity_ = Parity::Even;
  Representation rep_ = Representation::Full;
  std::size_t dim_ = 0;
  std::size_t basis_size_ = 0;
  std::vector<std::size_t> members_;
  std::vector<int> coord_quanta_;
  std::vector<Shell> shells_;
  std::vector<std::size_t> row_shell_;
};

struct HamiltonianBlock {
  Parity parity = Parity::Even;
  Eigen::MatrixXd matrix;
  CouplingParams params;
  int n_tot = 0;
  int n_max = 0;
  std::shared_ptr<const BlockSpace> space;

  std::string provenance() const;
};

/// Coupling-independent pieces of one block. Assembled once per basis and rescaled for
/// every sweep point.
class BlockOperators {
 public:
  BlockOperators(const ManyBodyBasis& basis, const DeltaIntegralTable& table,
                 std::shared_ptr<const BlockSpace> space);

  const Eigen::VectorXd& one_body() const { return one_body_; }
  const Eigen::MatrixXd& w_aa() const { return w_aa_; }
  const Eigen::MatrixXd& w_ab() const { return w_ab_; }
  const std::shared_ptr<const BlockSpace>& space() const { return space_; }
  std::size_t dim() const { return space_->dim(); }

  HamiltonianBlock at(CouplingParams params) const;

 private:
  int n_tot_ = 0;
  int n_max_ = 0;
  std::shared_ptr<const BlockSpace> space_;
  Eigen::VectorXd one_body_;
  Eigen::MatrixXd w_aa_;
  Eigen::MatrixXd w_ab_;
};

/// Full-representation block of the given parity.
HamiltonianBlock assemble(const ManyBodyBasis& basis, CouplingParams params, const DeltaIntegralTable& table,
                          Parity parity);

/// H over the entire composite basis (both parities), for cross-block checks.
Eigen::MatrixXd assemble_unblocked(const ManyBodyBasis& basis, CouplingParams params,
                                   const DeltaIntegralTable& table);

/// Two-boson Hamiltonian over symmetrized pairs with n1 + n2 <= n_tot (no B atom).
struct TwoBosonSector {
  std::vector<PairState> pairs;
  Eigen::MatrixXd matrix;
};
TwoBosonSector two_boson_sector(int n_tot, double g_A, const DeltaIntegralTable& table);

struct ValidationReport {
  double max_asymmetry = 0.0;
  double min_diagonal = 0.0;
  double max_separable_mismatch = 0.0;  // only filled when g_AB == 0
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

/// Symmetry, diagonal bound, and (at g_AB == 0 on the full representation) the
/// separable-spectrum check against the independently diagonalized two-boson sector.
ValidationReport validate(const HamiltonianBlock& block, const DeltaIntegralTable& table);

}  // namespace tgq
