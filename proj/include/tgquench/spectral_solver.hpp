#pragma once

#include "tgquench/hamiltonian.hpp"

#include <Eigen/Dense>

#include <memory>
#include <stdexcept>

namespace tgq {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EigenSystem {
  Eigen::VectorXd energies;  // ascending
  Eigen::MatrixXd vectors;   // column k belongs to energies[k]
  double residual_norm = 0.0;
  double orthonormality_error = 0.0;
  std::shared_ptr<const BlockSpace> space;

  Eigen::Index size() const { return energies.size(); }
};

/// Full symmetric eigendecomposition (LAPACK divide and conquer). Each eigenvector is
/// signed so that its largest-magnitude component is positive. Throws SolverError with
/// the block's provenance if LAPACK fails or the result misses the residual bounds.
EigenSystem diagonalize(const HamiltonianBlock& block);

/// Eigenvalues only.
Eigen::VectorXd eigenvalues(const Eigen::MatrixXd& symmetric);

}  // namespace tgq
