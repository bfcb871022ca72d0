#include "tgquench/spectral_solver.hpp"

#include "lapack_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tgq {

using detail::syevd;

EigenSystem diagonalize(const HamiltonianBlock& block) {
  if (block.matrix.rows() != block.matrix.cols()) throw SolverError("non-square block: " + block.provenance());
  EigenSystem es;
  es.space = block.space;
  es.vectors = block.matrix;
  if (const lapack_int info = syevd('V', es.vectors, es.energies); info != 0) {
    throw SolverError("dsyevd failed (info " + std::to_string(info) + ") for " + block.provenance());
  }
  for (Eigen::Index k = 0; k < es.vectors.cols(); ++k) {
    Eigen::Index arg = 0;
    es.vectors.col(k).cwiseAbs().maxCoeff(&arg);
    if (es.vectors(arg, k) < 0.0) es.vectors.col(k) *= -1.0;
  }
  if (es.size() == 0) return es;

  const Eigen::MatrixXd residual = block.matrix * es.vectors - es.vectors * es.energies.asDiagonal();
  es.residual_norm = residual.colwise().norm().maxCoeff();
  es.orthonormality_error =
      (es.vectors.transpose() * es.vectors - Eigen::MatrixXd::Identity(es.size(), es.size())).cwiseAbs().maxCoeff();
  const double h_norm = std::max(1.0, block.matrix.norm());
  if (es.residual_norm > 1e-8 * h_norm || es.orthonormality_error > 1e-10) {
    throw SolverError("eigendecomposition failed certification (residual " + std::to_string(es.residual_norm) +
                      ", orthonormality " + std::to_string(es.orthonormality_error) + ") for " + block.provenance());
  }
  return es;
}

Eigen::VectorXd eigenvalues(const Eigen::MatrixXd& symmetric) {
  Eigen::MatrixXd a = symmetric;
  Eigen::VectorXd w;
  if (const lapack_int info = syevd('N', a, w); info != 0) {
    throw SolverError("dsyevd failed (info " + std::to_string(info) + ")");
  }
  return w;
}

}  // namespace tgq
