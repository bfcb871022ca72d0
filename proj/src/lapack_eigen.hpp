#pragma once

// Thin wrapper over LAPACK's divide-and-conquer symmetric eigensolver. Internal.

#include <Eigen/Dense>
#include <lapacke.h>

namespace tgq::detail {

/// Eigenvalues (ascending) into `w`; with jobz = 'V' the eigenvectors overwrite `a`.
inline lapack_int syevd(char jobz, Eigen::MatrixXd& a, Eigen::VectorXd& w) {
  const auto n = static_cast<lapack_int>(a.rows());
  w.resize(n);
  if (n == 0) return 0;
  return LAPACKE_dsyevd(LAPACK_COL_MAJOR, jobz, 'L', n, a.data(), n, w.data());
}

}  // namespace tgq::detail
