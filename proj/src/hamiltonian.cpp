#include "tgquench/hamiltonian.hpp"

#include "lapack_eigen.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tgq {

namespace {

double pair_norm(int a, int b) { return a == b ? 0.5 : 1.0 / std::sqrt(2.0); }

enum class Term { AA, AB };

// Visits every nonzero interaction element <row|W|col> (pieces of the same element may be
// emitted more than once and must be accumulated). Columns stay inside the row's parity.
template <class Emit>
void for_each_interaction(const ManyBodyBasis& basis, const DeltaIntegralTable& table,
                          std::span<const std::size_t> rows, Emit&& emit) {
  const int n_max = basis.n_max();
  const int n_tot = basis.n_tot();
  for (const std::size_t i : rows) {
    const CompositeState& s = basis[i];
    const int a = s.pair.n1;
    const int b = s.pair.n2;
    const int m = s.m;
    const double n_ab = pair_norm(a, b);

    // <S(a,b)|delta(x1-x2)|S(c,d)> = 4 N_ab N_cd I_abcd, B index untouched.
    for (int c = 0; c <= n_max; ++c) {
      for (int d = c; d <= n_max && c + d + m <= n_tot; ++d) {
        if ((a + b + c + d) % 2 != 0) continue;
        const auto j = basis.index_of(c, d, m);
        emit(i, static_cast<std::size_t>(j), Term::AA, 4.0 * n_ab * pair_norm(c, d) * table(a, b, c, d));
      }
    }

    // sum_j delta(x_j - y) = 2 delta(x1 - y) on symmetric states; the ordered term (p,q) of
    // the row couples to ordered terms (r,q) of the column.
    const int ordered[2][2] = {{a, b}, {b, a}};
    for (const auto& term : ordered) {
      const int p = term[0];
      const int q = term[1];
      for (int r = 0; r <= n_max && r + q <= n_tot; ++r) {
        const double n_cd = pair_norm(r, q);
        const double multiplicity = r == q ? 2.0 : 1.0;
        for (int mp = 0; mp <= n_max && r + q + mp <= n_tot; ++mp) {
          if ((p + m + r + mp) % 2 != 0) continue;
          const auto j = basis.index_of(r, q, mp);
          emit(i, static_cast<std::size_t>(j), Term::AB, 2.0 * n_ab * n_cd * multiplicity * table(p, m, r, mp));
        }
      }
    }
  }
}

void check_table(const ManyBodyBasis& basis, const DeltaIntegralTable& table) {
  if (table.n_max() < basis.n_max()) {
    throw BasisError("delta integral table covers n_max = " + std::to_string(table.n_max()) +
                     " but basis needs " + std::to_string(basis.n_max()));
  }
}

std::vector<std::ptrdiff_t> local_map(const ManyBodyBasis& basis, std::span<const std::size_t> members) {
  std::vector<std::ptrdiff_t> local(basis.size(), -1);
  for (std::size_t k = 0; k < members.size(); ++k) local[members[k]] = static_cast<std::ptrdiff_t>(k);
  return local;
}

}  // namespace

void CouplingParams::validate() const {
  if (!std::isfinite(g_A) || !std::isfinite(g_AB)) throw BasisError("coupling constants must be finite");
  if (g_A < 0.0 || g_AB < 0.0) throw BasisError("coupling constants must be non-negative");
}

const char* to_string(Representation r) { return r == Representation::Full ? "full" : "com_ground"; }

std::shared_ptr<const BlockSpace> BlockSpace::make(const ManyBodyBasis& basis, Parity parity, Representation rep) {
  auto space = std::make_shared<BlockSpace>();
  space->parity_ = parity;
  space->rep_ = rep;
  space->basis_size_ = basis.size();
  const auto block = basis.block(parity);
  space->members_.assign(block.begin(), block.end());

  if (rep == Representation::Full) {
    space->dim_ = block.size();
    for (std::size_t g : block) space->coord_quanta_.push_back(basis[g].quanta());
    return space;
  }

  if (basis.n_max() < basis.n_tot()) {
    throw BasisError("centre-of-mass reduction needs n_max >= N_tot (n_max = " + std::to_string(basis.n_max()) +
                     ", N_tot = " + std::to_string(basis.n_tot()) + ")");
  }
  space->row_shell_.resize(block.size());
  std::vector<std::ptrdiff_t> lower_local(basis.size(), -1);
  std::size_t row = 0;
  std::size_t col = 0;
  while (row < block.size()) {
    const int q = basis[block[row]].quanta();
    std::size_t end = row;
    while (end < block.size() && basis[block[end]].quanta() == q) ++end;
    const std::size_t rows = end - row;

    // Lowering operator of the centre of mass, a1 + a2 + b (up to 1/sqrt 3), from shell q
    // to shell q-1. Its kernel is the unexcited centre-of-mass sector of the shell.
    std::vector<std::size_t> lower;
    for (std::size_t g = 0; g < basis.size(); ++g) {
      if (basis[g].quanta() == q - 1) {
        lower_local[g] = static_cast<std::ptrdiff_t>(lower.size());
        lower.push_back(g);
      }
    }
    Eigen::MatrixXd lowering = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(lower.size()),
                                                     static_cast<Eigen::Index>(rows));
    for (std::size_t k = 0; k < rows; ++k) {
      const CompositeState& s = basis[block[row + k]];
      const int a = s.pair.n1;
      const int b = s.pair.n2;
      const int m = s.m;
      const auto add = [&](int n1, int n2, int mm, double v) {
        const auto g = basis.index_of(n1, n2, mm);
        lowering(lower_local[static_cast<std::size_t>(g)], static_cast<Eigen::Index>(k)) += v;
      };
      if (m > 0) add(a, b, m - 1, std::sqrt(static_cast<double>(m)));
      if (a > 0) add(a - 1, b, m, std::sqrt(static_cast<double>(a)) * pair_norm(a, b) / pair_norm(a - 1, b));
      if (b > 0) add(a, b - 1, m, std::sqrt(static_cast<double>(b)) * pair_norm(a, b) / pair_norm(a, b - 1));
    }
    for (std::size_t g : lower) lower_local[g] = -1;

    Shell shell;
    shell.quanta = q;
    shell.row_begin = row;
    shell.col_begin = col;
    if (lower.empty()) {
      shell.isometry = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(rows));
    } else {
      // L^T L = 3 N_com on the shell; eigenvalues are 3k, so the kernel is well separated.
      Eigen::MatrixXd gram = lowering.transpose() * lowering;
      Eigen::VectorXd spectrum;
      if (detail::syevd('V', gram, spectrum) != 0) {
        throw BasisError("centre-of-mass kernel solve failed at shell " + std::to_string(q));
      }
      Eigen::Index nullity = 0;
      while (nullity < spectrum.size() && spectrum[nullity] < 1.5) ++nullity;
      if (static_cast<std::size_t>(nullity) + lower.size() != rows) {
        throw BasisError("unexpected centre-of-mass kernel dimension at shell " + std::to_string(q));
      }
      shell.isometry = gram.leftCols(nullity);
      for (Eigen::Index c = 0; c < nullity; ++c) {
        Eigen::Index arg = 0;
        shell.isometry.col(c).cwiseAbs().maxCoeff(&arg);
        if (shell.isometry(arg, c) < 0.0) shell.isometry.col(c) *= -1.0;
      }
    }
    for (std::size_t k = row; k < end; ++k) space->row_shell_[k] = space->shells_.size();
    for (Eigen::Index c = 0; c < shell.isometry.cols(); ++c) space->coord_quanta_.push_back(q);
    col += static_cast<std::size_t>(shell.isometry.cols());
    space->shells_.push_back(std::move(shell));
    row = end;
  }
  space->dim_ = col;
  return space;
}

Eigen::VectorXcd BlockSpace::lift(const Eigen::VectorXcd& coords) const {
  Eigen::VectorXcd global = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis_size_));
  if (rep_ == Representation::Full) {
    for (std::size_t k = 0; k < members_.size(); ++k) global[members_[k]] = coords[k];
    return global;
  }
  for (const Shell& sh : shells_) {
    const Eigen::VectorXcd local =
        sh.isometry * coords.segment(static_cast<Eigen::Index>(sh.col_begin), sh.isometry.cols());
    for (Eigen::Index k = 0; k < local.size(); ++k) global[members_[sh.row_begin + k]] = local[k];
  }
  return global;
}

Eigen::VectorXd BlockSpace::lift(const Eigen::VectorXd& coords) const {
  return lift(Eigen::VectorXcd(coords.cast<std::complex<double>>())).real();
}

Eigen::VectorXd BlockSpace::restrict(const Eigen::VectorXd& global) const {
  Eigen::VectorXd local(static_cast<Eigen::Index>(members_.size()));
  for (std::size_t k = 0; k < members_.size(); ++k) local[k] = global[members_[k]];
  if (rep_ == Representation::Full) return local;
  Eigen::VectorXd coords(static_cast<Eigen::Index>(dim_));
  for (const Shell& sh : shells_) {
    coords.segment(static_cast<Eigen::Index>(sh.col_begin), sh.isometry.cols()) =
        sh.isometry.transpose() * local.segment(static_cast<Eigen::Index>(sh.row_begin), sh.isometry.rows());
  }
  return coords;
}

std::string HamiltonianBlock::provenance() const {
  std::ostringstream os;
  os << "block(parity=" << to_string(parity) << ", g_A=" << params.g_A << ", g_AB=" << params.g_AB
     << ", N_tot=" << n_tot << ", n_max=" << n_max
     << ", representation=" << (space ? to_string(space->representation()) : "full")
     << ", dim=" << matrix.rows() << ")";
  return os.str();
}

BlockOperators::BlockOperators(const ManyBodyBasis& basis, const DeltaIntegralTable& table,
                               std::shared_ptr<const BlockSpace> space)
    : n_tot_(basis.n_tot()), n_max_(basis.n_max()), space_(std::move(space)) {
  check_table(basis, table);
  if (space_->basis_size() != basis.size()) throw BasisError("block space was built for a different basis");
  const auto members = space_->members();
  const auto local = local_map(basis, members);
  const auto n = static_cast<Eigen::Index>(space_->dim());

  one_body_.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) one_body_[k] = space_->quanta(static_cast<std::size_t>(k)) + 1.5;

  if (space_->representation() == Representation::Full) {
    w_aa_ = Eigen::MatrixXd::Zero(n, n);
    w_ab_ = Eigen::MatrixXd::Zero(n, n);
    for_each_interaction(basis, table, members, [&](std::size_t i, std::size_t j, Term t, double v) {
      auto& w = t == Term::AA ? w_aa_ : w_ab_;
      w(local[i], local[j]) += v;
    });
  } else {
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const auto rows = static_cast<Eigen::Index>(members.size());
    RowMajor wq_aa = RowMajor::Zero(rows, n);
    RowMajor wq_ab = RowMajor::Zero(rows, n);
    const auto shells = space_->shells();
    for_each_interaction(basis, table, members, [&](std::size_t i, std::size_t j, Term t, double v) {
      const auto lj = static_cast<std::size_t>(local[j]);
      const auto& sh = shells[space_->shell_of_row(lj)];
      auto& wq = t == Term::AA ? wq_aa : wq_ab;
      wq.row(local[i]).segment(static_cast<Eigen::Index>(sh.col_begin), sh.isometry.cols()) +=
          v * sh.isometry.row(static_cast<Eigen::Index>(lj - sh.row_begin));
    });
    w_aa_ = Eigen::MatrixXd::Zero(n, n);
    w_ab_ = Eigen::MatrixXd::Zero(n, n);
    for (const auto& sh : shells) {
      const auto r0 = static_cast<Eigen::Index>(sh.row_begin);
      const auto c0 = static_cast<Eigen::Index>(sh.col_begin);
      w_aa_.middleRows(c0, sh.isometry.cols()).noalias() +=
          sh.isometry.transpose() * wq_aa.middleRows(r0, sh.isometry.rows());
      w_ab_.middleRows(c0, sh.isometry.cols()).noalias() +=
          sh.isometry.transpose() * wq_ab.middleRows(r0, sh.isometry.rows());
    }
    w_aa_ = 0.5 * (w_aa_ + w_aa_.transpose()).eval();
    w_ab_ = 0.5 * (w_ab_ + w_ab_.transpose()).eval();
  }
}

HamiltonianBlock BlockOperators::at(CouplingParams params) const {
  params.validate();
  HamiltonianBlock h;
  h.parity = space_->parity();
  h.params = params;
  h.n_tot = n_tot_;
  h.n_max = n_max_;
  h.space = space_;
  h.matrix = params.g_A * w_aa_ + params.g_AB * w_ab_;
  h.matrix.diagonal() += one_body_;
  return h;
}

HamiltonianBlock assemble(const ManyBodyBasis& basis, CouplingParams params, const DeltaIntegralTable& table,
                          Parity parity) {
  return BlockOperators(basis, table, BlockSpace::make(basis, parity, Representation::Full)).at(params);
}

Eigen::MatrixXd assemble_unblocked(const ManyBodyBasis& basis, CouplingParams params,
                                   const DeltaIntegralTable& table) {
  params.validate();
  check_table(basis, table);
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  std::vector<std::size_t> all(basis.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    all[i] = i;
    h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = basis[i].quanta() + 1.5;
  }
  for_each_interaction(basis, table, all, [&](std::size_t i, std::size_t j, Term t, double v) {
    h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += (t == Term::AA ? params.g_A : params.g_AB) * v;
  });
  return h;
}

TwoBosonSector two_boson_sector(int n_tot, double g_A, const DeltaIntegralTable& table) {
  if (n_tot < 0) throw BasisError("two_boson_sector: negative cutoff");
  if (n_tot > 2 * table.n_max()) throw BasisError("two_boson_sector: cutoff exceeds integral table");
  TwoBosonSector sector;
  for (int q = 0; q <= n_tot; ++q) {
    for (int a = 0; 2 * a <= q; ++a) {
      if (q - a <= table.n_max()) sector.pairs.push_back({a, q - a});
    }
  }
  const auto n = static_cast<Eigen::Index>(sector.pairs.size());
  sector.matrix.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto [a, b] = sector.pairs[i];
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto [c, d] = sector.pairs[j];
      sector.matrix(i, j) = g_A * 4.0 * pair_norm(a, b) * pair_norm(c, d) * table(a, b, c, d);
    }
    sector.matrix(i, i) += a + b + 1.0;
  }
  return sector;
}

ValidationReport validate(const HamiltonianBlock& block, const DeltaIntegralTable& table) {
  ValidationReport report;
  const auto& h = block.matrix;
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  report.max_asymmetry = (h - h.transpose()).cwiseAbs().maxCoeff() / scale;
  if (report.max_asymmetry > 1e-14) {
    report.violations.push_back("matrix not symmetric: relative asymmetry " + std::to_string(report.max_asymmetry));
  }
  report.min_diagonal = h.size() ? h.diagonal().minCoeff() : 0.0;
  if (block.params.g_A >= 0 && block.params.g_AB >= 0 && report.min_diagonal < 1.5 - 1e-12) {
    report.violations.push_back("diagonal entry below 3/2: " + std::to_string(report.min_diagonal));
  }
  if (block.space && block.space->representation() == Representation::Full) {
    for (std::size_t k = 0; k < block.space->dim(); ++k) {
      if (block.space->quanta(k) % 2 != static_cast<int>(block.parity)) {
        report.violations.push_back("state of wrong parity inside block");
        break;
      }
    }
  }

  if (block.params.g_AB == 0.0 && block.space && block.space->representation() == Representation::Full) {
    // At g_AB = 0, H is block diagonal in m with blocks H_pair(cutoff N_tot - m) + m + 1/2.
    std::vector<double> expected;
    const int p = static_cast<int>(block.parity);
    for (int m = 0; m <= std::min(block.n_max, block.n_tot); ++m) {
      const TwoBosonSector sector = two_boson_sector(block.n_tot - m, block.params.g_A, table);
      std::vector<Eigen::Index> keep;
      for (std::size_t k = 0; k < sector.pairs.size(); ++k) {
        const auto& pr = sector.pairs[k];
        if (pr.n2 <= block.n_max && (pr.n1 + pr.n2 + m) % 2 == p) keep.push_back(static_cast<Eigen::Index>(k));
      }
      if (keep.empty()) continue;
      Eigen::MatrixXd sub(keep.size(), keep.size());
      for (std::size_t r = 0; r < keep.size(); ++r)
        for (std::size_t c = 0; c < keep.size(); ++c) sub(r, c) = sector.matrix(keep[r], keep[c]);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub, Eigen::EigenvaluesOnly);
      for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) expected.push_back(es.eigenvalues()[k] + m + 0.5);
    }
    std::sort(expected.begin(), expected.end());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
    if (expected.size() != static_cast<std::size_t>(es.eigenvalues().size())) {
      report.violations.push_back("separable spectrum has wrong state count");
    } else {
      for (std::size_t k = 0; k < expected.size(); ++k) {
        report.max_separable_mismatch =
            std::max(report.max_separable_mismatch, std::abs(expected[k] - es.eigenvalues()[k]));
      }
      if (report.max_separable_mismatch > 1e-9 * scale) {
        report.violations.push_back("g_AB = 0 spectrum does not factor into pair + B energies (mismatch " +
                                    std::to_string(report.max_separable_mismatch) + ")");
      }
    }
  }
  return report;
}

}  // namespace tgq
