#include "tgquench/quench.hpp"

#include "tgquench/text_format.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace tgq {

TimeGrid TimeGrid::covering(double end, double max_dt) {
  if (!(end >= 0.0) || !(max_dt > 0.0)) throw SolverError("invalid time grid request");
  TimeGrid grid;
  grid.steps = end == 0.0 ? 0 : static_cast<std::size_t>(std::ceil(end / max_dt - 1e-12));
  grid.dt = grid.steps == 0 ? max_dt : end / static_cast<double>(grid.steps);
  return grid;
}

double nyquist_step(double spectral_width) {
  if (spectral_width <= 0.0) return std::numeric_limits<double>::infinity();
  return std::numbers::pi / (4.0 * spectral_width);
}

InitialState prepare_initial(const BlockOperators& ops, double g_A) {
  const HamiltonianBlock h = ops.at({g_A, 0.0});
  const EigenSystem es = diagonalize(h);
  InitialState init;
  init.coords = es.vectors.col(0);
  init.energy = init.coords.dot(h.matrix * init.coords);
  return init;
}

double QuenchResult::spectral_width() const { return energies.size() ? energies.maxCoeff() - e0 : 0.0; }

double QuenchResult::inverse_participation() const { return overlaps.array().pow(4).sum(); }

QuenchResult project(const Eigen::VectorXd& psi0, std::shared_ptr<const EigenSystem> post,
                     const HamiltonianBlock& initial_hamiltonian) {
  if (!post || psi0.size() != post->vectors.rows() || initial_hamiltonian.matrix.rows() != psi0.size()) {
    throw SolverError("project: dimension mismatch between initial state and post-quench eigensystem");
  }
  QuenchResult r;
  r.overlaps = post->vectors.transpose() * psi0;
  r.energies = post->energies;
  r.e0 = psi0.dot(initial_hamiltonian.matrix * psi0) / psi0.squaredNorm();
  r.weight_sum = r.overlaps.squaredNorm();
  r.post = std::move(post);
  return r;
}

std::complex<double> loschmidt_amplitude(const QuenchResult& result, double t) {
  std::complex<double> nu{0.0, 0.0};
  for (Eigen::Index k = 0; k < result.overlaps.size(); ++k) {
    const double w = result.overlaps[k] * result.overlaps[k];
    nu += w * std::polar(1.0, (result.e0 - result.energies[k]) * t);
  }
  return nu;
}

Eigen::VectorXcd evolve_coords(const QuenchResult& result, double t) {
  Eigen::VectorXcd phased(result.overlaps.size());
  for (Eigen::Index k = 0; k < phased.size(); ++k) {
    phased[k] = result.overlaps[k] * std::polar(1.0, -result.energies[k] * t);
  }
  return result.post->vectors.cast<std::complex<double>>() * phased;
}

Eigen::VectorXcd evolve_state(const QuenchResult& result, double t) {
  return result.post->space->lift(evolve_coords(result, t));
}

void write_le_series(std::ostream& os, const QuenchResult& result, const TimeGrid& grid) {
  os << "# columns: t Re_nu Im_nu L\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid.t(i);
    const auto nu = loschmidt_amplitude(result, t);
    write_row(os, {t, nu.real(), nu.imag(), std::norm(nu)});
  }
}

QuenchEngine::QuenchEngine(QuenchSetup setup, std::shared_ptr<const DeltaIntegralTable> table) : setup_(setup) {
  if (setup_.n_max < 0) setup_.n_max = setup_.n_tot;
  if (setup_.quad_order < 0) setup_.quad_order = HoParams::min_quad_order(setup_.n_max);
  basis_ = ManyBodyBasis::enumerate(setup_.n_max, setup_.n_tot);
  if (table) {
    if (table->n_max() < setup_.n_max) throw BasisError("supplied integral table is too small");
    table_ = std::move(table);
  } else {
    table_ = std::make_shared<const DeltaIntegralTable>(HoParams{setup_.n_max, setup_.quad_order});
  }
  ops_ = std::make_unique<BlockOperators>(basis_, *table_,
                                          BlockSpace::make(basis_, Parity::Even, setup_.representation));
  h_initial_ = ops_->at({setup_.g_A, 0.0});
  initial_ = prepare_initial(*ops_, setup_.g_A);
}

Eigen::VectorXcd QuenchEngine::initial_state() const {
  return ops_->space()->lift(Eigen::VectorXcd(initial_.coords.cast<std::complex<double>>()));
}

QuenchResult QuenchEngine::quench(double g_ab) const {
  auto post = std::make_shared<const EigenSystem>(diagonalize(ops_->at({setup_.g_A, g_ab})));
  return project(initial_.coords, std::move(post), h_initial_);
}

}  // namespace tgq
