#include "tgquench/many_body_space.hpp"

#include "tgquench/ho_basis.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace tgq {

const char* to_string(Parity p) { return p == Parity::Even ? "even" : "odd"; }

double PairState::norm() const { return n1 == n2 ? 0.5 : 1.0 / std::sqrt(2.0); }

Parity parity_of(const CompositeState& s) { return s.quanta() % 2 == 0 ? Parity::Even : Parity::Odd; }

ManyBodyBasis ManyBodyBasis::enumerate(int n_max, int n_tot) {
  if (n_max < 0) throw BasisError("n_max must be non-negative");
  if (n_tot < 0) throw BasisError("N_tot must be non-negative");
  if (n_tot > 3 * n_max) {
    throw BasisError("N_tot = " + std::to_string(n_tot) + " exceeds 3*n_max = " + std::to_string(3 * n_max));
  }
  ManyBodyBasis basis;
  basis.n_max_ = n_max;
  basis.n_tot_ = n_tot;
  const std::size_t side = static_cast<std::size_t>(n_max) + 1;
  basis.lookup_.assign(side * side * side, -1);
  for (int q = 0; q <= n_tot; ++q) {
    for (int n1 = 0; n1 <= std::min(n_max, q); ++n1) {
      for (int n2 = n1; n2 <= std::min(n_max, q - n1); ++n2) {
        const int m = q - n1 - n2;
        if (m > n_max) continue;
        const auto pos = static_cast<std::int32_t>(basis.states_.size());
        basis.states_.push_back({{n1, n2}, m});
        basis.lookup_[(n1 * side + n2) * side + m] = pos;
        (q % 2 == 0 ? basis.even_ : basis.odd_).push_back(static_cast<std::size_t>(pos));
      }
    }
  }
  return basis;
}

std::ptrdiff_t ManyBodyBasis::index_of(int n1, int n2, int m) const {
  if (n1 > n2) std::swap(n1, n2);
  if (n1 < 0 || m < 0 || n2 > n_max_ || m > n_max_) return npos;
  const std::size_t side = static_cast<std::size_t>(n_max_) + 1;
  return lookup_[(n1 * side + n2) * side + m];
}

void ManyBodyBasis::write_manifest(std::ostream& os) const {
  os << "# index n1 n2 m quanta parity\n";
  for (std::size_t i = 0; i < states_.size(); ++i) {
    const auto& s = states_[i];
    os << i << ' ' << s.pair.n1 << ' ' << s.pair.n2 << ' ' << s.m << ' ' << s.quanta() << ' '
       << to_string(parity_of(s)) << '\n';
  }
}

}  // namespace tgq
