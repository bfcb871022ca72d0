#pragma once

// Composite basis: bosonic-symmetrized pair of A atoms times one B atom, truncated by
// total oscillator quanta.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace tgq {

enum class Parity : std::uint8_t { Even = 0, Odd = 1 };

const char* to_string(Parity p);

/// |S(n1,n2)> = N (|n1 n2> + |n2 n1>), n1 <= n2. `norm` is N.
struct PairState {
  int n1 = 0;
  int n2 = 0;

  double norm() const;
  bool operator==(const PairState&) const = default;
};

struct CompositeState {
  PairState pair;
  int m = 0;

  int quanta() const { return pair.n1 + pair.n2 + m; }
  bool operator==(const CompositeState&) const = default;
};

Parity parity_of(const CompositeState& s);

class ManyBodyBasis {
 public:
  static constexpr std::ptrdiff_t npos = -1;

  /// All states with n1 <= n2, n1+n2+m <= n_tot and each index <= n_max, ordered
  /// lexicographically in (quanta, n1, n2, m).
  static ManyBodyBasis enumerate(int n_max, int n_tot);

  int n_max() const { return n_max_; }
  int n_tot() const { return n_tot_; }
  std::size_t size() const { return states_.size(); }
  const CompositeState& operator[](std::size_t i) const { return states_[i]; }
  std::span<const CompositeState> states() const { return states_; }

  /// Position of (n1, n2, m) with the pair in either order; npos if not in the basis.
  std::ptrdiff_t index_of(int n1, int n2, int m) const;
  std::ptrdiff_t index_of(const CompositeState& s) const { return index_of(s.pair.n1, s.pair.n2, s.m); }

  /// Global indices of one parity sector, ascending.
  std::span<const std::size_t> block(Parity p) const { return p == Parity::Even ? even_ : odd_; }

  /// Debug manifest: index, n1, n2, m, quanta, parity.
  void write_manifest(std::ostream& os) const;

 private:
  int n_max_ = 0;
  int n_tot_ = 0;
  std::vector<CompositeState> states_;
  std::vector<std::int32_t> lookup_;  // (n1, n2, m) -> position or -1
  std::vector<std::size_t> even_;
  std::vector<std::size_t> odd_;
};

}  // namespace tgq
