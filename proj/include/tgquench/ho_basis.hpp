#pragma once

// Single-particle harmonic-oscillator basis in trap units (hbar = m = omega = a_ho = 1).
//
// Provides the normalized Hermite functions, a Gauss-Hermite rule, and the table of
// four-index contact integrals I_abcd = \int phi_a phi_b phi_c phi_d dx from which every
// delta-interaction matrix element is built.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

namespace tgq {

class BasisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct HoParams {
  int n_max = 1;
  int quad_order = 4;

  /// Default quadrature order that integrates every product of four basis functions exactly.
  static constexpr int min_quad_order(int n_max) { return 2 * n_max + 2; }
  static HoParams with_defaults(int n_max) { return {n_max, min_quad_order(n_max)}; }

  void validate() const;
};

/// n + 1/2.
double ho_energy(int n);

/// Value of the normalized oscillator eigenfunction phi_n(x).
double eval_ho(int n, double x);

/// phi_0(x) .. phi_{n_max}(x) written into `out` (size n_max + 1), via the stable
/// recurrence h_{n+1} = x sqrt(2/(n+1)) h_n - sqrt(n/(n+1)) h_{n-1}.
void eval_ho_all(int n_max, double x, std::span<double> out);

struct QuadratureGrid {
  std::vector<double> nodes;
  /// Standard Gauss-Hermite weights for \int e^{-x^2} f(x) dx.
  std::vector<double> weights;
  /// weights[i] * exp(nodes[i]^2), kept separately since it stays O(1) at the outer nodes.
  std::vector<double> scaled_weights;

  std::size_t size() const { return nodes.size(); }
};

/// Gauss-Hermite rule of the given order (Golub-Welsch start, Newton polish on phi_order).
QuadratureGrid gauss_hermite(int order);

class DeltaIntegralTable {
 public:
  /// Builds and freezes the full table. Throws BasisError on invalid parameters.
  explicit DeltaIntegralTable(HoParams params);

  const HoParams& params() const { return params_; }
  int n_max() const { return params_.n_max; }

  /// I_abcd; order of the indices does not matter.
  double operator()(int a, int b, int c, int d) const;
  /// Same as operator() but with range checking.
  double at(int a, int b, int c, int d) const;

  std::size_t entry_count() const { return values_.size(); }
  std::span<const double> raw() const { return values_; }

  /// Binary cache keyed by (n_max, quad_order) with a format-version header and checksum.
  void save(const std::filesystem::path& path) const;
  static DeltaIntegralTable load(const std::filesystem::path& path, HoParams expected);

  static constexpr std::uint32_t kFormatVersion = 1;

 private:
  DeltaIntegralTable(HoParams params, std::vector<double> values);

  static std::size_t sorted_index(int a, int b, int c, int d);

  HoParams params_;
  std::vector<double> values_;
};

/// Convenience form of DeltaIntegralTable::at for one-off lookups.
inline double delta_integral(const DeltaIntegralTable& table, int a, int b, int c, int d) {
  return table.at(a, b, c, d);
}

}  // namespace tgq
