#include "tgquench/ho_basis.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>

namespace tgq {

namespace {

constexpr char kCacheMagic[8] = {'T', 'G', 'Q', 'D', 'E', 'L', 'T', 'A'};

std::uint64_t fnv1a(const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 1469598103934665603ULL;
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

constexpr std::size_t binom(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

void HoParams::validate() const {
  if (n_max < 1) throw BasisError("n_max must be >= 1, got " + std::to_string(n_max));
  if (quad_order < min_quad_order(n_max)) {
    throw BasisError("quad_order " + std::to_string(quad_order) + " below 2*n_max+2 = " +
                     std::to_string(min_quad_order(n_max)));
  }
}

double ho_energy(int n) {
  if (n < 0) throw BasisError("ho_energy: negative quantum number " + std::to_string(n));
  return n + 0.5;
}

void eval_ho_all(int n_max, double x, std::span<double> out) {
  if (n_max < 0 || out.size() < static_cast<std::size_t>(n_max) + 1) {
    throw BasisError("eval_ho_all: output span too small");
  }
  const double h0 = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  out[0] = h0;
  if (n_max == 0) return;
  out[1] = std::numbers::sqrt2 * x * h0;
  for (int n = 1; n < n_max; ++n) {
    out[n + 1] = x * std::sqrt(2.0 / (n + 1)) * out[n] - std::sqrt(static_cast<double>(n) / (n + 1)) * out[n - 1];
  }
}

double eval_ho(int n, double x) {
  if (n < 0) throw BasisError("eval_ho: negative quantum number " + std::to_string(n));
  std::vector<double> buf(static_cast<std::size_t>(n) + 1);
  eval_ho_all(n, x, buf);
  return buf[n];
}

QuadratureGrid gauss_hermite(int order) {
  if (order < 1) throw BasisError("gauss_hermite: order must be positive");
  // Jacobi matrix of the Hermite polynomials: zero diagonal, off-diagonal sqrt(k/2).
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd sub(std::max(order - 1, 0));
  for (int k = 1; k < order; ++k) sub[k - 1] = std::sqrt(k / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> jacobi;
  jacobi.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);

  QuadratureGrid grid;
  grid.nodes.resize(order);
  grid.weights.resize(order);
  grid.scaled_weights.resize(order);
  std::vector<double> h(order + 1);
  for (int i = 0; i < order; ++i) {
    double x = jacobi.eigenvalues()[i];
    for (int it = 0; it < 3; ++it) {
      eval_ho_all(order, x, h);
      // phi_n'(x) = sqrt(2n) phi_{n-1}(x) - x phi_n(x)
      const double deriv = std::sqrt(2.0 * order) * h[order - 1] - x * h[order];
      if (deriv == 0.0) break;
      x -= h[order] / deriv;
    }
    eval_ho_all(order - 1, x, h);
    double sum = 0.0;
    for (int k = 0; k < order; ++k) sum += h[k] * h[k];
    grid.nodes[i] = x;
    grid.scaled_weights[i] = 1.0 / sum;
    grid.weights[i] = grid.scaled_weights[i] * std::exp(-x * x);
  }
  // Symmetrize exactly around the origin.
  for (int i = 0; i < order / 2; ++i) {
    const int j = order - 1 - i;
    const double x = 0.5 * (grid.nodes[j] - grid.nodes[i]);
    const double sw = 0.5 * (grid.scaled_weights[i] + grid.scaled_weights[j]);
    const double w = 0.5 * (grid.weights[i] + grid.weights[j]);
    grid.nodes[i] = -x;
    grid.nodes[j] = x;
    grid.scaled_weights[i] = grid.scaled_weights[j] = sw;
    grid.weights[i] = grid.weights[j] = w;
  }
  if (order % 2 == 1) grid.nodes[order / 2] = 0.0;
  return grid;
}

std::size_t DeltaIntegralTable::sorted_index(int a, int b, int c, int d) {
  std::array<int, 4> s{a, b, c, d};
  std::sort(s.begin(), s.end());
  return binom(s[3] + 3, 4) + binom(s[2] + 2, 3) + binom(s[1] + 1, 2) + static_cast<std::size_t>(s[0]);
}

DeltaIntegralTable::DeltaIntegralTable(HoParams params, std::vector<double> values)
    : params_(params), values_(std::move(values)) {}

DeltaIntegralTable::DeltaIntegralTable(HoParams params) : params_(params) {
  params_.validate();
  const int n = params_.n_max;
  const QuadratureGrid grid = gauss_hermite(params_.quad_order);
  const std::size_t q = grid.size();

  // With x = u / sqrt(2) the four-function product carries e^{-u^2}, so
  // I_abcd = (1/sqrt 2) sum_i w_i e^{u_i^2} phi_a(x_i) phi_b(x_i) phi_c(x_i) phi_d(x_i).
  std::vector<double> phi((n + 1) * q);
  std::vector<double> buf(n + 1);
  for (std::size_t i = 0; i < q; ++i) {
    eval_ho_all(n, grid.nodes[i] / std::numbers::sqrt2, buf);
    for (int k = 0; k <= n; ++k) phi[k * q + i] = buf[k];
  }
  // Weighted pair products p_ab[i], a <= b.
  const auto pair_slot = [](int a, int b) { return static_cast<std::size_t>(b) * (b + 1) / 2 + a; };
  std::vector<double> pairs(pair_slot(n, n) + 1);
  std::vector<double> pair_products(pairs.size() * q);
  for (int b = 0; b <= n; ++b) {
    for (int a = 0; a <= b; ++a) {
      double* dst = &pair_products[pair_slot(a, b) * q];
      for (std::size_t i = 0; i < q; ++i) {
        dst[i] = phi[a * q + i] * phi[b * q + i] * grid.scaled_weights[i] / std::numbers::sqrt2;
      }
    }
  }

  values_.assign(binom(n + 4, 4), 0.0);
  for (int d = 0; d <= n; ++d) {
    for (int c = 0; c <= d; ++c) {
      const double* cd = &pair_products[pair_slot(c, d) * q];
      for (int b = 0; b <= c; ++b) {
        for (int a = 0; a <= b; ++a) {
          if ((a + b + c + d) % 2 != 0) continue;
          const double* ab = &phi[a * q];
          const double* bb = &phi[b * q];
          double sum = 0.0;
          for (std::size_t i = 0; i < q; ++i) sum += ab[i] * bb[i] * cd[i];
          values_[sorted_index(a, b, c, d)] = sum;
        }
      }
    }
  }

  const double peak = values_[0];
  for (double v : values_) {
    if (!std::isfinite(v)) throw BasisError("non-finite delta integral");
    if (std::abs(v) > peak * (1.0 + 1e-12)) {
      std::cerr << "warning: delta integral exceeds I_0000 (" << v << " > " << peak << ")\n";
      break;
    }
  }
}

double DeltaIntegralTable::operator()(int a, int b, int c, int d) const {
  return values_[sorted_index(a, b, c, d)];
}

double DeltaIntegralTable::at(int a, int b, int c, int d) const {
  for (int k : {a, b, c, d}) {
    if (k < 0 || k > params_.n_max) {
      throw BasisError("delta integral index " + std::to_string(k) + " outside [0, " +
                       std::to_string(params_.n_max) + "]");
    }
  }
  return (*this)(a, b, c, d);
}

void DeltaIntegralTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw BasisError("cannot open integral cache for writing: " + path.string());
  const std::uint32_t header[3] = {kFormatVersion, static_cast<std::uint32_t>(params_.n_max),
                                   static_cast<std::uint32_t>(params_.quad_order)};
  const std::uint64_t count = values_.size();
  const std::uint64_t checksum = fnv1a(values_.data(), values_.size() * sizeof(double));
  out.write(kCacheMagic, sizeof kCacheMagic);
  out.write(reinterpret_cast<const char*>(header), sizeof header);
  out.write(reinterpret_cast<const char*>(&count), sizeof count);
  out.write(reinterpret_cast<const char*>(values_.data()), static_cast<std::streamsize>(count * sizeof(double)));
  out.write(reinterpret_cast<const char*>(&checksum), sizeof checksum);
  if (!out) throw BasisError("failed writing integral cache: " + path.string());
}

DeltaIntegralTable DeltaIntegralTable::load(const std::filesystem::path& path, HoParams expected) {
  expected.validate();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BasisError("cannot open integral cache: " + path.string());
  char magic[8];
  std::uint32_t header[3];
  std::uint64_t count = 0;
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(header), sizeof header);
  in.read(reinterpret_cast<char*>(&count), sizeof count);
  if (!in || std::memcmp(magic, kCacheMagic, sizeof magic) != 0) {
    throw BasisError("not an integral cache file: " + path.string());
  }
  if (header[0] != kFormatVersion) {
    throw BasisError("integral cache format version " + std::to_string(header[0]) + " unsupported");
  }
  if (static_cast<int>(header[1]) != expected.n_max || static_cast<int>(header[2]) != expected.quad_order) {
    throw BasisError("integral cache key mismatch: file has (n_max=" + std::to_string(header[1]) +
                     ", quad_order=" + std::to_string(header[2]) + ")");
  }
  if (count != binom(expected.n_max + 4, 4)) throw BasisError("integral cache has wrong entry count");
  std::vector<double> values(count);
  std::uint64_t checksum = 0;
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(count * sizeof(double)));
  in.read(reinterpret_cast<char*>(&checksum), sizeof checksum);
  if (!in) throw BasisError("truncated integral cache: " + path.string());
  if (checksum != fnv1a(values.data(), values.size() * sizeof(double))) {
    throw BasisError("integral cache checksum mismatch: " + path.string());
  }
  return DeltaIntegralTable(expected, std::move(values));
}

}  // namespace tgq
