#pragma once

// Randomized linear-algebra kernels: the normalized fast Walsh-Hadamard
// transform, Haar-distributed orthogonal matrices, chi and Rademacher
// diagonals, and chains of Hadamard-diagonal blocks.

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "orf/errors.hpp"
#include "orf/rng.hpp"

namespace orf {

using Index = Eigen::Index;

constexpr bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

/// Smallest power of two >= n (n >= 1).
constexpr std::size_t next_power_of_two(std::size_t n) noexcept { return std::bit_ceil(n); }

/// A transform length that is a power of two.
class HadamardDim {
 public:
  explicit HadamardDim(std::size_t d) : d_(d) {
    if (!is_power_of_two(d)) {
      throw DimensionError("Hadamard dimension must be a power of two, got " + std::to_string(d));
    }
  }

  std::size_t value() const noexcept { return d_; }
  int log2() const noexcept { return std::countr_zero(d_); }

  friend bool operator==(HadamardDim, HadamardDim) = default;

 private:
  std::size_t d_;
};

/// Diagonal of a random sign-flipping matrix; every entry is exactly +1 or -1.
class SignDiagonal {
 public:
  SignDiagonal() = default;
  explicit SignDiagonal(std::vector<double> entries) : entries_(std::move(entries)) {
    for (double e : entries_) {
      if (e != 1.0 && e != -1.0) throw InputError("sign diagonal entries must be +1 or -1");
    }
  }

  std::span<const double> entries() const& noexcept { return entries_; }
  std::span<const double> entries() const&& = delete;
  std::size_t size() const noexcept { return entries_.size(); }
  double operator[](std::size_t i) const { return entries_[i]; }

  friend bool operator==(const SignDiagonal&, const SignDiagonal&) = default;

 private:
  std::vector<double> entries_;
};

/// Diagonal of chi-distributed row scales; every entry is positive.
class ChiDiagonal {
 public:
  ChiDiagonal() = default;
  explicit ChiDiagonal(std::vector<double> entries) : entries_(std::move(entries)) {
    for (double e : entries_) {
      if (!(e > 0.0)) throw InputError("chi diagonal entries must be positive");
    }
  }

  std::span<const double> entries() const& noexcept { return entries_; }
  std::span<const double> entries() const&& = delete;
  std::size_t size() const noexcept { return entries_.size(); }
  double operator[](std::size_t i) const { return entries_[i]; }

  friend bool operator==(const ChiDiagonal&, const ChiDiagonal&) = default;

 private:
  std::vector<double> entries_;
};

/// Square matrix with orthonormal columns.
struct OrthogonalMatrix {
  Eigen::MatrixXd q;
};

namespace detail {

// Unnormalized radix-2 butterflies; result is sqrt(n) * H v.
inline void fwht_butterflies(std::span<double> v) noexcept {
  const std::size_t n = v.size();
  for (std::size_t h = 1; h < n; h *= 2) {
    for (std::size_t i = 0; i < n; i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double a = v[j];
        const double b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
    }
  }
}

inline void check_dim(Index d, const char* what) {
  if (d <= 0) throw DimensionError(std::string(what) + ": dimension must be positive");
}

}  // namespace detail

/// In-place orthonormal Walsh-Hadamard transform, v <- H v with H = H^T = H^-1.
inline void fwht_inplace(std::span<double> v) {
  const HadamardDim dim(v.size());
  detail::fwht_butterflies(v);
  const double s = 1.0 / std::sqrt(static_cast<double>(dim.value()));
  for (double& x : v) x *= s;
}

inline Eigen::VectorXd fwht(Eigen::VectorXd v) {
  fwht_inplace(std::span<double>(v.data(), static_cast<std::size_t>(v.size())));
  return v;
}

/// Haar-distributed orthogonal matrix: QR of a standard Gaussian matrix with
/// the columns of Q multiplied by sign(diag(R)).
inline OrthogonalMatrix sample_haar_orthogonal(Index d, Seed seed) {
  detail::check_dim(d, "sample_haar_orthogonal");
  Rng rng(seed);
  Eigen::MatrixXd g(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) g(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const auto r_diag = qr.matrixQR().diagonal();
  for (Index j = 0; j < d; ++j) {
    if (r_diag(j) < 0.0) q.col(j) = -q.col(j);
  }
  return {std::move(q)};
}

/// d i.i.d. draws from the chi distribution with d degrees of freedom, each the
/// Euclidean norm of d standard normals.
inline ChiDiagonal sample_chi_diagonal(Index d, Seed seed) {
  detail::check_dim(d, "sample_chi_diagonal");
  Rng rng(seed);
  std::vector<double> s(static_cast<std::size_t>(d));
  for (double& e : s) {
    double sq = 0.0;
    for (Index k = 0; k < d; ++k) {
      const double g = rng.normal();
      sq += g * g;
    }
    e = std::sqrt(sq);
  }
  return ChiDiagonal(std::move(s));
}

inline SignDiagonal sample_sign_diagonal(Index d, Seed seed) {
  detail::check_dim(d, "sample_sign_diagonal");
  Rng rng(seed);
  std::vector<double> s(static_cast<std::size_t>(d));
  for (double& e : s) e = rng.rademacher();
  return SignDiagonal(std::move(s));
}

/// In place: x <- scale * H D_k ... H D_1 x. `diagonals[0]` is applied first.
/// Every H is the orthonormal transform; the per-block 1/sqrt(d) factors are
/// folded into one final multiply.
inline void apply_hd_chain_inplace(std::span<double> x, std::span<const SignDiagonal> diagonals,
                                   double scale) {
  if (diagonals.empty() || diagonals.size() > 3) {
    throw ConfigurationError("HD chain needs 1 to 3 diagonals, got " +
                             std::to_string(diagonals.size()));
  }
  const HadamardDim dim(x.size());
  for (const auto& diag : diagonals) {
    if (diag.size() != dim.value()) throw DimensionError("HD chain: diagonal length mismatch");
    const auto signs = diag.entries();
    for (std::size_t i = 0; i < x.size(); ++i) x[i] *= signs[i];
    detail::fwht_butterflies(x);
  }
  const double norm =
      scale * std::pow(static_cast<double>(dim.value()), -0.5 * static_cast<double>(diagonals.size()));
  for (double& v : x) v *= norm;
}

inline Eigen::VectorXd apply_hd_chain(Eigen::VectorXd x, std::span<const SignDiagonal> diagonals,
                                      double scale) {
  apply_hd_chain_inplace(std::span<double>(x.data(), static_cast<std::size_t>(x.size())), diagonals,
                         scale);
  return x;
}

}  // namespace orf
