#pragma once

// Exact and approximate Gaussian kernel values, approximation error
// measurement, closed-form error expressions, and bandwidth selection.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "orf/dataset.hpp"
#include "orf/errors.hpp"
#include "orf/feature_maps.hpp"
#include "orf/parallel.hpp"
#include "orf/rng.hpp"
#include "orf/stats.hpp"

namespace orf {

/// exp(-|x - y|^2 / (2 sigma^2)).
inline double exact_kernel(const Eigen::Ref<const Eigen::VectorXd>& x,
                           const Eigen::Ref<const Eigen::VectorXd>& y, double sigma) {
  if (!(sigma > 0.0)) throw ConfigurationError("exact_kernel: sigma must be positive");
  if (x.size() != y.size()) throw DimensionError("exact_kernel: length mismatch");
  return std::exp(-(x - y).squaredNorm() / (2.0 * sigma * sigma));
}

inline double approx_kernel(const FeatureVector& fx, const FeatureVector& fy) {
  if (fx.values.size() != fy.values.size()) throw DimensionError("approx_kernel: length mismatch");
  return fx.values.dot(fy.values);
}

struct PairSample {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  double z = 0.0;
  double k_exact = 1.0;
};

inline PairSample make_pair_sample(Eigen::VectorXd x, Eigen::VectorXd y, double sigma) {
  PairSample p;
  p.k_exact = exact_kernel(x, y, sigma);
  p.z = (x - y).norm() / sigma;
  p.x = std::move(x);
  p.y = std::move(y);
  return p;
}

struct MseReport {
  Kind kind = Kind::RFF;
  Index D = 0;
  double mse = 0.0;
  Index n_pairs = 0;
  Index n_seeds = 0;
  double std_error = 0.0;  ///< standard error of `mse` across seeds
};

/// Mean over seeds and pairs of (approx - exact)^2. Seed s builds the map
/// from derive_seed(spec.seed, s); pairs are fixed across seeds.
inline MseReport mse_estimate(const TransformSpec& spec, std::span<const PairSample> pairs, Index n_seeds,
                              unsigned threads = 1) {
  if (pairs.empty()) throw InputError("mse_estimate: no pairs");
  if (n_seeds < 1) throw ConfigurationError("mse_estimate: n_seeds must be >= 1");
  spec.validate();
  std::vector<double> per_seed(static_cast<std::size_t>(n_seeds));
  parallel_for(per_seed.size(), threads, [&](std::size_t s) {
    TransformSpec local = spec;
    local.seed = derive_seed(spec.seed, s);
    const FeatureMap map(local);
    double acc = 0.0;
    for (const auto& p : pairs) {
      const double err = approx_kernel(features(map, p.x), features(map, p.y)) - p.k_exact;
      acc += err * err;
    }
    per_seed[s] = acc / static_cast<double>(pairs.size());
  });
  MseReport r;
  r.kind = spec.kind;
  r.D = spec.D;
  r.mse = mean(per_seed);
  r.n_pairs = static_cast<Index>(pairs.size());
  r.n_seeds = n_seeds;
  r.std_error = n_seeds > 1 ? standard_error(per_seed) : 0.0;
  return r;
}

/// Variance of the RFF estimate: (1 - e^{-z^2})^2 / (2D).
inline double var_rff_closed(double z, Index D) {
  if (z < 0.0 || D < 1) throw DomainError("var_rff_closed: need z >= 0 and D >= 1");
  const double a = -std::expm1(-z * z);
  return a * a / (2.0 * static_cast<double>(D));
}

/// Large-d ratio Var(ORF) / Var(RFF) = 1 - (D-1) e^{-z^2} z^4 / (d (1 - e^{-z^2})^2).
inline double var_ratio_closed(double z, Index d, Index D) {
  if (!(z > 0.0)) throw DomainError("var_ratio_closed: z must be positive");
  if (D < 1 || D > d) throw DomainError("var_ratio_closed: need 1 <= D <= d");
  const double z2 = z * z;
  const double a = -std::expm1(-z2);
  return 1.0 - static_cast<double>(D - 1) * std::exp(-z2) * z2 * z2 / (static_cast<double>(d) * a * a);
}

/// Upper bound 6 z / sqrt(d) on the SORF bias.
inline double sorf_bias_bound(double z, Index d) {
  if (z < 0.0 || d < 1) throw DomainError("sorf_bias_bound: need z >= 0 and d >= 1");
  return 6.0 * z / std::sqrt(static_cast<double>(d));
}

/// Mean k-th nearest neighbor distance over min(n_sample, n) sampled points.
/// Neighbors are searched among all points except the sampled point itself.
inline double select_sigma(const Dataset& data, Index k = 50, Index n_sample = 1000, Seed seed = 0,
                           unsigned threads = 1) {
  const Index n = data.size();
  if (k < 1) throw ConfigurationError("select_sigma: k must be >= 1");
  if (n <= k) throw InputError("select_sigma: dataset needs more than k points");
  if (n_sample < 1) throw ConfigurationError("select_sigma: n_sample must be >= 1");

  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  const Index m = std::min(n_sample, n);
  if (m < n) {
    Rng rng(seed);
    for (Index i = 0; i < m; ++i) {
      const auto j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - i)));
      std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
  }

  std::vector<double> kth(static_cast<std::size_t>(m));
  parallel_for(kth.size(), threads, [&](std::size_t s) {
    const Index i = idx[s];
    std::vector<double> dist;
    dist.reserve(static_cast<std::size_t>(n - 1));
    for (Index j = 0; j < n; ++j) {
      if (j != i) dist.push_back((data.points.row(i) - data.points.row(j)).squaredNorm());
    }
    std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
    kth[s] = std::sqrt(dist[static_cast<std::size_t>(k - 1)]);
  });
  return mean(kth);
}

}  // namespace orf
