#pragma once

// Monte-Carlo oracles for estimator bias and variance, Gaussian projections,
// and the near-orthogonality of the structured SORF decomposition.
//
// Trial t of every simulation draws from derive_seed(seed, t) and writes its
// results into its own slot; statistics are reduced in trial order, so the
// output is bit-identical for any thread count.

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "orf/errors.hpp"
#include "orf/feature_maps.hpp"
#include "orf/kernel_eval.hpp"
#include "orf/parallel.hpp"
#include "orf/rng.hpp"
#include "orf/stats.hpp"
#include "orf/transforms.hpp"

namespace orf {

inline constexpr std::size_t kStatBatches = 20;

struct SimulationReport {
  Kind kind = Kind::RFF;
  Index d = 0;
  Index D = 0;
  std::vector<double> z_grid;
  std::vector<double> bias;             ///< mean estimate - exp(-z^2/2)
  std::vector<double> bias_stderr;      ///< batch-means standard error of the mean
  std::vector<double> var_ratio;        ///< empirical variance / var_rff_closed(z, D)
  std::vector<double> var_ratio_stderr;
  Index trials = 0;
  Seed seed = 0;
};

struct SimulationOptions {
  /// Use y = z e1 in every trial instead of a fresh uniformly random direction.
  bool fixed_direction = false;
  unsigned threads = 1;
};

/// Uniform random unit vector in R^d.
inline Eigen::VectorXd random_unit_vector(Index d, Seed seed) {
  Rng rng(seed);
  Eigen::VectorXd v(d);
  do {
    for (Index i = 0; i < d; ++i) v(i) = rng.normal();
  } while (v.squaredNorm() == 0.0);
  return v.normalized();
}

/// Per trial t: build a map with sigma = 1 from derive_seed(trial_seed, 0),
/// take x = 0 and y = z u for a direction u (random from derive_seed(trial_seed, 1)
/// unless fixed), and record approx_kernel(x, y) for every z on the grid.
/// Returns samples[z_index][trial].
inline std::vector<std::vector<double>> kernel_estimate_samples(Kind kind, Index d, Index D,
                                                                std::span<const double> z_grid, Index trials,
                                                                Seed seed, const SimulationOptions& opt = {}) {
  if (trials < 1) throw ConfigurationError("trials must be >= 1");
  if (z_grid.empty()) throw ConfigurationError("z grid must be nonempty");
  std::vector<std::vector<double>> samples(z_grid.size(), std::vector<double>(static_cast<std::size_t>(trials)));
  const Eigen::VectorXd origin = Eigen::VectorXd::Zero(d);
  parallel_for(static_cast<std::size_t>(trials), opt.threads, [&](std::size_t t) {
    const Seed trial_seed = derive_seed(seed, t);
    const FeatureMap map(TransformSpec{kind, d, D, 1.0, derive_seed(trial_seed, 0)});
    Eigen::VectorXd dir;
    if (opt.fixed_direction) {
      dir = Eigen::VectorXd::Unit(d, 0);
    } else {
      dir = random_unit_vector(d, derive_seed(trial_seed, 1));
    }
    const FeatureVector f0 = features(map, origin);
    for (std::size_t zi = 0; zi < z_grid.size(); ++zi) {
      samples[zi][t] = approx_kernel(f0, features(map, z_grid[zi] * dir));
    }
  });
  return samples;
}

/// Empirical bias and variance ratio of `kind` on a grid of pair distances.
inline SimulationReport mc_bias_variance(Kind kind, Index d, Index D, std::span<const double> z_grid,
                                         Index trials, Seed seed, const SimulationOptions& opt = {}) {
  for (double z : z_grid) {
    if (!(z > 0.0)) throw ConfigurationError("mc_bias_variance: z values must be positive");
  }
  if (trials < static_cast<Index>(2 * kStatBatches)) {
    throw ConfigurationError("mc_bias_variance: need at least 40 trials");
  }
  static_cast<void>(to_string(kind));
  const auto samples = kernel_estimate_samples(kind, d, D, z_grid, trials, seed, opt);

  SimulationReport r;
  r.kind = kind;
  r.d = d;
  r.D = D;
  r.z_grid.assign(z_grid.begin(), z_grid.end());
  r.trials = trials;
  r.seed = seed;
  for (std::size_t zi = 0; zi < z_grid.size(); ++zi) {
    const double z = z_grid[zi];
    const double exact = std::exp(-0.5 * z * z);
    const double rff_var = var_rff_closed(z, D);
    const auto& s = samples[zi];
    r.bias.push_back(mean(s) - exact);
    r.bias_stderr.push_back(batched_stderr(s, kStatBatches, [](auto b) { return mean(b); }));
    r.var_ratio.push_back(sample_variance(s) / rff_var);
    r.var_ratio_stderr.push_back(
        batched_stderr(s, kStatBatches, [](auto b) { return sample_variance(b); }) / rff_var);
  }
  return r;
}

struct ProjectionSummary {
  Eigen::VectorXd mean;      ///< per-coordinate empirical mean of G z
  Eigen::VectorXd variance;  ///< per-coordinate empirical variance
  double max_abs_correlation = 0.0;  ///< over coordinate pairs; 0 when undefined
  double expected_variance = 0.0;    ///< |z|^2
  Index trials = 0;
};

/// Distribution of G z for a d x d standard Gaussian G, one fresh G per trial.
inline ProjectionSummary gaussian_projection_check(Index d, const Eigen::Ref<const Eigen::VectorXd>& z,
                                                   Index trials, Seed seed, unsigned threads = 1) {
  if (z.size() != d) throw DimensionError("gaussian_projection_check: z must have length d");
  if (trials < 2) throw ConfigurationError("gaussian_projection_check: need at least two trials");
  Eigen::MatrixXd out(d, trials);
  parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    Eigen::MatrixXd g(d, d);
    for (Index i = 0; i < d; ++i) {
      for (Index j = 0; j < d; ++j) g(i, j) = rng.normal();
    }
    out.col(static_cast<Index>(t)) = g * z;
  });

  ProjectionSummary s;
  s.trials = trials;
  s.expected_variance = z.squaredNorm();
  s.mean = out.rowwise().mean();
  const Eigen::MatrixXd centered = out.colwise() - s.mean;
  const Eigen::MatrixXd cov = centered * centered.transpose() / static_cast<double>(trials - 1);
  s.variance = cov.diagonal();
  for (Index i = 0; i < d; ++i) {
    for (Index j = i + 1; j < d; ++j) {
      const double denom = std::sqrt(cov(i, i) * cov(j, j));
      if (denom > 0.0) s.max_abs_correlation = std::max(s.max_abs_correlation, std::abs(cov(i, j)) / denom);
    }
  }
  return s;
}

/// Entry (i, k) of the orthonormal Sylvester-Hadamard matrix.
inline double hadamard_entry(std::size_t i, std::size_t k, std::size_t d) {
  return ((std::popcount(i & k) & 1) ? -1.0 : 1.0) / std::sqrt(static_cast<double>(d));
}

/// u = H D2 H D3 z, the vector whose squares weight the rows of R~.
inline Eigen::VectorXd rtilde_weights(const Eigen::Ref<const Eigen::VectorXd>& z, const SignDiagonal& d2,
                                      const SignDiagonal& d3) {
  const SignDiagonal chain[] = {d3, d2};
  return apply_hd_chain(z, chain, 1.0);
}

/// R~ = sqrt(d) H diag(H D2 H D3 z), built entry by entry; satisfies
/// R~ vec(D1) = sqrt(d) H D1 H D2 H D3 z.
inline Eigen::MatrixXd rtilde_matrix(const Eigen::Ref<const Eigen::VectorXd>& z, const SignDiagonal& d2,
                                     const SignDiagonal& d3) {
  const auto d = static_cast<std::size_t>(z.size());
  const HadamardDim dim(d);
  const Eigen::VectorXd u = rtilde_weights(z, d2, d3);
  const double root_d = std::sqrt(static_cast<double>(dim.value()));
  Eigen::MatrixXd r(z.size(), z.size());
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      r(static_cast<Index>(i), static_cast<Index>(k)) = root_d * hadamard_entry(i, k, d) * u(static_cast<Index>(k));
    }
  }
  return r;
}

/// max_{i != j} |<r_i, r_j>| for R~ built from weights u, in O(d log d).
/// Rows i and j have inner product sum_k (-1)^{popcount((i xor j) & k)} u_k^2,
/// which is sqrt(d) (H u^2) at index i xor j.
inline double rtilde_max_offdiag_inner(const Eigen::Ref<const Eigen::VectorXd>& u) {
  Eigen::VectorXd sq = u.array().square();
  const double root_d = std::sqrt(static_cast<double>(u.size()));
  sq = fwht(std::move(sq));
  double best = 0.0;
  for (Index m = 1; m < sq.size(); ++m) best = std::max(best, std::abs(root_d * sq(m)));
  return best;
}

struct OrthogonalityStats {
  Index d = 0;
  Index trials = 0;
  std::vector<double> t_grid;
  std::vector<double> exceed_fraction;  ///< P(max normalized inner product > t)
  double max_row_norm_deviation = 0.0;  ///< max over trials and rows of | |r_i| - |z| |
  double max_reconstruction_error = 0.0;
  double median_max_inner = 0.0;        ///< median over trials of max |<r_i, r_j>| / |z|^2
  std::vector<double> max_inner;        ///< per-trial normalized maxima
};

/// Per trial: draw D1, D2, D3 from derive_seed(trial_seed, 0..2), build R~
/// explicitly to check row norms and the reconstruction identity, and record
/// the largest normalized inner product between distinct rows.
inline OrthogonalityStats near_orthogonality_stats(Index d, const Eigen::Ref<const Eigen::VectorXd>& z,
                                                   Index trials, std::span<const double> t_grid, Seed seed,
                                                   unsigned threads = 1) {
  const HadamardDim dim(static_cast<std::size_t>(std::max<Index>(d, 0)));
  if (z.size() != d) throw DimensionError("near_orthogonality_stats: z must have length d");
  if (z.squaredNorm() == 0.0) throw InputError("near_orthogonality_stats: z must be nonzero");
  if (trials < 1) throw ConfigurationError("near_orthogonality_stats: trials must be >= 1");

  const double znorm = z.norm();
  const double zsq = z.squaredNorm();
  const double root_d = std::sqrt(static_cast<double>(dim.value()));
  std::vector<double> max_inner(static_cast<std::size_t>(trials));
  std::vector<double> norm_dev(static_cast<std::size_t>(trials));
  std::vector<double> recon_err(static_cast<std::size_t>(trials));

  parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
    const Seed ts = derive_seed(seed, t);
    const SignDiagonal d1 = sample_sign_diagonal(d, derive_seed(ts, 0));
    const SignDiagonal d2 = sample_sign_diagonal(d, derive_seed(ts, 1));
    const SignDiagonal d3 = sample_sign_diagonal(d, derive_seed(ts, 2));

    const Eigen::MatrixXd r = rtilde_matrix(z, d2, d3);
    norm_dev[t] = (r.rowwise().norm().array() - znorm).abs().maxCoeff();

    const Eigen::Map<const Eigen::VectorXd> g(d1.entries().data(), d);
    const SignDiagonal chain[] = {d3, d2, d1};
    recon_err[t] = (r * g - apply_hd_chain(z, chain, root_d)).cwiseAbs().maxCoeff();

    max_inner[t] = rtilde_max_offdiag_inner(rtilde_weights(z, d2, d3)) / zsq;
  });

  OrthogonalityStats s;
  s.d = d;
  s.trials = trials;
  s.t_grid.assign(t_grid.begin(), t_grid.end());
  for (double t : t_grid) {
    const auto n = std::count_if(max_inner.begin(), max_inner.end(), [t](double v) { return v > t; });
    s.exceed_fraction.push_back(static_cast<double>(n) / static_cast<double>(trials));
  }
  s.max_row_norm_deviation = *std::max_element(norm_dev.begin(), norm_dev.end());
  s.max_reconstruction_error = *std::max_element(recon_err.begin(), recon_err.end());
  std::vector<double> sorted = max_inner;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  s.median_max_inner = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  s.max_inner = std::move(max_inner);
  return s;
}

}  // namespace orf
