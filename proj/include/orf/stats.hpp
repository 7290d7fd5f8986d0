#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>

#include "orf/errors.hpp"

namespace orf {

inline double mean(std::span<const double> xs) {
  if (xs.empty()) throw InputError("mean of empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

/// Unbiased sample variance (n - 1 denominator).
inline double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) throw InputError("variance needs at least two samples");
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

/// Standard error of the mean: sqrt(var / n).
inline double standard_error(std::span<const double> xs) {
  return std::sqrt(sample_variance(xs) / static_cast<double>(xs.size()));
}

/// Batch-means standard error of `stat` over `n_batches` contiguous batches:
/// stderr = sd(batch stats) / sqrt(n_batches). Trailing samples that do not
/// fill a batch are dropped.
template <typename Stat>
double batched_stderr(std::span<const double> xs, std::size_t n_batches, Stat&& stat) {
  if (n_batches < 2 || xs.size() < 2 * n_batches) throw InputError("too few samples for batching");
  const std::size_t len = xs.size() / n_batches;
  double s = 0.0;
  double s2 = 0.0;
  for (std::size_t b = 0; b < n_batches; ++b) {
    const double v = stat(xs.subspan(b * len, len));
    s += v;
    s2 += v * v;
  }
  const double nb = static_cast<double>(n_batches);
  const double m = s / nb;
  const double var = std::max(0.0, (s2 - nb * m * m) / (nb - 1.0));
  return std::sqrt(var / nb);
}

}  // namespace orf
