#pragma once

// Sign-based binary embeddings: angle estimation from sign codes of random
// projections and a Hamming-shortlist retrieval recall harness.

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <unordered_set>
#include <vector>

#include "orf/dataset.hpp"
#include "orf/errors.hpp"
#include "orf/feature_maps.hpp"
#include "orf/parallel.hpp"

namespace orf {

/// Signs of D projections. Bit i of word i/64 is set when entry i is -1.
class BinaryCode {
 public:
  BinaryCode() = default;

  explicit BinaryCode(std::vector<std::int8_t> bits) : bits_(std::move(bits)) {
    words_.assign((bits_.size() + 63) / 64, 0);
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      if (bits_[i] == -1) {
        words_[i / 64] |= std::uint64_t{1} << (i % 64);
      } else if (bits_[i] != 1) {
        throw InputError("binary code entries must be +1 or -1");
      }
    }
  }

  std::size_t size() const noexcept { return bits_.size(); }
  const std::vector<std::int8_t>& bits() const noexcept { return bits_; }
  int operator[](std::size_t i) const { return bits_[i]; }

  BinaryCode operator-() const {
    std::vector<std::int8_t> neg(bits_.size());
    std::transform(bits_.begin(), bits_.end(), neg.begin(), [](std::int8_t b) { return static_cast<std::int8_t>(-b); });
    return BinaryCode(std::move(neg));
  }

  /// Number of positions where the codes differ.
  friend std::size_t hamming(const BinaryCode& a, const BinaryCode& b) {
    if (a.size() != b.size()) throw DimensionError("hamming: code length mismatch");
    std::size_t n = 0;
    for (std::size_t w = 0; w < a.words_.size(); ++w) n += static_cast<std::size_t>(std::popcount(a.words_[w] ^ b.words_[w]));
    return n;
  }

  friend bool operator==(const BinaryCode& a, const BinaryCode& b) { return a.bits_ == b.bits_; }

 private:
  std::vector<std::int8_t> bits_;
  std::vector<std::uint64_t> words_;
};

/// sign(W x) with sign(0) = +1.
inline BinaryCode sign_features(const FeatureMap& map, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() == map.d_input() && x.squaredNorm() == 0.0) {
    throw InputError("sign_features: angle is undefined for the zero vector");
  }
  const Eigen::VectorXd u = map.project(x);
  std::vector<std::int8_t> bits(static_cast<std::size_t>(u.size()));
  for (Index i = 0; i < u.size(); ++i) bits[static_cast<std::size_t>(i)] = u(i) < 0.0 ? -1 : 1;
  return BinaryCode(std::move(bits));
}

/// theta = (pi/2) (1 - <bx, by> / D), from Pr[sign mismatch] = theta / pi.
inline double angle_estimate(const BinaryCode& bx, const BinaryCode& by) {
  if (bx.size() != by.size()) throw DimensionError("angle_estimate: code length mismatch");
  if (bx.size() == 0) throw InputError("angle_estimate: empty codes");
  const double D = static_cast<double>(bx.size());
  const double dot = D - 2.0 * static_cast<double>(hamming(bx, by));
  return std::clamp(0.5 * std::numbers::pi * (1.0 - dot / D), 0.0, std::numbers::pi);
}

inline double exact_angle(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) {
  const double c = x.dot(y) / (x.norm() * y.norm());
  return std::acos(std::clamp(c, -1.0, 1.0));
}

namespace detail {

// Indices of the `count` smallest scores; ties go to the lower index.
template <typename Score>
std::vector<Index> smallest_by(Index n, Index count, Score&& score) {
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::vector<double> s(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = score(i);
  auto less = [&](Index a, Index b) {
    const double sa = s[static_cast<std::size_t>(a)];
    const double sb = s[static_cast<std::size_t>(b)];
    return sa < sb || (sa == sb && a < b);
  };
  std::partial_sort(idx.begin(), idx.begin() + count, idx.end(), less);
  idx.resize(static_cast<std::size_t>(count));
  return idx;
}

}  // namespace detail

/// Recall of each query's true k nearest neighbors by angle within the
/// `shortlist` base points ranked best by `score(q, b)` (smaller is closer),
/// averaged over queries.
template <typename Score>
double recall_at_k(const Dataset& base, const Dataset& queries, Index k, Index shortlist, Score&& score,
                   unsigned threads = 1) {
  if (k < 1) throw ConfigurationError("recall_at_k: k must be >= 1");
  if (shortlist < k) throw ConfigurationError("recall_at_k: shortlist must be >= k");
  if (shortlist > base.size()) throw ConfigurationError("recall_at_k: shortlist exceeds base size");
  if (queries.size() < 1) throw InputError("recall_at_k: no queries");
  if (base.dim() != queries.dim()) throw DimensionError("recall_at_k: base and query dimensions differ");

  std::vector<double> per_query(static_cast<std::size_t>(queries.size()));
  parallel_for(per_query.size(), threads, [&](std::size_t qs) {
    const auto q = static_cast<Index>(qs);
    const Eigen::VectorXd qv = queries.points.row(q).transpose();
    const auto truth = detail::smallest_by(base.size(), k, [&](Index b) {
      return exact_angle(qv, base.points.row(b).transpose());
    });
    const auto cand = detail::smallest_by(base.size(), shortlist, [&](Index b) { return score(q, b); });
    const std::unordered_set<Index> cand_set(cand.begin(), cand.end());
    const auto hits = std::count_if(truth.begin(), truth.end(), [&](Index b) { return cand_set.count(b) > 0; });
    per_query[qs] = static_cast<double>(hits) / static_cast<double>(k);
  });
  return std::accumulate(per_query.begin(), per_query.end(), 0.0) / static_cast<double>(per_query.size());
}

/// Recall with Hamming distance between sign codes as the shortlist score.
inline double recall_at_k(const Dataset& base, const Dataset& queries, const FeatureMap& map, Index k,
                          Index shortlist, unsigned threads = 1) {
  if (base.dim() != map.d_input()) throw DimensionError("recall_at_k: map input dimension mismatch");
  std::vector<BinaryCode> base_codes(static_cast<std::size_t>(base.size()));
  std::vector<BinaryCode> query_codes(static_cast<std::size_t>(queries.size()));
  parallel_for(base_codes.size(), threads, [&](std::size_t i) {
    base_codes[i] = sign_features(map, base.points.row(static_cast<Index>(i)).transpose());
  });
  parallel_for(query_codes.size(), threads, [&](std::size_t i) {
    query_codes[i] = sign_features(map, queries.points.row(static_cast<Index>(i)).transpose());
  });
  return recall_at_k(
      base, queries, k, shortlist,
      [&](Index q, Index b) {
        return static_cast<double>(hamming(query_codes[static_cast<std::size_t>(q)], base_codes[static_cast<std::size_t>(b)]));
      },
      threads);
}

}  // namespace orf
