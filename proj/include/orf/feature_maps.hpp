#pragma once

// Random feature maps for the Gaussian kernel.
//
// A map is described by a TransformSpec and built into an immutable FeatureMap
// holding ceil(D / d_padded) independent square blocks:
//
//   RFF       (1/sigma) G                 G i.i.d. N(0, 1)
//   ORF       (1/sigma) S Q               Q Haar orthogonal, S i.i.d. chi_d
//   ORFPrime  (sqrt(d)/sigma) Q
//   SORF      (sqrt(d)/sigma) H D1 H D2 H D3
//   HDHD, HD  the same chain with two or one Hadamard-diagonal blocks
//
// Block outputs are concatenated and truncated to D rows. Hadamard kinds
// zero-pad inputs to the next power of two; dense kinds use d_input as is.
// Block b draws from derive_seed(seed, b); inside a block, component i
// (Q, S, or the i-th diagonal) draws from derive_seed(block_seed, i).

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "orf/errors.hpp"
#include "orf/rng.hpp"
#include "orf/transforms.hpp"

namespace orf {

enum class Kind { RFF, ORF, ORFPrime, SORF, HDHD, HD };

inline constexpr std::array<Kind, 6> kAllKinds = {Kind::RFF,  Kind::ORF,  Kind::ORFPrime,
                                                  Kind::SORF, Kind::HDHD, Kind::HD};

inline std::string_view to_string(Kind k) {
  switch (k) {
    case Kind::RFF: return "RFF";
    case Kind::ORF: return "ORF";
    case Kind::ORFPrime: return "ORFPrime";
    case Kind::SORF: return "SORF";
    case Kind::HDHD: return "HDHD";
    case Kind::HD: return "HD";
  }
  throw ConfigurationError("unknown transform kind");
}

/// Case-insensitive; also accepts "orf'", "orf-prime", "orf_prime" and "hdhdhd".
inline Kind parse_kind(std::string_view name) {
  std::string s;
  for (char c : name) {
    if (c != '-' && c != '_') s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (s == "rff") return Kind::RFF;
  if (s == "orf") return Kind::ORF;
  if (s == "orfprime" || s == "orf'") return Kind::ORFPrime;
  if (s == "sorf" || s == "hdhdhd") return Kind::SORF;
  if (s == "hdhd") return Kind::HDHD;
  if (s == "hd") return Kind::HD;
  throw ConfigurationError("unknown transform kind '" + std::string(name) + "'");
}

constexpr bool is_hadamard_kind(Kind k) noexcept {
  return k == Kind::SORF || k == Kind::HDHD || k == Kind::HD;
}

constexpr int hadamard_blocks(Kind k) noexcept {
  switch (k) {
    case Kind::SORF: return 3;
    case Kind::HDHD: return 2;
    case Kind::HD: return 1;
    default: return 0;
  }
}

struct TransformSpec {
  Kind kind = Kind::RFF;
  Index d_input = 1;
  Index D = 1;
  double sigma = 1.0;
  Seed seed = 0;

  void validate() const {
    if (d_input <= 0) throw ConfigurationError("d_input must be positive");
    if (D <= 0) throw ConfigurationError("D must be positive");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigurationError("sigma must be positive and finite");
    static_cast<void>(to_string(kind));
  }

  /// Internal block dimension: next power of two for Hadamard kinds.
  Index d_padded() const {
    return is_hadamard_kind(kind)
               ? static_cast<Index>(next_power_of_two(static_cast<std::size_t>(d_input)))
               : d_input;
  }

  friend bool operator==(const TransformSpec&, const TransformSpec&) = default;
};

/// Persisted form of a map. The spec fully determines the map, so it is the
/// canonical serialization.
inline nlohmann::json to_json(const TransformSpec& spec) {
  return {{"format", "orf-transform-spec"},
          {"version", 1},
          {"kind", std::string(to_string(spec.kind))},
          {"d_input", spec.d_input},
          {"D", spec.D},
          {"sigma", spec.sigma},
          {"seed", spec.seed}};
}

inline TransformSpec spec_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "orf-transform-spec") {
      throw ConfigurationError("not a transform spec");
    }
    if (j.at("version").get<int>() != 1) throw ConfigurationError("unsupported spec version");
    TransformSpec spec;
    spec.kind = parse_kind(j.at("kind").get<std::string>());
    spec.d_input = j.at("d_input").get<Index>();
    spec.D = j.at("D").get<Index>();
    spec.sigma = j.at("sigma").get<double>();
    spec.seed = j.at("seed").get<Seed>();
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigurationError(std::string("malformed transform spec: ") + e.what());
  }
}

/// (1/sigma) G.
struct GaussianBlock {
  Eigen::MatrixXd w;
};
/// (1/sigma) S Q.
struct OrthogonalBlock {
  ChiDiagonal s;
  OrthogonalMatrix q;
};
/// (sqrt(d)/sigma) Q.
struct ScaledOrthogonalBlock {
  OrthogonalMatrix q;
};
/// (sqrt(d)/sigma) H D_k ... H D_1; diagonals[0] is applied first.
struct HadamardBlock {
  std::vector<SignDiagonal> diagonals;
};

using Block = std::variant<GaussianBlock, OrthogonalBlock, ScaledOrthogonalBlock, HadamardBlock>;

/// sqrt(1/D) [sin(u), cos(u)], all sines first.
struct FeatureVector {
  Eigen::VectorXd values;
};

class FeatureMap {
 public:
  explicit FeatureMap(const TransformSpec& spec) : spec_(spec) {
    spec_.validate();
    d_padded_ = spec_.d_padded();
    const Index n_blocks = (spec_.D + d_padded_ - 1) / d_padded_;
    blocks_.reserve(static_cast<std::size_t>(n_blocks));
    for (Index b = 0; b < n_blocks; ++b) {
      blocks_.push_back(make_block(derive_seed(spec_.seed, static_cast<std::uint64_t>(b))));
    }
  }

  const TransformSpec& spec() const noexcept { return spec_; }
  Index d_input() const noexcept { return spec_.d_input; }
  Index d_padded() const noexcept { return d_padded_; }
  Index output_dim() const noexcept { return spec_.D; }
  const std::vector<Block>& blocks() const noexcept { return blocks_; }

  /// W x, length D. x must have length d_input.
  Eigen::VectorXd project(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    Eigen::VectorXd out(spec_.D);
    project_into(x, out);
    return out;
  }

  void project_into(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Ref<Eigen::VectorXd> out) const {
    if (x.size() != spec_.d_input) {
      throw DimensionError("project: expected input of length " + std::to_string(spec_.d_input) +
                           ", got " + std::to_string(x.size()));
    }
    if (out.size() != spec_.D) throw DimensionError("project: output length must equal D");
    const double inv_sigma = 1.0 / spec_.sigma;
    const double ortho_scale = std::sqrt(static_cast<double>(d_padded_)) * inv_sigma;
    std::vector<double> work;
    if (is_hadamard_kind(spec_.kind)) work.resize(static_cast<std::size_t>(d_padded_));

    Index row = 0;
    for (const auto& block : blocks_) {
      const Index rows = std::min(d_padded_, spec_.D - row);
      auto dst = out.segment(row, rows);
      std::visit(
          [&](const auto& blk) {
            using T = std::decay_t<decltype(blk)>;
            if constexpr (std::is_same_v<T, GaussianBlock>) {
              dst.noalias() = blk.w.topRows(rows) * x;
            } else if constexpr (std::is_same_v<T, OrthogonalBlock>) {
              dst.noalias() = blk.q.q.topRows(rows) * x;
              for (Index i = 0; i < rows; ++i) dst(i) *= blk.s[static_cast<std::size_t>(i)] * inv_sigma;
            } else if constexpr (std::is_same_v<T, ScaledOrthogonalBlock>) {
              dst.noalias() = ortho_scale * (blk.q.q.topRows(rows) * x);
            } else {
              std::copy(x.data(), x.data() + x.size(), work.begin());
              std::fill(work.begin() + x.size(), work.end(), 0.0);
              apply_hd_chain_inplace(work, blk.diagonals, ortho_scale);
              std::copy(work.begin(), work.begin() + rows, dst.data());
            }
          },
          block);
      row += rows;
    }
  }

  /// Explicit D x d_padded matrix of the map.
  Eigen::MatrixXd materialize() const {
    Eigen::MatrixXd w(spec_.D, d_padded_);
    const double inv_sigma = 1.0 / spec_.sigma;
    const double ortho_scale = std::sqrt(static_cast<double>(d_padded_)) * inv_sigma;
    Index row = 0;
    for (const auto& block : blocks_) {
      const Index rows = std::min(d_padded_, spec_.D - row);
      auto dst = w.middleRows(row, rows);
      std::visit(
          [&](const auto& blk) {
            using T = std::decay_t<decltype(blk)>;
            if constexpr (std::is_same_v<T, GaussianBlock>) {
              dst = blk.w.topRows(rows);
            } else if constexpr (std::is_same_v<T, OrthogonalBlock>) {
              for (Index i = 0; i < rows; ++i) {
                dst.row(i) = (blk.s[static_cast<std::size_t>(i)] * inv_sigma) * blk.q.q.row(i);
              }
            } else if constexpr (std::is_same_v<T, ScaledOrthogonalBlock>) {
              dst = ortho_scale * blk.q.q.topRows(rows);
            } else {
              Eigen::VectorXd e = Eigen::VectorXd::Zero(d_padded_);
              for (Index j = 0; j < d_padded_; ++j) {
                e.setZero();
                e(j) = 1.0;
                dst.col(j) = apply_hd_chain(e, blk.diagonals, ortho_scale).head(rows);
              }
            }
          },
          block);
      row += rows;
    }
    return w;
  }

 private:
  Block make_block(Seed block_seed) const {
    const Index d = d_padded_;
    switch (spec_.kind) {
      case Kind::RFF: {
        Rng rng(block_seed);
        Eigen::MatrixXd g(d, d);
        for (Index i = 0; i < d; ++i) {
          for (Index j = 0; j < d; ++j) g(i, j) = rng.normal();
        }
        return GaussianBlock{g / spec_.sigma};
      }
      case Kind::ORF:
        return OrthogonalBlock{sample_chi_diagonal(d, derive_seed(block_seed, 1)),
                               sample_haar_orthogonal(d, derive_seed(block_seed, 0))};
      case Kind::ORFPrime:
        return ScaledOrthogonalBlock{sample_haar_orthogonal(d, derive_seed(block_seed, 0))};
      case Kind::SORF:
      case Kind::HDHD:
      case Kind::HD: {
        HadamardBlock blk;
        for (int i = 0; i < hadamard_blocks(spec_.kind); ++i) {
          blk.diagonals.push_back(sample_sign_diagonal(d, derive_seed(block_seed, static_cast<std::uint64_t>(i))));
        }
        return blk;
      }
    }
    throw ConfigurationError("unknown transform kind");
  }

  TransformSpec spec_;
  Index d_padded_ = 0;
  std::vector<Block> blocks_;
};

inline FeatureMap build(const TransformSpec& spec) { return FeatureMap(spec); }

inline Eigen::VectorXd project(const FeatureMap& map, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return map.project(x);
}

inline Eigen::MatrixXd materialize(const FeatureMap& map) { return map.materialize(); }

inline FeatureVector features(const FeatureMap& map, const Eigen::Ref<const Eigen::VectorXd>& x) {
  const Eigen::VectorXd u = map.project(x);
  const Index D = u.size();
  const double scale = std::sqrt(1.0 / static_cast<double>(D));
  FeatureVector f{Eigen::VectorXd(2 * D)};
  for (Index i = 0; i < D; ++i) {
    f.values(i) = scale * std::sin(u(i));
    f.values(D + i) = scale * std::cos(u(i));
  }
  return f;
}

}  // namespace orf
