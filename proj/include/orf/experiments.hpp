#pragma once

// Experiment runners behind the command-line tool. Each runner writes a CSV
// table (header first) to an output stream and is deterministic given
// ExperimentConfig::seed, independent of the thread count.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "orf/binembed.hpp"
#include "orf/csv.hpp"
#include "orf/dataset.hpp"
#include "orf/errors.hpp"
#include "orf/feature_maps.hpp"
#include "orf/kernel_eval.hpp"
#include "orf/rng.hpp"
#include "orf/simulate.hpp"
#include "orf/stats.hpp"

namespace orf {

struct ExperimentConfig {
  std::vector<Kind> kinds;
  std::vector<Index> d_grid = {64};
  std::vector<Index> D_grid = {64, 256};
  std::vector<double> z_grid = {0.5, 1.0, 1.5, 2.0, 3.0};
  std::vector<double> t_grid = {0.25, 0.5, 1.0};
  std::vector<double> theta_grid = {std::numbers::pi / 3.0};
  std::optional<double> sigma;  ///< nullopt selects sigma automatically
  Index seeds = 20;
  Index trials = 20000;
  Index n_pairs = 500;
  Index n_points = 1000;
  Index sigma_k = 50;
  Index sigma_sample = 1000;
  Seed seed = 1;
  unsigned threads = 1;
  std::optional<std::string> input;
  DataFormat format = DataFormat::DenseCsv;
  SynthKind synth = SynthKind::Sphere;
  bool timing = false;
  bool fixed_direction = false;
};

// Child-seed slots of ExperimentConfig::seed.
namespace seed_slot {
inline constexpr std::uint64_t kData = 0;
inline constexpr std::uint64_t kPairs = 1;
inline constexpr std::uint64_t kSigma = 2;
inline constexpr std::uint64_t kMaps = 3;
inline constexpr std::uint64_t kSim = 4;
}  // namespace seed_slot

/// Splits "a,b,c" and parses each item with `parse`. Empty items are errors.
template <typename T, typename Parse>
std::vector<T> parse_list(std::string_view text, Parse&& parse) {
  std::vector<T> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(',', start);
    const auto item = text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    if (item.empty()) throw ConfigurationError("empty item in list '" + std::string(text) + "'");
    out.push_back(parse(item));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::vector<Kind> parse_kinds(std::string_view text) {
  if (text.empty()) throw ConfigurationError("no transform kinds given");
  return parse_list<Kind>(text, [](std::string_view s) { return parse_kind(s); });
}

inline std::vector<double> parse_reals(std::string_view text) {
  return parse_list<double>(text, [](std::string_view s) {
    double v = 0.0;
    if (!detail::parse_number(s, v)) throw ConfigurationError("not a number: '" + std::string(s) + "'");
    return v;
  });
}

inline std::vector<Index> parse_ints(std::string_view text) {
  return parse_list<Index>(text, [](std::string_view s) {
    Index v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
      throw ConfigurationError("not an integer: '" + std::string(s) + "'");
    }
    return v;
  });
}

namespace detail {

inline void require_kinds(const ExperimentConfig& cfg) {
  if (cfg.kinds.empty()) throw ConfigurationError("no transform kinds given");
}

inline void require_positive(const std::vector<Index>& grid, const char* name) {
  if (grid.empty()) throw ConfigurationError(std::string(name) + " grid is empty");
  for (Index v : grid) {
    if (v < 1) throw ConfigurationError(std::string(name) + " values must be positive");
  }
}

inline Dataset experiment_dataset(const ExperimentConfig& cfg, Index d) {
  if (cfg.input) return load_dataset(*cfg.input, cfg.format);
  return synth_dataset(cfg.synth, cfg.n_points, d, derive_seed(cfg.seed, seed_slot::kData));
}

inline double experiment_sigma(const ExperimentConfig& cfg, const Dataset& data) {
  if (cfg.sigma) {
    if (!(*cfg.sigma > 0.0)) throw ConfigurationError("sigma must be positive");
    return *cfg.sigma;
  }
  const double s = select_sigma(data, cfg.sigma_k, cfg.sigma_sample, derive_seed(cfg.seed, seed_slot::kSigma),
                                cfg.threads);
  if (!(s > 0.0)) throw NumericalError("automatic sigma is zero; the dataset has duplicate points");
  return s;
}

}  // namespace detail

/// Random pairs of distinct rows of `data`.
inline std::vector<PairSample> sample_pairs(const Dataset& data, Index n_pairs, double sigma, Seed seed) {
  if (data.size() < 2) throw InputError("need at least two points to form pairs");
  if (n_pairs < 1) throw ConfigurationError("n_pairs must be >= 1");
  Rng rng(seed);
  std::vector<PairSample> pairs;
  pairs.reserve(static_cast<std::size_t>(n_pairs));
  const auto n = static_cast<std::uint64_t>(data.size());
  for (Index p = 0; p < n_pairs; ++p) {
    const auto i = static_cast<Index>(rng.below(n));
    auto j = static_cast<Index>(rng.below(n - 1));
    if (j >= i) ++j;
    pairs.push_back(make_pair_sample(data.points.row(i).transpose(), data.points.row(j).transpose(), sigma));
  }
  return pairs;
}

/// Median wall-clock nanoseconds of one project() call: 10 warmups, 100 timed.
inline double median_transform_ns(const FeatureMap& map, const Eigen::Ref<const Eigen::VectorXd>& x,
                                  int warmup = 10, int reps = 100) {
  Eigen::VectorXd out(map.output_dim());
  for (int i = 0; i < warmup; ++i) map.project_into(x, out);
  std::vector<double> ns(static_cast<std::size_t>(reps));
  double sink = 0.0;
  for (auto& v : ns) {
    const auto t0 = std::chrono::steady_clock::now();
    map.project_into(x, out);
    const auto t1 = std::chrono::steady_clock::now();
    sink += out(0);
    v = static_cast<double>(std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
  }
  static volatile double keep;
  keep = sink;
  std::nth_element(ns.begin(), ns.begin() + reps / 2, ns.end());
  return ns[static_cast<std::size_t>(reps / 2)];
}

/// Columns: kind,d,D,mse,stderr,runtime_ns. One row per (d, kind, D).
/// runtime_ns is 0 unless cfg.timing is set, so default output is reproducible.
inline void run_mse_curve(const ExperimentConfig& cfg, std::ostream& os) {
  detail::require_kinds(cfg);
  detail::require_positive(cfg.D_grid, "D");
  detail::require_positive(cfg.d_grid, "d");
  if (cfg.seeds < 1) throw ConfigurationError("seeds must be >= 1");
  CsvWriter w(os);
  w.header({"kind", "d", "D", "mse", "stderr", "runtime_ns"});
  const std::vector<Index> ds = cfg.input ? std::vector<Index>{0} : cfg.d_grid;
  std::uint64_t row = 0;
  for (Index d_req : ds) {
    const Dataset data = detail::experiment_dataset(cfg, d_req);
    const double sigma = detail::experiment_sigma(cfg, data);
    const auto pairs = sample_pairs(data, cfg.n_pairs, sigma, derive_seed(cfg.seed, seed_slot::kPairs));
    for (Kind kind : cfg.kinds) {
      for (Index D : cfg.D_grid) {
        const TransformSpec spec{kind, data.dim(), D, sigma, derive_seed(derive_seed(cfg.seed, seed_slot::kMaps), row++)};
        const MseReport rep = mse_estimate(spec, pairs, cfg.seeds, cfg.threads);
        double runtime = 0.0;
        if (cfg.timing) runtime = median_transform_ns(FeatureMap(spec), pairs.front().x);
        w.field(to_string(kind)).field(data.dim()).field(D).field(rep.mse).field(rep.std_error).field(runtime);
        w.end_row();
      }
    }
  }
}

/// Columns: kind,d,D,z,bias,bias_stderr,var_ratio,var_ratio_stderr,trials.
inline void run_bias_variance(const ExperimentConfig& cfg, std::ostream& os) {
  detail::require_kinds(cfg);
  detail::require_positive(cfg.D_grid, "D");
  detail::require_positive(cfg.d_grid, "d");
  if (cfg.z_grid.empty()) throw ConfigurationError("z grid is empty");
  CsvWriter w(os);
  w.header({"kind", "d", "D", "z", "bias", "bias_stderr", "var_ratio", "var_ratio_stderr", "trials"});
  std::uint64_t run = 0;
  for (Kind kind : cfg.kinds) {
    for (Index d : cfg.d_grid) {
      for (Index D : cfg.D_grid) {
        const auto rep = mc_bias_variance(kind, d, D, cfg.z_grid, cfg.trials,
                                          derive_seed(derive_seed(cfg.seed, seed_slot::kSim), run++),
                                          {cfg.fixed_direction, cfg.threads});
        for (std::size_t i = 0; i < rep.z_grid.size(); ++i) {
          w.field(to_string(kind)).field(d).field(D).field(rep.z_grid[i]).field(rep.bias[i]);
          w.field(rep.bias_stderr[i]).field(rep.var_ratio[i]).field(rep.var_ratio_stderr[i]).field(rep.trials);
          w.end_row();
        }
      }
    }
  }
}

/// Columns: d,t,exceed_fraction,median_max_inner,max_row_norm_dev,max_reconstruction_err,trials.
/// z is a random unit vector drawn per d.
inline void run_ortho_check(const ExperimentConfig& cfg, std::ostream& os) {
  detail::require_positive(cfg.d_grid, "d");
  if (cfg.t_grid.empty()) throw ConfigurationError("t grid is empty");
  CsvWriter w(os);
  w.header({"d", "t", "exceed_fraction", "median_max_inner", "max_row_norm_dev", "max_reconstruction_err", "trials"});
  const Seed root = derive_seed(cfg.seed, seed_slot::kSim);
  for (std::size_t di = 0; di < cfg.d_grid.size(); ++di) {
    const Index d = cfg.d_grid[di];
    const Seed run_seed = derive_seed(root, di);
    const Eigen::VectorXd z = random_unit_vector(d, derive_seed(run_seed, 0));
    const auto st = near_orthogonality_stats(d, z, cfg.trials, cfg.t_grid, derive_seed(run_seed, 1), cfg.threads);
    for (std::size_t ti = 0; ti < st.t_grid.size(); ++ti) {
      w.field(d).field(st.t_grid[ti]).field(st.exceed_fraction[ti]).field(st.median_max_inner);
      w.field(st.max_row_norm_deviation).field(st.max_reconstruction_error).field(st.trials);
      w.end_row();
    }
  }
}

struct AngleSimResult {
  double mean_estimate = 0.0;
  double angular_mse = 0.0;
  std::vector<double> estimates;
};

/// Per trial t: a map from derive_seed(trial_seed, 0) and a random pair of
/// unit vectors at angle theta from derive_seed(trial_seed, 1).
inline AngleSimResult angle_simulation(Kind kind, Index d, Index D, double theta, Index trials, Seed seed,
                                       unsigned threads = 1) {
  if (trials < 1) throw ConfigurationError("angle simulation needs at least one trial");
  if (d < 2) throw ConfigurationError("angle simulation needs d >= 2");
  if (!(theta >= 0.0 && theta <= std::numbers::pi)) throw ConfigurationError("theta must be in [0, pi]");
  AngleSimResult r;
  r.estimates.resize(static_cast<std::size_t>(trials));
  parallel_for(r.estimates.size(), threads, [&](std::size_t t) {
    const Seed ts = derive_seed(seed, t);
    const FeatureMap map(TransformSpec{kind, d, D, 1.0, derive_seed(ts, 0)});
    Rng rng(derive_seed(ts, 1));
    Eigen::VectorXd u(d), v(d);
    for (Index i = 0; i < d; ++i) u(i) = rng.normal();
    for (Index i = 0; i < d; ++i) v(i) = rng.normal();
    u.normalize();
    v -= v.dot(u) * u;
    v.normalize();
    const Eigen::VectorXd y = std::cos(theta) * u + std::sin(theta) * v;
    r.estimates[t] = angle_estimate(sign_features(map, u), sign_features(map, y));
  });
  r.mean_estimate = mean(r.estimates);
  double se = 0.0;
  for (double e : r.estimates) se += (e - theta) * (e - theta);
  r.angular_mse = se / static_cast<double>(trials);
  return r;
}

/// Columns: kind,d,D,theta,mean_estimate,angular_mse,trials. Uses cfg.seeds
/// as the number of trials per row.
inline void run_angle_sim(const ExperimentConfig& cfg, std::ostream& os) {
  detail::require_kinds(cfg);
  detail::require_positive(cfg.D_grid, "D");
  detail::require_positive(cfg.d_grid, "d");
  if (cfg.theta_grid.empty()) throw ConfigurationError("theta grid is empty");
  CsvWriter w(os);
  w.header({"kind", "d", "D", "theta", "mean_estimate", "angular_mse", "trials"});
  const Seed root = derive_seed(cfg.seed, seed_slot::kSim);
  std::uint64_t run = 0;
  for (Kind kind : cfg.kinds) {
    for (Index d : cfg.d_grid) {
      for (Index D : cfg.D_grid) {
        for (double theta : cfg.theta_grid) {
          const auto res = angle_simulation(kind, d, D, theta, cfg.seeds, derive_seed(root, run++), cfg.threads);
          w.field(to_string(kind)).field(d).field(D).field(theta).field(res.mean_estimate);
          w.field(res.angular_mse).field(cfg.seeds);
          w.end_row();
        }
      }
    }
  }
}

/// Columns: n,d,k,sigma. Uses cfg.input or a synthetic set with the first d.
inline void run_sigma(const ExperimentConfig& cfg, std::ostream& os) {
  detail::require_positive(cfg.d_grid, "d");
  const Dataset data = detail::experiment_dataset(cfg, cfg.d_grid.front());
  const double sigma = select_sigma(data, cfg.sigma_k, cfg.sigma_sample, derive_seed(cfg.seed, seed_slot::kSigma),
                                    cfg.threads);
  CsvWriter w(os);
  w.header({"n", "d", "k", "sigma"});
  w.field(data.size()).field(data.dim()).field(cfg.sigma_k).field(sigma);
  w.end_row();
}

/// Writes a synthetic dataset with cfg.n_points rows of dimension d_grid[0].
inline void run_synth(const ExperimentConfig& cfg, std::ostream& os) {
  detail::require_positive(cfg.d_grid, "d");
  if (cfg.n_points < 1) throw ConfigurationError("n must be >= 1");
  write_dataset(os, synth_dataset(cfg.synth, cfg.n_points, cfg.d_grid.front(), derive_seed(cfg.seed, seed_slot::kData)));
}

}  // namespace orf
