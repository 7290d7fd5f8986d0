// orf: command-line front-end for the random-feature experiments.
//
// Exit codes: 0 success, 2 usage or configuration error, 3 data or parse
// error, 4 numerical-precondition failure.

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "orf/orf.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct RawFlags {
  std::string kinds = "RFF,ORF,SORF";
  std::string d = "64";
  std::string D = "64,256";
  std::string z = "0.5,1,1.5,2,3";
  std::string t = "0.25,0.5,1";
  std::string theta;
  std::string sigma = "auto";
  std::string format = "dense-csv";
  std::string synth = "sphere";
  std::string input;
  std::string out;
};

void add_common(CLI::App* sub, RawFlags& raw, orf::ExperimentConfig& cfg) {
  sub->add_option("--kind", raw.kinds, "Comma list of RFF,ORF,ORFPrime,SORF,HDHD,HD")->capture_default_str();
  sub->add_option("--d", raw.d, "Input dimension (comma grid)")->capture_default_str();
  sub->add_option("--D", raw.D, "Number of features (comma grid)")->capture_default_str();
  sub->add_option("--z", raw.z, "Normalized pair distances (comma grid)")->capture_default_str();
  sub->add_option("--sigma", raw.sigma, "Kernel bandwidth, or 'auto' for the 50th-NN rule")->capture_default_str();
  sub->add_option("--seeds", cfg.seeds, "Independent maps per estimate")->capture_default_str();
  sub->add_option("--trials", cfg.trials, "Monte-Carlo trials")->capture_default_str();
  sub->add_option("--seed", cfg.seed, "Root seed")->capture_default_str();
  sub->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)")->capture_default_str();
  sub->add_option("--input", raw.input, "Dataset file (default: synthetic data)");
  sub->add_option("--format", raw.format, "dense-csv or whitespace")->capture_default_str();
  sub->add_option("--synth", raw.synth, "Synthetic data kind: gaussian or sphere")->capture_default_str();
  sub->add_option("--n", cfg.n_points, "Synthetic dataset size")->capture_default_str();
  sub->add_option("--pairs", cfg.n_pairs, "Point pairs for MSE")->capture_default_str();
  sub->add_option("--k", cfg.sigma_k, "Neighbor rank for automatic sigma")->capture_default_str();
  sub->add_option("--t", raw.t, "Inner-product thresholds (comma grid)")->capture_default_str();
  sub->add_option("--theta", raw.theta, "Angles in radians (comma grid, default pi/3)");
  sub->add_flag("--timing", cfg.timing, "Measure transform time (runtime_ns column)");
  sub->add_flag("--fixed-direction", cfg.fixed_direction, "Use y = z*e1 instead of random directions");
  sub->add_option("--out", raw.out, "Output path (default stdout)");
}

void finalize(const RawFlags& raw, orf::ExperimentConfig& cfg) {
  cfg.kinds = orf::parse_kinds(raw.kinds);
  cfg.d_grid = orf::parse_ints(raw.d);
  cfg.D_grid = orf::parse_ints(raw.D);
  cfg.z_grid = orf::parse_reals(raw.z);
  cfg.t_grid = orf::parse_reals(raw.t);
  if (!raw.theta.empty()) cfg.theta_grid = orf::parse_reals(raw.theta);
  if (raw.sigma == "auto") {
    cfg.sigma.reset();
  } else {
    const auto v = orf::parse_reals(raw.sigma);
    if (v.size() != 1) throw orf::ConfigurationError("--sigma takes one value");
    cfg.sigma = v.front();
  }
  cfg.format = orf::parse_format(raw.format);
  cfg.synth = orf::parse_synth_kind(raw.synth);
  if (!raw.input.empty()) cfg.input = raw.input;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Orthogonal random features: kernel approximation experiments"};
  app.require_subcommand(1);

  RawFlags raw;
  orf::ExperimentConfig cfg;
  std::function<void(const orf::ExperimentConfig&, std::ostream&)> runner;

  const auto add = [&](const char* name, const char* help, auto fn) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub, raw, cfg);
    sub->callback([&runner, fn] { runner = fn; });
  };
  add("mse-curve", "Kernel approximation MSE per kind and D", orf::run_mse_curve);
  add("bias-variance", "Monte-Carlo bias and variance ratio over a z grid", orf::run_bias_variance);
  add("ortho-check", "Near-orthogonality diagnostics of the SORF decomposition", orf::run_ortho_check);
  add("angle-sim", "Sign-code angle estimation", orf::run_angle_sim);
  add("sigma", "Mean 50th nearest neighbor distance of a dataset", orf::run_sigma);
  add("synth", "Write a synthetic dataset as CSV", orf::run_synth);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    finalize(raw, cfg);
    std::ostringstream buf;
    runner(cfg, buf);
    if (raw.out.empty()) {
      std::cout << buf.str();
    } else {
      std::ofstream f(raw.out, std::ios::binary);
      if (!f) throw orf::InputError("cannot write " + raw.out);
      f << buf.str();
    }
    return 0;
  } catch (const orf::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const orf::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const orf::NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const orf::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
