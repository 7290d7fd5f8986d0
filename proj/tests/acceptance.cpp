// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "orf/orf.hpp"

namespace {

using namespace orf;
using Clock = std::chrono::steady_clock;

int g_failures = 0;

void report(int n, bool ok, const std::string& what, const std::string& detail) {
  std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << n << ": " << what << " | " << detail << std::endl;
  if (!ok) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

const std::vector<double> kZ = {0.5, 1.0, 1.5, 2.0, 3.0};

void fwht_matches_naive() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (Index d = 2; d <= 512; d *= 2) {
    const Eigen::MatrixXd h = testing::naive_hadamard(d);
    for (Seed s = 0; s < 100; ++s) {
      const Eigen::VectorXd v = testing::random_vector(d, derive_seed(static_cast<Seed>(d), s));
      worst = std::max(worst, (fwht(v) - h * v).cwiseAbs().maxCoeff());
    }
  }
  const double secs = seconds_since(t0);
  report(1, worst <= 1e-12 && secs < 1.0, "FWHT matches naive Hadamard, d=2..512, 100 vectors each",
         "max_abs=" + fmt(worst) + " time_s=" + fmt(secs));
}

void sorf_structure() {
  double worst_gram = 0.0, worst_proj = 0.0;
  for (Index d : {64, 256}) {
    for (Seed s = 0; s < 50; ++s) {
      const FeatureMap map(TransformSpec{Kind::SORF, d, d, 1.0, derive_seed(static_cast<Seed>(d), s)});
      const Eigen::MatrixXd w = materialize(map);
      const Eigen::MatrixXd gram = w.transpose() * w - static_cast<double>(d) * Eigen::MatrixXd::Identity(d, d);
      worst_gram = std::max(worst_gram, gram.cwiseAbs().maxCoeff());
      const auto& blk = std::get<HadamardBlock>(map.blocks()[0]);
      const Eigen::MatrixXd dense = testing::dense_hd_chain(blk.diagonals, std::sqrt(static_cast<double>(d)));
      const Eigen::VectorXd x = testing::random_vector(d, derive_seed(s, 99));
      worst_proj = std::max(worst_proj, (map.project(x) - dense * x).cwiseAbs().maxCoeff());
    }
  }
  report(2, worst_gram <= 1e-10 && worst_proj <= 1e-10, "SORF W^T W = d I and project matches dense chain, d in {64,256}, 50 seeds",
         "max_gram_err=" + fmt(worst_gram) + " max_project_err=" + fmt(worst_proj));
}

void rff_variance() {
  const auto t0 = Clock::now();
  const std::vector<double> zs = {0.5, 1.0, 2.0};
  bool ok = true;
  std::string detail;
  for (Index D : {1, 8}) {
    const auto samples = kernel_estimate_samples(Kind::RFF, 8, D, zs, 200000, derive_seed(31, static_cast<Seed>(D)));
    for (std::size_t i = 0; i < zs.size(); ++i) {
      const double rel = sample_variance(samples[i]) / var_rff_closed(zs[i], D) - 1.0;
      ok = ok && std::abs(rel) <= 0.05;
      detail += "D=" + std::to_string(D) + ",z=" + fmt(zs[i]) + ":rel=" + fmt(rel) + " ";
    }
  }
  const double secs = seconds_since(t0);
  report(3, ok && secs < 60.0, "RFF variance matches closed form within 5%, 2e5 seeds",
         detail + "time_s=" + fmt(secs));
}

SimulationReport g_orf;

void orf_bias_and_ratio() {
  const auto t0 = Clock::now();
  g_orf = mc_bias_variance(Kind::ORF, 64, 64, kZ, 20000, 41);
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < kZ.size(); ++i) {
    const double closed = var_ratio_closed(kZ[i], 64, 64);
    ok = ok && std::abs(g_orf.bias[i]) <= 4.0 * g_orf.bias_stderr[i] &&
         std::abs(g_orf.var_ratio[i] - closed) <= 0.05;
    detail += "z=" + fmt(kZ[i]) + ":bias/se=" + fmt(g_orf.bias[i] / g_orf.bias_stderr[i]) +
              ",ratio=" + fmt(g_orf.var_ratio[i]) + "/" + fmt(closed) + " ";
  }
  const double secs = seconds_since(t0);
  report(4, ok && secs < 600.0, "ORF unbiased and variance ratio within 0.05 of closed form, d=D=64, 20000 trials",
         detail + "time_s=" + fmt(secs));
}

void structured_near_unbiased() {
  bool ok = true;
  std::string detail;
  for (Kind kind : {Kind::SORF, Kind::ORFPrime}) {
    const auto r = mc_bias_variance(kind, 64, 64, kZ, 20000, kind == Kind::SORF ? 51 : 52);
    for (std::size_t i = 0; i < kZ.size(); ++i) {
      const double bound = std::max(6.0 * kZ[i] / 8.0, 4.0 * r.bias_stderr[i]);
      ok = ok && std::abs(r.bias[i]) <= bound;
      if (kind == Kind::SORF) ok = ok && std::abs(r.var_ratio[i] - g_orf.var_ratio[i]) <= 0.07;
      detail += std::string(to_string(kind)) + " z=" + fmt(kZ[i]) + ":bias=" + fmt(r.bias[i]);
      if (kind == Kind::SORF) detail += ",ratio=" + fmt(r.var_ratio[i]) + "/orf=" + fmt(g_orf.var_ratio[i]);
      detail += " ";
    }
  }
  report(5, ok, "SORF and ORFPrime bias within bound; SORF ratio within 0.07 of ORF, d=64", detail);
}

void mse_ordering() {
  ExperimentConfig cfg;
  cfg.kinds = {Kind::RFF, Kind::ORF, Kind::SORF, Kind::HDHD, Kind::HD};
  cfg.d_grid = {64};
  cfg.D_grid = {64, 256};
  cfg.n_pairs = 500;
  cfg.seeds = 20;
  cfg.synth = SynthKind::Sphere;
  cfg.seed = 61;
  std::ostringstream os;
  run_mse_curve(cfg, os);

  // rows: kind,d,D,mse,stderr,runtime_ns
  struct Cell {
    double mse = 0.0, se = 0.0;
  };
  std::map<std::pair<std::string, Index>, Cell> cells;
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string tok;
    while (std::getline(ls, tok, ',')) f.push_back(tok);
    cells[{f[0], std::stol(f[2])}] = {std::stod(f[3]), std::stod(f[4])};
  }

  const auto below = [&](const Cell& a, const Cell& b) {
    return b.mse - a.mse > 2.0 * std::hypot(a.se, b.se);
  };
  bool order_ok = true, hd_ok = true;
  std::string detail;
  for (Index D : cfg.D_grid) {
    const Cell rff = cells[{"RFF", D}], orf = cells[{"ORF", D}], sorf = cells[{"SORF", D}];
    const Cell hdhd = cells[{"HDHD", D}], hd = cells[{"HD", D}];
    order_ok = order_ok && below(orf, rff) && below(sorf, rff) && std::abs(sorf.mse - orf.mse) <= 0.15 * orf.mse;
    const Cell& best_multi = hdhd.mse > sorf.mse ? hdhd : sorf;
    hd_ok = hd_ok && below(best_multi, hd);
    detail += "D=" + std::to_string(D) + ": RFF=" + fmt(rff.mse) + " ORF=" + fmt(orf.mse) + " SORF=" + fmt(sorf.mse) +
              " HDHD=" + fmt(hdhd.mse) + " HD=" + fmt(hd.mse) + " (se " + fmt(hd.se) + ")" +
              " sorf_orf_rel_gap=" + fmt(std::abs(sorf.mse - orf.mse) / orf.mse) + " ";
  }
  report(6, order_ok && hd_ok, "MSE: ORF, SORF < RFF by 2 stderr, SORF~ORF within 15%, HD > HDHD/SORF by 2 stderr",
         detail + "order_ok=" + std::to_string(order_ok) + " hd_ok=" + std::to_string(hd_ok));
}

void complexity() {
  const Index d = 4096;
  const Eigen::VectorXd x = testing::random_vector(d, 71);
  const double sorf = median_transform_ns(FeatureMap(TransformSpec{Kind::SORF, d, d, 1.0, 72}), x);
  const double rff = median_transform_ns(FeatureMap(TransformSpec{Kind::RFF, d, d, 1.0, 73}), x);
  report(7, sorf <= rff / 5.0, "SORF transform at least 5x faster than dense RFF, d=D=4096",
         "sorf_ns=" + fmt(sorf) + " rff_ns=" + fmt(rff) + " speedup=" + fmt(rff / sorf));
}

void near_orthogonality() {
  const std::vector<double> t = {0.25, 0.5, 1.0};
  const auto s64 = near_orthogonality_stats(64, random_unit_vector(64, 81), 10000, t, 82);
  const auto s256 = near_orthogonality_stats(256, random_unit_vector(256, 83), 1000, t, 84);
  const auto s1024 = near_orthogonality_stats(1024, random_unit_vector(1024, 85), 200, t, 86);
  const bool ok = s64.max_row_norm_deviation <= 1e-10 && s64.max_reconstruction_error <= 1e-10 &&
                  s256.max_row_norm_deviation <= 1e-10 && s1024.max_row_norm_deviation <= 1e-10 &&
                  s256.max_reconstruction_error <= 1e-10 && s1024.max_reconstruction_error <= 1e-10 &&
                  s256.median_max_inner < s64.median_max_inner && s1024.median_max_inner < s256.median_max_inner;
  report(8, ok, "R~ row norms and reconstruction exact in all 1e4 trials at d=64; median max inner decreasing",
         "row_norm_dev=" + fmt(s64.max_row_norm_deviation) + " recon_err=" + fmt(s64.max_reconstruction_error) +
             " median@64/256/1024=" + fmt(s64.median_max_inner) + "/" + fmt(s256.median_max_inner) + "/" +
             fmt(s1024.median_max_inner));
}

void angle_estimation() {
  const double theta = std::numbers::pi / 3.0;
  const auto g = angle_simulation(Kind::RFF, 64, 4096, theta, 500, 91);
  const auto h = angle_simulation(Kind::SORF, 64, 4096, theta, 500, 92);
  const bool ok = std::abs(g.mean_estimate - theta) <= 0.05 && std::abs(h.mean_estimate - theta) <= 0.05 &&
                  h.angular_mse <= 1.2 * g.angular_mse;
  report(9, ok, "angle pi/3 recovered within 0.05 at D=4096; HD-chain MSE <= 1.2x Gaussian",
         "gauss_mean=" + fmt(g.mean_estimate) + " hd_mean=" + fmt(h.mean_estimate) + " gauss_mse=" +
             fmt(g.angular_mse) + " hd_mse=" + fmt(h.angular_mse));
}

std::pair<int, std::string> run_cli(const std::string& args) {
  const std::string cmd = std::string(ORF_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (p == nullptr) return {-1, {}};
  std::string out;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

void cli_determinism() {
  const std::vector<std::string> commands = {
      "mse-curve --kind RFF,ORF,SORF,HDHD,HD,ORFPrime --d 16 --D 16,64 --seeds 4 --pairs 30 --n 200 --seed 7",
      "bias-variance --kind RFF,SORF --d 16 --D 16 --trials 200 --seed 7",
      "ortho-check --d 16,64 --trials 50 --seed 7",
      "angle-sim --kind RFF,SORF --d 16 --D 64,256 --seeds 20 --seed 7",
      "sigma --d 8 --n 300 --seed 7",
      "synth --d 4 --n 50 --synth gaussian --seed 7",
  };
  bool ok = true;
  std::string detail;
  for (const auto& c : commands) {
    const auto a = run_cli(c + " --threads 1");
    const auto b = run_cli(c + " --threads 1");
    const auto m = run_cli(c + " --threads 4");
    const bool same = a.first == 0 && b.first == 0 && m.first == 0 && !a.second.empty() && a.second == b.second &&
                      a.second == m.second;
    ok = ok && same;
    detail += c.substr(0, c.find(' ')) + (same ? "=same " : "=DIFF ");
  }
  report(10, ok, "every CLI subcommand byte-identical across runs and thread counts", detail);
}

}  // namespace

int main() {
  fwht_matches_naive();
  sorf_structure();
  rff_variance();
  orf_bias_and_ratio();
  structured_near_unbiased();
  mse_ordering();
  complexity();
  near_orthogonality();
  angle_estimation();
  cli_determinism();
  std::cout << (g_failures == 0 ? "all criteria passed" : std::to_string(g_failures) + " criteria failed") << std::endl;
  return g_failures == 0 ? 0 : 1;
}
