// Serial vs OpenMP timings for the two parallel kernels: classical arrow
// search (prefix fan-out) and campaigns (match-level).

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>

#include <omp.h>

#include "vor/harness.hpp"
#include "vor/solver.hpp"

using namespace vor;

namespace {

double seconds(const std::function<void()>& fn) {
  auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void arrows(const GameParams& p, int n) {
  ArrowsOptions serial, parallel;
  parallel.parallel = true;
  ArrowsResult a, b;
  double ts = seconds([&] { a = classical_arrows(p, n, serial); });
  double tp = seconds([&] { b = classical_arrows(p, n, parallel); });
  std::printf("arrows k=%d t=%d,%d n=%d  serial %.3fs  parallel %.3fs  speedup %.2f  %s\n", p.uniformity,
              p.targets[0], p.targets[1], n, ts, tp, ts / tp, a.outcome == b.outcome ? "agree" : "DISAGREE");
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  arrows(GameParams{2, {3, 4}}, 8);
  arrows(GameParams{2, {3, 4}}, 9);
  arrows(GameParams{3, {4, 4}}, 8);

  CampaignConfig cfg;
  cfg.grid = {GameParams{3, {4, 4}}, GameParams{2, {3, 4}}};
  cfg.builders = {"recursive", "tree"};
  cfg.painters = {"constant:1", "constant:2", "greedy", "random"};
  for (std::uint64_t s = 0; s < 40; ++s) cfg.seeds.push_back(s);
  cfg.output_dir = std::filesystem::temp_directory_path() / "vor-bench-campaign";
  CampaignSummary a, b;
  double ts = seconds([&] { a = run_campaign(cfg, false); });
  double tp = seconds([&] { b = run_campaign(cfg, true); });
  std::printf("campaign %zu matches  serial %.3fs  parallel %.3fs  speedup %.2f  %s\n", a.reports.size(), ts, tp,
              ts / tp, a.to_json() == b.to_json() ? "identical" : "DIFFER");
  std::filesystem::remove_all(cfg.output_dir);
  return 0;
}
