//=======================================================================
// Copyright 2026 The roikit authors.
// Distributed under the MIT License.
// (See accompanying file LICENSE or copy at
//  http://opensource.org/licenses/MIT)
//=======================================================================

// Acceptance gate: eight end-to-end criteria, one verdict line each. Every
// tolerance is pinned here rather than read from configuration, so a green
// run certifies the numbers themselves. Exits 0 only if all criteria pass.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "roikit/bound.hpp"
#include "roikit/construct.hpp"
#include "roikit/io.hpp"
#include "roikit/oracle.hpp"
#include "roikit/psg.hpp"
#include "roikit/roi.hpp"
#include "roikit/seesaw.hpp"
#include "roikit/sim.hpp"
#include "roikit/task.hpp"
#include "test_util.hpp"

using namespace roikit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

// ---------------------------------------------------------------------
// 1. Primal and dual ROI programs agree on 25 seed-fixed sets
//    (dims 2-3, 2-3 POVMs, 2-3 outcomes), gap <= 1e-6, certificates
//    re-verify, 60 s budget.
// ---------------------------------------------------------------------
Outcome criterion1() {
  const auto start = Clock::now();
  double max_gap = 0.0;
  for (int i = 0; i < 25; ++i) {
    const int dim = 2 + (i % 2);
    const int n_meas = 2 + ((i / 2) % 2);
    const int n_out = 2 + ((i / 4) % 2);
    const MeasurementSet set =
        random_set(dim, std::vector<int>(n_meas, n_out), 1100 + i);
    const RoiCertificate cert = compute_roi(set);
    max_gap = std::max(max_gap, cert.gap);
    if (cert.gap > 1e-6)
      return {false, "set " + std::to_string(i) + " gap " + fmt(cert.gap)};
    const CertResiduals again = check_certificate(cert, set);
    if (!certificate_ok(again, Tolerances{}))
      return {false, "set " + std::to_string(i) + " failed re-verification"};
  }
  const double elapsed = seconds_since(start);
  if (elapsed > 60.0) return {false, "over budget: " + fmt(elapsed) + " s"};
  return {true, "25 sets, max gap " + fmt(max_gap) + ", " + fmt(elapsed) + " s"};
}

// ---------------------------------------------------------------------
// 2. Children of a parent are compatible (roi <= 1e-6 on 50 generated
//    sets); the noise decomposition reconstructs the noisy-mixture
//    relation within 1e-7 entrywise on 10 incompatible sets.
// ---------------------------------------------------------------------
Outcome criterion2() {
  double max_roi = 0.0;
  for (int i = 0; i < 50; ++i) {
    const int dim = 2 + (i % 2);
    const int n_meas = 2 + ((i / 2) % 2);
    const int n_out = 2 + ((i / 4) % 2);
    const int parent_out = 3 + (i % 3);
    const MeasurementSet set =
        random_compatible_set(dim, n_meas, n_out, parent_out, 2200 + i);
    const double roi = compute_roi(set).roi;
    max_roi = std::max(max_roi, roi);
    if (roi > 1e-6)
      return {false, "generated set " + std::to_string(i) + " roi " + fmt(roi)};
  }

  double max_recon = 0.0;
  int found = 0;
  for (int seed = 2400; found < 10 && seed < 2600; ++seed) {
    const MeasurementSet set = random_set(2, {2, 2}, seed);
    const RoiCertificate cert = compute_roi(set);
    if (cert.roi <= 1e-3) continue;
    ++found;
    const NoiseDecomposition noise = extract_noise(set, cert);
    max_recon = std::max(max_recon, noise.reconstruction_residual);
    if (noise.reconstruction_residual > 1e-7)
      return {false, "seed " + std::to_string(seed) + " reconstruction " +
                         fmt(noise.reconstruction_residual)};
  }
  if (found < 10) return {false, "only found " + std::to_string(found) + " incompatible sets"};
  return {true, "max compatible roi " + fmt(max_roi) + ", max reconstruction " +
                    fmt(max_recon)};
}

// ---------------------------------------------------------------------
// 3. 1 + roi is multiplicative under tensor products on 20 seed-fixed
//    qubit pairs: residual <= 1e-5, 120 s budget.
// ---------------------------------------------------------------------
Outcome criterion3() {
  const auto start = Clock::now();
  double max_residual = 0.0;
  for (int i = 0; i < 20; ++i) {
    const MeasurementSet a = random_set(2, {2, 2}, 3300 + 2 * i);
    const MeasurementSet b = random_set(2, {2, 2}, 3301 + 2 * i);
    const double one_plus_a = 1.0 + compute_roi(a).roi;
    const double one_plus_b = 1.0 + compute_roi(b).roi;
    const double one_plus_ab = 1.0 + compute_roi(tensor_sets(a, b)).roi;
    const double residual = std::abs(one_plus_ab - one_plus_a * one_plus_b);
    max_residual = std::max(max_residual, residual);
    if (residual > 1e-5)
      return {false, "pair " + std::to_string(i) + " residual " + fmt(residual)};
  }
  const double elapsed = seconds_since(start);
  if (elapsed > 120.0) return {false, "over budget: " + fmt(elapsed) + " s"};
  return {true, "20 pairs, max residual " + fmt(max_residual) + ", " + fmt(elapsed) +
                    " s"};
}

// ---------------------------------------------------------------------
// 4. The nested-max optimizers equal literal exhaustive enumeration to
//    1e-12 on 100 small instances, and one-way communication never hurts.
// ---------------------------------------------------------------------
Outcome criterion4() {
  double max_err = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int ny = (i % 4 == 3) ? 3 : 2;
    const int nb = (i % 4 == 1) ? 3 : 2;
    const std::vector<int> counts_a = (i % 4 == 2) ? std::vector<int>{2, 3}
                                                   : std::vector<int>{2, 2};
    const DiscriminationTask task = random_task({2, 2}, ny, nb, 4400 + 3 * i);
    const MeasurementSet ma = random_set(2, counts_a, 4401 + 3 * i);
    const MeasurementSet mb = random_set(2, {2, 2}, 4402 + 3 * i);

    const double lo = psg_best_lo(task, ma, mb).value;
    const double cc = psg_best_locc1(task, ma, mb).value;
    const double brute_lo = brute_force_lo(task, {ma, mb}).value;
    const double brute_cc = brute_force_locc1(task, ma, mb).value;

    max_err = std::max({max_err, std::abs(lo - brute_lo), std::abs(cc - brute_cc)});
    if (std::abs(lo - brute_lo) > 1e-12)
      return {false, "instance " + std::to_string(i) + " local mismatch " +
                         fmt(std::abs(lo - brute_lo))};
    if (std::abs(cc - brute_cc) > 1e-12)
      return {false, "instance " + std::to_string(i) + " one-way mismatch " +
                         fmt(std::abs(cc - brute_cc))};
    if (cc < lo - 1e-12)
      return {false, "instance " + std::to_string(i) + " one-way below local"};
  }
  return {true, "100 instances, max optimizer error " + fmt(max_err)};
}

// ---------------------------------------------------------------------
// 5. The product bound holds: best local value <= prod(1+roi) times the
//    parent-based guess plus a 1e-7 margin, on 100 random two-party tasks
//    and 20 tripartite tasks.
// ---------------------------------------------------------------------
Outcome criterion5() {
  const MeasurementSet xz = testutil::xz_set();
  BoundOptions opts;
  opts.run_seesaw = false;
  double min_slack = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 100; ++i) {
    const int ny = 2 + (i % 2);
    const int nb = 2 + ((i / 2) % 2);
    const DiscriminationTask task = random_task({2, 2}, ny, nb, 5500 + i);
    const BoundReport rep = bound_report(task, {xz, xz}, opts);
    min_slack = std::min({min_slack, rep.bound - rep.p_lo, rep.bound - rep.p_locc1});
    if (!rep.pass) return {false, "two-party task " + std::to_string(i) + " violated"};
  }
  for (int i = 0; i < 20; ++i) {
    const DiscriminationTask task = random_task({2, 2, 2}, 2, 2, 5700 + i);
    const BoundReport rep = bound_report(task, {xz, xz, xz}, opts);
    min_slack = std::min(min_slack, rep.bound - rep.p_lo);
    if (!rep.pass) return {false, "tripartite task " + std::to_string(i) + " violated"};
  }
  return {true, "120 tasks, min slack " + fmt(min_slack)};
}

// ---------------------------------------------------------------------
// 6. Achievability: for the x/z pair and 10 random incompatible pairs the
//    constructed task's local optimum, ascent value and advantage ratio
//    hit their closed-form targets (1e-6 / 1e-4 / 1e-4), 600 s budget.
// ---------------------------------------------------------------------
Outcome criterion6() {
  const auto start = Clock::now();
  std::vector<std::pair<MeasurementSet, MeasurementSet>> pairs;
  pairs.emplace_back(testutil::xz_set(), testutil::xz_set());
  for (int seed = 6600; pairs.size() < 11 && seed < 6800; ++seed) {
    const MeasurementSet a = random_set(2, {2, 2}, seed);
    const MeasurementSet b = random_set(2, {2, 2}, seed + 100);
    if (compute_roi(a).roi <= 1e-3 || compute_roi(b).roi <= 1e-3) continue;
    pairs.emplace_back(a, b);
  }
  if (pairs.size() < 11)
    return {false, "only assembled " + std::to_string(pairs.size()) + " pairs"};

  double max_ratio_err = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const RoiCertificate cert_a = compute_roi(pairs[i].first);
    const RoiCertificate cert_b = compute_roi(pairs[i].second);
    const OptimalTaskBundle bundle = build_optimal_task(cert_a, cert_b);
    const AchievabilityReport rep = verify_achievability(
        bundle, pairs[i].first, pairs[i].second, cert_a, cert_b);
    max_ratio_err = std::max(max_ratio_err, std::abs(rep.ratio - rep.ratio_target));
    if (!rep.lo_ok)
      return {false, "pair " + std::to_string(i) + " local optimum off target by " +
                         fmt(std::abs(rep.lo_value - rep.target))};
    if (!rep.seesaw_ok)
      return {false, "pair " + std::to_string(i) + " ascent missed the compatible optimum"};
    if (!rep.ratio_ok)
      return {false, "pair " + std::to_string(i) + " ratio off by " +
                         fmt(std::abs(rep.ratio - rep.ratio_target))};
    if (!rep.pass) return {false, "pair " + std::to_string(i) + " failed"};
  }
  const double elapsed = seconds_since(start);
  if (elapsed > 600.0) return {false, "over budget: " + fmt(elapsed) + " s"};
  return {true, "11 pairs, max ratio error " + fmt(max_ratio_err) + ", " +
                    fmt(elapsed) + " s"};
}

// ---------------------------------------------------------------------
// 7. Monte Carlo replay of 20 fixed strategies lands within four standard
//    errors of the exact value at 1e5 trials.
// ---------------------------------------------------------------------
Outcome criterion7() {
  constexpr std::uint64_t trials = 100000;
  double max_sigmas = 0.0;
  for (int i = 0; i < 20; ++i) {
    const DiscriminationTask task = random_task({2, 2}, 2, 2, 7700 + 4 * i);
    const MeasurementSet ma = random_set(2, {2, 2}, 7701 + 4 * i);
    const MeasurementSet mb = random_set(2, {2, 2}, 7702 + 4 * i);
    const double mix = 0.15 + 0.03 * i;

    double expected = 0.0;
    SimulationResult res;
    if (i % 2 == 0) {
      StrategyLO s = psg_best_lo(task, ma, mb).strategy;
      for (auto& row : s.choose_a) row = {mix, 1.0 - mix};
      for (auto& row : s.choose_b) row = {1.0 - mix, mix};
      expected = psg_fixed(task, ma, mb, s);
      res = simulate_game(task, ma, mb, s, trials, 7703 + 4 * i);
    } else {
      StrategyLocc1 s = psg_best_locc1(task, ma, mb).strategy;
      for (auto& row : s.choose_a) row = {mix, 1.0 - mix};
      for (auto& per_c : s.choose_b)
        for (auto& row : per_c) row = {1.0 - mix, mix};
      expected = psg_fixed(task, ma, mb, s);
      res = simulate_game(task, ma, mb, s, trials, 7703 + 4 * i);
    }

    // Exact standard error of the empirical mean at the true rate.
    const double sigma = std::sqrt(expected * (1.0 - expected) / double(trials));
    const double sigmas = std::abs(res.empirical_rate - expected) / sigma;
    max_sigmas = std::max(max_sigmas, sigmas);
    if (sigmas > 4.0)
      return {false, "pair " + std::to_string(i) + " off by " + fmt(sigmas) +
                         " standard errors"};
  }
  return {true, "20 strategies, worst deviation " + fmt(max_sigmas) +
                    " standard errors"};
}

// ---------------------------------------------------------------------
// 8. CLI determinism and the exit-code contract across the fixture corpus.
// ---------------------------------------------------------------------
struct CliRun {
  int exit_code = -1;
  std::string out;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

CliRun run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path() / "roikit_acceptance";
  fs::create_directories(dir);
  const fs::path out = dir / ("cli_out" + std::to_string(counter++) + ".txt");
  const std::string cmd = std::string(ROIKIT_CLI_PATH) + " " + args + " > " +
                          out.string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  CliRun res;
  res.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  res.out = slurp(out);
  return res;
}

Outcome criterion8() {
  const fs::path scratch = fs::temp_directory_path() / "roikit_acceptance";
  fs::create_directories(scratch);
  const auto fixture = [](const char* name) {
    return (fs::path(ROIKIT_FIXTURE_DIR) / name).string();
  };
  const std::string xz = fixture("xz.json");
  const std::string xtheta = fixture("xtheta.json");
  const std::string task_small = fixture("task_small.json");
  const std::string task_xz = fixture("task_xz.json");
  const std::string two_sets = " -i " + xz + " -i " + xz;

  // Every report-producing command, run twice with identical arguments;
  // stdout and the report file must not change between runs.
  const std::vector<std::pair<std::string, std::string>> corpus = {
      {"roi", "roi -i " + xz + " -o " + (scratch / "r1.json").string()},
      {"compat-check",
       "compat-check -i " + fixture("compatible.json") + " -o " +
           (scratch / "r2.json").string()},
      {"tensor-roi",
       "tensor-roi -i " + xz + " -i " + xtheta + " -o " + (scratch / "r3.json").string()},
      {"psg", "psg --task " + task_small + two_sets + " --mode locc1 -o " +
                  (scratch / "r4.json").string()},
      {"seesaw", "seesaw --task " + task_small + two_sets +
                     " --restarts 2 --seed 3 -o " + (scratch / "r5.json").string()},
      {"bound-check", "bound-check --task " + task_xz + two_sets +
                          " --restarts 2 -o " + (scratch / "r6.json").string()},
      {"construct", "construct" + two_sets + " -o " + (scratch / "r7.json").string()},
      {"verify-achievability",
       "verify-achievability" + two_sets + " -o " + (scratch / "r8.json").string()},
      {"simulate", "simulate --task " + task_small + two_sets +
                       " --trials 50000 --seed 12 -o " + (scratch / "r9.json").string()},
  };
  int reports = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const fs::path report = scratch / ("r" + std::to_string(i + 1) + ".json");
    const CliRun first = run_cli(corpus[i].second);
    const std::string bytes = fs::exists(report) ? slurp(report) : "";
    const CliRun second = run_cli(corpus[i].second);
    if (first.exit_code != 0)
      return {false, corpus[i].first + " exited " + std::to_string(first.exit_code)};
    if (first.out != second.out)
      return {false, corpus[i].first + " stdout changed between runs"};
    if (fs::exists(report)) {
      ++reports;
      if (bytes != slurp(report))
        return {false, corpus[i].first + " report changed between runs"};
    }
  }

  // Exit-code contract.
  const CliRun cert_run = run_cli("roi -i " + xz + " -o " + (scratch / "c.json").string());
  if (cert_run.exit_code != 0) return {false, "roi on the bundled pair failed"};
  const RoiCertificate cert = roi_cert_from_json(load_json(scratch / "c.json"));
  if (cert.gap > 1e-6) return {false, "certificate gap " + fmt(cert.gap)};

  if (run_cli("compat-check -i " + xz).exit_code != 1)
    return {false, "incompatible set did not exit 1"};
  if (run_cli("psg --task " + task_small + " -i " + fixture("malformed.json") +
              " -i " + xz)
          .exit_code != 2)
    return {false, "malformed input did not exit 2"};
  if (run_cli("roi -i " + fixture("overflow.json")).exit_code != 3)
    return {false, "string-cap overflow did not exit 3"};
  if (run_cli("nonsense-command").exit_code != 2)
    return {false, "unknown command did not exit 2"};

  return {true, std::to_string(corpus.size()) + " commands deterministic, " +
                    std::to_string(reports) + " reports byte-stable, exit codes 0/1/2/3"};
}

}  // namespace

int main() {
  int failed = 0;
  const auto run = [&failed](int n, Outcome (*fn)()) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << " ("
              << o.detail << ")" << std::endl;
    if (!o.pass) ++failed;
  };
  run(1, criterion1);
  run(2, criterion2);
  run(3, criterion3);
  run(4, criterion4);
  run(5, criterion5);
  run(6, criterion6);
  run(7, criterion7);
  run(8, criterion8);
  return failed == 0 ? 0 : 1;
}
