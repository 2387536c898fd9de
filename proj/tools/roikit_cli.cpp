//=======================================================================
// Copyright 2026 The roikit authors.
// Distributed under the MIT License.
// (See accompanying file LICENSE or copy at
//  http://opensource.org/licenses/MIT)
//=======================================================================

// Command-line surface over the library. Every command prints a short
// human-readable summary on stdout and optionally writes a canonical JSON
// report; identical inputs and seeds produce identical bytes in both.
//
// Exit codes: 0 success / all checks pass, 1 a verified mathematical check
// failed, 2 input or schema error, 3 solver or resource failure.

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "roikit/bound.hpp"
#include "roikit/construct.hpp"
#include "roikit/io.hpp"
#include "roikit/oracle.hpp"
#include "roikit/psg.hpp"
#include "roikit/roi.hpp"
#include "roikit/sdp_compile.hpp"
#include "roikit/seesaw.hpp"
#include "roikit/sim.hpp"
#include "roikit/task.hpp"

namespace {

using namespace roikit;

constexpr double kUnsetTol = -1.0;

// Resolved run configuration, echoed into every report for provenance.
struct RunConfig {
  std::string command;
  std::vector<std::string> inputs;
  std::string task_path;
  std::string output;
  double tol = kUnsetTol;  // command-specific decision threshold
  std::uint64_t seed = 1;
  int restarts = 0;
  int parties = 0;
  std::uint64_t trials = 100000;
  std::string mode = "lo";
  std::string dump_sdp;
};

Json config_json(const RunConfig& cfg) {
  Json inputs = Json::array();
  for (const std::string& p : cfg.inputs) inputs.push_back(p);
  Json j{{"command", cfg.command}, {"inputs", std::move(inputs)}};
  if (!cfg.task_path.empty()) j["task"] = cfg.task_path;
  if (!cfg.output.empty()) j["output"] = cfg.output;
  if (cfg.tol != kUnsetTol) j["tol"] = cfg.tol;
  j["seed"] = cfg.seed;
  if (cfg.restarts > 0) j["restarts"] = cfg.restarts;
  if (cfg.parties > 0) j["parties"] = cfg.parties;
  if (cfg.command == "simulate") j["trials"] = cfg.trials;
  if (cfg.command == "psg" || cfg.command == "simulate") j["mode"] = cfg.mode;
  if (!cfg.dump_sdp.empty()) j["dump_sdp"] = cfg.dump_sdp;
  return j;
}

Json provenance(const RunConfig& cfg) {
  return Json{{"config", config_json(cfg)}, {"version", version_string}};
}

void write_report(const RunConfig& cfg, Json j) {
  if (cfg.output.empty()) return;
  j["provenance"] = provenance(cfg);
  save_json(cfg.output, j);
  std::cout << "report: " << cfg.output << "\n";
}

std::string fmt(double v) { return format_number(v); }

MeasurementSet load_set(const std::string& path, const Tolerances& tol = {}) {
  try {
    return measurement_set_from_json(load_json(path), tol);
  } catch (const SchemaError& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

DiscriminationTask load_task(const std::string& path, const Tolerances& tol = {}) {
  try {
    return task_from_json(load_json(path), tol);
  } catch (const SchemaError& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

void require_inputs(const RunConfig& cfg, std::size_t lo, std::size_t hi) {
  if (cfg.inputs.size() < lo || cfg.inputs.size() > hi) {
    const std::string want =
        lo == hi ? std::to_string(lo)
                 : std::to_string(lo) + " to " + std::to_string(hi);
    throw SchemaError(cfg.command + ": expected " + want +
                      " --input file(s), got " + std::to_string(cfg.inputs.size()));
  }
}

// --parties is a cross-check on the number of inputs, not a source of truth.
void check_parties(const RunConfig& cfg) {
  if (cfg.parties > 0 && cfg.parties != static_cast<int>(cfg.inputs.size()))
    throw SchemaError(cfg.command + ": --parties " + std::to_string(cfg.parties) +
                      " does not match " + std::to_string(cfg.inputs.size()) +
                      " --input file(s)");
}

std::vector<MeasurementSet> load_party_sets(const RunConfig& cfg,
                                            const DiscriminationTask& task) {
  if (cfg.inputs.size() != task.party_dims.size())
    throw SchemaError(cfg.command + ": task has " +
                      std::to_string(task.party_dims.size()) + " parties but " +
                      std::to_string(cfg.inputs.size()) + " --input file(s) given");
  std::vector<MeasurementSet> sets;
  for (std::size_t i = 0; i < cfg.inputs.size(); ++i) {
    sets.push_back(load_set(cfg.inputs[i]));
    if (sets.back().dim() != task.party_dims[i])
      throw SchemaError(cfg.inputs[i] + ": dimension " +
                        std::to_string(sets.back().dim()) +
                        " does not match party dimension " +
                        std::to_string(task.party_dims[i]));
  }
  return sets;
}

// ---------------------------------------------------------------------
// Commands.
// ---------------------------------------------------------------------

int cmd_roi(const RunConfig& cfg) {
  require_inputs(cfg, 1, 1);
  const MeasurementSet set = load_set(cfg.inputs[0]);
  Tolerances tol;
  if (cfg.tol != kUnsetTol) tol.gap = cfg.tol;
  const RoiCertificate cert = compute_roi(set, tol);
  std::cout << "roi: " << fmt(cert.roi) << "\n";
  std::cout << "one_plus_roi: " << fmt(1.0 + cert.roi) << "\n";
  std::cout << "gap: " << fmt(cert.gap) << "\n";
  std::cout << "strings: " << cert.strings.size() << "\n";
  if (!cfg.dump_sdp.empty()) {
    const auto strings = deterministic_strings(set.outcome_counts());
    const sdp::BlockProblem bp =
        sdp_detail::lower_primal(build_roi_primal(set, strings)).bp;
    save_json(cfg.dump_sdp, sdp_dump_to_json(bp));
    std::cout << "sdp_dump: " << cfg.dump_sdp << "\n";
  }
  write_report(cfg, to_json(cert));
  return 0;
}

int cmd_compat_check(const RunConfig& cfg) {
  require_inputs(cfg, 1, 1);
  const MeasurementSet set = load_set(cfg.inputs[0]);
  const double threshold = cfg.tol != kUnsetTol ? cfg.tol : 1e-6;
  const RoiCertificate cert = compute_roi(set);
  const bool compatible = cert.roi <= threshold;
  std::cout << "roi: " << fmt(cert.roi) << "\n";
  std::cout << "threshold: " << fmt(threshold) << "\n";
  std::cout << "compatible: " << (compatible ? "yes" : "no") << "\n";
  write_report(cfg, Json{{"compatible", compatible},
                         {"roi", cert.roi},
                         {"threshold", threshold}});
  return compatible ? 0 : 1;
}

int cmd_tensor_roi(const RunConfig& cfg) {
  require_inputs(cfg, 2, 8);
  check_parties(cfg);
  std::vector<MeasurementSet> factors;
  for (const std::string& p : cfg.inputs) factors.push_back(load_set(p));
  MeasurementSet product = factors[0];
  double prod_one_plus = 0.0;
  Json factor_roi = Json::array();
  {
    double acc = 1.0;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      const RoiCertificate cert = compute_roi(factors[i]);
      std::cout << "factor_" << i << "_roi: " << fmt(cert.roi) << "\n";
      factor_roi.push_back(cert.roi);
      acc *= 1.0 + cert.roi;
      if (i > 0) product = tensor_sets(product, factors[i]);
    }
    prod_one_plus = acc;
  }
  const RoiCertificate cert = compute_roi(product);
  const double residual = std::abs((1.0 + cert.roi) - prod_one_plus);
  const double threshold = cfg.tol != kUnsetTol ? cfg.tol : 1e-5;
  const bool pass = residual <= threshold;
  std::cout << "product_roi: " << fmt(cert.roi) << "\n";
  std::cout << "residual: " << fmt(residual) << "\n";
  std::cout << "multiplicative: " << (pass ? "yes" : "no") << "\n";
  write_report(cfg, Json{{"factor_roi", std::move(factor_roi)},
                         {"pass", pass},
                         {"product_roi", cert.roi},
                         {"residual", residual},
                         {"threshold", threshold}});
  return pass ? 0 : 1;
}

int cmd_psg(const RunConfig& cfg) {
  if (cfg.task_path.empty()) throw SchemaError("psg: --task is required");
  const DiscriminationTask task = load_task(cfg.task_path);
  check_parties(cfg);
  const std::vector<MeasurementSet> sets = load_party_sets(cfg, task);
  double value = 0.0;
  if (cfg.mode == "lo") {
    value = psg_best_lo_n(task, sets).value;
  } else {
    if (sets.size() != 2)
      throw SchemaError("psg: --mode locc1 needs exactly two parties");
    value = psg_best_locc1(task, sets[0], sets[1]).value;
  }
  std::cout << "mode: " << cfg.mode << "\n";
  std::cout << "value: " << fmt(value) << "\n";
  std::cout << "baseline: " << fmt(baseline_guess(task)) << "\n";
  write_report(cfg, Json{{"baseline", baseline_guess(task)},
                         {"mode", cfg.mode},
                         {"value", value}});
  return 0;
}

int cmd_seesaw(const RunConfig& cfg) {
  if (cfg.task_path.empty()) throw SchemaError("seesaw: --task is required");
  const DiscriminationTask task = load_task(cfg.task_path);
  if (task.n_parties() != 2)
    throw SchemaError("seesaw: the task must have exactly two parties");
  check_parties(cfg);
  const std::vector<MeasurementSet> sets = load_party_sets(cfg, task);
  const int na = static_cast<int>(deterministic_strings(sets[0].outcome_counts()).size());
  const int nb = static_cast<int>(deterministic_strings(sets[1].outcome_counts()).size());
  const int restarts = cfg.restarts > 0 ? cfg.restarts : 4;
  SeesawOptions opts;
  if (cfg.tol != kUnsetTol) opts.rel_tol = cfg.tol;
  const SeesawResult res =
      psg_compatible_seesaw(task, na, nb, restarts, cfg.seed, opts);
  std::cout << "value: " << fmt(res.value) << "\n";
  std::cout << "iterations: " << res.iterations << "\n";
  std::cout << "restarts: " << restarts << "\n";
  Json restart_values = Json::array();
  for (double v : res.restart_values) restart_values.push_back(v);
  write_report(cfg, Json{{"iterations", res.iterations},
                         {"parent_outcomes", Json::array({na, nb})},
                         {"restart_values", std::move(restart_values)},
                         {"value", res.value}});
  return 0;
}

int cmd_bound_check(const RunConfig& cfg) {
  if (cfg.task_path.empty()) throw SchemaError("bound-check: --task is required");
  const DiscriminationTask task = load_task(cfg.task_path);
  check_parties(cfg);
  const std::vector<MeasurementSet> sets = load_party_sets(cfg, task);
  BoundOptions opts;
  if (cfg.tol != kUnsetTol) opts.tol.gap = cfg.tol;
  if (cfg.restarts > 0) opts.seesaw_restarts = cfg.restarts;
  opts.seed = cfg.seed;
  const BoundReport rep = bound_report(task, sets, opts);
  for (std::size_t i = 0; i < rep.roi.size(); ++i)
    std::cout << "roi_" << i << ": " << fmt(rep.roi[i]) << "\n";
  std::cout << "product: " << fmt(rep.product) << "\n";
  std::cout << "parent_guess: " << fmt(rep.parent_guess) << "\n";
  std::cout << "bound: " << fmt(rep.bound) << "\n";
  std::cout << "p_lo: " << fmt(rep.p_lo) << "\n";
  if (rep.has_locc1) std::cout << "p_locc1: " << fmt(rep.p_locc1) << "\n";
  if (rep.has_seesaw) std::cout << "seesaw: " << fmt(rep.seesaw_value) << "\n";
  std::cout << "pass: " << (rep.pass ? "yes" : "no") << "\n";
  write_report(cfg, to_json(rep));
  return rep.pass ? 0 : 1;
}

int cmd_construct(const RunConfig& cfg) {
  require_inputs(cfg, 2, 2);
  if (cfg.output.empty()) throw SchemaError("construct: --output is required");
  const MeasurementSet ma = load_set(cfg.inputs[0]);
  const MeasurementSet mb = load_set(cfg.inputs[1]);
  Tolerances tol;
  if (cfg.tol != kUnsetTol) tol.gap = cfg.tol;
  const RoiCertificate cert_a = compute_roi(ma, tol);
  const RoiCertificate cert_b = compute_roi(mb, tol);
  const OptimalTaskBundle bundle = build_optimal_task(cert_a, cert_b, tol);
  Json task_json = to_json(bundle.task);
  task_json["provenance"] = provenance(cfg);
  save_json(cfg.output, task_json);
  std::filesystem::path meta_path(cfg.output);
  meta_path.replace_extension(".meta.json");
  Json meta = bundle_meta_to_json(bundle);
  meta["provenance"] = provenance(cfg);
  save_json(meta_path, meta);
  std::cout << "roi_a: " << fmt(cert_a.roi) << "\n";
  std::cout << "roi_b: " << fmt(cert_b.roi) << "\n";
  std::cout << "m_star: " << fmt(bundle.m_star) << "\n";
  std::cout << "n_star: " << fmt(bundle.n_star) << "\n";
  std::cout << "ensembles: " << bundle.task.n_ensembles() << "\n";
  std::cout << "dropped_mass: " << fmt(bundle.dropped_mass) << "\n";
  std::cout << "task: " << cfg.output << "\n";
  std::cout << "meta: " << meta_path.string() << "\n";
  return 0;
}

int cmd_verify_achievability(const RunConfig& cfg) {
  require_inputs(cfg, 2, 2);
  const MeasurementSet ma = load_set(cfg.inputs[0]);
  const MeasurementSet mb = load_set(cfg.inputs[1]);
  const RoiCertificate cert_a = compute_roi(ma);
  const RoiCertificate cert_b = compute_roi(mb);
  const OptimalTaskBundle bundle = build_optimal_task(cert_a, cert_b);
  AchievabilityOptions opts;
  if (cfg.restarts > 0) opts.restarts = cfg.restarts;
  opts.seed = cfg.seed;
  const AchievabilityReport rep =
      verify_achievability(bundle, ma, mb, cert_a, cert_b, opts);
  std::cout << "target: " << fmt(rep.target) << "\n";
  std::cout << "identity_play: " << fmt(rep.identity_play) << "\n";
  std::cout << "lo_value: " << fmt(rep.lo_value) << "\n";
  std::cout << "compat_target: " << fmt(rep.compat_target) << "\n";
  std::cout << "seesaw_value: " << fmt(rep.seesaw_value) << "\n";
  std::cout << "ratio: " << fmt(rep.ratio) << "\n";
  std::cout << "ratio_target: " << fmt(rep.ratio_target) << "\n";
  std::cout << "identity_ok: " << (rep.identity_ok ? "yes" : "no") << "\n";
  std::cout << "lo_ok: " << (rep.lo_ok ? "yes" : "no") << "\n";
  std::cout << "seesaw_ok: " << (rep.seesaw_ok ? "yes" : "no") << "\n";
  std::cout << "ratio_ok: " << (rep.ratio_ok ? "yes" : "no") << "\n";
  std::cout << "pass: " << (rep.pass ? "yes" : "no") << "\n";
  write_report(cfg, Json{{"compat_target", rep.compat_target},
                         {"dropped_mass", rep.dropped_mass},
                         {"identity_ok", rep.identity_ok},
                         {"identity_play", rep.identity_play},
                         {"lo_ok", rep.lo_ok},
                         {"lo_value", rep.lo_value},
                         {"pass", rep.pass},
                         {"ratio", rep.ratio},
                         {"ratio_ok", rep.ratio_ok},
                         {"ratio_target", rep.ratio_target},
                         {"seesaw_ok", rep.seesaw_ok},
                         {"seesaw_restarts", rep.seesaw_restarts},
                         {"seesaw_value", rep.seesaw_value},
                         {"target", rep.target}});
  return rep.pass ? 0 : 1;
}

int cmd_simulate(const RunConfig& cfg) {
  if (cfg.task_path.empty()) throw SchemaError("simulate: --task is required");
  const DiscriminationTask task = load_task(cfg.task_path);
  if (task.n_parties() != 2)
    throw SchemaError("simulate: the task must have exactly two parties");
  check_parties(cfg);
  const std::vector<MeasurementSet> sets = load_party_sets(cfg, task);
  if (cfg.trials == 0) throw SchemaError("simulate: --trials must be positive");
  double expected = 0.0;
  SimulationResult res;
  if (cfg.mode == "lo") {
    const PsgLoResult best = psg_best_lo(task, sets[0], sets[1]);
    expected = best.value;
    res = simulate_game(task, sets[0], sets[1], best.strategy, cfg.trials, cfg.seed);
  } else {
    const PsgLocc1Result best = psg_best_locc1(task, sets[0], sets[1]);
    expected = best.value;
    res = simulate_game(task, sets[0], sets[1], best.strategy, cfg.trials, cfg.seed);
  }
  const double dev = std::abs(res.empirical_rate - expected);
  const double band = 4.0 * res.std_error;
  const bool pass = dev <= band;
  std::cout << "mode: " << cfg.mode << "\n";
  std::cout << "expected: " << fmt(expected) << "\n";
  std::cout << "empirical: " << fmt(res.empirical_rate) << "\n";
  std::cout << "std_error: " << fmt(res.std_error) << "\n";
  std::cout << "trials: " << res.trials << "\n";
  std::cout << "within_4_sigma: " << (pass ? "yes" : "no") << "\n";
  write_report(cfg, Json{{"empirical", res.empirical_rate},
                         {"expected", expected},
                         {"mode", cfg.mode},
                         {"pass", pass},
                         {"std_error", res.std_error},
                         {"successes", res.successes},
                         {"trials", res.trials}});
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"roikit: incompatibility robustness and local discrimination toolkit"};
  app.require_subcommand(1);

  RunConfig cfg;
  auto add_common = [&cfg](CLI::App* sub, bool with_task) {
    sub->add_option("-i,--input", cfg.inputs, "Input measurement set file(s)");
    if (with_task)
      sub->add_option("--task", cfg.task_path, "Discrimination task file (task.v1)");
    sub->add_option("-o,--output", cfg.output, "Write a canonical JSON report here");
    sub->add_option("--tol", cfg.tol,
                    "Decision threshold for this command's check (see README)");
    sub->add_option("--seed", cfg.seed, "Random seed for any stochastic step")
        ->default_val(std::uint64_t{1});
    sub->add_option("--restarts", cfg.restarts, "Random restarts for ascent searches");
    sub->add_option("--parties", cfg.parties,
                    "Expected party count; cross-checked against --input");
  };

  CLI::App* roi = app.add_subcommand("roi", "Robustness of incompatibility of one set");
  add_common(roi, false);
  roi->add_option("--dump-sdp", cfg.dump_sdp,
                  "Also write the compiled primal block program (sdp_dump.v1)");

  CLI::App* compat =
      app.add_subcommand("compat-check", "Exit 0 if the set is compatible");
  add_common(compat, false);

  CLI::App* tensor =
      app.add_subcommand("tensor-roi", "Multiplicativity of 1+ROI across a tensor product");
  add_common(tensor, false);

  CLI::App* psg = app.add_subcommand(
      "psg", "Best deterministic local guessing probability for a task");
  add_common(psg, true);
  psg->add_option("--mode", cfg.mode, "Strategy class: lo or locc1")
      ->check(CLI::IsMember({"lo", "locc1"}))
      ->default_val("lo");

  CLI::App* seesaw = app.add_subcommand(
      "seesaw", "Compatible-measurement ascent baseline for a task");
  add_common(seesaw, true);

  CLI::App* bound =
      app.add_subcommand("bound-check", "Verify the incompatibility upper bound on a task");
  add_common(bound, true);

  CLI::App* construct = app.add_subcommand(
      "construct", "Build the bound-achieving task from two measurement sets");
  add_common(construct, false);

  CLI::App* verify = app.add_subcommand(
      "verify-achievability", "End-to-end optimality check of the constructed task");
  add_common(verify, false);

  CLI::App* simulate =
      app.add_subcommand("simulate", "Monte Carlo replay of the best strategy");
  add_common(simulate, true);
  simulate->add_option("--trials", cfg.trials, "Number of simulated rounds")
      ->default_val(std::uint64_t{100000});
  simulate->add_option("--mode", cfg.mode, "Strategy class: lo or locc1")
      ->check(CLI::IsMember({"lo", "locc1"}))
      ->default_val("lo");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (roi->parsed()) return cfg.command = "roi", cmd_roi(cfg);
    if (compat->parsed()) return cfg.command = "compat-check", cmd_compat_check(cfg);
    if (tensor->parsed()) return cfg.command = "tensor-roi", cmd_tensor_roi(cfg);
    if (psg->parsed()) return cfg.command = "psg", cmd_psg(cfg);
    if (seesaw->parsed()) return cfg.command = "seesaw", cmd_seesaw(cfg);
    if (bound->parsed()) return cfg.command = "bound-check", cmd_bound_check(cfg);
    if (construct->parsed()) return cfg.command = "construct", cmd_construct(cfg);
    if (verify->parsed())
      return cfg.command = "verify-achievability", cmd_verify_achievability(cfg);
    if (simulate->parsed()) return cfg.command = "simulate", cmd_simulate(cfg);
    std::cerr << "no command selected\n";
    return 2;
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 2;
  } catch (const InaccurateCertificateError& e) {
    // An uncertifiable solve is a solver failure, not a failed theorem check.
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return 1;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const ResourceError& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return 3;
  }
}
