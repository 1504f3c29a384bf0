// xoq: simulate, verify and synthesize exchange-pulse CNOT sequences for two
// coupled three-spin qubits, and derive effective couplings and gate times
// from device-level parameters.
//
// Exit codes: 0 success, 1 quality-threshold failure, 2 input error.

#include <complex>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "xoq/dynamics.hpp"
#include "xoq/effective_model.hpp"
#include "xoq/io.hpp"
#include "xoq/metrics.hpp"
#include "xoq/spins.hpp"
#include "xoq/synth.hpp"

namespace {

using namespace xoq;

constexpr int kOk = 0;
constexpr int kThresholdFailure = 1;
constexpr int kInputError = 2;

StepMode mode_from_string(const std::string& s) {
  if (s == "simultaneous") return StepMode::simultaneous;
  if (s == "sequential") return StepMode::sequential;
  throw std::invalid_argument("unknown mode \"" + s + "\"");
}

void print_report(const std::string& mode, const ObjectiveReport& r,
                  const Eigen::Matrix4cd& block) {
  std::printf("mode: %s\n", mode.c_str());
  std::printf("  f9           = %.6g\n", r.f9);
  std::printf("  f_joint      = %.6g\n", r.f_joint);
  std::printf("  leakage      = %.6g  (5-dim %.6g, 9-dim %.6g)\n", r.leakage,
              r.leakage5, r.leakage9);
  std::printf("  sector phase = %.6g rad (5-dim), %.6g rad (9-dim), "
              "mismatch %.6g rad\n",
              std::arg(r.phase5), std::arg(r.phase9), r.phase_mismatch);
  try {
    const MakhlinInvariants mk = makhlin_invariants(closest_unitary(block));
    std::printf("  makhlin      = (%.6g%+.6gi, %.6g)\n", mk.g1.real(),
                mk.g1.imag(), mk.g2);
  } catch (const std::exception&) {
    std::printf("  makhlin      = (block too far from unitary)\n");
  }
}

int cmd_verify(const std::string& sequence_path, const std::string& mode,
               double threshold, bool strict_phase, double phase_tolerance) {
  const PulseSequence seq = load_sequence(sequence_path);
  double best_f = 1e300;
  double best_mismatch = 1e300;
  for (const std::string& m : {std::string("simultaneous"),
                               std::string("sequential")}) {
    if (mode != "both" && mode != m) continue;
    const SequencePropagators u = sequence_propagator(seq, mode_from_string(m));
    const ObjectiveReport r = evaluate_objectives(u.u5, u.u9);
    print_report(m, r, encoded_block(u.u9.entries).block);
    if (r.f_joint < best_f) {
      best_f = r.f_joint;
      best_mismatch = r.phase_mismatch;
    }
  }
  const bool pass =
      best_f <= threshold && (!strict_phase || best_mismatch <= phase_tolerance);
  std::printf("verdict: f_joint = %.6g vs threshold %.6g%s -> %s\n", best_f,
              threshold,
              strict_phase ? " (strict sector-phase check on)" : "",
              pass ? "PASS" : "FAIL");
  return pass ? kOk : kThresholdFailure;
}

int cmd_search(const std::string& config_name, const std::string& params_path,
               const std::string& out_path, bool all_controllable,
               std::optional<std::uint64_t> seed_flag) {
  SearchConfig cfg = params_path.empty()
                         ? SearchConfig{}
                         : search_config_from_json(load_json(params_path));
  if (const char* env = std::getenv("XOQ_SEED")) {
    cfg.seed = std::strtoull(env, nullptr, 10);
  }
  if (seed_flag) cfg.seed = *seed_flag;  // explicit flag wins over XOQ_SEED

  const ConfigName name = config_name_from_string(config_name);
  const Configuration config =
      all_controllable
          ? (name == ConfigName::A ? Configuration::a_all_controllable()
                                   : Configuration::b_all_controllable())
          : Configuration::physical(name);

  const SearchReport report = run_search(cfg, config);
  if (!out_path.empty()) {
    save_json(search_report_to_json(report, cfg, config), out_path);
  }
  std::printf("best f = %.8g after %llu evaluations (%.2f s), %s\n",
              report.best_f,
              static_cast<unsigned long long>(report.evaluations),
              report.wall_seconds,
              report.reached_target ? "target reached" : "budget exhausted");
  return report.reached_target ? kOk : kThresholdFailure;
}

int cmd_estimate(double tr, double dest, const std::string& sequence_path,
                 std::optional<double> target_ns) {
  const PulseSequence seq = load_sequence(sequence_path);
  const DeviceParameters dev{tr, dest, {}, {}, {}, {}};
  const GateTimeEstimate est = estimate_gate_time(dev, seq);
  std::printf("Jmax    = %.6g ueV\n", est.jmax_uev);
  std::printf("T~      = %.6g (h/Jmax)\n", est.dimensionless_duration);
  std::printf("T       = %.6g ns\n", est.time_ns);
  if (target_ns) {
    const double implied =
        est.dimensionless_duration * (kPlanckEVs * 1e15) / *target_ns;
    const double rel = std::abs(est.jmax_uev - implied) / implied;
    std::printf("Jmax for %.6g ns would be %.6g ueV; supplied TR/dE_ST %s "
                "(relative deviation %.3g)\n",
                *target_ns, implied, rel <= 0.05 ? "agree" : "disagree", rel);
  }
  return kOk;
}

int cmd_export(const std::string& sequence_path, int sector,
               const std::string& out_path, const std::string& mode) {
  const PulseSequence seq = load_sequence(sequence_path);
  const SequencePropagators u =
      sequence_propagator(seq, mode_from_string(mode));
  export_matrix_heatmap(sector == 5 ? u.u5.entries : u.u9.entries, out_path);
  std::printf("wrote %dx%d heatmap to %s\n", sector, sector, out_path.c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two coupled three-spin exchange-only qubits: CNOT sequence "
               "verification, synthesis and device estimates"};
  app.require_subcommand(1);

  // verify
  std::string v_sequence, v_mode = "both";
  double v_threshold = 0.01, v_phase_tol = 0.05;
  bool v_strict = false;
  auto* verify = app.add_subcommand(
      "verify", "simulate a sequence file and test its CNOT objective");
  verify->add_option("--sequence", v_sequence, "sequence JSON file")
      ->required();
  verify->add_option("--mode", v_mode, "simultaneous|sequential|both")
      ->check(CLI::IsMember({"simultaneous", "sequential", "both"}));
  verify->add_option("--threshold", v_threshold, "pass threshold on f_joint");
  verify->add_flag("--strict-phase", v_strict,
                   "also require matching sector phases");
  verify->add_option("--phase-tolerance", v_phase_tol,
                     "sector-phase mismatch tolerance in rad");

  // search
  std::string s_config, s_params, s_out;
  bool s_all = false;
  std::optional<std::uint64_t> s_seed;
  auto* search = app.add_subcommand(
      "search", "synthesize a sequence by genetic + simplex search");
  search->add_option("--config", s_config, "A|B")->required();
  search->add_option("--search-params", s_params, "search config JSON file");
  search->add_option("--out", s_out, "output file for the best sequence");
  search->add_flag("--all-controllable", s_all,
                   "drop the fixed intra-dot constraint (toy model)");
  search->add_option("--seed", s_seed, "override the RNG seed");

  // couplings
  std::string c_params, c_config;
  auto* couplings = app.add_subcommand(
      "couplings", "effective Heisenberg couplings from Hubbard parameters");
  couplings->add_option("--params", c_params, "Hubbard parameter JSON file")
      ->required();
  couplings->add_option("--config", c_config, "A|B")->required();

  // estimate
  double e_tr = 0.0, e_dest = 0.0;
  std::string e_sequence;
  std::optional<double> e_target;
  auto* estimate = app.add_subcommand(
      "estimate", "physical gate time from TR and dE_ST");
  estimate->add_option("--tr", e_tr, "tunneling rate in ueV")->required();
  estimate->add_option("--dest", e_dest, "singlet-triplet splitting in ueV")
      ->required();
  estimate->add_option("--sequence", e_sequence, "sequence JSON file")
      ->required();
  estimate->add_option("--target-ns", e_target,
                       "report the Jmax implied by this gate time");

  // export
  std::string x_sequence, x_out, x_mode = "sequential";
  int x_sector = 9;
  auto* export_cmd = app.add_subcommand(
      "export", "write the sector transformation matrix as a CSV heatmap");
  export_cmd->add_option("--sequence", x_sequence, "sequence JSON file")
      ->required();
  export_cmd->add_option("--sector", x_sector, "5|9")
      ->check(CLI::IsMember({5, 9}));
  export_cmd->add_option("--out", x_out, "output CSV path")->required();
  export_cmd->add_option("--mode", x_mode, "simultaneous|sequential")
      ->check(CLI::IsMember({"simultaneous", "sequential"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) {
      return cmd_verify(v_sequence, v_mode, v_threshold, v_strict, v_phase_tol);
    }
    if (*search) return cmd_search(s_config, s_params, s_out, s_all, s_seed);
    if (*couplings) {
      const HubbardParameters params = load_hubbard(c_params);
      const ConfigName name = config_name_from_string(c_config);
      const EnergyDifferences de = energy_differences(params, name);
      const EffectiveCouplings c = effective_couplings(params, name);
      // perturbative-regime caution
      double max_offdiag = 0.0;
      for (const auto* m : {&params.t, &params.je, &params.jp, &params.jt}) {
        for (const auto& [pair, value] : *m) {
          max_offdiag = std::max(max_offdiag, std::abs(value));
        }
      }
      for (const auto& [dname, value] : de.as_map()) {
        if (value <= 10.0 * max_offdiag) {
          std::fprintf(stderr,
                       "warning: %s = %g is within 10x of the largest "
                       "off-diagonal parameter (%g); the perturbative "
                       "expansion may be inaccurate\n",
                       dname.c_str(), value, max_offdiag);
        }
      }
      std::cout << couplings_to_json(c, de).dump(2) << '\n';
      return kOk;
    }
    if (*estimate) return cmd_estimate(e_tr, e_dest, e_sequence, e_target);
    if (*export_cmd) return cmd_export(x_sequence, x_sector, x_out, x_mode);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInputError;
  }
  return kInputError;
}
