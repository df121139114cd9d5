// command-line driver: ground-state preparation, decoherence scans, exact
// oracle regeneration, and the transition-point fit

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "decochain/scan.hpp"

using namespace decochain;

namespace {

// the config file supplies defaults; explicit flags override them, so the
// file has to be loaded before CLI11 binds the option targets
std::string find_config_arg(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return argv[i + 1];
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return "";
}

int cmd_ground(const ScanConfig& cfg) {
  ScanConfig c = cfg;
  validate_config(c);
  for (int l : c.cells) {
    GroundInfo g = prepare_ground(c, l);
    std::cout << "L=" << l << "  E=" << g.energy << "  sweeps=" << g.sweeps
              << (g.reused ? "  (checkpoint reused)" : "") << "\n  " << g.checkpoint
              << "\n";
    if (g.ed_checked)
      std::cout << "  exact check: E=" << g.ed_energy
                << "  |dE|=" << std::abs(g.energy - g.ed_energy) << "\n";
  }
  return 0;
}

int cmd_scan(const ScanConfig& cfg) {
  ScanResult res = run_scan(cfg);
  std::cout << res.rows.size() << " rows, " << res.failed << " failed\n";
  for (const ScanRow& r : res.rows)
    if (!r.ok())
      std::cout << "  L=" << r.cells << " p_zz=" << r.p_zz << ": " << r.status << "\n";
  for (const auto& f : res.files) std::cout << "  wrote " << f << "\n";
  return res.exit_code();
}

int cmd_oracle(const ScanConfig& cfg, bool deep) {
  OracleResult res = run_oracle(cfg, deep);
  std::cout << res.report;
  std::cout << (res.clean ? "oracle clean\n" : "ORACLE MISMATCH\n");
  return res.clean ? 0 : 1;
}

int cmd_transition(const ScanConfig& cfg) {
  TransitionReport rep = run_transition(cfg);
  std::cout << transition_to_markdown(rep);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  ScanConfig cfg;
  try {
    const std::string config_path = find_config_arg(argc, argv);
    if (!config_path.empty()) cfg = load_config_file(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (const char* env = std::getenv("DECOCHAIN_THREADS")) {
    cfg.threads = std::max(1, std::atoi(env));
  }

  CLI::App app{"doubled sigma-tau chain under ZZ decoherence"};
  app.require_subcommand(1);
  std::string config_path_opt;
  app.add_option("--config", config_path_opt, "key = value config file (flags override)");
  app.add_option("--cells", cfg.cells, "system sizes (unit cells)")->delimiter(',');
  app.add_option("--jzz", cfg.j_zz, "sigma-sigma coupling J_zz");
  app.add_option("--p-grid", cfg.p_grid, "p_zz values in [0, 1/2]")->delimiter(',');
  app.add_option("--mode", cfg.mode, "'paired' (locked p_x) or 'simplified' (ZZ only)");
  app.add_option("--max-bond", cfg.max_bond, "MPS bond-dimension cap");
  app.add_option("--sv-floor", cfg.sv_floor, "relative singular-value cutoff");
  app.add_option("--gate-budget", cfg.gate_budget, "per-gate discarded-weight warning level");
  app.add_option("--dmrg-tol", cfg.dmrg_tol, "DMRG inter-sweep |dE| stop");
  app.add_option("--dmrg-sweeps", cfg.dmrg_sweeps, "DMRG sweep cap");
  app.add_option("--dmrg-local-iters", cfg.dmrg_local_iters, "Lanczos cap per local solve");
  app.add_option("--seed", cfg.seed, "DMRG starting-state seed");
  app.add_flag("--chi,!--no-chi", cfg.measure_chi, "measure the SWSSB susceptibilities");
  app.add_flag("--strings,!--no-strings", cfg.measure_strings, "measure the tau string operators");
  app.add_flag("--ee,!--no-ee", cfg.measure_ee, "measure entanglement entropy and spectrum");
  app.add_option("--string-k", cfg.string_k, "string length (0: floor(L/2) - 1)");
  app.add_option("--ee-cuts", cfg.ee_cuts, "prefix cuts in rungs (default: half cut)")->delimiter(',');
  app.add_flag("--profile", cfg.profile, "measure every prefix cut");
  app.add_option("--es-levels", cfg.es_levels, "entanglement-spectrum levels to keep");
  app.add_option("--window-lo", cfg.window_lo, "peak-fit window lower edge");
  app.add_option("--window-hi", cfg.window_hi, "peak-fit window upper edge");
  app.add_option("--out", cfg.out_dir, "output directory");
  app.add_option("--golden-dir", cfg.golden_dir, "committed oracle tables");

  CLI::App* ground = app.add_subcommand("ground", "solve and checkpoint DW ground states");
  ground->fallthrough();
  CLI::App* scan = app.add_subcommand("scan", "decohere across the p_zz grid and measure");
  scan->fallthrough();
  CLI::App* oracle = app.add_subcommand("oracle", "regenerate exact tables and diff them");
  oracle->fallthrough();
  bool deep = false;
  oracle->add_flag("--deep", deep, "cross-check eigensolvers at doubled L = 3");
  CLI::App* transition = app.add_subcommand("transition", "fit p_c from a finished scan");
  transition->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (ground->parsed()) return cmd_ground(cfg);
    if (scan->parsed()) return cmd_scan(cfg);
    if (oracle->parsed()) return cmd_oracle(cfg, deep);
    if (transition->parsed()) return cmd_transition(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
