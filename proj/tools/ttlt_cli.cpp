#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ttlt/scenario.hpp"

namespace {

ttlt::CommandOptions make_options(const std::string& out, const std::string& cache,
                                  std::uint64_t seed, bool seed_set, int realizations,
                                  bool realizations_set, bool force, bool no_centers) {
  ttlt::CommandOptions opts;
  if (!out.empty()) opts.out_dir = out;
  if (!cache.empty()) opts.cache_dir = cache;
  if (seed_set) opts.seed = seed;
  if (realizations_set) opts.realizations = realizations;
  opts.force = force;
  opts.write_centers = !no_centers;
  return opts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust STL satisfiability checking and online control synthesis "
               "via grid-based reachable tubes and tube-based temporal logic trees"};
  app.require_subcommand(1);

  std::string config_path, out_dir, cache_dir, traj_file;
  std::uint64_t seed = 0;
  int realizations = 0;
  bool force = false, no_centers = false;

  auto add_common = [&](CLI::App* cmd, bool needs_config = true) {
    if (needs_config)
      cmd->add_option("--config", config_path, "scenario config file")->required();
    cmd->add_option("--out", out_dir, "output directory (overrides [output] dir)");
    cmd->add_option("--cache", cache_dir, "tube cache directory");
  };

  CLI::App* check = app.add_subcommand(
      "check", "satisfiability check: root-membership necessary condition plus a "
               "zero-disturbance synthesis probe per disjunctive branch");
  add_common(check);

  CLI::App* synth = app.add_subcommand(
      "synthesize", "run seeded disturbance realizations of the online synthesis "
                    "loop and write trajectories, verdicts, and aggregates");
  add_common(synth);
  auto* seed_opt = synth->add_option("--seed", seed, "base seed");
  auto* real_opt = synth->add_option("--realizations", realizations, "number of runs");
  synth->add_flag("--force", force, "skip the satisfiability gate");

  CLI::App* monitor = app.add_subcommand(
      "monitor", "evaluate the scenario formula on a recorded trajectory CSV");
  add_common(monitor);
  monitor->add_option("--traj", traj_file, "trajectory CSV")->required();

  CLI::App* export_tree = app.add_subcommand(
      "export-tree", "write the constructed tree's node/edge lists and tube slices");
  add_common(export_tree);
  export_tree->add_flag("--no-centers", no_centers,
                        "skip the per-slice member-center CSV files");

  CLI11_PARSE(app, argc, argv);

  try {
    const ttlt::Scenario sc = ttlt::Scenario::load(config_path);
    const ttlt::CommandOptions opts =
        make_options(out_dir, cache_dir, seed, seed_opt && seed_opt->count() > 0,
                     realizations, real_opt && real_opt->count() > 0, force, no_centers);

    if (*check) {
      const ttlt::CheckReport rep = ttlt::cmd_check(sc, opts);
      std::cout << "root contains x0: " << (rep.root_contains_x0 ? "yes" : "no") << "\n";
      for (std::size_t i = 0; i < rep.branches.size(); ++i) {
        const auto& b = rep.branches[i];
        std::cout << "branch " << i + 1 << ": necessary="
                  << (b.necessary ? "yes" : "no")
                  << " probe=" << ttlt::verdict_name(b.probe)
                  << " -> " << (b.pass ? "PASS" : "FAIL") << "  " << b.text << "\n";
      }
      std::cout << "overall: " << (rep.overall ? "satisfiable" : "not shown satisfiable")
                << " (" << rep.strength << ")\n";
      return rep.overall ? 0 : 1;
    }
    if (*synth) {
      const ttlt::SynthesisSummary sum = ttlt::cmd_synthesize(sc, opts);
      std::cout << "realizations: " << sum.realizations << "\n"
                << "completed: " << sum.completed << "\n"
                << "monitor-satisfied: " << sum.monitor_satisfied << "\n"
                << "offline tree build: " << sum.offline_seconds << " s\n"
                << "online total: " << sum.online_seconds << " s\n";
      return sum.monitor_satisfied == sum.realizations ? 0 : 1;
    }
    if (*monitor) {
      const ttlt::MonitorReport rep = ttlt::cmd_monitor(sc, traj_file);
      std::cout << "satisfied: " << (rep.satisfied ? "true" : "false") << "\n";
      if (rep.witness_step >= 0)
        std::cout << (rep.satisfied ? "witness step: " : "violation step: ")
                  << rep.witness_step << "\n";
      return rep.satisfied ? 0 : 1;
    }
    if (*export_tree) {
      ttlt::cmd_export_tree(sc, opts);
      std::cout << "tree exported\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
