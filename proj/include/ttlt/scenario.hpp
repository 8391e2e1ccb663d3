#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ttlt/formula.hpp"
#include "ttlt/grid.hpp"
#include "ttlt/reach.hpp"
#include "ttlt/synth.hpp"
#include "ttlt/system.hpp"
#include "ttlt/tree.hpp"

namespace ttlt {

/// Sectioned key = value scenario file ('#' comments). Raw access plus the
/// typed builders used by the commands.
class ScenarioConfig {
 public:
  static ScenarioConfig load(const std::filesystem::path& file);
  static ScenarioConfig from_string(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;
  const std::string& get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double_or(const std::string& section, const std::string& key,
                       double fallback) const;
  std::int64_t get_int_or(const std::string& section, const std::string& key,
                          std::int64_t fallback) const;
  Eigen::VectorXd get_vector(const std::string& section, const std::string& key) const;
  std::vector<int> get_ints(const std::string& section, const std::string& key) const;
  /// Keys of a section in sorted order (empty when the section is absent).
  std::vector<std::string> section_keys(const std::string& section) const;

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

/// A fully resolved scenario: grid, model, predicates, formula, initial state.
struct Scenario {
  ScenarioConfig config;
  GridPtr grid;
  SystemModel model;
  PredicateTable predicates;
  FormulaPtr formula;      // as parsed
  FormulaPtr pnf;          // positive normal form
  Eigen::VectorXd x0;
  std::string formula_text;
  std::string output_dir;
  std::uint64_t seed = 1;
  int realizations = 20;
  int max_steps = 0;  // 0: horizon + slack

  static Scenario load(const std::filesystem::path& file);
  static Scenario from_config(ScenarioConfig cfg);

  int default_max_steps() const;
  /// Disturbance signal generator per the config's [disturbance] mode.
  DisturbanceSource disturbance(std::uint64_t seed) const;
};

struct CommandOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> realizations;
  std::optional<std::string> out_dir;
  std::optional<std::string> cache_dir;
  bool force = false;
  bool write_centers = true;
};

struct CheckBranch {
  std::string text;
  bool necessary = false;   // x0 in the branch root at t0
  Verdict probe = Verdict::MaxSteps;
  bool pass = false;
};

struct CheckReport {
  bool root_contains_x0 = false;
  bool deterministic = false;
  std::string strength;  // "sound (deterministic)" or "necessary + zero-disturbance probe"
  std::vector<CheckBranch> branches;
  bool overall = false;
};

CheckReport cmd_check(const Scenario& sc, const CommandOptions& opts = {});

struct RealizationSummary {
  std::uint64_t seed = 0;
  Verdict verdict = Verdict::MaxSteps;
  bool monitor_satisfied = false;  // exact STL semantics on the trajectory
  bool tree_satisfied = false;
  int steps = 0;
  int nexis_step = -1;
  int min_feasible = 0;
  double mean_feasible = 0.0;
};

struct SynthesisSummary {
  int realizations = 0;
  int monitor_satisfied = 0;
  int completed = 0;
  std::vector<RealizationSummary> runs;
  double offline_seconds = 0.0;
  double online_seconds = 0.0;
  double max_step_seconds = 0.0;
};

SynthesisSummary cmd_synthesize(const Scenario& sc, const CommandOptions& opts = {});

struct MonitorReport {
  bool satisfied = false;
  /// Hitting step of the top-level temporal obligation when satisfied, or
  /// the first violating step when falsified; -1 when not applicable.
  int witness_step = -1;
};

MonitorReport cmd_monitor(const Scenario& sc, const std::filesystem::path& traj_csv);

void cmd_export_tree(const Scenario& sc, const CommandOptions& opts = {});

/// Read the state columns of a trajectory CSV written by cmd_synthesize
/// (header k,t,x0..., or any CSV whose first columns are k,t followed by the
/// state).
Signal read_trajectory_csv(const std::filesystem::path& file, int state_dim,
                           double delta);

/// Split a PNF formula into its top-level disjunctive branches.
std::vector<FormulaPtr> or_branches(const FormulaPtr& pnf);

}  // namespace ttlt
