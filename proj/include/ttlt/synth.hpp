#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "ttlt/system.hpp"
#include "ttlt/tree.hpp"

namespace ttlt {

/// Subset of the sampled control set U_s, as a mask over control indices.
struct ControlSet {
  std::vector<char> mask;

  static ControlSet none(std::size_t n) { return ControlSet{std::vector<char>(n, 0)}; }
  static ControlSet all(std::size_t n) { return ControlSet{std::vector<char>(n, 1)}; }

  std::size_t size() const { return mask.size(); }
  std::size_t count() const;
  bool empty() const;
  ControlSet& operator&=(const ControlSet& o);
  ControlSet& operator|=(const ControlSet& o);
};

/// Tree isomorphic to the tTLT whose set nodes carry control subsets;
/// indexed by tTLT node id (operator-node slots unused).
struct ControlTree {
  std::vector<ControlSet> sets;
};

enum class Verdict { Completed, NExis, MaxSteps };

const char* verdict_name(Verdict v);

struct RunRecord {
  int k = 0;
  Eigen::VectorXd x, u, w;
  int feasible = 0;  // |U(x_k, t_k)|
};

struct RunResult {
  Verdict verdict = Verdict::MaxSteps;
  int nexis_step = -1;
  Signal trajectory;
  std::vector<RunRecord> records;
  std::vector<int> satisfied_paths;
  std::vector<TimeCoding> codings;  // aligned with satisfied_paths
};

/// Runtime bookkeeping of the online control synthesis loop. The stepwise
/// methods expose the sub-algorithms individually (tracking, instantiation
/// update, control-tree construction, backtracking, post-set prediction) so
/// single iterations can be inspected; run_online drives the full loop.
class OnlineSynthesizer {
 public:
  static constexpr int kInf = std::numeric_limits<int>::max();

  OnlineSynthesizer(const Ttlt& tree, const SystemModel& model,
                    const Eigen::VectorXd& x0);

  int step() const { return k_; }
  int activation(int node) const { return t_a_.at(node); }  // -1 when unset
  int horizon(int node) const { return t_h_.at(node); }     // kInf for leaves
  const GridSet& current_set(int node) const { return current_.at(node); }
  const GridSet& next_set(int node) const { return next_.at(node); }
  const std::vector<int>& post_nodes() const { return post_; }
  const Signal& log() const { return log_; }
  const std::vector<char>& path_satisfied() const { return path_done_; }

  /// Valid set nodes B(x_k, t_k): the labelling L intersected with the
  /// predicted post set, ancestors pruned in favour of their descendants.
  std::vector<int> tracking_set_node(const Eigen::VectorXd& x) const;
  /// First-visit activation-time assignment for members of B.
  void assign_activations(const std::vector<int>& B);
  /// Instantiation at t_{k+1}: members of B advance along their tube while
  /// their operator window allows; every other node is frozen.
  void update_ttlt(const std::vector<int>& B);
  /// Per-node feasible control sets: leaves map to the full sampled U,
  /// other members of B to the robust one-step controls into their own next
  /// slice, non-members to the empty set.
  ControlTree build_control_tree(const Eigen::VectorXd& x,
                                 const std::vector<int>& B) const;
  /// Compress the control tree over MTFs (union within a fragment) and
  /// backtrack with ∧ -> ∩, ∨ -> ∪. Fragments of already-satisfied complete
  /// paths carry no remaining obligation and contribute the full control set.
  ControlSet backtrack_control(const ControlTree& ct) const;
  /// Predicted valid nodes at t_{k+1} for the given B.
  std::vector<int> post_set(const std::vector<int>& B) const;

  /// Minimal-norm element, ties broken lexicographically.
  Eigen::VectorXd choose_control(const ControlSet& feasible) const;

  /// Log the transition, advance the instantiation and the post-set
  /// prediction, and refresh the satisfied-path certificates.
  void advance(const std::vector<int>& B, const Eigen::VectorXd& u,
               const Eigen::VectorXd& w, const Eigen::VectorXd& x_next,
               int feasible_count);

  /// True once the satisfied-path labels backtrack to true at the root.
  bool completed() const;

  const Ttlt& tree() const { return *tree_; }

 private:
  void refresh_path_certificates();

  const Ttlt* tree_;
  const SystemModel* model_;
  std::vector<int> t_a_, t_h_;
  std::vector<GridSet> current_, next_;
  std::vector<int> post_;
  int k_ = 0;
  Signal log_;
  std::vector<CompletePath> paths_;
  CompressedTree compressed_;
  std::vector<char> path_done_;
  std::vector<TimeCoding> path_codings_;
  std::vector<RunRecord> records_;
  friend RunResult run_online(const Ttlt&, const SystemModel&,
                              const Eigen::VectorXd&, DisturbanceSource&, int);
};

/// Online control synthesis: tracking, activation, instantiation update,
/// control-tree construction, compression, backtracking, stop on empty
/// feasible set, apply control, measure, post-set. Terminates "completed"
/// once the logged trajectory satisfies the tree, NExis when the feasible
/// set empties, MaxSteps otherwise.
RunResult run_online(const Ttlt& tree, const SystemModel& model,
                     const Eigen::VectorXd& x0, DisturbanceSource& dist,
                     int max_steps);

}  // namespace ttlt
