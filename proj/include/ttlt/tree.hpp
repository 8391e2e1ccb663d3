#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ttlt/formula.hpp"
#include "ttlt/grid.hpp"
#include "ttlt/reach.hpp"

namespace ttlt {

enum class OpKind { And, Or, Until, Always };

std::string op_name(OpKind k);

/// Node of a tube-based temporal logic tree. Tube nodes and operator nodes
/// strictly alternate along every path; the root and all leaves are tube
/// nodes, each non-leaf tube node has exactly one operator child.
struct TtltNode {
  // Which reach/set computation defines a tube node; kept so substituted
  // subtrees can be re-updated leaf-to-root.
  enum class Recipe { LeafSet, Boolean, Until, Always };

  bool is_tube = true;

  // tube payload
  Tube tube;               // constants are length-1 tubes
  bool is_leaf = false;
  Recipe recipe = Recipe::LeafSet;
  GridSet until_constraint;  // Recipe::Until: the replaced leaf's set

  // operator payload
  OpKind op = OpKind::And;
  StepWindow window{};  // Until/Always, in steps

  int parent = -1;
  std::vector<int> children;
};

class Ttlt {
 public:
  int root() const { return root_; }
  std::size_t size() const { return nodes_.size(); }
  const TtltNode& node(int id) const { return nodes_.at(id); }
  TtltNode& node_mut(int id) { return nodes_.at(id); }

  int add_node(TtltNode n);
  void set_root(int id) { root_ = id; }
  void link(int parent, int child);

  /// Operator child of a tube node, -1 for leaves.
  int op_child(int tube_id) const;
  /// Tube-node children of the operator child ("Post" of the node).
  std::vector<int> grandchildren(int tube_id) const;
  /// Grandparent tube node ("Pre"), -1 for the root.
  int pre(int tube_id) const;
  /// Horizon |CH(X_i)| of the node's operator child, in steps (0 for
  /// Boolean operators and for leaves).
  int op_horizon_steps(int tube_id) const;

  std::vector<int> tube_ids() const;
  std::vector<int> leaf_ids() const;
  /// Tube nodes reachable from `tube_id` by a fragment crossing only
  /// Boolean operator nodes (the start node itself excluded).
  std::vector<int> boolean_reachable(int tube_id) const;
  bool is_strict_tube_descendant(int ancestor, int descendant) const;

  /// Nodes in deterministic preorder (root first, children left to right).
  std::vector<int> preorder() const;

  bool alternation_ok() const;

 private:
  std::vector<TtltNode> nodes_;
  int root_ = -1;
};

/// Root-to-leaf alternating sequence X0 Θ1 X1 ... Θn Xn.
struct CompletePath {
  std::vector<int> nodes;  // tube ids, size n+1
  std::vector<int> ops;    // operator ids, size n
};

/// Per-tube-node activation steps along a complete path.
struct TimeCoding {
  std::vector<int> activation;  // same length as CompletePath::nodes
};

/// Build the tTLT of a PNF formula over the context's system and grid.
/// Eventually is desugared to (true Until) first; temporal-free subformulas
/// rasterize into a single constant leaf.
Ttlt construct(const FormulaPtr& pnf, const ReachContext& ctx,
               const PredicateTable& preds);

std::vector<CompletePath> complete_paths(const Ttlt& t);

/// Maximal temporal fragments of a complete path: the path split at Boolean
/// operator nodes. Each fragment is a run of tube ids.
std::vector<std::vector<int>> mtf_decompose(const Ttlt& t, const CompletePath& p);

/// Compressed tree: one node per MTF, Boolean operator nodes preserved.
struct CompressedTree {
  struct Node {
    bool is_op = false;
    OpKind op = OpKind::And;
    std::vector<int> mtf;   // tube ids (set nodes only)
    int parent = -1;
    std::vector<int> children;
    int path_index = -1;    // leaves: index into complete_paths(t)
  };
  std::vector<Node> nodes;
  int root = -1;
  std::vector<int> leaves;  // compressed leaf ids, ordered by path index
};

CompressedTree compress(const Ttlt& t);

/// Bottom-up Boolean backtracking: PA(Θ) <- PA(Θ) ∨ (CH1 ∧ CH2) for ∧
/// (∨ accordingly); returns the root label. leaf_labels is indexed by
/// complete-path index.
bool backtrack_bool(const CompressedTree& ct, const std::vector<char>& leaf_labels);

/// Satisfaction of one complete path by a trajectory (root activation is the
/// signal start): searches time codings subject to
///   Boolean: κ_i = κ_{i-1};  U[a,b]: κ_i ∈ κ_{i-1}+[a,b];
///   G[a,b]: κ_i = κ_{i-1}+b
/// with containment x_k ∈ X_i(t_{k-κ_i}) on [κ_i, κ_{i+1}] and final-state
/// membership X_n(t_0). Throws InsufficientSignalError when the signal cannot
/// cover the path horizon.
std::optional<TimeCoding> path_satisfies(const Ttlt& t, const CompletePath& p,
                                         const Signal& s);

/// Tolerant variant used for prefix monitoring: codings that would index
/// past the end of the signal simply fail instead of throwing.
std::optional<TimeCoding> path_satisfies_prefix(const Ttlt& t,
                                                const CompletePath& p,
                                                const Signal& s);

int path_horizon_steps(const Ttlt& t, const CompletePath& p);

/// Label every complete path on the compressed tree and backtrack. Paths the
/// signal cannot cover count as unsatisfied.
bool tree_satisfies(const Ttlt& t, const Signal& s);

}  // namespace ttlt
