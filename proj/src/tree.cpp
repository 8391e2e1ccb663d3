#include "ttlt/tree.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

namespace ttlt {

std::string op_name(OpKind k) {
  switch (k) {
    case OpKind::And:
      return "and";
    case OpKind::Or:
      return "or";
    case OpKind::Until:
      return "until";
    case OpKind::Always:
      return "always";
  }
  return "?";
}

int Ttlt::add_node(TtltNode n) {
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

void Ttlt::link(int parent, int child) {
  nodes_.at(parent).children.push_back(child);
  nodes_.at(child).parent = parent;
}

int Ttlt::op_child(int tube_id) const {
  const TtltNode& n = nodes_.at(tube_id);
  if (!n.is_tube) throw std::invalid_argument("op_child: not a tube node");
  return n.children.empty() ? -1 : n.children.front();
}

std::vector<int> Ttlt::grandchildren(int tube_id) const {
  const int oc = op_child(tube_id);
  return oc < 0 ? std::vector<int>{} : nodes_.at(oc).children;
}

int Ttlt::pre(int tube_id) const {
  const int p = nodes_.at(tube_id).parent;
  return p < 0 ? -1 : nodes_.at(p).parent;
}

int Ttlt::op_horizon_steps(int tube_id) const {
  const int oc = op_child(tube_id);
  if (oc < 0) return 0;
  const TtltNode& op = nodes_.at(oc);
  return (op.op == OpKind::Until || op.op == OpKind::Always) ? op.window.b : 0;
}

std::vector<int> Ttlt::tube_ids() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i)
    if (nodes_[i].is_tube) out.push_back(i);
  return out;
}

std::vector<int> Ttlt::leaf_ids() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i)
    if (nodes_[i].is_tube && nodes_[i].is_leaf) out.push_back(i);
  return out;
}

std::vector<int> Ttlt::boolean_reachable(int tube_id) const {
  std::vector<int> out;
  std::function<void(int)> walk = [&](int id) {
    const int oc = op_child(id);
    if (oc < 0) return;
    const TtltNode& op = nodes_.at(oc);
    if (op.op != OpKind::And && op.op != OpKind::Or) return;
    for (int ch : op.children) {
      out.push_back(ch);
      walk(ch);
    }
  };
  walk(tube_id);
  return out;
}

bool Ttlt::is_strict_tube_descendant(int ancestor, int descendant) const {
  if (ancestor == descendant) return false;
  int cur = descendant;
  while (cur >= 0) {
    cur = nodes_.at(cur).parent;
    if (cur == ancestor) return true;
  }
  return false;
}

std::vector<int> Ttlt::preorder() const {
  std::vector<int> out;
  std::function<void(int)> walk = [&](int id) {
    out.push_back(id);
    for (int ch : nodes_.at(id).children) walk(ch);
  };
  if (root_ >= 0) walk(root_);
  return out;
}

bool Ttlt::alternation_ok() const {
  if (root_ < 0 || !nodes_.at(root_).is_tube) return false;
  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
    const TtltNode& n = nodes_[i];
    if (n.is_tube) {
      if (n.children.size() > 1) return false;
      if (n.is_leaf != n.children.empty()) return false;
      for (int ch : n.children)
        if (nodes_.at(ch).is_tube) return false;
    } else {
      if (n.children.empty()) return false;
      for (int ch : n.children)
        if (!nodes_.at(ch).is_tube) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Construction (Theorem 2 cases, bottom-up over the syntax tree)
// ---------------------------------------------------------------------------

namespace {

FormulaPtr desugar_eventually(const FormulaPtr& f) {
  switch (f->kind) {
    case FormulaKind::True:
    case FormulaKind::Pred:
    case FormulaKind::NegPred:
      return f;
    case FormulaKind::Not:
      return f_not(desugar_eventually(f->lhs));
    case FormulaKind::And:
      return f_and(desugar_eventually(f->lhs), desugar_eventually(f->rhs));
    case FormulaKind::Or:
      return f_or(desugar_eventually(f->lhs), desugar_eventually(f->rhs));
    case FormulaKind::Until:
      return f_until(desugar_eventually(f->lhs), desugar_eventually(f->rhs),
                     f->window);
    case FormulaKind::Always:
      return f_always(desugar_eventually(f->lhs), f->window);
    case FormulaKind::Eventually:
      return f_until(f_true(), desugar_eventually(f->lhs), f->window);
  }
  throw std::logic_error("desugar: unknown kind");
}

class Builder {
 public:
  Builder(Ttlt& t, const ReachContext& ctx, const PredicateTable& preds)
      : t_(t), ctx_(ctx), preds_(preds) {}

  int build(const FormulaPtr& f) {
    if (is_temporal_free(f)) {
      TtltNode n;
      n.is_tube = true;
      n.is_leaf = true;
      n.recipe = TtltNode::Recipe::LeafSet;
      n.tube = Tube::constant(rasterize(f));
      return t_.add_node(std::move(n));
    }
    switch (f->kind) {
      case FormulaKind::And:
      case FormulaKind::Or: {
        const OpKind op = f->kind == FormulaKind::And ? OpKind::And : OpKind::Or;
        const int l = build(f->lhs);
        const int r = build(f->rhs);
        TtltNode root;
        root.is_tube = true;
        root.recipe = TtltNode::Recipe::Boolean;
        root.tube = boolean_zip(op, t_.node(l).tube, t_.node(r).tube);
        const int root_id = t_.add_node(std::move(root));
        TtltNode opn;
        opn.is_tube = false;
        opn.op = op;
        const int op_id = t_.add_node(std::move(opn));
        t_.link(root_id, op_id);
        t_.link(op_id, l);
        t_.link(op_id, r);
        return root_id;
      }
      case FormulaKind::Until: {
        const StepWindow w = to_steps(f->window, ctx_.model().delta);
        const int lt = build(f->lhs);
        const int rt = build(f->rhs);
        const GridSet target = t_.node(rt).tube.at(0);
        const std::vector<int> leaves = subtree_leaves(lt);
        bool reused_rt = false;
        for (int leaf : leaves) {
          TtltNode& L = t_.node_mut(leaf);
          const GridSet constraint = L.tube.at(0);
          L.tube = max_reach_tube(ctx_, TargetSpec(target), TargetSpec(constraint), w);
          L.recipe = TtltNode::Recipe::Until;
          L.until_constraint = constraint;
          L.is_leaf = false;
          TtltNode opn;
          opn.is_tube = false;
          opn.op = OpKind::Until;
          opn.window = w;
          const int op_id = t_.add_node(std::move(opn));
          const int sub = reused_rt ? copy_subtree(rt) : rt;
          reused_rt = true;
          t_.link(leaf, op_id);
          t_.link(op_id, sub);
        }
        refresh_ancestors(leaves);
        return lt;
      }
      case FormulaKind::Always: {
        const StepWindow w = to_steps(f->window, ctx_.model().delta);
        const int child = build(f->lhs);
        TtltNode root;
        root.is_tube = true;
        root.recipe = TtltNode::Recipe::Always;
        root.tube = always_tube(t_.node(child).tube.at(0), w);
        const int root_id = t_.add_node(std::move(root));
        TtltNode opn;
        opn.is_tube = false;
        opn.op = OpKind::Always;
        opn.window = w;
        const int op_id = t_.add_node(std::move(opn));
        t_.link(root_id, op_id);
        t_.link(op_id, child);
        return root_id;
      }
      default:
        throw std::invalid_argument("construct: formula must be PNF (no raw Not) "
                                    "with Eventually desugared");
    }
  }

 private:
  GridSet rasterize(const FormulaPtr& f) {
    switch (f->kind) {
      case FormulaKind::True:
        return GridSet::full(ctx_.grid());
      case FormulaKind::Pred:
        return predicate_set(f->pred);
      case FormulaKind::NegPred:
        return predicate_set(f->pred).complement();
      case FormulaKind::And:
        return rasterize(f->lhs) & rasterize(f->rhs);
      case FormulaKind::Or:
        return rasterize(f->lhs) | rasterize(f->rhs);
      default:
        throw std::invalid_argument("construct: cannot rasterize formula");
    }
  }

  GridSet predicate_set(const std::string& id) {
    if (auto it = pred_sets_.find(id); it != pred_sets_.end()) return it->second;
    auto pit = preds_.find(id);
    if (pit == preds_.end())
      throw std::invalid_argument("construct: predicate '" + id + "' not in table");
    GridSet s = from_predicate(pit->second, ctx_.grid());
    pred_sets_.emplace(id, s);
    return s;
  }

  Tube boolean_zip(OpKind op, const Tube& a, const Tube& b) {
    const int K = std::min(a.K(), b.K());
    Tube out;
    out.slices.reserve(static_cast<std::size_t>(K) + 1);
    for (int k = 0; k <= K; ++k)
      out.slices.push_back(op == OpKind::And ? (a.at(k) & b.at(k))
                                             : (a.at(k) | b.at(k)));
    return out;
  }

  Tube always_tube(const GridSet& child_root, StepWindow w) {
    Tube m = min_reach_tube(ctx_, TargetSpec(child_root.complement()), w);
    for (auto& s : m.slices) s = s.complement();
    return m;
  }

  std::vector<int> subtree_leaves(int root_id) {
    std::vector<int> out;
    std::function<void(int)> walk = [&](int id) {
      const TtltNode& n = t_.node(id);
      if (n.is_tube && n.is_leaf) {
        out.push_back(id);
        return;
      }
      for (int ch : n.children) walk(ch);
    };
    walk(root_id);
    return out;
  }

  int copy_subtree(int id) {
    TtltNode dup = t_.node(id);  // value copy: add_node may reallocate the arena
    const std::vector<int> children = dup.children;
    dup.parent = -1;
    dup.children.clear();
    const int nid = t_.add_node(std::move(dup));
    for (int ch : children) {
      const int cid = copy_subtree(ch);
      t_.link(nid, cid);
    }
    return nid;
  }

  // Re-update every strict tube ancestor of the substituted leaves, deepest
  // first, by re-running each node's defining computation with its refreshed
  // grandchildren.
  void refresh_ancestors(const std::vector<int>& leaves) {
    std::map<int, int> depth;  // ancestor id -> depth
    for (int leaf : leaves) {
      int cur = t_.node(leaf).parent;
      while (cur >= 0) {
        if (t_.node(cur).is_tube) {
          int d = 0;
          for (int p = cur; p >= 0; p = t_.node(p).parent) ++d;
          depth[cur] = d;
        }
        cur = t_.node(cur).parent;
      }
    }
    std::vector<std::pair<int, int>> order(depth.begin(), depth.end());
    std::sort(order.begin(), order.end(),
              [](const auto& a, const auto& b) { return a.second > b.second; });
    for (const auto& [id, d] : order) refresh(id);
  }

  void refresh(int id) {
    TtltNode& n = t_.node_mut(id);
    const int oc = t_.op_child(id);
    if (oc < 0) return;
    const TtltNode& op = t_.node(oc);
    switch (n.recipe) {
      case TtltNode::Recipe::LeafSet:
        return;
      case TtltNode::Recipe::Boolean: {
        const auto& ch = op.children;
        n.tube = boolean_zip(op.op, t_.node(ch[0]).tube, t_.node(ch[1]).tube);
        return;
      }
      case TtltNode::Recipe::Until: {
        const GridSet target = t_.node(op.children.front()).tube.at(0);
        n.tube = max_reach_tube(ctx_, TargetSpec(target),
                                TargetSpec(n.until_constraint), op.window);
        return;
      }
      case TtltNode::Recipe::Always: {
        const GridSet child_root = t_.node(op.children.front()).tube.at(0);
        n.tube = always_tube(child_root, op.window);
        return;
      }
    }
  }

  Ttlt& t_;
  const ReachContext& ctx_;
  const PredicateTable& preds_;
  std::map<std::string, GridSet> pred_sets_;
};

}  // namespace

Ttlt construct(const FormulaPtr& pnf, const ReachContext& ctx,
               const PredicateTable& preds) {
  if (!is_pnf(pnf))
    throw std::invalid_argument("construct: formula must be in positive normal form");
  const FormulaPtr f = desugar_eventually(pnf);
  Ttlt t;
  Builder b(t, ctx, preds);
  t.set_root(b.build(f));
  return t;
}

// ---------------------------------------------------------------------------
// Paths, MTFs, compression, backtracking
// ---------------------------------------------------------------------------

std::vector<CompletePath> complete_paths(const Ttlt& t) {
  std::vector<CompletePath> out;
  CompletePath cur;
  std::function<void(int)> walk = [&](int tube_id) {
    cur.nodes.push_back(tube_id);
    const int oc = t.op_child(tube_id);
    if (oc < 0) {
      out.push_back(cur);
    } else {
      cur.ops.push_back(oc);
      for (int ch : t.node(oc).children) walk(ch);
      cur.ops.pop_back();
    }
    cur.nodes.pop_back();
  };
  walk(t.root());
  return out;
}

std::vector<std::vector<int>> mtf_decompose(const Ttlt& t, const CompletePath& p) {
  std::vector<std::vector<int>> out;
  std::vector<int> frag;
  for (std::size_t i = 0; i < p.nodes.size(); ++i) {
    frag.push_back(p.nodes[i]);
    const bool last = i + 1 == p.nodes.size();
    const bool boolean_next =
        !last && (t.node(p.ops[i]).op == OpKind::And || t.node(p.ops[i]).op == OpKind::Or);
    if (last || boolean_next) {
      out.push_back(frag);
      frag.clear();
    }
  }
  return out;
}

CompressedTree compress(const Ttlt& t) {
  CompressedTree ct;
  // Map every tree leaf to its complete-path index.
  std::map<int, int> leaf_to_path;
  const auto paths = complete_paths(t);
  for (std::size_t i = 0; i < paths.size(); ++i)
    leaf_to_path[paths[i].nodes.back()] = static_cast<int>(i);

  std::function<int(int)> build = [&](int tube_id) -> int {
    CompressedTree::Node n;
    int cur = tube_id;
    while (true) {
      n.mtf.push_back(cur);
      const int oc = t.op_child(cur);
      if (oc < 0) {
        n.path_index = leaf_to_path.at(cur);
        ct.nodes.push_back(std::move(n));
        const int id = static_cast<int>(ct.nodes.size()) - 1;
        ct.leaves.push_back(id);
        return id;
      }
      const TtltNode& op = t.node(oc);
      if (op.op == OpKind::Until || op.op == OpKind::Always) {
        cur = op.children.front();
        continue;
      }
      // Boolean operator: close this set node and recurse.
      ct.nodes.push_back(std::move(n));
      const int id = static_cast<int>(ct.nodes.size()) - 1;
      CompressedTree::Node opn;
      opn.is_op = true;
      opn.op = op.op;
      ct.nodes.push_back(std::move(opn));
      const int op_id = static_cast<int>(ct.nodes.size()) - 1;
      ct.nodes[id].children.push_back(op_id);
      ct.nodes[op_id].parent = id;
      for (int ch : op.children) {
        const int cid = build(ch);
        ct.nodes[op_id].children.push_back(cid);
        ct.nodes[cid].parent = op_id;
      }
      return id;
    }
  };
  ct.root = build(t.root());
  std::sort(ct.leaves.begin(), ct.leaves.end(), [&](int a, int b) {
    return ct.nodes[a].path_index < ct.nodes[b].path_index;
  });
  return ct;
}

bool backtrack_bool(const CompressedTree& ct, const std::vector<char>& leaf_labels) {
  std::function<bool(int)> value = [&](int id) -> bool {
    const auto& n = ct.nodes.at(id);
    if (n.is_op) {
      bool acc = n.op == OpKind::And;
      for (int ch : n.children)
        acc = n.op == OpKind::And ? (acc && value(ch)) : (acc || value(ch));
      return acc;
    }
    bool own = false;
    if (n.path_index >= 0) own = leaf_labels.at(n.path_index) != 0;
    for (int ch : n.children) own = own || value(ch);
    return own;
  };
  return value(ct.root);
}

// ---------------------------------------------------------------------------
// Path and tree satisfaction
// ---------------------------------------------------------------------------

int path_horizon_steps(const Ttlt& t, const CompletePath& p) {
  int h = 0;
  for (int op : p.ops) {
    const TtltNode& o = t.node(op);
    if (o.op == OpKind::Until || o.op == OpKind::Always) h += o.window.b;
  }
  return h;
}

namespace {

std::optional<TimeCoding> path_search(const Ttlt& t, const CompletePath& p,
                                      const Signal& s) {
  const int n = static_cast<int>(p.nodes.size());
  TimeCoding coding;
  coding.activation.assign(n, -1);
  coding.activation[0] = s.start;

  // Membership of the trajectory in node i's tube on [from, to].
  auto segment_ok = [&](int i, int from, int to) {
    const Tube& tube = t.node(p.nodes[i]).tube;
    for (int k = from; k <= to; ++k) {
      if (!s.has(k)) return false;
      const int idx = k - from;
      if (idx > tube.K()) return false;
      if (!tube.at(idx).contains(s.at(k))) return false;
    }
    return true;
  };

  std::set<std::pair<int, int>> failed;  // (i, activation) with no extension

  // coding.activation[i] is fixed; segments up to node i-1 are verified.
  std::function<bool(int)> extend = [&](int i) -> bool {
    const int kappa = coding.activation[i];
    if (i == n - 1)
      return s.has(kappa) && t.node(p.nodes[i]).tube.at(0).contains(s.at(kappa));
    if (failed.count({i, kappa})) return false;

    const TtltNode& op = t.node(p.ops[i]);
    int lo, hi;
    if (op.op == OpKind::And || op.op == OpKind::Or) {
      lo = hi = kappa;
    } else if (op.op == OpKind::Always) {
      lo = hi = kappa + op.window.b;
    } else {
      lo = kappa + op.window.a;
      hi = kappa + op.window.b;
    }
    for (int next = lo; next <= hi; ++next) {
      if (!segment_ok(i, kappa, next)) {
        // Containment is prefix-monotone along the window: once it breaks at
        // `next`, later activation candidates fail as well.
        break;
      }
      coding.activation[i + 1] = next;
      if (extend(i + 1)) return true;
    }
    coding.activation[i + 1] = -1;
    failed.insert({i, kappa});
    return false;
  };

  if (extend(0)) return coding;
  return std::nullopt;
}

}  // namespace

std::optional<TimeCoding> path_satisfies(const Ttlt& t, const CompletePath& p,
                                         const Signal& s) {
  if (s.samples.empty())
    throw InsufficientSignalError("path_satisfies: empty signal");
  if (s.end() < s.start + path_horizon_steps(t, p))
    throw InsufficientSignalError("path_satisfies: signal shorter than the path horizon");
  return path_search(t, p, s);
}

std::optional<TimeCoding> path_satisfies_prefix(const Ttlt& t, const CompletePath& p,
                                                const Signal& s) {
  if (s.samples.empty()) return std::nullopt;
  return path_search(t, p, s);
}

bool tree_satisfies(const Ttlt& t, const Signal& s) {
  const auto paths = complete_paths(t);
  std::vector<char> labels(paths.size(), 0);
  for (std::size_t i = 0; i < paths.size(); ++i)
    labels[i] = path_satisfies_prefix(t, paths[i], s) ? 1 : 0;
  return backtrack_bool(compress(t), labels);
}

}  // namespace ttlt
