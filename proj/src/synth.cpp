#include "ttlt/synth.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace ttlt {

std::size_t ControlSet::count() const {
  std::size_t c = 0;
  for (char m : mask) c += m ? 1 : 0;
  return c;
}

bool ControlSet::empty() const {
  for (char m : mask)
    if (m) return false;
  return true;
}

ControlSet& ControlSet::operator&=(const ControlSet& o) {
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = mask[i] && o.mask[i];
  return *this;
}

ControlSet& ControlSet::operator|=(const ControlSet& o) {
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = mask[i] || o.mask[i];
  return *this;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Completed:
      return "completed";
    case Verdict::NExis:
      return "nexis";
    case Verdict::MaxSteps:
      return "max_steps";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Initialization (Alg. 6)
// ---------------------------------------------------------------------------

OnlineSynthesizer::OnlineSynthesizer(const Ttlt& tree, const SystemModel& model,
                                     const Eigen::VectorXd& x0)
    : tree_(&tree), model_(&model) {
  const int n = static_cast<int>(tree.size());
  t_a_.assign(n, -1);
  t_h_.assign(n, kInf);
  current_.assign(n, GridSet());
  next_.assign(n, GridSet());

  const int root = tree.root();
  t_a_[root] = 0;
  t_h_[root] = tree.op_horizon_steps(root);

  // Non-root, non-leaf nodes top-down: t_h accumulates along the tube chain;
  // leaves keep t_h = inf.
  for (int id : tree.preorder()) {
    const TtltNode& nd = tree.node(id);
    if (!nd.is_tube || id == root) continue;
    if (nd.is_leaf) continue;
    const int pre = tree.pre(id);
    t_h_[id] = t_h_.at(pre) + tree.op_horizon_steps(id);
  }

  for (int id : tree.tube_ids()) current_[id] = tree.node(id).tube.at(0);
  next_ = current_;

  // Post(B(x_{-1}, t_{-1})): the root plus everything reachable from it by a
  // Boolean fragment, all activated at t_0.
  post_ = {root};
  for (int id : tree.boolean_reachable(root)) {
    post_.push_back(id);
    t_a_[id] = 0;
  }
  std::sort(post_.begin(), post_.end());

  log_.delta = model.delta;
  log_.start = 0;
  log_.samples.push_back(x0);

  paths_ = complete_paths(tree);
  compressed_ = compress(tree);
  path_done_.assign(paths_.size(), 0);
  path_codings_.resize(paths_.size());
  refresh_path_certificates();
}

// ---------------------------------------------------------------------------
// Tracking (Alg. 7)
// ---------------------------------------------------------------------------

std::vector<int> OnlineSynthesizer::tracking_set_node(const Eigen::VectorXd& x) const {
  std::vector<int> label;
  for (int id : tree_->tube_ids())
    if (k_ <= t_h_[id] && current_[id].contains(x)) label.push_back(id);

  std::vector<int> b;
  std::set_intersection(label.begin(), label.end(), post_.begin(), post_.end(),
                        std::back_inserter(b));

  // Keep at most one set node per complete path: drop any member that has a
  // tube descendant in B.
  std::vector<int> pruned;
  for (int i : b) {
    bool has_descendant = false;
    for (int j : b)
      if (tree_->is_strict_tube_descendant(i, j)) {
        has_descendant = true;
        break;
      }
    if (!has_descendant) pruned.push_back(i);
  }
  return pruned;
}

void OnlineSynthesizer::assign_activations(const std::vector<int>& B) {
  for (int id : B)
    if (t_a_[id] < 0) t_a_[id] = k_;
}

// ---------------------------------------------------------------------------
// Instantiation update (Alg. 8)
// ---------------------------------------------------------------------------

void OnlineSynthesizer::update_ttlt(const std::vector<int>& B) {
  next_ = current_;
  for (int id : B) {
    if (t_a_[id] < 0)
      throw std::logic_error("update_ttlt: member of B without activation time");
    if (t_a_[id] + tree_->op_horizon_steps(id) >= k_ + 1)
      next_[id] = tree_->node(id).tube.at(k_ + 1 - t_a_[id]);
  }
}

// ---------------------------------------------------------------------------
// Control tree (Alg. 9) and backtracking (Alg. 3 + Alg. 10)
// ---------------------------------------------------------------------------

ControlTree OnlineSynthesizer::build_control_tree(const Eigen::VectorXd& x,
                                                  const std::vector<int>& B) const {
  const std::size_t nu = model_->controls.size();
  ControlTree ct;
  ct.sets.assign(tree_->size(), ControlSet::none(nu));
  for (int id : B) {
    if (tree_->node(id).is_leaf) {
      ct.sets[id] = ControlSet::all(nu);
      continue;
    }
    ControlSet s = ControlSet::none(nu);
    for (std::size_t ui = 0; ui < nu; ++ui) {
      bool ok = true;
      for (const auto& w : model_->disturbances) {
        if (!next_[id].contains(model_->step(x, model_->controls[ui], w))) {
          ok = false;
          break;
        }
      }
      s.mask[ui] = ok ? 1 : 0;
    }
    ct.sets[id] = std::move(s);
  }
  return ct;
}

ControlSet OnlineSynthesizer::backtrack_control(const ControlTree& ct) const {
  const std::size_t nu = model_->controls.size();
  std::function<ControlSet(int)> value = [&](int id) -> ControlSet {
    const auto& n = compressed_.nodes.at(id);
    if (n.is_op) {
      ControlSet acc = n.op == OpKind::And ? ControlSet::all(nu) : ControlSet::none(nu);
      for (int ch : n.children) {
        if (n.op == OpKind::And)
          acc &= value(ch);
        else
          acc |= value(ch);
      }
      return acc;
    }
    // A fragment whose complete path is already satisfied imposes no further
    // obligation.
    if (n.path_index >= 0 && path_done_[n.path_index]) return ControlSet::all(nu);
    ControlSet own = ControlSet::none(nu);
    for (int tube : n.mtf) own |= ct.sets.at(tube);
    for (int ch : n.children) own |= value(ch);
    return own;
  };
  return value(compressed_.root);
}

// ---------------------------------------------------------------------------
// Post set (Alg. 11)
// ---------------------------------------------------------------------------

std::vector<int> OnlineSynthesizer::post_set(const std::vector<int>& B) const {
  std::set<int> out;
  // tau: the node's activation time if assigned, otherwise its earliest
  // legal activation given the exposure chain.
  std::function<void(int, int)> expose = [&](int id, int tau) {
    if (!out.insert(id).second) return;
    const int oc = tree_->op_child(id);
    if (oc < 0) return;
    const TtltNode& op = tree_->node(oc);
    if (op.op == OpKind::And || op.op == OpKind::Or) {
      for (int g : op.children) expose(g, t_a_[g] >= 0 ? t_a_[g] : tau);
      return;
    }
    const int gate = op.op == OpKind::Until ? op.window.a : op.window.b;
    if (k_ + 1 >= tau + gate) {
      const int child_tau = tau + (op.op == OpKind::Until ? op.window.a : op.window.b);
      for (int g : op.children) expose(g, t_a_[g] >= 0 ? t_a_[g] : child_tau);
    }
  };
  for (int id : B) expose(id, t_a_[id]);
  return {out.begin(), out.end()};
}

// ---------------------------------------------------------------------------
// Control choice, logging, termination
// ---------------------------------------------------------------------------

Eigen::VectorXd OnlineSynthesizer::choose_control(const ControlSet& feasible) const {
  int best = -1;
  for (std::size_t i = 0; i < feasible.mask.size(); ++i) {
    if (!feasible.mask[i]) continue;
    if (best < 0) {
      best = static_cast<int>(i);
      continue;
    }
    const auto& u = model_->controls[i];
    const auto& v = model_->controls[best];
    const double du = u.squaredNorm(), dv = v.squaredNorm();
    if (du < dv) {
      best = static_cast<int>(i);
    } else if (du == dv) {
      for (Eigen::Index d = 0; d < u.size(); ++d) {
        if (u[d] == v[d]) continue;
        if (u[d] < v[d]) best = static_cast<int>(i);
        break;
      }
    }
  }
  if (best < 0) throw std::invalid_argument("choose_control: empty feasible set");
  return model_->controls[best];
}

void OnlineSynthesizer::advance(const std::vector<int>& B, const Eigen::VectorXd& u,
                                const Eigen::VectorXd& w,
                                const Eigen::VectorXd& x_next, int feasible_count) {
  RunRecord rec;
  rec.k = k_;
  rec.x = log_.samples.back();
  rec.u = u;
  rec.w = w;
  rec.feasible = feasible_count;
  records_.push_back(std::move(rec));

  post_ = post_set(B);
  current_ = next_;
  log_.samples.push_back(x_next);
  ++k_;
  refresh_path_certificates();
}

void OnlineSynthesizer::refresh_path_certificates() {
  for (std::size_t i = 0; i < paths_.size(); ++i) {
    if (path_done_[i]) continue;
    if (auto coding = path_satisfies_prefix(*tree_, paths_[i], log_)) {
      path_done_[i] = 1;
      path_codings_[i] = *coding;
    }
  }
}

bool OnlineSynthesizer::completed() const {
  return backtrack_bool(compressed_, path_done_);
}

RunResult run_online(const Ttlt& tree, const SystemModel& model,
                     const Eigen::VectorXd& x0, DisturbanceSource& dist,
                     int max_steps) {
  OnlineSynthesizer synth(tree, model, x0);
  RunResult result;

  auto finish = [&](Verdict v, int nexis_step) {
    result.verdict = v;
    result.nexis_step = nexis_step;
    result.trajectory = synth.log();
    result.records = synth.records_;
    for (std::size_t i = 0; i < synth.path_done_.size(); ++i)
      if (synth.path_done_[i]) {
        result.satisfied_paths.push_back(static_cast<int>(i));
        result.codings.push_back(synth.path_codings_[i]);
      }
    return result;
  };

  if (synth.completed()) return finish(Verdict::Completed, -1);

  for (int k = 0; k < max_steps; ++k) {
    const Eigen::VectorXd x = synth.log().samples.back();
    const std::vector<int> B = synth.tracking_set_node(x);
    synth.assign_activations(B);
    synth.update_ttlt(B);
    const ControlTree ctree = synth.build_control_tree(x, B);
    const ControlSet feasible = synth.backtrack_control(ctree);
    if (feasible.empty()) return finish(Verdict::NExis, k);
    const Eigen::VectorXd u = synth.choose_control(feasible);
    const Eigen::VectorXd w = dist.next();
    const Eigen::VectorXd x_next = model.step(x, u, w);
    synth.advance(B, u, w, x_next, static_cast<int>(feasible.count()));
    if (synth.completed()) return finish(Verdict::Completed, -1);
  }
  return finish(Verdict::MaxSteps, -1);
}

}  // namespace ttlt
