#include "oracles.hpp"

#include <cmath>
#include <functional>

namespace ttlt::testing {

namespace {

// Interval-to-step mapping spelled out locally: [a,b] -> [ceil, floor],
// [a,b) -> [ceil(a), ceil(b)-1].
int lo_step(const Interval& iv, double delta) {
  return static_cast<int>(std::ceil(iv.a / delta - 1e-9));
}
int hi_step(const Interval& iv, double delta) {
  if (iv.right_closed) return static_cast<int>(std::floor(iv.b / delta + 1e-9));
  return static_cast<int>(std::ceil(iv.b / delta - 1e-9)) - 1;
}

}  // namespace

bool brute_eval(const FormulaPtr& f, const Signal& s, int k,
                const PredicateTable& preds) {
  switch (f->kind) {
    case FormulaKind::True:
      return true;
    case FormulaKind::Pred:
      return preds.at(f->pred).eval(s.at(k)) >= 0.0;
    case FormulaKind::NegPred:
      return !(preds.at(f->pred).eval(s.at(k)) >= 0.0);
    case FormulaKind::Not:
      return !brute_eval(f->lhs, s, k, preds);
    case FormulaKind::And:
      return brute_eval(f->lhs, s, k, preds) && brute_eval(f->rhs, s, k, preds);
    case FormulaKind::Or:
      return brute_eval(f->lhs, s, k, preds) || brute_eval(f->rhs, s, k, preds);
    case FormulaKind::Until: {
      for (int kp = k + lo_step(f->window, s.delta);
           kp <= k + hi_step(f->window, s.delta); ++kp) {
        if (!brute_eval(f->rhs, s, kp, preds)) continue;
        bool prefix = true;
        for (int kpp = k; kpp <= kp && prefix; ++kpp)
          prefix = brute_eval(f->lhs, s, kpp, preds);
        if (prefix) return true;
      }
      return false;
    }
    case FormulaKind::Eventually: {
      for (int kp = k + lo_step(f->window, s.delta);
           kp <= k + hi_step(f->window, s.delta); ++kp)
        if (brute_eval(f->lhs, s, kp, preds)) return true;
      return false;
    }
    case FormulaKind::Always: {
      for (int kp = k + lo_step(f->window, s.delta);
           kp <= k + hi_step(f->window, s.delta); ++kp)
        if (!brute_eval(f->lhs, s, kp, preds)) return false;
      return true;
    }
  }
  return false;
}

bool oracle_max_member(const SystemModel& m, const GridSet& target,
                       const GridSet& constraint, StepWindow w,
                       const Eigen::VectorXd& x, int k) {
  if (k > w.b) return false;
  if (!constraint.contains(x)) return false;
  if (k >= w.a && target.contains(x)) return true;
  if (k == w.b) return false;
  for (const auto& u : m.controls) {
    bool all = true;
    for (const auto& wd : m.disturbances) {
      if (!oracle_max_member(m, target, constraint, w, m.step(x, u, wd), k + 1)) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

bool oracle_min_member(const SystemModel& m, const GridSet& target, StepWindow w,
                       const Eigen::VectorXd& x, int k) {
  if (k > w.b) return false;
  if (k >= w.a && target.contains(x)) return true;
  if (k == w.b) return false;
  if (!target.grid()->in_bounds(x)) return false;
  for (const auto& u : m.controls) {
    bool some = false;
    for (const auto& wd : m.disturbances) {
      if (oracle_min_member(m, target, w, m.step(x, u, wd), k + 1)) {
        some = true;
        break;
      }
    }
    if (!some) return false;
  }
  return true;
}

bool exhaustive_policy_satisfiable(const SystemModel& m, const FormulaPtr& f,
                                   const PredicateTable& preds,
                                   const Eigen::VectorXd& x0, int steps) {
  const Eigen::VectorXd w0 = Eigen::VectorXd::Zero(m.state_dim);
  Signal s;
  s.delta = m.delta;
  s.samples = {x0};
  std::function<bool()> rec = [&]() -> bool {
    if (static_cast<int>(s.samples.size()) == steps + 1)
      return brute_eval(f, s, 0, preds);
    for (const auto& u : m.controls) {
      s.samples.push_back(m.step(s.samples.back(), u, w0));
      if (rec()) return true;
      s.samples.pop_back();
    }
    return false;
  };
  return rec();
}

GridPtr lattice_1d(int cells) {
  return make_grid(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, cells),
                   {cells});
}

GridPtr lattice_2d(int cells) {
  return make_grid(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Constant(2, cells),
                   {cells, cells});
}

std::vector<Eigen::VectorXd> scalar_vectors(const std::vector<double>& vals) {
  std::vector<Eigen::VectorXd> out;
  for (double v : vals) out.push_back(Eigen::VectorXd::Constant(1, v));
  return out;
}

GridSet random_set(const GridPtr& g, Rng& rng, double density) {
  GridSet s(g);
  for (std::size_t i = 0; i < g->cell_count(); ++i)
    if (rng.coin(density)) s.set(i);
  return s;
}

PredicateTable lattice_predicates(Rng& rng, int cells, int count) {
  PredicateTable t;
  for (int i = 0; i < count; ++i) {
    const int lo = rng.uniform(0, cells - 1);
    const int hi = rng.uniform(lo + 1, cells);
    t.emplace("mu" + std::to_string(i),
              PredicateDef::box(Eigen::VectorXd::Constant(1, lo),
                                Eigen::VectorXd::Constant(1, hi)));
  }
  return t;
}

namespace {

FormulaPtr random_literal(Rng& rng, const std::vector<std::string>& preds) {
  const std::string& id = preds[rng.uniform(0, static_cast<int>(preds.size()) - 1)];
  return rng.coin(0.3) ? f_neg_pred(id) : f_pred(id);
}

Interval random_window(Rng& rng, int max_b) {
  const int a = rng.uniform(0, std::max(0, max_b - 1));
  const int b = rng.uniform(a, std::max(a, max_b));
  return Interval(a, b);
}

FormulaPtr random_boolean(Rng& rng, const std::vector<std::string>& preds, int depth) {
  if (depth <= 0 || rng.coin(0.5)) return random_literal(rng, preds);
  const FormulaPtr l = random_boolean(rng, preds, depth - 1);
  const FormulaPtr r = random_boolean(rng, preds, depth - 1);
  return rng.coin() ? f_and(l, r) : f_or(l, r);
}

}  // namespace

FormulaPtr random_raw_formula(Rng& rng, const std::vector<std::string>& preds,
                              int depth, int max_b) {
  if (depth <= 0) return random_literal(rng, preds);
  switch (rng.uniform(0, 6)) {
    case 0:
      return f_and(random_raw_formula(rng, preds, depth - 1, max_b),
                   random_raw_formula(rng, preds, depth - 1, max_b));
    case 1:
      return f_or(random_raw_formula(rng, preds, depth - 1, max_b),
                  random_raw_formula(rng, preds, depth - 1, max_b));
    case 2:
      // Negation over a temporal-free operand keeps the formula within the
      // PNF-expressible grammar.
      return f_not(random_boolean(rng, preds, depth - 1));
    case 3:
      return f_until(random_raw_formula(rng, preds, depth - 1, max_b),
                     random_raw_formula(rng, preds, depth - 1, max_b),
                     random_window(rng, max_b));
    case 4:
      return f_always(random_raw_formula(rng, preds, depth - 1, max_b),
                      random_window(rng, max_b));
    case 5:
      return f_eventually(random_raw_formula(rng, preds, depth - 1, max_b),
                          random_window(rng, max_b));
    default:
      return random_literal(rng, preds);
  }
}

FormulaPtr random_chain_formula(Rng& rng, const std::vector<std::string>& preds,
                                int depth, int budget) {
  // Temporal chain: B | B U_I chain | G_I B | F_I chain.
  std::function<FormulaPtr(int, int)> chain = [&](int d, int b) -> FormulaPtr {
    if (d <= 0 || b <= 0) return random_boolean(rng, preds, 1);
    switch (rng.uniform(0, 3)) {
      case 0: {
        const Interval w = random_window(rng, std::min(2, b));
        const int rest = b - static_cast<int>(w.b);
        return f_until(random_boolean(rng, preds, 1), chain(d - 1, rest), w);
      }
      case 1: {
        const Interval w = random_window(rng, std::min(2, b));
        return f_always(random_boolean(rng, preds, 1), w);
      }
      case 2: {
        const Interval w = random_window(rng, std::min(2, b));
        const int rest = b - static_cast<int>(w.b);
        return f_eventually(chain(d - 1, rest), w);
      }
      default:
        return random_boolean(rng, preds, 1);
    }
  };
  FormulaPtr out = chain(depth, budget);
  if (rng.coin(0.4)) {
    const FormulaPtr other = chain(depth - 1, budget);
    out = rng.coin() ? f_and(out, other) : f_or(out, other);
  }
  return out;
}

Signal random_lattice_signal(Rng& rng, int cells, int length, int dim) {
  Signal s;
  s.delta = 1.0;
  s.start = 0;
  for (int i = 0; i < length; ++i) {
    Eigen::VectorXd x(dim);
    for (int d = 0; d < dim; ++d) x[d] = rng.uniform(0, cells - 1) + 0.5;
    s.samples.push_back(std::move(x));
  }
  return s;
}

}  // namespace ttlt::testing
