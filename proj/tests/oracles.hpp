#pragma once

// Test-only oracles and generators. The evaluators and membership oracles
// here are written directly from the quantifier definitions, independent of
// the library's recursions, so they can serve as ground truth.

#include <random>
#include <string>
#include <vector>

#include "ttlt/formula.hpp"
#include "ttlt/grid.hpp"
#include "ttlt/reach.hpp"
#include "ttlt/system.hpp"

namespace ttlt::testing {

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  int uniform(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(eng() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  bool coin(double p = 0.5) {
    return (static_cast<double>(eng() >> 11) * 0x1.0p-53) < p;
  }
};

/// Naive recursive STL interpreter with every quantifier spelled out.
bool brute_eval(const FormulaPtr& f, const Signal& s, int k,
                const PredicateTable& preds);

/// Membership of x at step k in the maximal reachable tube over [w.a, w.b]:
/// explores the control/disturbance game tree without memoization
/// (equivalently: enumerates feedback policies restricted to reachable
/// states). The constraint applies at every visited instant including the
/// hitting one.
bool oracle_max_member(const SystemModel& m, const GridSet& target,
                       const GridSet& constraint, StepWindow w,
                       const Eigen::VectorXd& x, int k);

/// Minimal-tube membership: for every control choice some disturbance chain
/// reaches the target within the window. Leaving the working space counts as
/// escaping for good.
bool oracle_min_member(const SystemModel& m, const GridSet& target, StepWindow w,
                       const Eigen::VectorXd& x, int k);

/// Deterministic satisfiability by exhausting all control sequences of the
/// given length; satisfaction judged by brute_eval.
bool exhaustive_policy_satisfiable(const SystemModel& m, const FormulaPtr& f,
                                   const PredicateTable& preds,
                                   const Eigen::VectorXd& x0, int steps);

/// 1-D lattice: cells of width 1 over [0, cells]; centers at i + 0.5.
GridPtr lattice_1d(int cells);
/// 2-D lattice over [0, cells]^2.
GridPtr lattice_2d(int cells);

std::vector<Eigen::VectorXd> scalar_vectors(const std::vector<double>& vals);

GridSet random_set(const GridPtr& g, Rng& rng, double density);

/// Aligned 1-D box predicates mu0..mu{n-1} over integer cell ranges; exact
/// on lattice trajectories.
PredicateTable lattice_predicates(Rng& rng, int cells, int count);

/// Random raw formula (may contain Not over temporal-free subformulas) with
/// integer step windows; for the PNF/evaluation equivalence properties.
FormulaPtr random_raw_formula(Rng& rng, const std::vector<std::string>& preds,
                              int depth, int max_b);

/// Random formula in the fragment the tree construction is exact for:
/// Boolean combinations of right-linear temporal chains whose Until left
/// operands and Always operands are temporal-free.
FormulaPtr random_chain_formula(Rng& rng, const std::vector<std::string>& preds,
                                int depth, int budget);

/// Random signal over lattice cell centers.
Signal random_lattice_signal(Rng& rng, int cells, int length, int dim = 1);

}  // namespace ttlt::testing
