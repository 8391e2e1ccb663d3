#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ttlt/predicates.hpp"

namespace ttlt {

/// Time interval attached to a temporal operator, in seconds.
/// Closed [a,b] or half-open [a,b); b may be +inf (rejected wherever a
/// bounded horizon is required).
struct Interval {
  double a = 0.0;
  double b = 0.0;
  bool right_closed = true;

  Interval() = default;
  Interval(double a_, double b_, bool right_closed_ = true)
      : a(a_), b(b_), right_closed(right_closed_) {
    if (!(a >= 0.0)) throw std::invalid_argument("interval: a must be >= 0");
    if (!std::isfinite(a)) throw std::invalid_argument("interval: a must be finite");
    if (b < a) throw std::invalid_argument("interval: a > b");
  }

  bool bounded() const { return std::isfinite(b); }
};

/// Step-index window [a,b] obtained from an Interval under a sampling period.
struct StepWindow {
  int a = 0;
  int b = 0;
  bool empty() const { return a > b; }
};

/// Conservative interval-to-step mapping: [a,b] -> [ceil(a/d), floor(b/d)];
/// [a,b) -> [ceil(a/d), ceil(b/d)-1]. Throws on unbounded b.
StepWindow to_steps(const Interval& iv, double delta);

enum class FormulaKind {
  True,
  Pred,
  NegPred,
  Not,         // raw ASTs only; absent after to_pnf
  And,
  Or,
  Until,
  Always,
  Eventually,  // sugar; desugared to (true Until) before tree construction
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  FormulaKind kind = FormulaKind::True;
  std::string pred;        // Pred / NegPred
  FormulaPtr lhs, rhs;     // rhs only for And/Or/Until
  Interval window;         // Until/Always/Eventually
};

FormulaPtr f_true();
FormulaPtr f_pred(std::string id);
FormulaPtr f_neg_pred(std::string id);
FormulaPtr f_not(FormulaPtr f);
FormulaPtr f_and(FormulaPtr l, FormulaPtr r);
FormulaPtr f_or(FormulaPtr l, FormulaPtr r);
FormulaPtr f_until(FormulaPtr l, FormulaPtr r, Interval iv);
FormulaPtr f_always(FormulaPtr f, Interval iv);
FormulaPtr f_eventually(FormulaPtr f, Interval iv);

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"),
        position(pos) {}
  std::size_t position;
};

struct UnsupportedFormulaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnboundedHorizonError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parse the concrete grammar
///   phi := or
///   or  := and ('|' and)*
///   and := until ('&' until)*
///   until := unary ('U[a,b]' until)?          (right associative)
///   unary := '!' unary | 'G[a,b]' unary | 'F[a,b]' unary | atom
///   atom := 'true' | pred-id | '(' phi ')'
/// Predicate ids are identifiers starting with "mu"; every id must exist in
/// the table. Intervals accept 'inf' for b and ')' for a half-open right end.
FormulaPtr parse_formula(const std::string& text, const PredicateTable& preds);

/// Rewrite to positive normal form: negation only adjacent to predicates.
/// Applies !!p = p, De Morgan, !G = F!, !F = G!. Negated Until has no
/// equivalent in the PNF grammar and raises UnsupportedFormulaError.
FormulaPtr to_pnf(const FormulaPtr& f);

bool is_pnf(const FormulaPtr& f);
/// True when f contains no Until/Always/Eventually.
bool is_temporal_free(const FormulaPtr& f);

/// Formula time horizon in seconds: ||mu|| = 0, ||!phi|| = ||phi||,
/// binary ops take max, U/G/F add the window's b. Throws on unbounded b.
double horizon_seconds(const FormulaPtr& f);
/// Same recursion carried out on step-converted windows.
int horizon_steps(const FormulaPtr& f, double delta);

/// Canonical S-expression form, e.g. (and (until mu2 mu3 [0,8]) mu1).
std::string to_string(const FormulaPtr& f);

/// Uniformly sampled discrete-time signal. samples[i] is the state at step
/// start + i; signals produced by the synthesizer start at 0.
struct Signal {
  std::vector<Eigen::VectorXd> samples;
  double delta = 1.0;
  int start = 0;

  int end() const { return start + static_cast<int>(samples.size()) - 1; }
  bool has(int k) const { return k >= start && k <= end(); }
  const Eigen::VectorXd& at(int k) const { return samples.at(k - start); }
};

struct InsufficientSignalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Boolean STL satisfaction (x, t_k) |= f with the interval arithmetic done
/// on integer steps. The Until obligation on the left operand covers the
/// closed window [k, k'] including the hitting instant.
bool evaluate(const FormulaPtr& f, const Signal& s, int k,
              const PredicateTable& preds);

/// Real-time satisfaction relation (s, t_k, t_l) for a partial signal whose
/// first observed step is l. f must be in PNF. When l == k this coincides
/// with evaluate.
bool evaluate_realtime(const FormulaPtr& f, const Signal& partial, int k,
                       int l, const PredicateTable& preds);

}  // namespace ttlt
