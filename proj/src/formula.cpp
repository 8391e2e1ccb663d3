#include "ttlt/formula.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace ttlt {

StepWindow to_steps(const Interval& iv, double delta) {
  if (delta <= 0.0) throw std::invalid_argument("to_steps: delta must be > 0");
  if (!iv.bounded())
    throw std::invalid_argument("to_steps: unbounded interval");
  constexpr double eps = 1e-9;
  StepWindow w;
  w.a = static_cast<int>(std::ceil(iv.a / delta - eps));
  if (iv.right_closed)
    w.b = static_cast<int>(std::floor(iv.b / delta + eps));
  else
    w.b = static_cast<int>(std::ceil(iv.b / delta - eps)) - 1;
  return w;
}

namespace {
FormulaPtr node(FormulaKind k) {
  auto f = std::make_shared<Formula>();
  const_cast<Formula&>(*f).kind = k;
  return f;
}
}  // namespace

FormulaPtr f_true() {
  static const FormulaPtr t = node(FormulaKind::True);
  return t;
}

FormulaPtr f_pred(std::string id) {
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::Pred;
  f->pred = std::move(id);
  return f;
}

FormulaPtr f_neg_pred(std::string id) {
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::NegPred;
  f->pred = std::move(id);
  return f;
}

FormulaPtr f_not(FormulaPtr c) {
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::Not;
  f->lhs = std::move(c);
  return f;
}

FormulaPtr f_and(FormulaPtr l, FormulaPtr r) {
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::And;
  f->lhs = std::move(l);
  f->rhs = std::move(r);
  return f;
}

FormulaPtr f_or(FormulaPtr l, FormulaPtr r) {
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::Or;
  f->lhs = std::move(l);
  f->rhs = std::move(r);
  return f;
}

FormulaPtr f_until(FormulaPtr l, FormulaPtr r, Interval iv) {
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::Until;
  f->lhs = std::move(l);
  f->rhs = std::move(r);
  f->window = iv;
  return f;
}

FormulaPtr f_always(FormulaPtr c, Interval iv) {
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::Always;
  f->lhs = std::move(c);
  f->window = iv;
  return f;
}

FormulaPtr f_eventually(FormulaPtr c, Interval iv) {
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::Eventually;
  f->lhs = std::move(c);
  f->window = iv;
  return f;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

class Parser {
 public:
  Parser(const std::string& text, const PredicateTable& preds)
      : text_(text), preds_(preds) {}

  FormulaPtr run() {
    FormulaPtr f = parse_or();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, pos_);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool at_temporal(char op) {
    skip_ws();
    return pos_ + 1 < text_.size() && text_[pos_] == op && text_[pos_ + 1] == '[';
  }

  double parse_number() {
    skip_ws();
    if (pos_ + 2 < text_.size() && text_.compare(pos_, 3, "inf") == 0) {
      pos_ += 3;
      return std::numeric_limits<double>::infinity();
    }
    std::size_t consumed = 0;
    double v = 0.0;
    try {
      v = std::stod(text_.substr(pos_), &consumed);
    } catch (const std::exception&) {
      fail("expected a number");
    }
    pos_ += consumed;
    return v;
  }

  Interval parse_interval() {
    if (!eat('[')) fail("expected '[' after temporal operator");
    const std::size_t start = pos_;
    const double a = parse_number();
    if (!eat(',')) fail("expected ',' in interval");
    const double b = parse_number();
    bool closed;
    if (eat(']'))
      closed = true;
    else if (eat(')'))
      closed = false;
    else
      fail("expected ']' or ')' closing the interval");
    try {
      return Interval(a, b, closed);
    } catch (const std::invalid_argument& e) {
      throw ParseError(std::string("malformed interval: ") + e.what(), start);
    }
  }

  FormulaPtr parse_or() {
    FormulaPtr l = parse_and();
    while (peek() == '|') {
      eat('|');
      l = f_or(std::move(l), parse_and());
    }
    return l;
  }

  FormulaPtr parse_and() {
    FormulaPtr l = parse_until();
    while (peek() == '&') {
      eat('&');
      l = f_and(std::move(l), parse_until());
    }
    return l;
  }

  FormulaPtr parse_until() {
    FormulaPtr l = parse_unary();
    if (at_temporal('U')) {
      ++pos_;
      Interval iv = parse_interval();
      return f_until(std::move(l), parse_until(), iv);  // right associative
    }
    return l;
  }

  FormulaPtr parse_unary() {
    if (eat('!')) return f_not(parse_unary());
    if (at_temporal('G')) {
      ++pos_;
      Interval iv = parse_interval();
      return f_always(parse_unary(), iv);
    }
    if (at_temporal('F')) {
      ++pos_;
      Interval iv = parse_interval();
      return f_eventually(parse_unary(), iv);
    }
    return parse_atom();
  }

  FormulaPtr parse_atom() {
    if (eat('(')) {
      FormulaPtr f = parse_or();
      if (!eat(')')) fail("expected ')'");
      return f;
    }
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    if (pos_ == start) fail("expected a predicate, 'true', or '('");
    const std::string id = text_.substr(start, pos_ - start);
    if (id == "true") return f_true();
    if (!preds_.count(id)) {
      pos_ = start;
      fail("unknown predicate id '" + id + "'");
    }
    return f_pred(id);
  }

  const std::string& text_;
  const PredicateTable& preds_;
  std::size_t pos_ = 0;
};

}  // namespace

FormulaPtr parse_formula(const std::string& text, const PredicateTable& preds) {
  return Parser(text, preds).run();
}

// ---------------------------------------------------------------------------
// Positive normal form, horizon, printing
// ---------------------------------------------------------------------------

namespace {
FormulaPtr pnf_rec(const FormulaPtr& f, bool negated) {
  switch (f->kind) {
    case FormulaKind::True:
      if (negated)
        throw UnsupportedFormulaError("negated 'true' has no positive normal form");
      return f;
    case FormulaKind::Pred:
      return negated ? f_neg_pred(f->pred) : f;
    case FormulaKind::NegPred:
      return negated ? f_pred(f->pred) : f;
    case FormulaKind::Not:
      return pnf_rec(f->lhs, !negated);
    case FormulaKind::And:
      return negated ? f_or(pnf_rec(f->lhs, true), pnf_rec(f->rhs, true))
                     : f_and(pnf_rec(f->lhs, false), pnf_rec(f->rhs, false));
    case FormulaKind::Or:
      return negated ? f_and(pnf_rec(f->lhs, true), pnf_rec(f->rhs, true))
                     : f_or(pnf_rec(f->lhs, false), pnf_rec(f->rhs, false));
    case FormulaKind::Until:
      if (negated)
        throw UnsupportedFormulaError(
            "negated Until is not expressible in positive normal form");
      return f_until(pnf_rec(f->lhs, false), pnf_rec(f->rhs, false), f->window);
    case FormulaKind::Always:
      return negated ? f_eventually(pnf_rec(f->lhs, true), f->window)
                     : f_always(pnf_rec(f->lhs, false), f->window);
    case FormulaKind::Eventually:
      return negated ? f_always(pnf_rec(f->lhs, true), f->window)
                     : f_eventually(pnf_rec(f->lhs, false), f->window);
  }
  throw std::logic_error("pnf: unknown kind");
}
}  // namespace

FormulaPtr to_pnf(const FormulaPtr& f) { return pnf_rec(f, false); }

bool is_pnf(const FormulaPtr& f) {
  if (!f) return false;
  switch (f->kind) {
    case FormulaKind::Not:
      return false;
    case FormulaKind::True:
    case FormulaKind::Pred:
    case FormulaKind::NegPred:
      return true;
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Until:
      return is_pnf(f->lhs) && is_pnf(f->rhs);
    case FormulaKind::Always:
    case FormulaKind::Eventually:
      return is_pnf(f->lhs);
  }
  return false;
}

bool is_temporal_free(const FormulaPtr& f) {
  switch (f->kind) {
    case FormulaKind::True:
    case FormulaKind::Pred:
    case FormulaKind::NegPred:
      return true;
    case FormulaKind::Not:
      return is_temporal_free(f->lhs);
    case FormulaKind::And:
    case FormulaKind::Or:
      return is_temporal_free(f->lhs) && is_temporal_free(f->rhs);
    case FormulaKind::Until:
    case FormulaKind::Always:
    case FormulaKind::Eventually:
      return false;
  }
  return false;
}

double horizon_seconds(const FormulaPtr& f) {
  switch (f->kind) {
    case FormulaKind::True:
    case FormulaKind::Pred:
    case FormulaKind::NegPred:
      return 0.0;
    case FormulaKind::Not:
      return horizon_seconds(f->lhs);
    case FormulaKind::And:
    case FormulaKind::Or:
      return std::max(horizon_seconds(f->lhs), horizon_seconds(f->rhs));
    case FormulaKind::Until:
      if (!f->window.bounded())
        throw UnboundedHorizonError("horizon: unbounded Until interval");
      return f->window.b + std::max(horizon_seconds(f->lhs), horizon_seconds(f->rhs));
    case FormulaKind::Always:
    case FormulaKind::Eventually:
      if (!f->window.bounded())
        throw UnboundedHorizonError("horizon: unbounded temporal interval");
      return f->window.b + horizon_seconds(f->lhs);
  }
  throw std::logic_error("horizon: unknown kind");
}

int horizon_steps(const FormulaPtr& f, double delta) {
  switch (f->kind) {
    case FormulaKind::True:
    case FormulaKind::Pred:
    case FormulaKind::NegPred:
      return 0;
    case FormulaKind::Not:
      return horizon_steps(f->lhs, delta);
    case FormulaKind::And:
    case FormulaKind::Or:
      return std::max(horizon_steps(f->lhs, delta), horizon_steps(f->rhs, delta));
    case FormulaKind::Until: {
      const StepWindow w = to_steps(f->window, delta);
      return std::max(w.b, 0) +
             std::max(horizon_steps(f->lhs, delta), horizon_steps(f->rhs, delta));
    }
    case FormulaKind::Always:
    case FormulaKind::Eventually: {
      const StepWindow w = to_steps(f->window, delta);
      return std::max(w.b, 0) + horizon_steps(f->lhs, delta);
    }
  }
  throw std::logic_error("horizon: unknown kind");
}

namespace {
std::string interval_text(const Interval& iv) {
  std::ostringstream os;
  os << '[' << iv.a << ',';
  if (iv.bounded())
    os << iv.b;
  else
    os << "inf";
  os << (iv.right_closed ? ']' : ')');
  return os.str();
}
}  // namespace

std::string to_string(const FormulaPtr& f) {
  switch (f->kind) {
    case FormulaKind::True:
      return "true";
    case FormulaKind::Pred:
      return f->pred;
    case FormulaKind::NegPred:
      return "(not " + f->pred + ")";
    case FormulaKind::Not:
      return "(not " + to_string(f->lhs) + ")";
    case FormulaKind::And:
      return "(and " + to_string(f->lhs) + " " + to_string(f->rhs) + ")";
    case FormulaKind::Or:
      return "(or " + to_string(f->lhs) + " " + to_string(f->rhs) + ")";
    case FormulaKind::Until:
      return "(until " + to_string(f->lhs) + " " + to_string(f->rhs) + " " +
             interval_text(f->window) + ")";
    case FormulaKind::Always:
      return "(always " + to_string(f->lhs) + " " + interval_text(f->window) + ")";
    case FormulaKind::Eventually:
      return "(eventually " + to_string(f->lhs) + " " + interval_text(f->window) + ")";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Semantics
// ---------------------------------------------------------------------------

namespace {

double pred_value(const PredicateTable& preds, const std::string& id,
                  const Eigen::VectorXd& x) {
  auto it = preds.find(id);
  if (it == preds.end())
    throw std::invalid_argument("evaluate: predicate '" + id + "' not in table");
  return it->second.eval(x);
}

bool eval_rec(const FormulaPtr& f, const Signal& s, int k,
              const PredicateTable& preds) {
  switch (f->kind) {
    case FormulaKind::True:
      return true;
    case FormulaKind::Pred:
      return pred_value(preds, f->pred, s.at(k)) >= 0.0;
    case FormulaKind::NegPred:
      return pred_value(preds, f->pred, s.at(k)) < 0.0;
    case FormulaKind::Not:
      return !eval_rec(f->lhs, s, k, preds);
    case FormulaKind::And:
      return eval_rec(f->lhs, s, k, preds) && eval_rec(f->rhs, s, k, preds);
    case FormulaKind::Or:
      return eval_rec(f->lhs, s, k, preds) || eval_rec(f->rhs, s, k, preds);
    case FormulaKind::Until: {
      const StepWindow w = to_steps(f->window, s.delta);
      // The left operand must hold on the closed window [k, k'].
      for (int j = k; j <= k + w.b; ++j) {
        if (!eval_rec(f->lhs, s, j, preds)) return false;
        if (j >= k + w.a && eval_rec(f->rhs, s, j, preds)) return true;
      }
      return false;
    }
    case FormulaKind::Eventually: {
      const StepWindow w = to_steps(f->window, s.delta);
      for (int j = k + w.a; j <= k + w.b; ++j)
        if (eval_rec(f->lhs, s, j, preds)) return true;
      return false;
    }
    case FormulaKind::Always: {
      const StepWindow w = to_steps(f->window, s.delta);
      for (int j = k + w.a; j <= k + w.b; ++j)
        if (!eval_rec(f->lhs, s, j, preds)) return false;
      return true;
    }
  }
  throw std::logic_error("evaluate: unknown kind");
}

}  // namespace

bool evaluate(const FormulaPtr& f, const Signal& s, int k,
              const PredicateTable& preds) {
  if (s.samples.empty()) throw InsufficientSignalError("evaluate: empty signal");
  if (k < s.start || k + horizon_steps(f, s.delta) > s.end())
    throw InsufficientSignalError(
        "evaluate: signal does not cover the formula horizon from step " +
        std::to_string(k));
  return eval_rec(f, s, k, preds);
}

namespace {

bool rt_rec(const FormulaPtr& f, const Signal& s, int k, int l,
            const PredicateTable& preds) {
  switch (f->kind) {
    case FormulaKind::True:
      return true;
    case FormulaKind::Pred:
    case FormulaKind::NegPred: {
      if (k < l) return false;  // anchored before the first observed sample
      if (!s.has(k))
        throw InsufficientSignalError("evaluate_realtime: sample " +
                                      std::to_string(k) + " not available");
      const bool inside = pred_value(preds, f->pred, s.at(k)) >= 0.0;
      return f->kind == FormulaKind::Pred ? inside : !inside;
    }
    case FormulaKind::And:
      return rt_rec(f->lhs, s, k, l, preds) && rt_rec(f->rhs, s, k, l, preds);
    case FormulaKind::Or:
      return rt_rec(f->lhs, s, k, l, preds) || rt_rec(f->rhs, s, k, l, preds);
    case FormulaKind::Until:
    case FormulaKind::Eventually: {
      const StepWindow w = to_steps(f->window, s.delta);
      const FormulaPtr& left = f->kind == FormulaKind::Until ? f->lhs : f_true();
      const FormulaPtr& right = f->kind == FormulaKind::Until ? f->rhs : f->lhs;
      int lo = k + w.a;
      if (is_temporal_free(right)) lo = std::max(lo, l);
      for (int j = lo; j <= k + w.b; ++j) {
        if (!rt_rec(right, s, j, l, preds)) continue;
        if (l <= j) {
          bool ok = true;
          for (int m = l; m <= j && ok; ++m) ok = rt_rec(left, s, m, l, preds);
          if (!ok) continue;
        }
        return true;
      }
      return false;
    }
    case FormulaKind::Always: {
      const StepWindow w = to_steps(f->window, s.delta);
      int lo = k + w.a;
      if (is_temporal_free(f->lhs)) lo = std::max(lo, l);
      for (int j = lo; j <= k + w.b; ++j)
        if (!rt_rec(f->lhs, s, j, l, preds)) return false;
      return true;
    }
    case FormulaKind::Not:
      break;
  }
  throw std::invalid_argument("evaluate_realtime: formula must be in PNF");
}

}  // namespace

bool evaluate_realtime(const FormulaPtr& f, const Signal& partial, int k, int l,
                       const PredicateTable& preds) {
  if (!is_pnf(f))
    throw std::invalid_argument("evaluate_realtime: formula must be in PNF");
  if (l < k || l > k + horizon_steps(f, partial.delta))
    throw std::domain_error(
        "evaluate_realtime: l must lie in [k, k + horizon] (got l=" +
        std::to_string(l) + ", k=" + std::to_string(k) + ")");
  if (partial.start > l)
    throw InsufficientSignalError("evaluate_realtime: partial signal starts after l");
  return rt_rec(f, partial, k, l, preds);
}

}  // namespace ttlt
