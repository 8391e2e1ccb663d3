#include "ttlt/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace ttlt {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Config file
// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double parse_bound(const std::string& tok) {
  if (tok == "inf" || tok == "+inf") return std::numeric_limits<double>::infinity();
  if (tok == "-inf") return -std::numeric_limits<double>::infinity();
  return std::stod(tok);
}

Eigen::VectorXd parse_numbers(const std::string& s) {
  const auto toks = split_ws(s);
  Eigen::VectorXd v(static_cast<Eigen::Index>(toks.size()));
  for (std::size_t i = 0; i < toks.size(); ++i) v[static_cast<Eigen::Index>(i)] = parse_bound(toks[i]);
  return v;
}

Eigen::MatrixXd parse_matrix(const std::string& s) {
  std::vector<Eigen::VectorXd> rows;
  std::string row;
  std::istringstream is(s);
  while (std::getline(is, row, ';')) {
    row = trim(row);
    if (!row.empty()) rows.push_back(parse_numbers(row));
  }
  if (rows.empty()) throw std::invalid_argument("config: empty matrix");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols())
      throw std::invalid_argument("config: ragged matrix rows");
    m.row(static_cast<Eigen::Index>(i)) = rows[i];
  }
  return m;
}

}  // namespace

ScenarioConfig ScenarioConfig::from_string(const std::string& text) {
  ScenarioConfig cfg;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    cfg.sections_[section][key] = value;
  }
  return cfg;
}

ScenarioConfig ScenarioConfig::load(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("config: cannot open " + file.string());
  std::ostringstream os;
  os << in.rdbuf();
  return from_string(os.str());
}

bool ScenarioConfig::has(const std::string& s, const std::string& k) const {
  auto it = sections_.find(s);
  return it != sections_.end() && it->second.count(k);
}

const std::string& ScenarioConfig::get(const std::string& s, const std::string& k) const {
  auto it = sections_.find(s);
  if (it == sections_.end() || !it->second.count(k))
    throw std::invalid_argument("config: missing [" + s + "] " + k);
  return it->second.at(k);
}

std::string ScenarioConfig::get_or(const std::string& s, const std::string& k,
                                   const std::string& fallback) const {
  return has(s, k) ? get(s, k) : fallback;
}

double ScenarioConfig::get_double(const std::string& s, const std::string& k) const {
  return parse_bound(get(s, k));
}

double ScenarioConfig::get_double_or(const std::string& s, const std::string& k,
                                     double fallback) const {
  return has(s, k) ? get_double(s, k) : fallback;
}

std::int64_t ScenarioConfig::get_int_or(const std::string& s, const std::string& k,
                                        std::int64_t fallback) const {
  return has(s, k) ? std::stoll(get(s, k)) : fallback;
}

Eigen::VectorXd ScenarioConfig::get_vector(const std::string& s,
                                           const std::string& k) const {
  return parse_numbers(get(s, k));
}

std::vector<int> ScenarioConfig::get_ints(const std::string& s,
                                          const std::string& k) const {
  std::vector<int> out;
  for (const auto& t : split_ws(get(s, k))) out.push_back(std::stoi(t));
  return out;
}

std::vector<std::string> ScenarioConfig::section_keys(const std::string& s) const {
  std::vector<std::string> out;
  auto it = sections_.find(s);
  if (it == sections_.end()) return out;
  for (const auto& [k, v] : it->second) out.push_back(k);
  return out;
}

// ---------------------------------------------------------------------------
// Scenario assembly
// ---------------------------------------------------------------------------

namespace {

std::vector<Eigen::VectorXd> control_samples(const ScenarioConfig& cfg, int dim) {
  const std::string shape = cfg.get_or("system", "u_shape", "box");
  if (shape == "ball") {
    const double r = cfg.get_double("system", "u_radius");
    const int boundary = static_cast<int>(cfg.get_int_or("system", "u_boundary", 16));
    const int rings = static_cast<int>(cfg.get_int_or("system", "u_rings", 2));
    return sample_ball(dim, r, boundary, rings);
  }
  const Eigen::VectorXd lo = cfg.get_vector("system", "u_min");
  const Eigen::VectorXd hi = cfg.get_vector("system", "u_max");
  std::vector<int> counts = cfg.has("system", "u_samples")
                                ? cfg.get_ints("system", "u_samples")
                                : std::vector<int>(lo.size(), 9);
  return sample_box(lo, hi, counts);
}

std::vector<Eigen::VectorXd> disturbance_samples(const ScenarioConfig& cfg, int dim) {
  const std::string shape = cfg.get_or("system", "w_shape", "zero");
  if (shape == "zero") return {Eigen::VectorXd::Zero(dim)};
  if (shape == "ball") {
    const double r = cfg.get_double("system", "w_radius");
    const int boundary = static_cast<int>(cfg.get_int_or("system", "w_boundary", 8));
    const int rings = static_cast<int>(cfg.get_int_or("system", "w_rings", 1));
    return sample_ball(dim, r, boundary, rings);
  }
  const Eigen::VectorXd lo = cfg.get_vector("system", "w_min");
  const Eigen::VectorXd hi = cfg.get_vector("system", "w_max");
  if (cfg.get_or("system", "w_samples", "vertices") == "vertices") {
    auto v = box_vertices(lo, hi);
    v.push_back(Eigen::VectorXd::Zero(dim));
    return v;
  }
  return sample_box(lo, hi, cfg.get_ints("system", "w_samples"));
}

PredicateDef parse_predicate(const ScenarioConfig& cfg, const std::string& value,
                             int state_dim) {
  const auto colon = value.find(':');
  const std::string head = trim(colon == std::string::npos ? value : value.substr(0, colon));
  const std::string tail = colon == std::string::npos ? "" : trim(value.substr(colon + 1));
  auto toks = split_ws(head);
  if (toks.empty()) throw std::invalid_argument("config: empty predicate");
  const std::string kind = toks.front();
  toks.erase(toks.begin());
  auto nums = [&toks]() {
    Eigen::VectorXd v(static_cast<Eigen::Index>(toks.size()));
    for (std::size_t i = 0; i < toks.size(); ++i)
      v[static_cast<Eigen::Index>(i)] = parse_bound(toks[i]);
    return v;
  };
  if (kind == "ball") return PredicateDef::ball(nums(), parse_bound(tail));
  if (kind == "halfspace") return PredicateDef::halfspace(nums(), parse_bound(tail));
  if (kind == "box") return PredicateDef::box(nums(), parse_numbers(tail));
  if (kind == "veh3_span" || kind == "veh3_ahead") {
    const double p_ini = cfg.get_double("veh3", "p_ini");
    const double v = cfg.get_double("veh3", "v");
    auto pos = [&](double t) { return p_ini + v * t; };
    const double inf = std::numeric_limits<double>::infinity();
    Eigen::VectorXd lo = Eigen::VectorXd::Constant(state_dim, -inf);
    Eigen::VectorXd hi = Eigen::VectorXd::Constant(state_dim, inf);
    if (kind == "veh3_span") {
      if (toks.size() != 2) throw std::invalid_argument("veh3_span needs t1 t2");
      const double p1 = pos(parse_bound(toks[0])), p2 = pos(parse_bound(toks[1]));
      lo[0] = std::min(p1, p2);
      hi[0] = std::max(p1, p2);
    } else {
      if (toks.size() != 1) throw std::invalid_argument("veh3_ahead needs t");
      hi[0] = pos(parse_bound(toks[0]));
    }
    lo[1] = 0.0;  // oncoming lane band
    hi[1] = 5.0;
    return PredicateDef::box(lo, hi);
  }
  throw std::invalid_argument("config: unknown predicate kind '" + kind + "'");
}

}  // namespace

Scenario Scenario::from_config(ScenarioConfig cfg) {
  Scenario sc;
  sc.config = cfg;

  const Eigen::VectorXd g_lo = cfg.get_vector("grid", "lower");
  const Eigen::VectorXd g_hi = cfg.get_vector("grid", "upper");
  const std::vector<int> g_cells = cfg.get_ints("grid", "cells");
  const auto budget = static_cast<std::size_t>(
      cfg.get_int_or("grid", "cell_budget", static_cast<std::int64_t>(Grid::kDefaultCellBudget)));
  sc.grid = make_grid(g_lo, g_hi, g_cells, budget);
  const int n = sc.grid->dim();

  const double delta = cfg.get_double("system", "delta");
  const std::string kind = cfg.get("system", "kind");
  if (kind == "integrator") {
    sc.model = SystemModel::integrator(n, control_samples(cfg, n),
                                       disturbance_samples(cfg, n), delta);
  } else if (kind == "linear") {
    Eigen::MatrixXd A = parse_matrix(cfg.get("system", "A"));
    Eigen::MatrixXd B = parse_matrix(cfg.get("system", "B"));
    const int m = static_cast<int>(B.cols());
    sc.model = SystemModel::linear(std::move(A), std::move(B), control_samples(cfg, m),
                                   disturbance_samples(cfg, n), delta);
  } else {
    throw std::invalid_argument("config: unknown system kind '" + kind + "'");
  }
  if (sc.model.state_dim != n)
    throw std::invalid_argument("config: system/grid dimension mismatch");

  for (const std::string& id : cfg.section_keys("predicates"))
    sc.predicates.emplace(id, parse_predicate(cfg, cfg.get("predicates", id), n));

  sc.formula_text = cfg.get("formula", "phi");
  sc.formula = parse_formula(sc.formula_text, sc.predicates);
  sc.pnf = to_pnf(sc.formula);
  sc.x0 = cfg.get_vector("initial", "x0");
  if (sc.x0.size() != n) throw std::invalid_argument("config: x0 dimension mismatch");
  if (!sc.grid->in_bounds(sc.x0))
    throw std::invalid_argument("config: x0 outside the grid bounds");

  sc.output_dir = cfg.get_or("output", "dir", "out");
  sc.seed = static_cast<std::uint64_t>(cfg.get_int_or("disturbance", "seed", 1));
  sc.realizations = static_cast<int>(cfg.get_int_or("disturbance", "realizations", 20));
  sc.max_steps = static_cast<int>(cfg.get_int_or("run", "max_steps", 0));
  return sc;
}

Scenario Scenario::load(const fs::path& file) {
  return from_config(ScenarioConfig::load(file));
}

int Scenario::default_max_steps() const {
  const int h = horizon_steps(pnf, model.delta);
  return h + std::max(10, h / 4);
}

DisturbanceSource Scenario::disturbance(std::uint64_t seed) const {
  const std::string mode = config.get_or("disturbance", "mode", "zero");
  const int n = model.state_dim;
  if (mode == "zero") return DisturbanceSource::zero(n);
  const std::string shape = config.get_or("system", "w_shape", "zero");
  if (mode == "uniform") {
    if (shape == "ball")
      return DisturbanceSource::uniform_ball(n, config.get_double("system", "w_radius"),
                                             seed);
    if (shape == "box")
      return DisturbanceSource::uniform_box(config.get_vector("system", "w_min"),
                                            config.get_vector("system", "w_max"), seed);
    return DisturbanceSource::zero(n);
  }
  if (mode == "extreme") {
    auto samples = model.disturbances;
    return DisturbanceSource::extreme(std::move(samples));
  }
  if (mode == "replay") {
    const fs::path file = config.get("disturbance", "replay_file");
    Signal s = read_trajectory_csv(file, n, model.delta);
    return DisturbanceSource::replay(std::move(s.samples));
  }
  throw std::invalid_argument("config: unknown disturbance mode '" + mode + "'");
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

std::vector<FormulaPtr> or_branches(const FormulaPtr& pnf) {
  if (pnf->kind != FormulaKind::Or) return {pnf};
  auto l = or_branches(pnf->lhs);
  auto r = or_branches(pnf->rhs);
  l.insert(l.end(), r.begin(), r.end());
  return l;
}

namespace {

void write_json(const fs::path& file, const json& j) {
  std::ofstream out(file);
  out << std::setw(2) << j << "\n";
}

CheckReport check_impl(const Scenario& sc, const ReachContext& ctx) {
  CheckReport rep;
  const Ttlt full = construct(sc.pnf, ctx, sc.predicates);
  rep.root_contains_x0 = full.node(full.root()).tube.at(0).contains(sc.x0);
  rep.deterministic = sc.model.deterministic();
  rep.strength = rep.deterministic ? "sound (deterministic system)"
                                   : "necessary condition + zero-disturbance probe";
  for (const FormulaPtr& branch : or_branches(sc.pnf)) {
    CheckBranch cb;
    cb.text = to_string(branch);
    const Ttlt bt = construct(branch, ctx, sc.predicates);
    cb.necessary = bt.node(bt.root()).tube.at(0).contains(sc.x0);
    if (cb.necessary) {
      const int steps = sc.max_steps > 0
                            ? sc.max_steps
                            : horizon_steps(branch, sc.model.delta) +
                                  std::max(10, horizon_steps(branch, sc.model.delta) / 4);
      DisturbanceSource dist = DisturbanceSource::zero(sc.model.state_dim);
      cb.probe = run_online(bt, sc.model, sc.x0, dist, steps).verdict;
    } else {
      cb.probe = Verdict::NExis;
    }
    cb.pass = cb.necessary && cb.probe == Verdict::Completed;
    rep.branches.push_back(std::move(cb));
  }
  rep.overall = std::any_of(rep.branches.begin(), rep.branches.end(),
                            [](const CheckBranch& b) { return b.pass; });
  return rep;
}

json report_to_json(const CheckReport& rep) {
  json j;
  j["root_contains_x0"] = rep.root_contains_x0;
  j["deterministic"] = rep.deterministic;
  j["strength"] = rep.strength;
  j["overall"] = rep.overall;
  j["branches"] = json::array();
  for (const auto& b : rep.branches)
    j["branches"].push_back({{"formula", b.text},
                             {"necessary", b.necessary},
                             {"probe", verdict_name(b.probe)},
                             {"pass", b.pass}});
  return j;
}

}  // namespace

CheckReport cmd_check(const Scenario& sc, const CommandOptions& opts) {
  ReachContext ctx(sc.model, sc.grid);
  if (opts.cache_dir) ctx.set_disk_cache(*opts.cache_dir);
  CheckReport rep = check_impl(sc, ctx);
  const std::string out = opts.out_dir.value_or(sc.output_dir);
  if (!out.empty()) {
    fs::create_directories(out);
    write_json(fs::path(out) / "check.json", report_to_json(rep));
  }
  return rep;
}

namespace {

void write_trajectory_csv(const fs::path& file, const RunResult& run, int state_dim,
                          int control_dim, double delta) {
  std::ofstream out(file);
  out << std::setprecision(17);
  out << "k,t";
  for (int i = 0; i < state_dim; ++i) out << ",x" << i;
  for (int i = 0; i < control_dim; ++i) out << ",u" << i;
  for (int i = 0; i < state_dim; ++i) out << ",w" << i;
  out << ",feasible_count\n";
  const auto& xs = run.trajectory.samples;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    out << k << "," << k * delta;
    for (int i = 0; i < state_dim; ++i) out << "," << xs[k][i];
    if (k < run.records.size()) {
      const auto& r = run.records[k];
      for (int i = 0; i < control_dim; ++i) out << "," << r.u[i];
      for (int i = 0; i < state_dim; ++i) out << "," << r.w[i];
      out << "," << r.feasible;
    } else {
      for (int i = 0; i < control_dim + state_dim; ++i) out << ",";
      out << ",";
    }
    out << "\n";
  }
}

const Eigen::VectorXd& min_norm_control(const SystemModel& m) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < m.controls.size(); ++i) {
    const double di = m.controls[i].squaredNorm();
    const double db = m.controls[best].squaredNorm();
    if (di < db) {
      best = i;
    } else if (di == db) {
      for (Eigen::Index d = 0; d < m.controls[i].size(); ++d) {
        if (m.controls[i][d] == m.controls[best][d]) continue;
        if (m.controls[i][d] < m.controls[best][d]) best = i;
        break;
      }
    }
  }
  return m.controls[best];
}

}  // namespace

SynthesisSummary cmd_synthesize(const Scenario& sc, const CommandOptions& opts) {
  using clock = std::chrono::steady_clock;
  const std::string out = opts.out_dir.value_or(sc.output_dir);
  fs::create_directories(out);

  ReachContext ctx(sc.model, sc.grid);
  if (opts.cache_dir) ctx.set_disk_cache(*opts.cache_dir);

  const auto t0 = clock::now();
  const Ttlt tree = construct(sc.pnf, ctx, sc.predicates);
  SynthesisSummary sum;
  sum.offline_seconds = std::chrono::duration<double>(clock::now() - t0).count();

  if (!opts.force) {
    const CheckReport rep = check_impl(sc, ctx);
    if (!rep.overall)
      throw std::runtime_error(
          "synthesize: satisfiability check failed (rerun with --force to override)");
  }

  const std::uint64_t seed0 = opts.seed.value_or(sc.seed);
  const int n_real = opts.realizations.value_or(sc.realizations);
  const int horizon = horizon_steps(sc.pnf, sc.model.delta);
  const int max_steps = sc.max_steps > 0 ? sc.max_steps : sc.default_max_steps();
  const int state_dim = sc.model.state_dim;
  const int control_dim = static_cast<int>(sc.model.controls.front().size());

  sum.realizations = n_real;
  sum.runs.resize(n_real);
  std::vector<double> run_seconds(n_real, 0.0);

  std::atomic<int> cursor{0};
  auto worker = [&]() {
    for (;;) {
      const int i = cursor.fetch_add(1);
      if (i >= n_real) return;
      const std::uint64_t seed = seed0 + static_cast<std::uint64_t>(i);
      DisturbanceSource dist = sc.disturbance(seed);
      const auto r0 = clock::now();
      RunResult run = run_online(tree, sc.model, sc.x0, dist, max_steps);
      run_seconds[i] = std::chrono::duration<double>(clock::now() - r0).count();

      // Keep driving a completed run until the log covers the formula
      // horizon so the exact-semantics monitor is well defined.
      if (run.verdict == Verdict::Completed) {
        const Eigen::VectorXd& u = min_norm_control(sc.model);
        while (static_cast<int>(run.trajectory.samples.size()) <= horizon) {
          const Eigen::VectorXd w = dist.next();
          const Eigen::VectorXd x = run.trajectory.samples.back();
          RunRecord rec;
          rec.k = static_cast<int>(run.trajectory.samples.size()) - 1;
          rec.x = x;
          rec.u = u;
          rec.w = w;
          rec.feasible = static_cast<int>(sc.model.controls.size());
          run.records.push_back(std::move(rec));
          run.trajectory.samples.push_back(sc.model.step(x, u, w));
        }
      }

      RealizationSummary rs;
      rs.seed = seed;
      rs.verdict = run.verdict;
      rs.steps = static_cast<int>(run.records.size());
      rs.nexis_step = run.nexis_step;
      try {
        rs.monitor_satisfied = evaluate(sc.formula, run.trajectory, 0, sc.predicates);
      } catch (const InsufficientSignalError&) {
        rs.monitor_satisfied = false;
      }
      rs.tree_satisfied = tree_satisfies(tree, run.trajectory);
      rs.min_feasible = std::numeric_limits<int>::max();
      double acc = 0.0;
      for (const auto& rec : run.records) {
        rs.min_feasible = std::min(rs.min_feasible, rec.feasible);
        acc += rec.feasible;
      }
      if (run.records.empty()) rs.min_feasible = 0;
      rs.mean_feasible = run.records.empty() ? 0.0 : acc / run.records.size();

      write_trajectory_csv(fs::path(out) / ("traj_" + std::to_string(seed) + ".csv"),
                           run, state_dim, control_dim, sc.model.delta);
      json v;
      v["seed"] = seed;
      v["verdict"] = verdict_name(run.verdict);
      v["monitor_satisfied"] = rs.monitor_satisfied;
      v["tree_satisfied"] = rs.tree_satisfied;
      v["steps"] = rs.steps;
      if (run.nexis_step >= 0) v["nexis_step"] = run.nexis_step;
      v["satisfied_paths"] = run.satisfied_paths;
      v["codings"] = json::array();
      for (const auto& c : run.codings) v["codings"].push_back(c.activation);
      write_json(fs::path(out) / ("verdict_" + std::to_string(seed) + ".json"), v);
      sum.runs[i] = rs;
    }
  };

  const unsigned hw = std::max(1u, std::min(std::thread::hardware_concurrency(), 8u));
  const auto online0 = clock::now();
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < hw && static_cast<int>(t) < n_real; ++t)
    pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  sum.online_seconds = std::chrono::duration<double>(clock::now() - online0).count();

  int min_feas = std::numeric_limits<int>::max();
  double mean_feas = 0.0;
  std::size_t steps_total = 0;
  for (const auto& rs : sum.runs) {
    if (rs.verdict == Verdict::Completed) ++sum.completed;
    if (rs.monitor_satisfied) ++sum.monitor_satisfied;
    min_feas = std::min(min_feas, rs.min_feasible);
    mean_feas += rs.mean_feasible * rs.steps;
    steps_total += static_cast<std::size_t>(rs.steps);
    sum.max_step_seconds =
        std::max(sum.max_step_seconds,
                 rs.steps > 0 ? run_seconds[&rs - sum.runs.data()] / rs.steps : 0.0);
  }
  if (sum.runs.empty()) min_feas = 0;

  json agg;
  agg["realizations"] = sum.realizations;
  agg["completed"] = sum.completed;
  agg["monitor_satisfied"] = sum.monitor_satisfied;
  agg["satisfaction_rate"] =
      sum.realizations ? static_cast<double>(sum.monitor_satisfied) / sum.realizations : 0.0;
  agg["feasible_min"] = min_feas;
  agg["feasible_mean"] = steps_total ? mean_feas / steps_total : 0.0;
  agg["grid"] = sc.grid->describe();
  agg["max_steps"] = max_steps;
  agg["runs"] = json::array();
  for (const auto& rs : sum.runs)
    agg["runs"].push_back({{"seed", rs.seed},
                           {"verdict", verdict_name(rs.verdict)},
                           {"monitor_satisfied", rs.monitor_satisfied},
                           {"tree_satisfied", rs.tree_satisfied},
                           {"steps", rs.steps},
                           {"min_feasible", rs.min_feasible}});
  write_json(fs::path(out) / "aggregate.json", agg);

  json tim;
  tim["offline_seconds"] = sum.offline_seconds;
  tim["online_seconds"] = sum.online_seconds;
  tim["max_step_seconds"] = sum.max_step_seconds;
  write_json(fs::path(out) / "timings.json", tim);
  return sum;
}

// ---------------------------------------------------------------------------
// Monitoring
// ---------------------------------------------------------------------------

Signal read_trajectory_csv(const fs::path& file, int state_dim, double delta) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("monitor: cannot open " + file.string());
  Signal s;
  s.delta = delta;
  s.start = 0;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    if (line.rfind("k,", 0) == 0) continue;  // header
    std::vector<std::string> cols;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cols.push_back(cell);
    if (static_cast<int>(cols.size()) < 2 + state_dim)
      throw std::runtime_error("monitor: row with fewer than 2+state_dim columns");
    Eigen::VectorXd x(state_dim);
    for (int i = 0; i < state_dim; ++i) x[i] = std::stod(cols[2 + i]);
    s.samples.push_back(std::move(x));
  }
  if (s.samples.empty()) throw std::runtime_error("monitor: empty trajectory file");
  return s;
}

MonitorReport cmd_monitor(const Scenario& sc, const fs::path& traj_csv) {
  const Signal s = read_trajectory_csv(traj_csv, sc.model.state_dim, sc.model.delta);
  MonitorReport rep;
  rep.satisfied = evaluate(sc.formula, s, 0, sc.predicates);

  // Witness/violation step for a top-level temporal operator.
  const FormulaPtr f = sc.formula;
  const auto step_eval = [&](const FormulaPtr& g, int k) {
    return evaluate(g, s, k, sc.predicates);
  };
  if (f->kind == FormulaKind::Until || f->kind == FormulaKind::Eventually) {
    const StepWindow w = to_steps(f->window, s.delta);
    const FormulaPtr& left = f->kind == FormulaKind::Until ? f->lhs : f_true();
    const FormulaPtr& right = f->kind == FormulaKind::Until ? f->rhs : f->lhs;
    if (rep.satisfied) {
      for (int j = 0; j <= w.b; ++j) {
        if (!step_eval(left, j)) break;
        if (j >= w.a && step_eval(right, j)) {
          rep.witness_step = j;
          break;
        }
      }
    } else {
      for (int j = 0; j <= w.b; ++j)
        if (!step_eval(left, j)) {
          rep.witness_step = j;
          break;
        }
    }
  } else if (f->kind == FormulaKind::Always && !rep.satisfied) {
    const StepWindow w = to_steps(f->window, s.delta);
    for (int j = w.a; j <= w.b; ++j)
      if (!step_eval(f->lhs, j)) {
        rep.witness_step = j;
        break;
      }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Tree export
// ---------------------------------------------------------------------------

void cmd_export_tree(const Scenario& sc, const CommandOptions& opts) {
  const std::string out = opts.out_dir.value_or(sc.output_dir);
  fs::create_directories(out);
  ReachContext ctx(sc.model, sc.grid);
  if (opts.cache_dir) ctx.set_disk_cache(*opts.cache_dir);
  const Ttlt tree = construct(sc.pnf, ctx, sc.predicates);

  const std::vector<int> order = tree.preorder();
  std::map<int, int> pid;  // arena id -> preorder id
  for (std::size_t i = 0; i < order.size(); ++i) pid[order[i]] = static_cast<int>(i);

  std::ofstream nodes(fs::path(out) / "nodes.csv");
  nodes << "id,kind,op,window_a,window_b,leaf,slices,slice0_count\n";
  std::ofstream edges(fs::path(out) / "edges.csv");
  edges << "parent,child\n";
  std::ofstream tubes(fs::path(out) / "tubes.txt");

  for (int arena : order) {
    const TtltNode& n = tree.node(arena);
    const int id = pid[arena];
    if (n.is_tube) {
      nodes << id << ",tube,,,," << (n.is_leaf ? 1 : 0) << "," << n.tube.slices.size()
            << "," << n.tube.at(0).count() << "\n";
      for (int k = 0; k <= n.tube.K(); ++k)
        tubes << "node " << id << " slice " << k << " " << n.tube.at(k).to_rle()
              << "\n";
      if (opts.write_centers) {
        for (int k = 0; k <= n.tube.K(); ++k) {
          std::ofstream cs(fs::path(out) /
                           ("node" + std::to_string(id) + "_k" + std::to_string(k) +
                            ".csv"));
          n.tube.at(k).write_centers_csv(cs);
        }
      }
    } else {
      nodes << id << ",op," << op_name(n.op) << "," << n.window.a << "," << n.window.b
            << ",,,\n";
    }
    for (int ch : n.children) edges << id << "," << pid[ch] << "\n";
  }

  json manifest;
  manifest["grid"] = sc.grid->describe();
  manifest["delta"] = sc.model.delta;
  manifest["formula"] = to_string(sc.pnf);
  int tube_nodes = 0, leaf_nodes = 0, op_nodes = 0;
  for (int arena : order) {
    const TtltNode& n = tree.node(arena);
    if (n.is_tube) {
      ++tube_nodes;
      if (n.is_leaf) ++leaf_nodes;
    } else {
      ++op_nodes;
    }
  }
  manifest["tube_nodes"] = tube_nodes;
  manifest["leaf_nodes"] = leaf_nodes;
  manifest["operator_nodes"] = op_nodes;
  manifest["complete_paths"] = complete_paths(tree).size();
  write_json(fs::path(out) / "manifest.json", manifest);
}

}  // namespace ttlt
