#include "ttlt/reach.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ttlt {

const GridSet& Tube::at(int k) const {
  if (k < 0 || k > K())
    throw std::out_of_range("tube: slice index " + std::to_string(k) +
                            " outside [0," + std::to_string(K()) + "]");
  return slices[static_cast<std::size_t>(k)];
}

const GridSet& TargetSpec::at(int k) const {
  if (is_constant()) return std::get<GridSet>(value_);
  return std::get<Tube>(value_).at(k);
}

const GridPtr& TargetSpec::grid() const {
  if (is_constant()) return std::get<GridSet>(value_).grid();
  return std::get<Tube>(value_).grid();
}

// ---------------------------------------------------------------------------
// ReachContext
// ---------------------------------------------------------------------------

ReachContext::ReachContext(SystemModel model, GridPtr grid,
                           std::size_t table_budget_entries)
    : model_(std::move(model)), grid_(std::move(grid)) {
  if (!grid_) throw std::invalid_argument("reach: null grid");
  if (model_.state_dim != grid_->dim())
    throw std::invalid_argument("reach: model/grid dimension mismatch");
  const std::size_t entries = grid_->cell_count() * nu() * nw();
  tabulated_ = entries <= table_budget_entries;
  build();
}

void ReachContext::build() {
  const std::size_t cells = grid_->cell_count();
  offset_.clear();
  offset_.reserve(nu() * nw());
  const bool linear_like =
      model_.kind == SystemModel::Kind::Linear || model_.kind == SystemModel::Kind::Integrator;
  if (linear_like) {
    for (std::size_t ui = 0; ui < nu(); ++ui)
      for (std::size_t wi = 0; wi < nw(); ++wi)
        offset_.push_back(model_.kind == SystemModel::Kind::Linear
                              ? Eigen::VectorXd(model_.B * model_.controls[ui] +
                                                model_.disturbances[wi])
                              : Eigen::VectorXd(model_.controls[ui] +
                                                model_.disturbances[wi]));
  }
  if (tabulated_) {
    table_.assign(cells * nu() * nw(), -1);
    for (std::size_t c = 0; c < cells; ++c) {
      const Eigen::VectorXd x = grid_->center(c);
      const Eigen::VectorXd ax =
          model_.kind == SystemModel::Kind::Linear ? Eigen::VectorXd(model_.A * x) : x;
      for (std::size_t ui = 0; ui < nu(); ++ui)
        for (std::size_t wi = 0; wi < nw(); ++wi) {
          const Eigen::VectorXd next =
              linear_like ? Eigen::VectorXd(ax + offset_[ui * nw() + wi])
                          : model_.step(x, model_.controls[ui], model_.disturbances[wi]);
          const std::size_t idx = grid_->locate(next);
          table_[(c * nu() + ui) * nw() + wi] =
              idx == Grid::npos ? -1 : static_cast<std::int32_t>(idx);
        }
    }
  } else if (linear_like) {
    drift_.reserve(cells);
    for (std::size_t c = 0; c < cells; ++c)
      drift_.push_back(model_.kind == SystemModel::Kind::Linear
                           ? Eigen::VectorXd(model_.A * grid_->center(c))
                           : grid_->center(c));
  }
}

std::size_t ReachContext::next_cell(std::size_t cell, std::size_t ui,
                                    std::size_t wi) const {
  if (tabulated_) {
    const std::int32_t v = table_[(cell * nu() + ui) * nw() + wi];
    return v < 0 ? Grid::npos : static_cast<std::size_t>(v);
  }
  Eigen::VectorXd next;
  if (!drift_.empty())
    next = drift_[cell] + offset_[ui * nw() + wi];
  else
    next = model_.step(grid_->center(cell), model_.controls[ui],
                       model_.disturbances[wi]);
  return grid_->locate(next);
}

void ReachContext::set_disk_cache(std::filesystem::path dir) {
  std::filesystem::create_directories(dir);
  disk_dir_ = std::move(dir);
}

std::size_t ReachContext::TubeKeyHash::operator()(const TubeKey& k) const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  mix(static_cast<std::uint64_t>(k.kind));
  mix(static_cast<std::uint64_t>(k.a));
  mix(static_cast<std::uint64_t>(k.b));
  for (auto v : k.target) mix(v);
  mix(0x9e3779b97f4a7c15ull);
  for (auto v : k.constraint) mix(v);
  return static_cast<std::size_t>(h);
}

namespace {

std::string cache_file_name(const SystemModel& m, const Grid& g,
                            const ReachContext::TubeKey& key) {
  ReachContext::TubeKeyHash hasher;
  std::uint64_t h = hasher(key);
  for (char c : m.describe() + "|" + g.describe()) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << "tube-" << std::hex << h << ".txt";
  return os.str();
}

}  // namespace

std::optional<Tube> ReachContext::cache_lookup(const TubeKey& key) const {
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  if (!disk_dir_) return std::nullopt;
  const auto path = *disk_dir_ / cache_file_name(model_, *grid_, key);
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string header, model_line, grid_line;
  std::getline(in, header);
  std::getline(in, model_line);
  std::getline(in, grid_line);
  if (header != "ttlt-tube v1" || model_line != model_.describe() ||
      grid_line != grid_->describe())
    return std::nullopt;
  int kind = 0, a = 0, b = 0, slices = 0;
  in >> kind >> a >> b >> slices;
  in.ignore();
  if (kind != key.kind || a != key.a || b != key.b || slices <= 0)
    return std::nullopt;
  Tube t;
  for (int k = 0; k < slices; ++k) {
    std::string line;
    if (!std::getline(in, line)) return std::nullopt;
    t.slices.push_back(GridSet::from_rle(grid_, line));
  }
  memo_.emplace(key, t);
  return t;
}

void ReachContext::cache_store(const TubeKey& key, const Tube& tube) const {
  memo_.emplace(key, tube);
  if (!disk_dir_) return;
  const auto path = *disk_dir_ / cache_file_name(model_, *grid_, key);
  std::ofstream out(path);
  if (!out) return;
  out << "ttlt-tube v1\n" << model_.describe() << "\n" << grid_->describe() << "\n";
  out << key.kind << " " << key.a << " " << key.b << " " << tube.slices.size()
      << "\n";
  for (const auto& s : tube.slices) out << s.to_rle() << "\n";
}

// ---------------------------------------------------------------------------
// Predecessor operators
// ---------------------------------------------------------------------------

GridSet robust_pre(const ReachContext& ctx, const GridSet& s) {
  GridSet r(ctx.grid());
  const std::size_t cells = ctx.grid()->cell_count();
  const std::size_t nu = ctx.nu(), nw = ctx.nw();
  for (std::size_t c = 0; c < cells; ++c) {
    bool found = false;
    for (std::size_t ui = 0; ui < nu && !found; ++ui) {
      bool all = true;
      for (std::size_t wi = 0; wi < nw; ++wi) {
        const std::size_t idx = ctx.next_cell(c, ui, wi);
        if (idx == Grid::npos || !s.test(idx)) {
          all = false;
          break;
        }
      }
      found = all;
    }
    if (found) r.set(c);
  }
  return r;
}

GridSet adversarial_pre(const ReachContext& ctx, const GridSet& s) {
  GridSet r(ctx.grid());
  const std::size_t cells = ctx.grid()->cell_count();
  const std::size_t nu = ctx.nu(), nw = ctx.nw();
  for (std::size_t c = 0; c < cells; ++c) {
    bool every = true;
    for (std::size_t ui = 0; ui < nu && every; ++ui) {
      bool some = false;
      for (std::size_t wi = 0; wi < nw; ++wi) {
        const std::size_t idx = ctx.next_cell(c, ui, wi);
        if (idx != Grid::npos && s.test(idx)) {
          some = true;
          break;
        }
      }
      every = some;
    }
    if (every) r.set(c);
  }
  return r;
}

GridSet robust_pre(const SystemModel& m, const GridSet& s) {
  return robust_pre(ReachContext(m, s.grid()), s);
}

GridSet adversarial_pre(const SystemModel& m, const GridSet& s) {
  return adversarial_pre(ReachContext(m, s.grid()), s);
}

// ---------------------------------------------------------------------------
// Tubes
// ---------------------------------------------------------------------------

namespace {

void check_window(const StepWindow& w) {
  if (w.empty())
    throw std::invalid_argument("reach: step window empty after rounding ([" +
                                std::to_string(w.a) + "," + std::to_string(w.b) +
                                "])");
  if (w.a < 0) throw std::invalid_argument("reach: negative window start");
}

std::optional<ReachContext::TubeKey> make_key(int kind, const TargetSpec& target,
                                              const TargetSpec* constraint,
                                              StepWindow w) {
  if (!target.is_constant()) return std::nullopt;
  if (constraint && !constraint->is_constant()) return std::nullopt;
  ReachContext::TubeKey key;
  key.kind = kind;
  key.a = w.a;
  key.b = w.b;
  key.target = target.at(0).blocks();
  if (constraint) key.constraint = constraint->at(0).blocks();
  return key;
}

}  // namespace

Tube max_reach_tube(const ReachContext& ctx, const TargetSpec& target,
                    const TargetSpec& constraint, StepWindow w) {
  check_window(w);
  const auto key = make_key(0, target, &constraint, w);
  if (key)
    if (auto hit = ctx.cache_lookup(*key)) return *hit;

  const bool stationary = target.is_constant() && constraint.is_constant();
  Tube t;
  t.slices.resize(static_cast<std::size_t>(w.b) + 1, GridSet(ctx.grid()));
  t.slices[w.b] = constraint.at(w.b) & target.at(w.b);
  for (int k = w.b - 1; k >= 0; --k) {
    GridSet slice = robust_pre(ctx, t.slices[k + 1]);
    if (k >= w.a) slice |= target.at(k);
    slice &= constraint.at(k);
    const bool fixed = stationary && k >= w.a && slice == t.slices[k + 1];
    t.slices[k] = std::move(slice);
    if (fixed) {
      // Constant data and an unchanged slice: the recursion is stationary
      // down to the window start.
      for (int j = k - 1; j >= w.a; --j) t.slices[j] = t.slices[k];
      k = w.a;
    }
  }
  if (key) ctx.cache_store(*key, t);
  return t;
}

Tube min_reach_tube(const ReachContext& ctx, const TargetSpec& target,
                    StepWindow w) {
  check_window(w);
  const auto key = make_key(1, target, nullptr, w);
  if (key)
    if (auto hit = ctx.cache_lookup(*key)) return *hit;

  const bool stationary = target.is_constant();
  Tube t;
  t.slices.resize(static_cast<std::size_t>(w.b) + 1, GridSet(ctx.grid()));
  t.slices[w.b] = target.at(w.b);
  for (int k = w.b - 1; k >= 0; --k) {
    GridSet slice = adversarial_pre(ctx, t.slices[k + 1]);
    if (k >= w.a) slice |= target.at(k);
    const bool fixed = stationary && k >= w.a && slice == t.slices[k + 1];
    t.slices[k] = std::move(slice);
    if (fixed) {
      for (int j = k - 1; j >= w.a; --j) t.slices[j] = t.slices[k];
      k = w.a;
    }
  }
  if (key) ctx.cache_store(*key, t);
  return t;
}

}  // namespace ttlt
