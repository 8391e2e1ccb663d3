#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "ttlt/formula.hpp"
#include "ttlt/grid.hpp"
#include "ttlt/system.hpp"

namespace ttlt {

/// Step-indexed sequence of grid sets, slices[k] for k = 0..K.
struct Tube {
  std::vector<GridSet> slices;

  Tube() = default;
  explicit Tube(std::vector<GridSet> s) : slices(std::move(s)) {}
  static Tube constant(GridSet s) { return Tube({std::move(s)}); }

  int K() const { return static_cast<int>(slices.size()) - 1; }
  const GridSet& at(int k) const;
  const GridPtr& grid() const { return slices.front().grid(); }
  bool valid() const { return !slices.empty(); }
};

/// Target or constraint of a reach computation: a constant set or a tube
/// sampled slice-by-slice.
class TargetSpec {
 public:
  TargetSpec(GridSet constant) : value_(std::move(constant)) {}
  TargetSpec(Tube tube) : value_(std::move(tube)) {}

  bool is_constant() const { return std::holds_alternative<GridSet>(value_); }
  const GridSet& at(int k) const;
  const GridPtr& grid() const;

 private:
  std::variant<GridSet, Tube> value_;
};

/// Precomputed one-step successor structure for a (model, grid) pair:
/// next_cell(c, ui, wi) is the cell index that f(center(c), U_s[ui], W_s[wi])
/// falls into, or Grid::npos when it leaves the working space. Backed by a
/// dense table when it fits the entry budget, computed on the fly otherwise.
/// Also memoizes finished tubes (in memory and, optionally, on disk) keyed by
/// (kind, target, constraint, window) so re-runs of tree construction are
/// incremental.
class ReachContext {
 public:
  static constexpr std::size_t kDefaultTableBudget = std::size_t{1} << 26;

  ReachContext(SystemModel model, GridPtr grid,
               std::size_t table_budget_entries = kDefaultTableBudget);

  const SystemModel& model() const { return model_; }
  const GridPtr& grid() const { return grid_; }
  std::size_t nu() const { return model_.controls.size(); }
  std::size_t nw() const { return model_.disturbances.size(); }

  std::size_t next_cell(std::size_t cell, std::size_t ui, std::size_t wi) const;

  /// Enable the on-disk tube cache under the given directory.
  void set_disk_cache(std::filesystem::path dir);

  struct TubeKey {
    int kind = 0;  // 0 = max, 1 = min
    int a = 0, b = 0;
    std::vector<std::uint64_t> target, constraint;
    bool operator==(const TubeKey&) const = default;
  };
  struct TubeKeyHash {
    std::size_t operator()(const TubeKey& k) const;
  };

  std::optional<Tube> cache_lookup(const TubeKey& key) const;
  void cache_store(const TubeKey& key, const Tube& tube) const;

 private:
  void build();

  SystemModel model_;
  GridPtr grid_;
  bool tabulated_ = false;
  std::vector<std::int32_t> table_;                  // cells * nu * nw
  std::vector<Eigen::VectorXd> drift_;               // per cell: A*center or center
  std::vector<Eigen::VectorXd> offset_;              // per (ui,wi): B*u + w or u + w
  std::optional<std::filesystem::path> disk_dir_;
  mutable std::unordered_map<TubeKey, Tube, TubeKeyHash> memo_;
};

/// One-step robust predecessor: cells c with some u in U_s such that
/// f(center(c), u, w) lands in s for every w in W_s.
GridSet robust_pre(const ReachContext& ctx, const GridSet& s);
GridSet robust_pre(const SystemModel& m, const GridSet& s);

/// One-step adversarial predecessor: cells c such that for every u in U_s
/// some w in W_s drives f(center(c), u, w) into s.
GridSet adversarial_pre(const ReachContext& ctx, const GridSet& s);
GridSet adversarial_pre(const SystemModel& m, const GridSet& s);

/// Maximal reachable tube over the step window [w.a, w.b]:
///   T_b = Con(b) ∩ Tgt(b)
///   T_k = Con(k) ∩ [ (Tgt(k) if k >= a else ∅) ∪ robust_pre(T_{k+1}) ]
/// The hitting instant itself must satisfy the constraint (the quantified
/// constraint window is closed on the right).
Tube max_reach_tube(const ReachContext& ctx, const TargetSpec& target,
                    const TargetSpec& constraint, StepWindow w);

/// Minimal reachable tube over [w.a, w.b] (no constraint argument):
///   T_b = Tgt(b)
///   T_k = (Tgt(k) if k >= a else ∅) ∪ adversarial_pre(T_{k+1})
Tube min_reach_tube(const ReachContext& ctx, const TargetSpec& target,
                    StepWindow w);

}  // namespace ttlt
