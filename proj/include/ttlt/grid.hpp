#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ttlt/predicates.hpp"

namespace ttlt {

/// Uniform rectangular discretization of the working space X.
/// Cells are half-open boxes [lo + i*w, lo + (i+1)*w) per axis; each cell is
/// represented by its center.
class Grid {
 public:
  Grid(Eigen::VectorXd lower, Eigen::VectorXd upper, std::vector<int> cells,
       std::size_t cell_budget = kDefaultCellBudget);

  int dim() const { return static_cast<int>(cells_.size()); }
  std::size_t cell_count() const { return total_; }
  int cells(int axis) const { return cells_[axis]; }
  double lower(int axis) const { return lower_[axis]; }
  double upper(int axis) const { return upper_[axis]; }
  double width(int axis) const { return width_[axis]; }
  double max_width() const;
  double cell_diagonal() const;

  Eigen::VectorXd center(std::size_t index) const;
  /// Index of the cell containing x, or npos when x is outside the bounds.
  std::size_t locate(const Eigen::VectorXd& x) const;
  bool in_bounds(const Eigen::VectorXd& x) const;

  bool operator==(const Grid& o) const;
  bool operator!=(const Grid& o) const { return !(*this == o); }

  std::string describe() const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  static constexpr std::size_t kDefaultCellBudget = std::size_t{1} << 26;

 private:
  Eigen::VectorXd lower_, upper_, width_;
  std::vector<int> cells_;
  std::vector<std::size_t> stride_;
  std::size_t total_ = 0;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(Eigen::VectorXd lower, Eigen::VectorXd upper,
                  std::vector<int> cells,
                  std::size_t cell_budget = Grid::kDefaultCellBudget);

/// Finite subset of a grid, stored as a packed bitset over cell indices.
/// Immutable-by-convention value type; all binary operations require both
/// operands to live on the same grid. Complement is relative to the working
/// space X, not R^n.
class GridSet {
 public:
  GridSet() = default;
  explicit GridSet(GridPtr grid);  // empty set

  static GridSet empty(GridPtr grid) { return GridSet(std::move(grid)); }
  static GridSet full(GridPtr grid);

  const GridPtr& grid() const { return grid_; }
  bool valid() const { return grid_ != nullptr; }

  bool test(std::size_t index) const;
  void set(std::size_t index, bool value = true);
  /// Membership of the cell containing x; false outside grid bounds.
  bool contains(const Eigen::VectorXd& x) const;

  std::size_t count() const;
  bool none() const;
  bool any() const { return !none(); }

  GridSet& operator|=(const GridSet& o);
  GridSet& operator&=(const GridSet& o);
  GridSet& operator-=(const GridSet& o);
  GridSet complement() const;

  bool operator==(const GridSet& o) const;
  bool operator!=(const GridSet& o) const { return !(*this == o); }
  bool is_subset_of(const GridSet& o) const;

  void for_each_member(const std::function<void(std::size_t)>& fn) const;
  std::vector<std::size_t> members() const;

  /// Run-length encoding "run0 run1 run2 ..." alternating cleared/set runs,
  /// starting with the cleared run (possibly 0).
  std::string to_rle() const;
  static GridSet from_rle(GridPtr grid, const std::string& text);

  /// CSV of member cell centers, one row per cell: c0,c1,...
  void write_centers_csv(std::ostream& os) const;

  const std::vector<std::uint64_t>& blocks() const { return blocks_; }

 private:
  void check_same_grid(const GridSet& o) const;
  void mask_tail();

  GridPtr grid_;
  std::vector<std::uint64_t> blocks_;
};

GridSet operator|(GridSet a, const GridSet& b);
GridSet operator&(GridSet a, const GridSet& b);
GridSet operator-(GridSet a, const GridSet& b);
GridSet operator~(const GridSet& a);

std::size_t symmetric_difference_count(const GridSet& a, const GridSet& b);

/// Rasterize a predicate: a cell belongs to the set iff g_mu(center) >= 0.
GridSet from_predicate(const PredicateDef& p, const GridPtr& grid);

}  // namespace ttlt
