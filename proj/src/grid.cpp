#include "ttlt/grid.hpp"

#include <bit>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ttlt {

Grid::Grid(Eigen::VectorXd lower, Eigen::VectorXd upper, std::vector<int> cells,
           std::size_t cell_budget)
    : lower_(std::move(lower)), upper_(std::move(upper)), cells_(std::move(cells)) {
  const int n = static_cast<int>(cells_.size());
  if (n == 0) throw std::invalid_argument("grid: zero dimensions");
  if (lower_.size() != n || upper_.size() != n)
    throw std::invalid_argument("grid: bound/cell dimension mismatch");
  width_.resize(n);
  stride_.resize(n);
  total_ = 1;
  for (int i = 0; i < n; ++i) {
    if (cells_[i] < 1) throw std::invalid_argument("grid: cell count < 1");
    if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i]) ||
        lower_[i] >= upper_[i])
      throw std::invalid_argument("grid: bounds must be finite with lower < upper");
    width_[i] = (upper_[i] - lower_[i]) / cells_[i];
    stride_[i] = total_;
    total_ *= static_cast<std::size_t>(cells_[i]);
    if (total_ > cell_budget)
      throw std::runtime_error("grid: cell budget exceeded (" +
                               std::to_string(total_) + " > " +
                               std::to_string(cell_budget) + ")");
  }
}

double Grid::max_width() const {
  double m = 0.0;
  for (int i = 0; i < dim(); ++i) m = std::max(m, width_[i]);
  return m;
}

double Grid::cell_diagonal() const {
  double s = 0.0;
  for (int i = 0; i < dim(); ++i) s += width_[i] * width_[i];
  return std::sqrt(s);
}

Eigen::VectorXd Grid::center(std::size_t index) const {
  Eigen::VectorXd x(dim());
  for (int i = 0; i < dim(); ++i) {
    const std::size_t coord = (index / stride_[i]) % cells_[i];
    x[i] = lower_[i] + (static_cast<double>(coord) + 0.5) * width_[i];
  }
  return x;
}

std::size_t Grid::locate(const Eigen::VectorXd& x) const {
  std::size_t index = 0;
  for (int i = 0; i < dim(); ++i) {
    if (x[i] < lower_[i] || x[i] >= upper_[i]) {
      // Allow the exact upper bound into the last cell.
      if (x[i] == upper_[i]) {
        index += stride_[i] * static_cast<std::size_t>(cells_[i] - 1);
        continue;
      }
      return npos;
    }
    auto coord = static_cast<std::ptrdiff_t>((x[i] - lower_[i]) / width_[i]);
    if (coord >= cells_[i]) coord = cells_[i] - 1;
    if (coord < 0) coord = 0;
    index += stride_[i] * static_cast<std::size_t>(coord);
  }
  return index;
}

bool Grid::in_bounds(const Eigen::VectorXd& x) const {
  for (int i = 0; i < dim(); ++i)
    if (x[i] < lower_[i] || x[i] > upper_[i]) return false;
  return true;
}

bool Grid::operator==(const Grid& o) const {
  return cells_ == o.cells_ && lower_ == o.lower_ && upper_ == o.upper_;
}

std::string Grid::describe() const {
  std::ostringstream os;
  os << "grid";
  for (int i = 0; i < dim(); ++i)
    os << " [" << lower_[i] << "," << upper_[i] << "]x" << cells_[i];
  return os.str();
}

GridPtr make_grid(Eigen::VectorXd lower, Eigen::VectorXd upper,
                  std::vector<int> cells, std::size_t cell_budget) {
  return std::make_shared<Grid>(std::move(lower), std::move(upper),
                                std::move(cells), cell_budget);
}

namespace {
constexpr std::size_t kBits = 64;
std::size_t block_count(std::size_t n) { return (n + kBits - 1) / kBits; }
}  // namespace

GridSet::GridSet(GridPtr grid) : grid_(std::move(grid)) {
  if (!grid_) throw std::invalid_argument("gridset: null grid");
  blocks_.assign(block_count(grid_->cell_count()), 0);
}

GridSet GridSet::full(GridPtr grid) {
  GridSet s(std::move(grid));
  for (auto& b : s.blocks_) b = ~std::uint64_t{0};
  s.mask_tail();
  return s;
}

void GridSet::mask_tail() {
  const std::size_t n = grid_->cell_count();
  if (n % kBits != 0 && !blocks_.empty())
    blocks_.back() &= (std::uint64_t{1} << (n % kBits)) - 1;
}

bool GridSet::test(std::size_t index) const {
  return (blocks_[index / kBits] >> (index % kBits)) & 1u;
}

void GridSet::set(std::size_t index, bool value) {
  const std::uint64_t bit = std::uint64_t{1} << (index % kBits);
  if (value)
    blocks_[index / kBits] |= bit;
  else
    blocks_[index / kBits] &= ~bit;
}

bool GridSet::contains(const Eigen::VectorXd& x) const {
  const std::size_t idx = grid_->locate(x);
  return idx != Grid::npos && test(idx);
}

std::size_t GridSet::count() const {
  std::size_t c = 0;
  for (auto b : blocks_) c += static_cast<std::size_t>(std::popcount(b));
  return c;
}

bool GridSet::none() const {
  for (auto b : blocks_)
    if (b) return false;
  return true;
}

void GridSet::check_same_grid(const GridSet& o) const {
  if (!grid_ || !o.grid_) throw std::invalid_argument("gridset: empty handle");
  if (grid_ == o.grid_) return;
  if (*grid_ != *o.grid_)
    throw std::invalid_argument("gridset: grid mismatch between operands");
}

GridSet& GridSet::operator|=(const GridSet& o) {
  check_same_grid(o);
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] |= o.blocks_[i];
  return *this;
}

GridSet& GridSet::operator&=(const GridSet& o) {
  check_same_grid(o);
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] &= o.blocks_[i];
  return *this;
}

GridSet& GridSet::operator-=(const GridSet& o) {
  check_same_grid(o);
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] &= ~o.blocks_[i];
  return *this;
}

GridSet GridSet::complement() const {
  GridSet r(grid_);
  for (std::size_t i = 0; i < blocks_.size(); ++i) r.blocks_[i] = ~blocks_[i];
  r.mask_tail();
  return r;
}

bool GridSet::operator==(const GridSet& o) const {
  check_same_grid(o);
  return blocks_ == o.blocks_;
}

bool GridSet::is_subset_of(const GridSet& o) const {
  check_same_grid(o);
  for (std::size_t i = 0; i < blocks_.size(); ++i)
    if (blocks_[i] & ~o.blocks_[i]) return false;
  return true;
}

void GridSet::for_each_member(const std::function<void(std::size_t)>& fn) const {
  for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
    std::uint64_t b = blocks_[bi];
    while (b) {
      const int bit = std::countr_zero(b);
      fn(bi * kBits + static_cast<std::size_t>(bit));
      b &= b - 1;
    }
  }
}

std::vector<std::size_t> GridSet::members() const {
  std::vector<std::size_t> v;
  v.reserve(count());
  for_each_member([&](std::size_t i) { v.push_back(i); });
  return v;
}

std::string GridSet::to_rle() const {
  std::ostringstream os;
  const std::size_t n = grid_->cell_count();
  std::size_t pos = 0;
  bool value = false;
  bool first = true;
  while (pos < n) {
    std::size_t run = 0;
    while (pos + run < n && test(pos + run) == value) ++run;
    os << (first ? "" : " ") << run;
    first = false;
    pos += run;
    value = !value;
  }
  if (first) os << n;  // empty grid edge
  return os.str();
}

GridSet GridSet::from_rle(GridPtr grid, const std::string& text) {
  GridSet s(std::move(grid));
  std::istringstream is(text);
  std::size_t pos = 0;
  bool value = false;
  std::size_t run = 0;
  while (is >> run) {
    if (pos + run > s.grid_->cell_count())
      throw std::invalid_argument("gridset rle: runs exceed cell count");
    if (value)
      for (std::size_t i = 0; i < run; ++i) s.set(pos + i);
    pos += run;
    value = !value;
  }
  if (pos != s.grid_->cell_count())
    throw std::invalid_argument("gridset rle: runs do not cover the grid");
  return s;
}

void GridSet::write_centers_csv(std::ostream& os) const {
  for_each_member([&](std::size_t idx) {
    const Eigen::VectorXd c = grid_->center(idx);
    for (int i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
    os << "\n";
  });
}

GridSet operator|(GridSet a, const GridSet& b) { return a |= b; }
GridSet operator&(GridSet a, const GridSet& b) { return a &= b; }
GridSet operator-(GridSet a, const GridSet& b) { return a -= b; }
GridSet operator~(const GridSet& a) { return a.complement(); }

std::size_t symmetric_difference_count(const GridSet& a, const GridSet& b) {
  if (a.grid() != b.grid() && *a.grid() != *b.grid())
    throw std::invalid_argument("symmetric_difference_count: grid mismatch");
  std::size_t c = 0;
  for (std::size_t i = 0; i < a.blocks().size(); ++i)
    c += static_cast<std::size_t>(std::popcount(a.blocks()[i] ^ b.blocks()[i]));
  return c;
}

GridSet from_predicate(const PredicateDef& p, const GridPtr& grid) {
  GridSet s(grid);
  const std::size_t n = grid->cell_count();
  for (std::size_t i = 0; i < n; ++i)
    if (p.eval(grid->center(i)) >= 0.0) s.set(i);
  return s;
}

}  // namespace ttlt
