#include <doctest.h>

#include "ttlt/grid.hpp"

using namespace ttlt;

TEST_CASE("grid basics") {
  auto g = make_grid(Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1), {4, 4});
  CHECK(g->cell_count() == 16);
  CHECK(g->width(0) == doctest::Approx(0.5));
  const auto idx = g->locate(Eigen::Vector2d(0.1, 0.1));
  REQUIRE(idx != Grid::npos);
  CHECK(g->center(idx).isApprox(Eigen::Vector2d(0.25, 0.25)));
  CHECK(g->locate(Eigen::Vector2d(2.0, 0.0)) == Grid::npos);
}
