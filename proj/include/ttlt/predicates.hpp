#pragma once

#include <limits>
#include <map>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ttlt {

/// Atomic predicate mu, defined through a predicate function g_mu with
/// mu true iff g_mu(x) >= 0. Three shapes cover the scenarios this library
/// targets and rasterize exactly onto axis-aligned grids:
///   halfspace  g'x + c >= 0
///   ball       r - ||x - center|| >= 0
///   box        lo <= x <= hi componentwise (+/-inf bounds allowed)
struct PredicateDef {
  enum class Shape { Halfspace, Ball, Box };

  Shape shape = Shape::Box;
  Eigen::VectorXd normal;  // halfspace
  double offset = 0.0;     // halfspace
  Eigen::VectorXd center;  // ball
  double radius = 0.0;     // ball
  Eigen::VectorXd lo, hi;  // box

  static PredicateDef halfspace(Eigen::VectorXd g, double c) {
    PredicateDef p;
    p.shape = Shape::Halfspace;
    p.normal = std::move(g);
    p.offset = c;
    return p;
  }

  static PredicateDef ball(Eigen::VectorXd c, double r) {
    if (r < 0.0) throw std::invalid_argument("predicate ball: negative radius");
    PredicateDef p;
    p.shape = Shape::Ball;
    p.center = std::move(c);
    p.radius = r;
    return p;
  }

  static PredicateDef box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
    if (lo.size() != hi.size())
      throw std::invalid_argument("predicate box: dimension mismatch");
    for (Eigen::Index i = 0; i < lo.size(); ++i)
      if (lo[i] > hi[i]) throw std::invalid_argument("predicate box: lo > hi");
    PredicateDef p;
    p.shape = Shape::Box;
    p.lo = std::move(lo);
    p.hi = std::move(hi);
    return p;
  }

  /// g_mu(x). Total on R^n; only the sign is semantically meaningful.
  double eval(const Eigen::VectorXd& x) const {
    switch (shape) {
      case Shape::Halfspace:
        return normal.dot(x) + offset;
      case Shape::Ball:
        return radius - (x - center).norm();
      case Shape::Box: {
        double m = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < lo.size(); ++i) {
          if (std::isfinite(lo[i])) m = std::min(m, x[i] - lo[i]);
          if (std::isfinite(hi[i])) m = std::min(m, hi[i] - x[i]);
        }
        return std::isfinite(m) ? m : 1.0;  // unbounded box: everything inside
      }
    }
    return 0.0;
  }

  bool contains(const Eigen::VectorXd& x) const { return eval(x) >= 0.0; }
};

using PredicateTable = std::map<std::string, PredicateDef>;

}  // namespace ttlt
