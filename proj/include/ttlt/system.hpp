#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ttlt/grid.hpp"

namespace ttlt {

/// Discrete-time uncertain dynamics x_{k+1} = f(x_k, u_k, w_k) with finite
/// sample sets U_s and W_s standing in for the compact sets U and W.
/// For dynamics affine in w with a box W, taking W_s = vertices of W makes
/// robust one-step checks exact; for other shapes W_s is an approximation
/// whose density is a modelling choice.
struct SystemModel {
  enum class Kind { Linear, Integrator, Custom };

  Kind kind = Kind::Integrator;
  int state_dim = 0;
  Eigen::MatrixXd A, B;  // Linear: x' = A x + B u + w
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&,
                                const Eigen::VectorXd&)>
      custom;

  std::vector<Eigen::VectorXd> controls;      // U_s
  std::vector<Eigen::VectorXd> disturbances;  // W_s
  double delta = 1.0;

  Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                       const Eigen::VectorXd& w) const;

  /// True when every disturbance sample is (numerically) zero.
  bool deterministic() const;

  std::string describe() const;

  static SystemModel integrator(int dim, std::vector<Eigen::VectorXd> u_samples,
                                std::vector<Eigen::VectorXd> w_samples,
                                double delta = 1.0);
  static SystemModel linear(Eigen::MatrixXd A, Eigen::MatrixXd B,
                            std::vector<Eigen::VectorXd> u_samples,
                            std::vector<Eigen::VectorXd> w_samples,
                            double delta = 1.0);
  static SystemModel custom_map(
      int dim,
      std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&,
                                    const Eigen::VectorXd&)>
          f,
      std::vector<Eigen::VectorXd> u_samples,
      std::vector<Eigen::VectorXd> w_samples, double delta = 1.0);
};

/// Regular lattice of per-axis counts over a box; counts of 1 sample the
/// midpoint.
std::vector<Eigen::VectorXd> sample_box(const Eigen::VectorXd& lo,
                                        const Eigen::VectorXd& hi,
                                        const std::vector<int>& counts);

/// The 2^n vertices of a box.
std::vector<Eigen::VectorXd> box_vertices(const Eigen::VectorXd& lo,
                                          const Eigen::VectorXd& hi);

/// Samples of the centered norm ball of the given radius: the center plus
/// `boundary` directions per ring at radii radius * i / rings.
/// dim 1 uses {-r, 0, +r}; dim 2 uses evenly spaced angles; dim >= 3 uses
/// axis-aligned extremes on each ring.
std::vector<Eigen::VectorXd> sample_ball(int dim, double radius, int boundary,
                                         int rings = 1);

/// All u in U_s that land in `target` for every sampled disturbance.
/// Returned as a mask over U_s indices.
std::vector<char> robust_one_step_controls(const SystemModel& m,
                                           const Eigen::VectorXd& x,
                                           const GridSet& target);

/// Admissible disturbance signal generator. Every emitted w is an element of
/// W (clamped to the sample hull for the uniform modes).
class DisturbanceSource {
 public:
  enum class Mode { Zero, UniformBox, UniformBall, Extreme, Replay };

  static DisturbanceSource zero(int dim);
  static DisturbanceSource uniform_box(Eigen::VectorXd lo, Eigen::VectorXd hi,
                                       std::uint64_t seed);
  static DisturbanceSource uniform_ball(int dim, double radius,
                                        std::uint64_t seed);
  /// Cycles through the vertex/extreme-point list.
  static DisturbanceSource extreme(std::vector<Eigen::VectorXd> vertices);
  static DisturbanceSource replay(std::vector<Eigen::VectorXd> samples);

  Eigen::VectorXd next();
  Mode mode() const { return mode_; }

 private:
  DisturbanceSource() = default;
  double unit();  // deterministic U[0,1) from the engine's raw output

  Mode mode_ = Mode::Zero;
  int dim_ = 0;
  Eigen::VectorXd lo_, hi_;
  double radius_ = 0.0;
  std::vector<Eigen::VectorXd> list_;
  std::size_t cursor_ = 0;
  std::mt19937_64 rng_;
};

}  // namespace ttlt
