#include "ttlt/system.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ttlt {

Eigen::VectorXd SystemModel::step(const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& u,
                                  const Eigen::VectorXd& w) const {
  switch (kind) {
    case Kind::Integrator:
      return x + u + w;
    case Kind::Linear:
      return A * x + B * u + w;
    case Kind::Custom:
      return custom(x, u, w);
  }
  throw std::logic_error("system: unknown kind");
}

bool SystemModel::deterministic() const {
  for (const auto& w : disturbances)
    if (w.lpNorm<Eigen::Infinity>() > 0.0) return false;
  return true;
}

std::string SystemModel::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Integrator:
      os << "integrator n=" << state_dim;
      break;
    case Kind::Linear:
      os << "linear n=" << state_dim << " A=";
      for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j) os << A(i, j) << (j + 1 < A.cols() ? " " : ";");
      os << " B=";
      for (int i = 0; i < B.rows(); ++i)
        for (int j = 0; j < B.cols(); ++j) os << B(i, j) << (j + 1 < B.cols() ? " " : ";");
      break;
    case Kind::Custom:
      os << "custom n=" << state_dim;
      break;
  }
  os << " delta=" << delta << " |U|=" << controls.size()
     << " |W|=" << disturbances.size();
  return os.str();
}

namespace {
void validate(const SystemModel& m) {
  if (m.state_dim <= 0) throw std::invalid_argument("system: state_dim must be > 0");
  if (m.controls.empty()) throw std::invalid_argument("system: empty control sample set");
  if (m.disturbances.empty())
    throw std::invalid_argument("system: empty disturbance sample set");
  if (m.delta <= 0.0) throw std::invalid_argument("system: delta must be > 0");
}
}  // namespace

SystemModel SystemModel::integrator(int dim, std::vector<Eigen::VectorXd> u_samples,
                                    std::vector<Eigen::VectorXd> w_samples,
                                    double delta) {
  SystemModel m;
  m.kind = Kind::Integrator;
  m.state_dim = dim;
  m.controls = std::move(u_samples);
  m.disturbances = std::move(w_samples);
  m.delta = delta;
  validate(m);
  return m;
}

SystemModel SystemModel::linear(Eigen::MatrixXd A, Eigen::MatrixXd B,
                                std::vector<Eigen::VectorXd> u_samples,
                                std::vector<Eigen::VectorXd> w_samples,
                                double delta) {
  SystemModel m;
  m.kind = Kind::Linear;
  m.state_dim = static_cast<int>(A.rows());
  if (A.rows() != A.cols()) throw std::invalid_argument("system: A must be square");
  if (B.rows() != A.rows()) throw std::invalid_argument("system: B row mismatch");
  m.A = std::move(A);
  m.B = std::move(B);
  m.controls = std::move(u_samples);
  m.disturbances = std::move(w_samples);
  m.delta = delta;
  validate(m);
  return m;
}

SystemModel SystemModel::custom_map(
    int dim,
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&,
                                  const Eigen::VectorXd&)>
        f,
    std::vector<Eigen::VectorXd> u_samples, std::vector<Eigen::VectorXd> w_samples,
    double delta) {
  SystemModel m;
  m.kind = Kind::Custom;
  m.state_dim = dim;
  m.custom = std::move(f);
  m.controls = std::move(u_samples);
  m.disturbances = std::move(w_samples);
  m.delta = delta;
  validate(m);
  return m;
}

std::vector<Eigen::VectorXd> sample_box(const Eigen::VectorXd& lo,
                                        const Eigen::VectorXd& hi,
                                        const std::vector<int>& counts) {
  const int n = static_cast<int>(counts.size());
  if (lo.size() != n || hi.size() != n)
    throw std::invalid_argument("sample_box: dimension mismatch");
  std::vector<Eigen::VectorXd> out;
  std::size_t total = 1;
  for (int c : counts) {
    if (c < 1) throw std::invalid_argument("sample_box: count < 1");
    total *= static_cast<std::size_t>(c);
  }
  out.reserve(total);
  std::vector<int> idx(n, 0);
  for (std::size_t t = 0; t < total; ++t) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i)
      v[i] = counts[i] == 1 ? 0.5 * (lo[i] + hi[i])
                            : lo[i] + (hi[i] - lo[i]) * idx[i] / (counts[i] - 1);
    out.push_back(std::move(v));
    for (int i = 0; i < n; ++i) {
      if (++idx[i] < counts[i]) break;
      idx[i] = 0;
    }
  }
  return out;
}

std::vector<Eigen::VectorXd> box_vertices(const Eigen::VectorXd& lo,
                                          const Eigen::VectorXd& hi) {
  const int n = static_cast<int>(lo.size());
  std::vector<Eigen::VectorXd> out;
  out.reserve(std::size_t{1} << n);
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = (mask >> i) & 1 ? hi[i] : lo[i];
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<Eigen::VectorXd> sample_ball(int dim, double radius, int boundary,
                                         int rings) {
  if (dim < 1) throw std::invalid_argument("sample_ball: dim < 1");
  if (radius < 0.0) throw std::invalid_argument("sample_ball: negative radius");
  if (rings < 1) rings = 1;
  std::vector<Eigen::VectorXd> out;
  out.push_back(Eigen::VectorXd::Zero(dim));
  for (int r = 1; r <= rings; ++r) {
    const double rho = radius * r / rings;
    if (dim == 1) {
      Eigen::VectorXd v(1);
      v[0] = rho;
      out.push_back(v);
      v[0] = -rho;
      out.push_back(v);
    } else if (dim == 2) {
      for (int i = 0; i < boundary; ++i) {
        const double th = 2.0 * M_PI * i / boundary;
        Eigen::VectorXd v(2);
        v[0] = rho * std::cos(th);
        v[1] = rho * std::sin(th);
        out.push_back(std::move(v));
      }
    } else {
      for (int i = 0; i < dim; ++i) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
        v[i] = rho;
        out.push_back(v);
        v[i] = -rho;
        out.push_back(std::move(v));
      }
    }
  }
  return out;
}

std::vector<char> robust_one_step_controls(const SystemModel& m,
                                           const Eigen::VectorXd& x,
                                           const GridSet& target) {
  std::vector<char> mask(m.controls.size(), 0);
  for (std::size_t ui = 0; ui < m.controls.size(); ++ui) {
    bool ok = true;
    for (const auto& w : m.disturbances) {
      if (!target.contains(m.step(x, m.controls[ui], w))) {
        ok = false;
        break;
      }
    }
    mask[ui] = ok ? 1 : 0;
  }
  return mask;
}

// ---------------------------------------------------------------------------
// DisturbanceSource
// ---------------------------------------------------------------------------

DisturbanceSource DisturbanceSource::zero(int dim) {
  DisturbanceSource d;
  d.mode_ = Mode::Zero;
  d.dim_ = dim;
  return d;
}

DisturbanceSource DisturbanceSource::uniform_box(Eigen::VectorXd lo,
                                                 Eigen::VectorXd hi,
                                                 std::uint64_t seed) {
  DisturbanceSource d;
  d.mode_ = Mode::UniformBox;
  d.dim_ = static_cast<int>(lo.size());
  d.lo_ = std::move(lo);
  d.hi_ = std::move(hi);
  d.rng_.seed(seed);
  return d;
}

DisturbanceSource DisturbanceSource::uniform_ball(int dim, double radius,
                                                  std::uint64_t seed) {
  DisturbanceSource d;
  d.mode_ = Mode::UniformBall;
  d.dim_ = dim;
  d.radius_ = radius;
  d.rng_.seed(seed);
  return d;
}

DisturbanceSource DisturbanceSource::extreme(std::vector<Eigen::VectorXd> vertices) {
  if (vertices.empty())
    throw std::invalid_argument("disturbance: empty extreme-point list");
  DisturbanceSource d;
  d.mode_ = Mode::Extreme;
  d.dim_ = static_cast<int>(vertices.front().size());
  d.list_ = std::move(vertices);
  return d;
}

DisturbanceSource DisturbanceSource::replay(std::vector<Eigen::VectorXd> samples) {
  if (samples.empty()) throw std::invalid_argument("disturbance: empty replay");
  DisturbanceSource d;
  d.mode_ = Mode::Replay;
  d.dim_ = static_cast<int>(samples.front().size());
  d.list_ = std::move(samples);
  return d;
}

double DisturbanceSource::unit() {
  // Mapping the engine output manually keeps streams identical across
  // standard library implementations.
  return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

Eigen::VectorXd DisturbanceSource::next() {
  switch (mode_) {
    case Mode::Zero:
      return Eigen::VectorXd::Zero(dim_);
    case Mode::UniformBox: {
      Eigen::VectorXd w(dim_);
      for (int i = 0; i < dim_; ++i) w[i] = lo_[i] + (hi_[i] - lo_[i]) * unit();
      return w;
    }
    case Mode::UniformBall: {
      Eigen::VectorXd w(dim_);
      for (int tries = 0; tries < 64; ++tries) {
        for (int i = 0; i < dim_; ++i) w[i] = radius_ * (2.0 * unit() - 1.0);
        if (w.norm() <= radius_) return w;
      }
      return Eigen::VectorXd::Zero(dim_);
    }
    case Mode::Extreme:
    case Mode::Replay: {
      const Eigen::VectorXd& w = list_[cursor_ % list_.size()];
      ++cursor_;
      return w;
    }
  }
  throw std::logic_error("disturbance: unknown mode");
}

}  // namespace ttlt
