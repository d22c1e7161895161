#include "fxtflow/dynamics.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <random>

namespace fxt {
namespace {

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Vector direction_vector(DisturbanceModel::Direction dir, const Vector& x, double t,
                        const Objective& obj, std::uint64_t seed) {
  const int n = static_cast<int>(x.size());
  Vector u = Vector::Zero(n);
  switch (dir) {
    case DisturbanceModel::Direction::Rotating:
      if (n == 1) {
        u[0] = std::sin(t);
      } else {
        u[0] = std::sin(t);
        u[1] = std::cos(t);
      }
      break;
    case DisturbanceModel::Direction::Constant:
      u.setConstant(1.0 / std::sqrt(static_cast<double>(n)));
      break;
    case DisturbanceModel::Direction::AlongGradient: {
      const Vector g = obj.grad(x);
      const double nrm = g.norm();
      if (nrm > 0.0) u = g / nrm;
      break;
    }
    case DisturbanceModel::Direction::Random: {
      std::mt19937_64 rng(splitmix(seed ^ std::bit_cast<std::uint64_t>(t)));
      std::normal_distribution<double> normal(0.0, 1.0);
      for (int i = 0; i < n; ++i) u[i] = normal(rng);
      const double nrm = u.norm();
      if (nrm > 0.0) u /= nrm;
      break;
    }
  }
  return u;
}

long long step_count(double t_max, double dt) {
  const double ratio = t_max / dt;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio))
    return static_cast<long long>(nearest);
  return static_cast<long long>(std::ceil(ratio));
}

}  // namespace

const char* to_string(DisturbanceModel::Kind kind) {
  switch (kind) {
    case DisturbanceModel::Kind::None: return "none";
    case DisturbanceModel::Kind::Sinusoid: return "sinusoid";
    case DisturbanceModel::Kind::StateScaledPlusBounded: return "state_scaled_plus_bounded";
    case DisturbanceModel::Kind::Custom: return "custom";
  }
  return "unknown";
}

DisturbanceModel DisturbanceModel::none() { return {}; }

DisturbanceModel DisturbanceModel::sinusoid(Vector amplitude, double frequency) {
  require(amplitude.size() > 0 && amplitude.allFinite(), ErrorKind::Validation,
          "sinusoid amplitude must be a finite nonempty vector");
  require(std::isfinite(frequency), ErrorKind::Validation, "sinusoid frequency must be finite");
  DisturbanceModel d;
  d.kind = Kind::Sinusoid;
  d.dbar = amplitude.norm();
  d.amplitude = std::move(amplitude);
  d.frequency = frequency;
  return d;
}

DisturbanceModel DisturbanceModel::state_scaled_plus_bounded(double epsilon, double dbar,
                                                             Direction direction) {
  require(epsilon >= 0.0 && dbar >= 0.0, ErrorKind::Validation,
          "disturbance envelope parameters must be nonnegative");
  DisturbanceModel d;
  d.kind = Kind::StateScaledPlusBounded;
  d.epsilon = epsilon;
  d.dbar = dbar;
  d.direction = direction;
  return d;
}

DisturbanceModel DisturbanceModel::custom_fn(Fn fn, double epsilon, double dbar) {
  require(static_cast<bool>(fn), ErrorKind::Validation, "custom disturbance needs a callable");
  require(epsilon >= 0.0 && dbar >= 0.0, ErrorKind::Validation,
          "disturbance envelope parameters must be nonnegative");
  DisturbanceModel d;
  d.kind = Kind::Custom;
  d.custom = std::move(fn);
  d.epsilon = epsilon;
  d.dbar = dbar;
  return d;
}

Vector DisturbanceModel::eval(const Vector& x, double t, const Objective& obj,
                              std::uint64_t seed) const {
  switch (kind) {
    case Kind::None:
      return Vector::Zero(x.size());
    case Kind::Sinusoid:
      require(amplitude.size() == x.size(), ErrorKind::Configuration,
              "sinusoid amplitude length does not match the state");
      return amplitude * std::sin(frequency * t);
    case Kind::StateScaledPlusBounded: {
      require(obj.has_minimizer_projection(), ErrorKind::Configuration,
              "state-scaled disturbance needs the objective's minimizer projection");
      const double dist = (x - obj.minimizer_projection(x)).norm();
      return direction_vector(direction, x, t, obj, seed) * (epsilon * dist + dbar);
    }
    case Kind::Custom:
      return custom(x, t);
  }
  return Vector::Zero(x.size());
}

void IntegratorConfig::validate() const {
  require(std::isfinite(dt) && dt > 0.0, ErrorKind::Validation, "dt must be positive");
  require(std::isfinite(t_max) && t_max > 0.0, ErrorKind::Validation, "t_max must be positive");
  require(dt <= t_max, ErrorKind::Validation, "dt must not exceed t_max");
  require(settle_tol > 0.0, ErrorKind::Validation, "settle_tol must be positive");
  require(chatter_regularization >= 0.0, ErrorKind::Validation,
          "chatter_regularization must be nonnegative");
  require(record_stride >= 1, ErrorKind::Validation, "record_stride must be positive");
  require(record_stride * dt <= t_max * (1.0 + 1e-12), ErrorKind::Validation,
          "record_stride * dt must not exceed t_max");
}

Trajectory integrate_monitored(const RhsFn& rhs, const Vector& x0, const MonitorFn& monitor,
                               const DisturbanceModel::Fn& disturbance,
                               const IntegratorConfig& cfg, const ResidualFn& residual) {
  cfg.validate();
  require(x0.size() > 0 && x0.allFinite(), ErrorKind::Validation,
          "initial state must be finite and nonempty");
  require(static_cast<bool>(rhs) && static_cast<bool>(monitor), ErrorKind::Validation,
          "integrator needs a right-hand side and a monitor");

  const long long steps = step_count(cfg.t_max, cfg.dt);
  Trajectory traj;
  traj.times.reserve(static_cast<std::size_t>(steps / cfg.record_stride + 2));

  Vector x = x0;
  auto record = [&](double t) {
    const MonitorSample s = monitor(x, t);
    traj.times.push_back(t);
    traj.states.push_back(x);
    traj.costs.push_back(s.cost);
    traj.grad_norms.push_back(s.grad_norm);
    if (!traj.settling_time) {
      const double r = residual ? residual(x, t) : s.grad_norm;
      if (r <= cfg.settle_tol) traj.settling_time = t;
    }
  };

  record(0.0);
  for (long long k = 0; k < steps; ++k) {
    if (traj.settling_time && !disturbance && cfg.stop_when_settled) break;
    const double t = static_cast<double>(k) * cfg.dt;
    Vector v = rhs(x, t, cfg.chatter_regularization);
    if (disturbance) v += disturbance(x, t);
    x += cfg.dt * v;
    const double t_next = static_cast<double>(k + 1) * cfg.dt;
    if (!x.allFinite()) {
      throw DivergenceError(t_next, "divergence: state became non-finite at t=" +
                                        std::to_string(t_next));
    }
    if ((k + 1) % cfg.record_stride == 0 || k + 1 == steps) record(t_next);
  }
  // Early exit may leave the last step unrecorded; it was recorded at settling.
  return traj;
}

Trajectory integrate(const RhsFn& rhs, const Vector& x0, const Objective& obj,
                     const DisturbanceModel& dist, const IntegratorConfig& cfg,
                     const ResidualFn& residual) {
  obj.validate();
  require(x0.size() == obj.dim, ErrorKind::Validation,
          "initial state dimension does not match the objective");
  if (dist.needs_minimizer()) {
    require(obj.has_minimizer_projection(), ErrorKind::Configuration,
            "state-scaled disturbance needs the objective's minimizer projection");
  }
  MonitorFn monitor = [&obj](const Vector& x, double) {
    return MonitorSample{obj.f(x), obj.grad(x).norm()};
  };
  DisturbanceModel::Fn d;
  if (dist.active()) {
    const std::uint64_t seed = cfg.seed;
    d = [&dist, &obj, seed](const Vector& x, double t) { return dist.eval(x, t, obj, seed); };
  }
  return integrate_monitored(rhs, x0, monitor, d, cfg, residual);
}

std::optional<double> measure_settling(const Trajectory& traj, double tol) {
  require(!traj.empty(), ErrorKind::Validation, "trajectory is empty");
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (traj.grad_norms[i] <= tol) return traj.times[i];
  }
  return std::nullopt;
}

std::optional<double> settled_after(const std::vector<double>& times,
                                    const std::vector<double>& values, double tol) {
  require(times.size() == values.size() && !times.empty(), ErrorKind::Validation,
          "times and values must be nonempty and of equal length");
  if (values.back() > tol) return std::nullopt;
  std::size_t i = values.size();
  while (i > 0 && values[i - 1] <= tol) --i;
  return times[i];
}

RobustCondition robust_condition_check(double sigma, double rho, double q,
                                       const DisturbanceModel& dist, double mu,
                                       double safety_multiplier) {
  require(mu > 0.0, ErrorKind::Validation, "mu must be positive");
  require(q > 1.0, ErrorKind::Validation, "q must exceed 1");
  require(safety_multiplier > 0.0, ErrorKind::Validation, "safety multiplier must be positive");
  const double vanish = safety_multiplier * dist.epsilon / (2.0 * std::sqrt(mu));
  RobustCondition c;
  c.k1 = sigma - dist.dbar - vanish;
  c.k2 = rho - vanish;
  c.passed = c.k1 > 0.0 && c.k2 >= 0.0;
  c.marginal = c.passed && c.k2 == 0.0;
  if (c.passed && c.k2 > 0.0) {
    c.bound = 1.0 / (mu * c.k1) + 1.0 / (mu * c.k2 * (q - 1.0));
  } else {
    c.bound = std::numeric_limits<double>::infinity();
  }
  return c;
}

}  // namespace fxt
