#pragma once

#include "fxtflow/core.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace fxt {

/// Additive perturbation d(x,t) with envelope |d| <= epsilon |x - [x]*| + dbar.
struct DisturbanceModel {
  enum class Kind { None, Sinusoid, StateScaledPlusBounded, Custom };
  // Unit direction used by StateScaledPlusBounded.
  enum class Direction {
    Rotating,       // (sin t, cos t, 0, ...) ; sin t for n = 1
    Constant,       // ones / sqrt(n)
    AlongGradient,  // grad f / |grad f|, pushes uphill
    Random,         // uniform on the sphere, seeded per step
  };
  using Fn = std::function<Vector(const Vector& x, double t)>;

  Kind kind = Kind::None;
  Vector amplitude;         // sinusoid: d = amplitude * sin(frequency t)
  double frequency = 1.0;
  double epsilon = 0.0;
  double dbar = 0.0;
  Direction direction = Direction::Rotating;
  Fn custom;

  static DisturbanceModel none();
  static DisturbanceModel sinusoid(Vector amplitude, double frequency = 1.0);
  static DisturbanceModel state_scaled_plus_bounded(double epsilon, double dbar,
                                                    Direction direction = Direction::Rotating);
  /// A user callable; epsilon and dbar are its claimed envelope.
  static DisturbanceModel custom_fn(Fn fn, double epsilon, double dbar);

  bool active() const { return kind != Kind::None; }
  bool needs_minimizer() const { return kind == Kind::StateScaledPlusBounded; }

  /// d(x,t). StateScaledPlusBounded needs obj.minimizer_projection.
  Vector eval(const Vector& x, double t, const Objective& obj, std::uint64_t seed = 0) const;
};

const char* to_string(DisturbanceModel::Kind kind);

struct IntegratorConfig {
  double dt = 1e-4;
  double t_max = 10.0;
  double settle_tol = 1e-6;
  double chatter_regularization = 0.0;
  int record_stride = 1;
  std::uint64_t seed = 0;
  bool stop_when_settled = true;  // only honoured without disturbance

  void validate() const;
};

/// Flow right-hand side; reg is the chatter regularization to apply.
using RhsFn = std::function<Vector(const Vector& x, double t, double reg)>;
/// Scalar distance-to-solution metric used for settling detection.
using ResidualFn = std::function<double(const Vector& x, double t)>;

struct MonitorSample {
  double cost = 0.0;
  double grad_norm = 0.0;
};
using MonitorFn = std::function<MonitorSample(const Vector& x, double t)>;

/// Forward Euler: x <- x + dt (rhs(x,t) + d(x,t)). Samples every
/// record_stride steps and at the last step. settling_time is the first
/// recorded time with residual <= settle_tol, where the residual defaults
/// to |grad f(x)|.
Trajectory integrate(const RhsFn& rhs, const Vector& x0, const Objective& obj,
                     const DisturbanceModel& dist, const IntegratorConfig& cfg,
                     const ResidualFn& residual = {});

/// Same loop with explicit monitor and disturbance callables, for objectives
/// that depend on time.
Trajectory integrate_monitored(const RhsFn& rhs, const Vector& x0, const MonitorFn& monitor,
                               const DisturbanceModel::Fn& disturbance,
                               const IntegratorConfig& cfg, const ResidualFn& residual);

/// First sampled time with grad_norm <= tol.
std::optional<double> measure_settling(const Trajectory& traj, double tol);

/// First sampled time after which values stay <= tol until the end.
std::optional<double> settled_after(const std::vector<double>& times,
                                    const std::vector<double>& values, double tol);

struct RobustCondition {
  double k1 = 0.0;
  double k2 = 0.0;
  double bound = 0.0;  // +inf when k2 == 0 or the condition fails
  bool passed = false;
  bool marginal = false;
};

/// k1 = sigma - dbar - m eps/(2 sqrt mu), k2 = rho - m eps/(2 sqrt mu),
/// T = 1/(mu k1) + 1/(mu k2 (q-1)).
RobustCondition robust_condition_check(double sigma, double rho, double q,
                                       const DisturbanceModel& dist, double mu,
                                       double safety_multiplier = 1.0);

}  // namespace fxt
