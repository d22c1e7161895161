#pragma once

#include "fxtflow/error.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <vector>

namespace fxt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

using ScalarFn = std::function<double(const Vector&)>;
using VectorFn = std::function<Vector(const Vector&)>;
using MatrixFn = std::function<Matrix(const Vector&)>;

/// A differentiable cost together with whatever optimality certificates are
/// known for it. Callables must be pure; the struct is freely copyable and
/// shared read-only between threads.
struct Objective {
  int dim = 0;
  ScalarFn f;
  VectorFn grad;
  MatrixFn hessian;               // empty when unavailable
  std::optional<double> f_star;
  std::optional<double> pl_mu;    // Polyak-Lojasiewicz constant
  VectorFn minimizer_projection;  // x -> nearest minimizer, empty when unknown
  std::optional<double> grad_lipschitz;
  // Asserted by the builder; constrained flows refuse objectives without it.
  bool strongly_convex = false;

  bool has_hessian() const { return static_cast<bool>(hessian); }
  bool has_minimizer_projection() const {
    return static_cast<bool>(minimizer_projection);
  }

  /// Throws a validation error unless dim, f and grad are set.
  void validate() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<double> costs;
  std::vector<double> grad_norms;
  std::optional<double> settling_time;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
  double final_time() const { return times.back(); }
  const Vector& final_state() const { return states.back(); }

  /// Checks the ordering and length invariants; throws on violation.
  void validate() const;
};

struct SolveReport {
  Trajectory trajectory;
  std::optional<double> measured_settling;
  std::optional<double> theoretical_bound;
  double final_gradient_norm = 0.0;
  std::optional<double> regret;
};

/// 1/2 |grad f(x)|^2 - mu (f(x) - f*). Requires pl_mu and f_star.
double pl_residual(const Objective& obj, const Vector& x);

/// f(x) = 1/2 x'Qx + c'x for symmetric positive semidefinite Q with c in
/// range(Q). The PL constant is the smallest nonzero eigenvalue of Q.
Objective quadratic_objective(const Matrix& Q, const Vector& c);

struct GrowthSample {
  std::optional<double> cost_ratio;      // (f(x) - f*) / |x - [x]*|^2
  std::optional<double> gradient_ratio;  // |grad f(x)| / |x - [x]*|
};

std::vector<GrowthSample> check_quadratic_growth(const Objective& obj,
                                                 const std::vector<Vector>& samples);

// Central finite differences, used for derivative checks.
Vector finite_difference_gradient(const ScalarFn& f, const Vector& x, double step = 1e-6);
Matrix finite_difference_hessian(const VectorFn& grad, const Vector& x, double step = 1e-5);

/// |a - b| / max(1, |b|).
double relative_error(const Vector& a, const Vector& b);
double relative_error(const Matrix& a, const Matrix& b);

}  // namespace fxt
