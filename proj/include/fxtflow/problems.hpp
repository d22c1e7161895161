#pragma once

#include "fxtflow/bounds.hpp"
#include "fxtflow/flows.hpp"
#include "fxtflow/network.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fxt {

/// One compared method of a case study.
struct MethodSpec {
  std::string name;
  FlowSpec flow;
  Objective objective;  // monitored cost and gradient
  DisturbanceModel disturbance;
  IntegratorConfig integrator;
  ResidualFn settle_metric;  // settling uses settle_metric <= integrator.settle_tol
  ResidualFn error_metric;   // reported error, e.g. |x - x*|
  std::vector<Vector> initial_states;
  std::optional<SettlingBound> bound;
};

struct CaseInstance {
  int id = 0;
  std::string title;
  std::uint64_t seed = 0;
  Objective objective;
  std::optional<ProxFunction> prox;
  std::optional<double> prox_lambda;
  std::optional<Vector> reference_solution;
  std::optional<double> reference_value;
  std::vector<MethodSpec> methods;
  // Everything needed to rebuild the instance, for the reproducibility dump.
  std::vector<std::pair<std::string, Matrix>> data;
  std::vector<std::pair<std::string, double>> scalars;
  std::vector<std::pair<std::string, std::string>> notes;

  const MethodSpec& method(const std::string& name) const;
};

/// Logistic regression (K = 500, beta = 1) around the line x1 = x2 with a
/// rotating state-scaled disturbance; robust vs. vanishing-only protocols.
CaseInstance build_case1(std::uint64_t seed = 1, double safety_multiplier = 1.0);

/// Lasso with box: proximal fixed-time flow vs. the exponential baseline.
CaseInstance build_case2(std::uint64_t seed = 2);

/// 6 x 5 linear system on a 4-agent circle: distributed, two centralized
/// flows, and the edge-based projected baseline, all disturbed by 0.2 sin t.
CaseInstance build_case3(std::uint64_t seed = 3);

/// Four-unit economic dispatch with two Laplacian projections and baselines.
CaseInstance build_case4(std::uint64_t seed = 4);

/// safety_multiplier only affects the robust condition of case 1.
CaseInstance build_case(int id, std::uint64_t seed, double safety_multiplier = 1.0);

/// Logistic data: z = t (1,1)/sqrt2 + nu (1,-1)/sqrt2, t ~ U[-5,5],
/// nu ~ N(0,1), label sign(nu).
struct LogisticData {
  Matrix samples;  // K x 2
  Vector labels;   // +-1
};
LogisticData make_logistic_data(int count, std::uint64_t seed);

/// (1/K) sum log(1 + exp(-l_k x'z_k)) + beta/2 |x|^2, with pl_mu = beta.
Objective logistic_objective(const LogisticData& data, double beta);

/// Unconstrained minimizer by gradient descent with step 1/L to |grad| <= tol.
Vector gradient_descent_minimizer(const Objective& obj, const Vector& x0, double tol,
                                  int max_iter = 1000000);

/// sum a_i x_i^2 + b_i x_i + c_i.
Objective dispatch_objective(const Vector& a, const Vector& b, const Vector& c);

/// Equal-incremental-cost solution of min sum f_i s.t. sum x_i = demand.
struct DispatchSolution {
  Vector x;
  double lambda = 0.0;
};
DispatchSolution dispatch_kkt(const Vector& a, const Vector& b, double demand);

/// 1/2 x'Qx + c'x with spectrum spread over [mu, L] (endpoints included)
/// and a random minimizer; pl_mu = mu.
Objective random_quadratic(int n, double mu, double lipschitz, std::uint64_t seed);

/// f(x) = 1/2 |Ax - b|^2 with f* = 0 (b in range A), Hessian and L_f.
Objective least_squares_objective(const Matrix& A, const Vector& b);

}  // namespace fxt
