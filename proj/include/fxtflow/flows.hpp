#pragma once

#include "fxtflow/dynamics.hpp"
#include "fxtflow/graph.hpp"
#include "fxtflow/protocols.hpp"
#include "fxtflow/proximal.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fxt {

enum class FlowVariant {
  FirstOrder,
  Robust,
  Newton,
  TimeVaryingNewton,
  Projected,
  Feasibility,
  FreeInit,
  Proximal,
  Epgf,
  Epa,
  Consensus,
  RowPartition,
  ColumnPartition,
};

const char* to_string(FlowVariant v);

/// An assembled right-hand side plus what was checked while building it.
struct FlowSpec {
  FlowVariant variant = FlowVariant::FirstOrder;
  std::string description;
  RhsFn rhs;
  std::optional<RobustCondition> robust_condition;

  Vector operator()(const Vector& x, double t, double reg = 0.0) const { return rhs(x, t, reg); }
};

/// -g(grad f(x)).
FlowSpec first_order_flow(const Objective& obj, const ProtocolSum& g);

/// -g0(grad f) - gq(grad f) with g0 a sliding (p = 0) term. When a
/// disturbance is given the robustness condition is evaluated with
/// obj.pl_mu and stored in the spec.
FlowSpec robust_flow(const Objective& obj, const Protocol& g0, const Protocol& gq,
                     const std::optional<DisturbanceModel>& dist = std::nullopt,
                     double safety_multiplier = 1.0);

/// -(hess f)^{-1} g(grad f). Throws SingularHessianError when a pivot of the
/// LDL' factorization drops below 1e-12 (relative to the largest).
FlowSpec newton_flow(const Objective& obj, const ProtocolSum& g);

/// f(x,t) with derivatives; grad_t defaults to central differences in t.
struct TimeVaryingObjective {
  using ScalarT = std::function<double(const Vector&, double)>;
  using VectorT = std::function<Vector(const Vector&, double)>;
  using MatrixT = std::function<Matrix(const Vector&, double)>;

  int dim = 0;
  ScalarT f;
  VectorT grad;
  MatrixT hessian;
  VectorT grad_t;                                // d/dt grad f, optional
  std::function<Vector(double)> minimizer;       // x*(t), optional

  void validate() const;
  Vector grad_time_derivative(const Vector& x, double t) const;
  /// Frozen objective at time t.
  Objective at(double t) const;
  MonitorFn monitor() const;
};

FlowSpec time_varying_newton_flow(const TimeVaryingObjective& obj, const ProtocolSum& g);

/// P_A = I - A~'(A~ A~')^{-1} A~ with A~ a maximal independent row subset.
Matrix orthogonal_projector(const Matrix& A);

/// -P g(P' grad f). Checks A P = 0 and rank P = n - rank A.
FlowSpec projected_flow(const Objective& obj, const Matrix& A, const Matrix& P,
                        const ProtocolSum& g);

/// -A' g(Ax - b) for span-preserving g; b must lie in range(A).
FlowSpec feasibility_flow(const Matrix& A, const Vector& b, const ProtocolSum& g_hat);

/// Projected flow plus feasibility flow.
FlowSpec free_init_flow(const Objective& obj, const Matrix& A, const Vector& b, const Matrix& P,
                        const ProtocolSum& g, const ProtocolSum& g_hat);

/// -kp H/|H|^{1-p} - kq |H|^{q-1} H with H the forward-backward residual.
FlowSpec proximal_flow(const Objective& f_obj, const ProxFunction& h, double lambda, double kp,
                       double kq, double p, double q);

/// -H_lambda(x).
FlowSpec epgf_flow(const Objective& f_obj, const ProxFunction& h, double lambda);

/// Edge-based projected baseline on the stacked state [x_1; ...; x_N]:
/// x_i' = -c P_i sum_j w_ij (sgn^a(x_i - x_j) + sgn^b(x_i - x_j))
///        - c A_i' (sgn^a(A_i x_i - b_i) + sgn^b(A_i x_i - b_i)).
FlowSpec epa_flow(const Graph& graph, const std::vector<Matrix>& blocks,
                  const std::vector<Vector>& rhs_blocks, double gain = 3.0,
                  double low_exponent = 0.5, double high_exponent = 1.5);

/// Residual |P_A grad f(x)| for settling on {Ax = b}.
ResidualFn projected_gradient_residual(const Objective& obj, const Matrix& A);

}  // namespace fxt
