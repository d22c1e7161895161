#pragma once

#include "fxtflow/dynamics.hpp"
#include "fxtflow/protocols.hpp"

#include <optional>
#include <vector>

namespace fxt {

/// Protocols with tabulated regret bounds.
enum class RegretProtocol {
  G1,   // y
  Gp,   // y / |y|^(1-p)
  Gpq,  // y / |y|^(1-p) + |y|^(q-1) y
  Ge,   // y e^{|y|} / |y|
};

enum class RegretBoundKind { G1, Gp, GpqBetaLt2, GpqBetaEq2, GpqBetaGt2, Ge };

const char* to_string(RegretProtocol kind);
const char* to_string(RegretBoundKind kind);

struct RegretBound {
  double value = 0.0;
  RegretBoundKind kind = RegretBoundKind::G1;
};

struct RegretReport {
  double measured = 0.0;
  std::optional<double> bound;
  RegretBoundKind bound_kind = RegretBoundKind::G1;
  double v0 = 0.0;
  bool truncated = false;  // no settling time, integrated to the horizon
};

/// Trapezoid integral of max(cost - f_star, 0) over [0, settling] (or the
/// whole trajectory when it never settled; truncated is then set).
double measure_regret(const Trajectory& traj, double f_star, bool* truncated = nullptr);

/// Closed-form bounds with alpha = (p+1)/2, beta = (q+1)/2,
/// a = (2 mu)^alpha, b = (2 mu)^beta. For Gpq with V0 <= 1 the Gp form applies.
RegretBound regret_bound(RegretProtocol kind, double v0, double mu, double p = 0.0,
                         double q = 2.0);

/// F(V0, beta) = ((1 + V0^(beta-1))^((beta-2)/(beta-1)) - 1) / (V0^(beta-2) (beta-2)),
/// with the beta = 2 limit ln(1 + V0).
double regret_f(double v0, double beta);

/// Sharper gpq bound 1/(a(2-alpha)) + F(V0, beta)/b for V0 > 1.
double sharp_gpq_regret_bound(double v0, double mu, double p, double q);

/// The flow protocol matching a regret kind.
ProtocolSum regret_protocol(RegretProtocol kind, double p = 0.0, double q = 2.0);

struct RegretComplianceRow {
  Vector x0;
  RegretReport report;
  bool passed = false;  // measured <= bound (1 + 0.05) + 1e-3
};

struct RegretCompliance {
  std::vector<RegretComplianceRow> rows;
  bool all_passed = true;
  bool bound_grows_with_v0 = false;
};

/// Runs the first-order flow of the given kind from each x0 and compares the
/// measured regret against the bound (needs obj.pl_mu and obj.f_star).
RegretCompliance regret_compliance(const Objective& obj, RegretProtocol kind,
                                   const std::vector<Vector>& initializations,
                                   const IntegratorConfig& cfg, double p = 0.0, double q = 2.0);

}  // namespace fxt
