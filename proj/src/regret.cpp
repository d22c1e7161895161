#include "fxtflow/regret.hpp"

#include "fxtflow/flows.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace fxt {

const char* to_string(RegretProtocol kind) {
  switch (kind) {
    case RegretProtocol::G1: return "g1";
    case RegretProtocol::Gp: return "gp";
    case RegretProtocol::Gpq: return "gpq";
    case RegretProtocol::Ge: return "ge";
  }
  return "unknown";
}

const char* to_string(RegretBoundKind kind) {
  switch (kind) {
    case RegretBoundKind::G1: return "g1";
    case RegretBoundKind::Gp: return "gp";
    case RegretBoundKind::GpqBetaLt2: return "gpq_beta_lt2";
    case RegretBoundKind::GpqBetaEq2: return "gpq_beta_eq2";
    case RegretBoundKind::GpqBetaGt2: return "gpq_beta_gt2";
    case RegretBoundKind::Ge: return "ge";
  }
  return "unknown";
}

double measure_regret(const Trajectory& traj, double f_star, bool* truncated) {
  require(!traj.empty(), ErrorKind::Validation, "trajectory is empty");
  const double stop = traj.settling_time.value_or(traj.final_time());
  if (truncated) *truncated = !traj.settling_time.has_value();
  double total = 0.0;
  for (std::size_t i = 1; i < traj.size() && traj.times[i - 1] < stop; ++i) {
    const double a = std::max(traj.costs[i - 1] - f_star, 0.0);
    const double b = std::max(traj.costs[i] - f_star, 0.0);
    total += 0.5 * (a + b) * (traj.times[i] - traj.times[i - 1]);
  }
  return total;
}

RegretBound regret_bound(RegretProtocol kind, double v0, double mu, double p, double q) {
  require(std::isfinite(v0) && v0 >= 0.0, ErrorKind::Validation, "V0 must be nonnegative");
  require(std::isfinite(mu) && mu > 0.0, ErrorKind::Validation, "mu must be positive");
  RegretBound out;
  if (kind == RegretProtocol::G1) {
    out.kind = RegretBoundKind::G1;
    out.value = v0 / (2.0 * mu);
    return out;
  }
  if (kind == RegretProtocol::Ge) {
    out.kind = RegretBoundKind::Ge;
    out.value = 1.0 / (mu * mu);
    return out;
  }
  require(p >= 0.0 && p < 1.0, ErrorKind::Validation, "p must lie in [0,1)");
  const double alpha = (p + 1.0) / 2.0;
  const double a = std::pow(2.0 * mu, alpha);
  if (kind == RegretProtocol::Gp || v0 <= 1.0) {
    if (kind == RegretProtocol::Gpq)
      require(q > 1.0 && std::isfinite(q), ErrorKind::Validation, "q must exceed 1");
    out.kind = RegretBoundKind::Gp;
    out.value = std::pow(v0, 2.0 - alpha) / (a * (2.0 - alpha));
    return out;
  }
  require(q > 1.0 && std::isfinite(q), ErrorKind::Validation, "q must exceed 1");
  const double beta = (q + 1.0) / 2.0;
  const double b = std::pow(2.0 * mu, beta);
  const double head = 1.0 / (a * (2.0 - alpha));
  if (beta < 2.0) {
    out.kind = RegretBoundKind::GpqBetaLt2;
    out.value = head + std::pow(v0, 2.0 - beta) / (b * (2.0 - beta));
  } else if (beta == 2.0) {
    out.kind = RegretBoundKind::GpqBetaEq2;
    out.value = head + std::log1p(v0) / b;
  } else {
    out.kind = RegretBoundKind::GpqBetaGt2;
    out.value = head + 1.0 / (b * (beta - 2.0));
  }
  return out;
}

double regret_f(double v0, double beta) {
  require(v0 > 0.0 && beta > 1.0, ErrorKind::Validation, "need V0 > 0 and beta > 1");
  if (beta == 2.0) return std::log1p(v0);
  const double c = (beta - 2.0) / (beta - 1.0);
  return (std::pow(1.0 + std::pow(v0, beta - 1.0), c) - 1.0) /
         (std::pow(v0, beta - 2.0) * (beta - 2.0));
}

double sharp_gpq_regret_bound(double v0, double mu, double p, double q) {
  require(v0 > 1.0, ErrorKind::Validation, "sharp bound applies for V0 > 1");
  require(mu > 0.0 && p >= 0.0 && p < 1.0 && q > 1.0, ErrorKind::Validation,
          "parameters out of range");
  const double alpha = (p + 1.0) / 2.0;
  const double beta = (q + 1.0) / 2.0;
  const double a = std::pow(2.0 * mu, alpha);
  const double b = std::pow(2.0 * mu, beta);
  return 1.0 / (a * (2.0 - alpha)) + regret_f(v0, beta) / b;
}

ProtocolSum regret_protocol(RegretProtocol kind, double p, double q) {
  switch (kind) {
    case RegretProtocol::G1: return Protocol::identity();
    case RegretProtocol::Gp: return Protocol::rescaled(p, 2.0);
    case RegretProtocol::Gpq: return Protocol::rescaled(p, 2.0) + Protocol::power(q, 2.0);
    case RegretProtocol::Ge: return Protocol::exponential_l2();
  }
  return Protocol::identity();
}

RegretCompliance regret_compliance(const Objective& obj, RegretProtocol kind,
                                   const std::vector<Vector>& initializations,
                                   const IntegratorConfig& cfg, double p, double q) {
  require(obj.pl_mu && obj.f_star, ErrorKind::CertificateMissing,
          "regret compliance needs pl_mu and f_star");
  const double mu = *obj.pl_mu;
  const FlowSpec flow = first_order_flow(obj, regret_protocol(kind, p, q));
  RegretCompliance out;
  double v_max = 0.0;
  for (const Vector& x0 : initializations) {
    RegretComplianceRow row;
    row.x0 = x0;
    const Trajectory traj = integrate(flow.rhs, x0, obj, DisturbanceModel::none(), cfg);
    row.report.v0 = std::max(obj.f(x0) - *obj.f_star, 0.0);
    row.report.measured = measure_regret(traj, *obj.f_star, &row.report.truncated);
    const RegretBound b = regret_bound(kind, row.report.v0, mu, p, q);
    row.report.bound = b.value;
    row.report.bound_kind = b.kind;
    row.passed = row.report.measured <= b.value * 1.05 + 1e-3;
    if (row.report.truncated) {
      std::cerr << "warning: regret truncated at t=" << traj.final_time() << " (never settled)\n";
    }
    out.all_passed = out.all_passed && row.passed;
    v_max = std::max(v_max, row.report.v0);
    out.rows.push_back(std::move(row));
  }
  if (v_max > 0.0) {
    out.bound_grows_with_v0 =
        regret_bound(kind, 2.0 * v_max, mu, p, q).value > regret_bound(kind, v_max, mu, p, q).value;
  }
  return out;
}

}  // namespace fxt
