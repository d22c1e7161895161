#pragma once

#include <map>
#include <string>

namespace fxt {

/// A closed-form settling-time bound and the parameters it was computed from.
struct SettlingBound {
  double value = 0.0;  // seconds, +inf when a hypothesis is only marginally met
  std::string source;
  std::map<std::string, double> parameters;
};

/// Generic Lyapunov fixed-time bound for V' <= -(c1 V^r1 + c2 V^r2)^k:
/// 1/(c1^k (1 - r1 k)) + 1/(c2^k (r2 k - 1)).
SettlingBound fixed_time_lyapunov_bound(double c1, double c2, double r1, double r2, double k);

/// 1/(mu sigma (1-p)) + 1/(mu rho (q-1)).
SettlingBound nominal_bound(double mu, double sigma, double rho, double p, double q);

/// 1/(mu k1) + 1/(mu k2 (q-1)) with k1 = sigma - dbar - m eps/(2 sqrt mu),
/// k2 = rho - m eps/(2 sqrt mu).
SettlingBound robust_bound(double mu, double sigma, double rho, double q, double epsilon,
                           double dbar, double safety_multiplier = 1.0);

/// Newton flow bound, independent of mu: 1/(sigma (1-p)) + 1/(rho (q-1)).
SettlingBound newton_bound(double sigma, double rho, double p, double q);

enum class ExponentialVariant { L2, L1 };

/// 1/(alpha mu) for the l2 form, n/(alpha mu) for the componentwise form.
SettlingBound exponential_bound(double alpha, double mu, ExponentialVariant variant, int n = 1);

/// Gain alpha = 1/(T mu) that prescribes settling time T for the l2 form.
double prescribed_time_gain(double target_time, double mu);

/// Finite-time bound (2 mu V0)^((1-p)/2) / (mu sigma (1-p)), V0 = f(x0) - f*.
SettlingBound finite_time_bound(double mu, double sigma, double p, double v0);

/// Nominal bound divided by lambda_2(P'P).
SettlingBound projected_bound(double mu, double lambda2_ptp, double sigma, double rho, double p,
                              double q);

/// 1/(sigma l (1-p)) + 1/(rho l (q-1)) with l = lambda_2(AA').
SettlingBound feasibility_bound(double sigma, double rho, double p, double q,
                                double lambda2_aat);

/// (1/(mu (1 - lambda L_f))) (1/(kp (1-p)) + 1/(kq (q-1))).
SettlingBound proximal_bound(double mu, double lambda, double lipschitz, double kp, double kq,
                             double p, double q);

/// Consensus with u = g(Lx): nominal bound with mu = lambda_2(L).
SettlingBound consensus_bound(double lambda2, double sigma, double rho, double p, double q);
/// Consensus with alpha sign(y) e^{|y|}: N/(alpha lambda_2(L)).
SettlingBound consensus_exponential_bound(double alpha, int nodes, double lambda2);
/// Robust consensus: robust bound with mu = lambda_2(L).
SettlingBound consensus_robust_bound(double lambda2, double sigma, double rho, double q,
                                     double epsilon, double dbar);

}  // namespace fxt
