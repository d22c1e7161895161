#pragma once

#include "fxtflow/core.hpp"

#include <cstdint>

namespace fxt {

/// Separable convex h: zero, gamma |x|_1, box indicator, or their sum.
struct ProxFunction {
  enum class Kind { Zero, L1, Box, L1PlusBox };

  Kind kind = Kind::Zero;
  double gamma = 0.0;
  Vector lower;  // box bounds, +-inf allowed
  Vector upper;

  static ProxFunction zero();
  static ProxFunction l1(double gamma);
  static ProxFunction box(Vector lower, Vector upper);
  static ProxFunction box(int n, double lower, double upper);
  static ProxFunction l1_plus_box(double gamma, Vector lower, Vector upper);

  bool has_box() const { return kind == Kind::Box || kind == Kind::L1PlusBox; }
  bool has_l1() const { return kind == Kind::L1 || kind == Kind::L1PlusBox; }
  bool in_domain(const Vector& x) const;
  /// h(x), +inf outside the box.
  double value(const Vector& x) const;
};

const char* to_string(ProxFunction::Kind kind);

Vector prox(const ProxFunction& h, double lambda, const Vector& x);

/// M_{lambda h}(x) = h(prox(x)) + |prox(x) - x|^2 / (2 lambda).
double moreau(const ProxFunction& h, double lambda, const Vector& x);
/// (x - prox(x)) / lambda.
Vector moreau_gradient(const ProxFunction& h, double lambda, const Vector& x);

/// Throws unless 0 < lambda and, when grad_lipschitz is known, lambda L_f < 1.
void validate_prox_step(const Objective& f_obj, double lambda);

/// H_lambda(x) = (x - prox(x - lambda grad f(x))) / lambda; exactly grad f for h = 0.
Vector fb_residual(const Objective& f_obj, const ProxFunction& h, double lambda, const Vector& x);

/// F_lambda(x) = f(x) + M_{lambda h}(x - lambda grad f(x)) - lambda/2 |grad f(x)|^2.
double fb_envelope(const Objective& f_obj, const ProxFunction& h, double lambda, const Vector& x);

/// (I - lambda hess f(x)) H_lambda(x); needs the Hessian.
Vector fb_envelope_gradient(const Objective& f_obj, const ProxFunction& h, double lambda,
                            const Vector& x);

/// 1/2 |H_lambda(x)|^2 - mu (F_lambda(x) - F*).
double proximal_pl_residual(const Objective& f_obj, const ProxFunction& h, double lambda,
                            double mu, std::optional<double> f_star, const Vector& x);

struct ProximalPlFit {
  double mu = 0.0;               // largest mu keeping the residual >= 0 on all samples
  std::size_t samples_used = 0;  // samples with F - F* above the noise floor
};

/// Samples uniformly in [lower, upper]^n and fits mu = min |H|^2 / (2 (F - F*)).
ProximalPlFit fit_proximal_pl_constant(const Objective& f_obj, const ProxFunction& h,
                                       double lambda, double f_star, const Vector& lower,
                                       const Vector& upper, std::size_t samples,
                                       std::uint64_t seed);

}  // namespace fxt
