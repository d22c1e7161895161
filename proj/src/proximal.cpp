#include "fxtflow/proximal.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace fxt {
namespace {

void check_box(const Vector& lower, const Vector& upper) {
  require(lower.size() == upper.size() && lower.size() > 0, ErrorKind::Validation,
          "box bounds must be nonempty and of equal length");
  for (int i = 0; i < lower.size(); ++i) {
    require(!std::isnan(lower[i]) && !std::isnan(upper[i]) && lower[i] < upper[i],
            ErrorKind::Validation, "box needs lower < upper componentwise");
  }
}

double soft_threshold(double z, double tau) {
  if (z > tau) return z - tau;
  if (z < -tau) return z + tau;
  return 0.0;
}

}  // namespace

const char* to_string(ProxFunction::Kind kind) {
  switch (kind) {
    case ProxFunction::Kind::Zero: return "zero";
    case ProxFunction::Kind::L1: return "l1";
    case ProxFunction::Kind::Box: return "box_indicator";
    case ProxFunction::Kind::L1PlusBox: return "l1_plus_box";
  }
  return "unknown";
}

ProxFunction ProxFunction::zero() { return {}; }

ProxFunction ProxFunction::l1(double gamma) {
  require(gamma > 0.0 && std::isfinite(gamma), ErrorKind::Validation, "l1 weight must be positive");
  ProxFunction h;
  h.kind = Kind::L1;
  h.gamma = gamma;
  return h;
}

ProxFunction ProxFunction::box(Vector lower, Vector upper) {
  check_box(lower, upper);
  ProxFunction h;
  h.kind = Kind::Box;
  h.lower = std::move(lower);
  h.upper = std::move(upper);
  return h;
}

ProxFunction ProxFunction::box(int n, double lower, double upper) {
  require(n > 0, ErrorKind::Validation, "box dimension must be positive");
  return box(Vector::Constant(n, lower), Vector::Constant(n, upper));
}

ProxFunction ProxFunction::l1_plus_box(double gamma, Vector lower, Vector upper) {
  require(gamma > 0.0 && std::isfinite(gamma), ErrorKind::Validation, "l1 weight must be positive");
  check_box(lower, upper);
  ProxFunction h;
  h.kind = Kind::L1PlusBox;
  h.gamma = gamma;
  h.lower = std::move(lower);
  h.upper = std::move(upper);
  return h;
}

bool ProxFunction::in_domain(const Vector& x) const {
  if (!has_box()) return true;
  require(x.size() == lower.size(), ErrorKind::Validation, "box dimension mismatch");
  for (int i = 0; i < x.size(); ++i)
    if (x[i] < lower[i] || x[i] > upper[i]) return false;
  return true;
}

double ProxFunction::value(const Vector& x) const {
  if (!in_domain(x)) return std::numeric_limits<double>::infinity();
  return has_l1() ? gamma * x.cwiseAbs().sum() : 0.0;
}

Vector prox(const ProxFunction& h, double lambda, const Vector& x) {
  require(lambda > 0.0, ErrorKind::Validation, "prox step must be positive");
  Vector z = x;
  if (h.has_l1()) {
    const double tau = lambda * h.gamma;
    for (int i = 0; i < z.size(); ++i) z[i] = soft_threshold(z[i], tau);
  }
  if (h.has_box()) {
    require(x.size() == h.lower.size(), ErrorKind::Validation, "box dimension mismatch");
    // Soft-threshold then clamp is exact for a separable l1 plus interval.
    z = z.cwiseMax(h.lower).cwiseMin(h.upper);
  }
  return z;
}

double moreau(const ProxFunction& h, double lambda, const Vector& x) {
  const Vector p = prox(h, lambda, x);
  return h.value(p) + (p - x).squaredNorm() / (2.0 * lambda);
}

Vector moreau_gradient(const ProxFunction& h, double lambda, const Vector& x) {
  return (x - prox(h, lambda, x)) / lambda;
}

void validate_prox_step(const Objective& f_obj, double lambda) {
  require(std::isfinite(lambda) && lambda > 0.0, ErrorKind::Validation,
          "prox step lambda must be positive");
  if (f_obj.grad_lipschitz && *f_obj.grad_lipschitz > 0.0) {
    require(lambda * *f_obj.grad_lipschitz < 1.0, ErrorKind::Validation,
            "prox step lambda must be below 1/L_f");
  }
}

Vector fb_residual(const Objective& f_obj, const ProxFunction& h, double lambda, const Vector& x) {
  require(lambda > 0.0, ErrorKind::Validation, "prox step must be positive");
  const Vector g = f_obj.grad(x);
  if (h.kind == ProxFunction::Kind::Zero) return g;
  return (x - prox(h, lambda, x - lambda * g)) / lambda;
}

double fb_envelope(const Objective& f_obj, const ProxFunction& h, double lambda, const Vector& x) {
  validate_prox_step(f_obj, lambda);
  const Vector g = f_obj.grad(x);
  return f_obj.f(x) + moreau(h, lambda, x - lambda * g) - 0.5 * lambda * g.squaredNorm();
}

Vector fb_envelope_gradient(const Objective& f_obj, const ProxFunction& h, double lambda,
                            const Vector& x) {
  validate_prox_step(f_obj, lambda);
  require(f_obj.has_hessian(), ErrorKind::CertificateMissing,
          "envelope gradient needs the Hessian of f");
  const Matrix H = f_obj.hessian(x);
  const Vector r = fb_residual(f_obj, h, lambda, x);
  return r - lambda * (H * r);
}

double proximal_pl_residual(const Objective& f_obj, const ProxFunction& h, double lambda,
                            double mu, std::optional<double> f_star, const Vector& x) {
  require(f_star.has_value(), ErrorKind::CertificateMissing,
          "proximal PL residual needs the optimal envelope value");
  const Vector r = fb_residual(f_obj, h, lambda, x);
  return 0.5 * r.squaredNorm() - mu * (fb_envelope(f_obj, h, lambda, x) - *f_star);
}

ProximalPlFit fit_proximal_pl_constant(const Objective& f_obj, const ProxFunction& h,
                                       double lambda, double f_star, const Vector& lower,
                                       const Vector& upper, std::size_t samples,
                                       std::uint64_t seed) {
  require(lower.size() == f_obj.dim && upper.size() == f_obj.dim, ErrorKind::Validation,
          "sampling box has wrong dimension");
  require(samples >= 1, ErrorKind::Validation, "need at least one sample");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ProximalPlFit fit;
  fit.mu = std::numeric_limits<double>::infinity();
  Vector x(f_obj.dim);
  for (std::size_t s = 0; s < samples; ++s) {
    for (int i = 0; i < x.size(); ++i) x[i] = lower[i] + (upper[i] - lower[i]) * unit(rng);
    const double gap = fb_envelope(f_obj, h, lambda, x) - f_star;
    if (gap <= 1e-9 * (1.0 + std::abs(f_star))) continue;
    const double ratio = 0.5 * fb_residual(f_obj, h, lambda, x).squaredNorm() / gap;
    fit.mu = std::min(fit.mu, ratio);
    ++fit.samples_used;
  }
  if (fit.samples_used == 0) fit.mu = 0.0;
  return fit;
}

}  // namespace fxt
