#include "fxtflow/bounds.hpp"

#include "fxtflow/error.hpp"

#include <cmath>
#include <limits>

namespace fxt {
namespace {

void positive(double v, const char* name) {
  require(std::isfinite(v) && v > 0.0, ErrorKind::Validation, std::string(name) + " must be positive");
}

void exponents(double p, double q) {
  require(p >= 0.0 && p < 1.0, ErrorKind::Validation, "p must lie in [0,1)");
  require(q > 1.0 && std::isfinite(q), ErrorKind::Validation, "q must exceed 1");
}

double two_term(double scale, double sigma, double rho, double p, double q) {
  return 1.0 / (scale * sigma * (1.0 - p)) + 1.0 / (scale * rho * (q - 1.0));
}

}  // namespace

SettlingBound fixed_time_lyapunov_bound(double c1, double c2, double r1, double r2, double k) {
  positive(c1, "c1");
  positive(c2, "c2");
  positive(k, "k");
  require(r1 * k >= 0.0 && r1 * k < 1.0, ErrorKind::Validation, "need 0 <= r1 k < 1");
  require(r2 * k > 1.0, ErrorKind::Validation, "need r2 k > 1");
  SettlingBound b;
  b.source = "fixed_time_lyapunov";
  b.value = 1.0 / (std::pow(c1, k) * (1.0 - r1 * k)) + 1.0 / (std::pow(c2, k) * (r2 * k - 1.0));
  b.parameters = {{"c1", c1}, {"c2", c2}, {"r1", r1}, {"r2", r2}, {"k", k}};
  return b;
}

SettlingBound nominal_bound(double mu, double sigma, double rho, double p, double q) {
  positive(mu, "mu");
  positive(sigma, "sigma");
  positive(rho, "rho");
  exponents(p, q);
  SettlingBound b;
  b.source = "nominal";
  b.value = two_term(mu, sigma, rho, p, q);
  b.parameters = {{"mu", mu}, {"sigma", sigma}, {"rho", rho}, {"p", p}, {"q", q}};
  return b;
}

SettlingBound robust_bound(double mu, double sigma, double rho, double q, double epsilon,
                           double dbar, double safety_multiplier) {
  positive(mu, "mu");
  require(q > 1.0, ErrorKind::Validation, "q must exceed 1");
  require(epsilon >= 0.0 && dbar >= 0.0, ErrorKind::Validation,
          "disturbance envelope must be nonnegative");
  positive(safety_multiplier, "safety multiplier");
  const double vanish = safety_multiplier * epsilon / (2.0 * std::sqrt(mu));
  const double k1 = sigma - dbar - vanish;
  const double k2 = rho - vanish;
  require(k1 > 0.0, ErrorKind::Validation, "robust condition fails: k1 <= 0");
  require(k2 >= 0.0, ErrorKind::Validation, "robust condition fails: k2 < 0");
  SettlingBound b;
  b.source = "robust";
  b.value = k2 == 0.0 ? std::numeric_limits<double>::infinity()
                      : 1.0 / (mu * k1) + 1.0 / (mu * k2 * (q - 1.0));
  b.parameters = {{"mu", mu},   {"sigma", sigma}, {"rho", rho}, {"q", q},
                  {"eps", epsilon}, {"dbar", dbar}, {"k1", k1},   {"k2", k2}};
  return b;
}

SettlingBound newton_bound(double sigma, double rho, double p, double q) {
  positive(sigma, "sigma");
  positive(rho, "rho");
  exponents(p, q);
  SettlingBound b;
  b.source = "newton";
  b.value = two_term(1.0, sigma, rho, p, q);
  b.parameters = {{"sigma", sigma}, {"rho", rho}, {"p", p}, {"q", q}};
  return b;
}

SettlingBound exponential_bound(double alpha, double mu, ExponentialVariant variant, int n) {
  positive(alpha, "alpha");
  positive(mu, "mu");
  require(n >= 1, ErrorKind::Validation, "dimension must be positive");
  SettlingBound b;
  const double factor = variant == ExponentialVariant::L1 ? static_cast<double>(n) : 1.0;
  b.source = variant == ExponentialVariant::L1 ? "exponential_l1" : "exponential_l2";
  b.value = factor / (alpha * mu);
  b.parameters = {{"alpha", alpha}, {"mu", mu}, {"n", static_cast<double>(n)}};
  return b;
}

double prescribed_time_gain(double target_time, double mu) {
  positive(target_time, "target time");
  positive(mu, "mu");
  return 1.0 / (target_time * mu);
}

SettlingBound finite_time_bound(double mu, double sigma, double p, double v0) {
  positive(mu, "mu");
  positive(sigma, "sigma");
  require(p >= 0.0 && p < 1.0, ErrorKind::Validation, "p must lie in [0,1)");
  require(v0 >= 0.0, ErrorKind::Validation, "V0 must be nonnegative");
  SettlingBound b;
  b.source = "finite_time";
  b.value = std::pow(2.0 * mu * v0, (1.0 - p) / 2.0) / (mu * sigma * (1.0 - p));
  b.parameters = {{"mu", mu}, {"sigma", sigma}, {"p", p}, {"V0", v0}};
  return b;
}

SettlingBound projected_bound(double mu, double lambda2_ptp, double sigma, double rho, double p,
                              double q) {
  positive(lambda2_ptp, "lambda_2(P'P)");
  SettlingBound b = nominal_bound(mu, sigma, rho, p, q);
  b.source = "projected";
  b.value /= lambda2_ptp;
  b.parameters["lambda2_PtP"] = lambda2_ptp;
  return b;
}

SettlingBound feasibility_bound(double sigma, double rho, double p, double q,
                                double lambda2_aat) {
  positive(lambda2_aat, "lambda_2(AA')");
  positive(sigma, "sigma");
  positive(rho, "rho");
  exponents(p, q);
  SettlingBound b;
  b.source = "feasibility";
  b.value = two_term(lambda2_aat, sigma, rho, p, q);
  b.parameters = {{"sigma", sigma}, {"rho", rho}, {"p", p}, {"q", q}, {"lambda2_AAt", lambda2_aat}};
  return b;
}

SettlingBound proximal_bound(double mu, double lambda, double lipschitz, double kp, double kq,
                             double p, double q) {
  positive(mu, "mu");
  positive(lambda, "lambda");
  positive(lipschitz, "L_f");
  positive(kp, "kappa_p");
  positive(kq, "kappa_q");
  exponents(p, q);
  require(lambda * lipschitz < 1.0, ErrorKind::Validation, "need lambda L_f < 1");
  SettlingBound b;
  b.source = "proximal";
  b.value = two_term(1.0, kp, kq, p, q) / (mu * (1.0 - lambda * lipschitz));
  b.parameters = {{"mu", mu}, {"lambda", lambda}, {"L_f", lipschitz}, {"kappa_p", kp},
                  {"kappa_q", kq}, {"p", p}, {"q", q}};
  return b;
}

SettlingBound consensus_bound(double lambda2, double sigma, double rho, double p, double q) {
  positive(lambda2, "lambda_2(L)");
  SettlingBound b = nominal_bound(lambda2, sigma, rho, p, q);
  b.source = "consensus";
  b.parameters.erase("mu");
  b.parameters["lambda2_L"] = lambda2;
  return b;
}

SettlingBound consensus_exponential_bound(double alpha, int nodes, double lambda2) {
  positive(alpha, "alpha");
  positive(lambda2, "lambda_2(L)");
  require(nodes >= 1, ErrorKind::Validation, "node count must be positive");
  SettlingBound b;
  b.source = "consensus_exponential";
  b.value = static_cast<double>(nodes) / (alpha * lambda2);
  b.parameters = {{"alpha", alpha}, {"N", static_cast<double>(nodes)}, {"lambda2_L", lambda2}};
  return b;
}

SettlingBound consensus_robust_bound(double lambda2, double sigma, double rho, double q,
                                     double epsilon, double dbar) {
  positive(lambda2, "lambda_2(L)");
  SettlingBound b = robust_bound(lambda2, sigma, rho, q, epsilon, dbar);
  b.source = "consensus_robust";
  b.parameters.erase("mu");
  b.parameters["lambda2_L"] = lambda2;
  return b;
}

}  // namespace fxt
