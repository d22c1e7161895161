#include "fxtflow/protocols.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace fxt {
namespace {

double sgn(double z) { return z > 0.0 ? 1.0 : (z < 0.0 ? -1.0 : 0.0); }

// sign(z), or z / (|z| + reg) when smoothing is requested.
double smooth_sign(double z, double reg) {
  if (reg > 0.0) return z / (std::abs(z) + reg);
  return sgn(z);
}

bool is_valid_r(double r, bool allow_infinity) {
  if (std::isinf(r)) return allow_infinity && r > 0;
  return r >= 1.0;
}

// Subgradient of |y|_r with the zero selection at the origin.
Vector norm_subgradient_eval(const Vector& y, double r, double reg) {
  const int n = static_cast<int>(y.size());
  Vector out = Vector::Zero(n);
  if (std::isinf(r)) {
    int k = 0;
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
      if (std::abs(y[i]) > best) {
        best = std::abs(y[i]);
        k = i;
      }
    }
    if (best > 0.0) out[k] = reg > 0.0 ? y[k] / (best + reg) : sgn(y[k]);
    return out;
  }
  if (r == 1.0) {
    for (int i = 0; i < n; ++i) out[i] = smooth_sign(y[i], reg);
    return out;
  }
  const double norm = lp_norm(y, r);
  if (norm == 0.0) return out;
  const double denom = std::pow(norm + reg, r - 1.0);
  for (int i = 0; i < n; ++i) out[i] = sgn(y[i]) * std::pow(std::abs(y[i]), r - 1.0) / denom;
  return out;
}

}  // namespace

double lp_norm(const Vector& y, double r) {
  if (y.size() == 0) return 0.0;
  const double m = y.cwiseAbs().maxCoeff();
  if (std::isinf(r) || m == 0.0) return m;
  if (r == 2.0) return y.norm();
  if (r == 1.0) return y.cwiseAbs().sum();
  double acc = 0.0;
  for (int i = 0; i < y.size(); ++i) acc += std::pow(std::abs(y[i]) / m, r);
  return m * std::pow(acc, 1.0 / r);
}

const char* to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::NormSubgradient: return "norm_subgradient";
    case ProtocolKind::Rescaled: return "rescaled";
    case ProtocolKind::Power: return "power";
    case ProtocolKind::ComponentwisePower: return "componentwise_power";
    case ProtocolKind::Signum: return "signum";
    case ProtocolKind::ExponentialL2: return "exponential_l2";
    case ProtocolKind::ExponentialL1: return "exponential_l1";
    case ProtocolKind::Identity: return "identity";
    case ProtocolKind::ExpScaledNormSubgradient: return "exp_scaled_norm_subgradient";
  }
  return "unknown";
}

static void check_scale(double scale) {
  require(std::isfinite(scale) && scale > 0.0, ErrorKind::Validation,
          "protocol scale must be positive and finite");
}

Protocol Protocol::norm_subgradient(double r, double scale) {
  check_scale(scale);
  require(is_valid_r(r, true), ErrorKind::Validation, "norm_subgradient needs r >= 1 or r = inf");
  Protocol g(ProtocolKind::NormSubgradient, scale);
  g.r_ = r;
  return g;
}

Protocol Protocol::rescaled(double p, double r, double scale) {
  check_scale(scale);
  require(p >= 0.0 && p < 1.0, ErrorKind::Validation, "rescaled needs p in [0,1)");
  require(is_valid_r(r, true), ErrorKind::Validation, "rescaled needs r >= 1 or r = inf");
  Protocol g(ProtocolKind::Rescaled, scale);
  g.p_ = p;
  g.r_ = r;
  return g;
}

Protocol Protocol::power(double q, double r, double scale) {
  check_scale(scale);
  require(q > 1.0 && std::isfinite(q), ErrorKind::Validation, "power needs finite q > 1");
  require(is_valid_r(r, true), ErrorKind::Validation, "power needs r >= 1 or r = inf");
  Protocol g(ProtocolKind::Power, scale);
  g.q_ = q;
  g.r_ = r;
  return g;
}

Protocol Protocol::componentwise_power(double alpha, double scale) {
  check_scale(scale);
  require(alpha >= 0.0 && std::isfinite(alpha), ErrorKind::Validation,
          "componentwise_power needs alpha >= 0");
  Protocol g(ProtocolKind::ComponentwisePower, scale);
  g.alpha_ = alpha;
  return g;
}

Protocol Protocol::signum(double scale) {
  check_scale(scale);
  return Protocol(ProtocolKind::Signum, scale);
}

Protocol Protocol::exponential_l2(double scale) {
  check_scale(scale);
  return Protocol(ProtocolKind::ExponentialL2, scale);
}

Protocol Protocol::exponential_l1(double scale) {
  check_scale(scale);
  return Protocol(ProtocolKind::ExponentialL1, scale);
}

Protocol Protocol::identity(double scale) {
  check_scale(scale);
  return Protocol(ProtocolKind::Identity, scale);
}

Protocol Protocol::exp_scaled_norm_subgradient(double s, double r, double scale) {
  check_scale(scale);
  require(is_valid_r(s, true) && is_valid_r(r, true), ErrorKind::Validation,
          "exp_scaled_norm_subgradient needs s, r >= 1");
  Protocol g(ProtocolKind::ExpScaledNormSubgradient, scale);
  g.s_ = s;
  g.r_ = r;
  return g;
}

Vector Protocol::eval(const Vector& y, double reg) const {
  const int n = static_cast<int>(y.size());
  Vector out = Vector::Zero(n);
  if (n == 0 || y.cwiseAbs().maxCoeff() == 0.0) return out;

  switch (kind_) {
    case ProtocolKind::NormSubgradient:
      out = norm_subgradient_eval(y, r_, reg);
      break;
    case ProtocolKind::Rescaled: {
      const double norm = lp_norm(y, r_);
      const double denom = p_ == 0.0 ? norm + reg : std::pow(norm, 1.0 - p_);
      out = y / denom;
      break;
    }
    case ProtocolKind::Power:
      out = y * std::pow(lp_norm(y, r_), q_ - 1.0);
      break;
    case ProtocolKind::ComponentwisePower:
      for (int i = 0; i < n; ++i) {
        out[i] = alpha_ == 0.0 ? smooth_sign(y[i], reg)
                               : sgn(y[i]) * std::pow(std::abs(y[i]), alpha_);
      }
      break;
    case ProtocolKind::Signum:
      for (int i = 0; i < n; ++i) out[i] = smooth_sign(y[i], reg);
      break;
    case ProtocolKind::ExponentialL2: {
      const double norm = y.norm();
      out = y * (std::exp(norm) / (norm + reg));
      break;
    }
    case ProtocolKind::ExponentialL1:
      for (int i = 0; i < n; ++i) out[i] = smooth_sign(y[i], reg) * std::exp(std::abs(y[i]));
      break;
    case ProtocolKind::Identity:
      out = y;
      break;
    case ProtocolKind::ExpScaledNormSubgradient:
      out = norm_subgradient_eval(y, r_, 0.0) * std::expm1(lp_norm(y, s_));
      break;
  }
  return scale_ * out;
}

bool Protocol::is_componentwise() const {
  switch (kind_) {
    case ProtocolKind::Signum:
    case ProtocolKind::ComponentwisePower:
    case ProtocolKind::ExponentialL1:
    case ProtocolKind::Identity:
      return true;
    case ProtocolKind::NormSubgradient:
      return r_ == 1.0;
    default:
      return false;
  }
}

bool Protocol::is_span_preserving() const {
  switch (kind_) {
    case ProtocolKind::Identity:
    case ProtocolKind::ExponentialL2:
      return true;
    case ProtocolKind::Rescaled:
    case ProtocolKind::Power:
      return true;  // y times a scalar for every r
    case ProtocolKind::NormSubgradient:
      return r_ == 2.0;
    case ProtocolKind::ComponentwisePower:
      return alpha_ == 1.0;
    case ProtocolKind::ExpScaledNormSubgradient:
      return r_ == 2.0;
    default:
      return false;
  }
}

bool Protocol::is_discontinuous_at_zero() const {
  switch (kind_) {
    case ProtocolKind::NormSubgradient:
    case ProtocolKind::Signum:
    case ProtocolKind::ExponentialL2:
    case ProtocolKind::ExponentialL1:
      return true;
    case ProtocolKind::Rescaled:
      return p_ == 0.0;
    case ProtocolKind::ComponentwisePower:
      return alpha_ == 0.0;
    default:
      return false;
  }
}

Protocol Protocol::scaled(double factor) const {
  check_scale(scale_ * factor);
  Protocol g = *this;
  g.scale_ *= factor;
  return g;
}

std::string Protocol::describe() const {
  std::ostringstream os;
  os << to_string(kind_) << "(";
  switch (kind_) {
    case ProtocolKind::NormSubgradient: os << "r=" << r_; break;
    case ProtocolKind::Rescaled: os << "p=" << p_ << ",r=" << r_; break;
    case ProtocolKind::Power: os << "q=" << q_ << ",r=" << r_; break;
    case ProtocolKind::ComponentwisePower: os << "alpha=" << alpha_; break;
    case ProtocolKind::ExpScaledNormSubgradient: os << "s=" << s_ << ",r=" << r_; break;
    default: break;
  }
  os << ")";
  if (scale_ != 1.0) os << "*" << scale_;
  return os.str();
}

ProtocolSum::ProtocolSum(std::vector<Protocol> terms) : terms_(std::move(terms)) {
  require(!terms_.empty(), ErrorKind::Validation, "protocol sum needs at least one term");
}

Vector ProtocolSum::eval(const Vector& y, double reg) const {
  Vector out = terms_.front().eval(y, reg);
  for (std::size_t i = 1; i < terms_.size(); ++i) out += terms_[i].eval(y, reg);
  return out;
}

bool ProtocolSum::is_componentwise() const {
  for (const auto& t : terms_)
    if (!t.is_componentwise()) return false;
  return true;
}

bool ProtocolSum::is_span_preserving() const {
  for (const auto& t : terms_)
    if (!t.is_span_preserving()) return false;
  return true;
}

std::string ProtocolSum::describe() const {
  std::string out;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i) out += " + ";
    out += terms_[i].describe();
  }
  return out;
}

ProtocolSum operator+(const Protocol& a, const Protocol& b) {
  return ProtocolSum(std::vector<Protocol>{a, b});
}

ProtocolSum operator+(const ProtocolSum& a, const Protocol& b) {
  auto terms = a.terms();
  terms.push_back(b);
  return ProtocolSum(std::move(terms));
}

ClassConstants class_constants(const Protocol& g, int n) {
  require(n >= 1, ErrorKind::Validation, "dimension must be positive");
  const double dim = static_cast<double>(n);
  ClassConstants c;
  c.status = ClassConstants::Status::Tabulated;
  switch (g.kind()) {
    case ProtocolKind::NormSubgradient:
      c.exponent = 0.0;
      // |y|_r >= |y|_2 for r <= 2 and >= n^(1/r - 1/2) |y|_2 for r > 2.
      c.coefficient = g.r() <= 2.0 ? 1.0 : std::pow(dim, 1.0 / g.r() - 0.5);
      break;
    case ProtocolKind::Signum:
      c.exponent = 0.0;
      c.coefficient = 1.0;
      break;
    case ProtocolKind::Rescaled: {
      const double p = g.p();
      c.exponent = p;
      c.coefficient =
          g.r() <= 2.0 ? std::pow(dim, (1.0 - p) / 2.0 - (1.0 - p) / g.r()) : 1.0;
      break;
    }
    case ProtocolKind::Power: {
      const double q = g.q();
      c.exponent = q;
      c.coefficient = g.r() <= 2.0 ? 1.0 : std::pow(dim, (q - 1.0) * (1.0 / g.r() - 0.5));
      break;
    }
    case ProtocolKind::ComponentwisePower: {
      const double a = g.alpha();
      c.exponent = a;
      c.coefficient = a <= 1.0 ? 1.0 : std::pow(dim, 1.0 - (a + 1.0) / 2.0);
      break;
    }
    case ProtocolKind::Identity:
      c.exponent = 1.0;
      c.coefficient = 1.0;
      break;
    case ProtocolKind::ExponentialL2:
    case ProtocolKind::ExponentialL1:
      c.status = ClassConstants::Status::GlobalBound;
      c.exponent = 0.0;
      c.coefficient = 1.0;
      break;
    case ProtocolKind::ExpScaledNormSubgradient:
      c.status = ClassConstants::Status::Untabulated;
      return c;
  }
  c.coefficient *= g.scale();
  return c;
}

MembershipReport verify_class_membership(const Protocol& g, double p, double sigma, int n,
                                         std::size_t samples, std::uint64_t seed) {
  require(samples >= 1, ErrorKind::Validation, "need at least one sample");
  require(n >= 1, ErrorKind::Validation, "dimension must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> box(-10.0, 10.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> decade(-8.0, 1.0);

  MembershipReport report;
  auto check = [&](const Vector& y) {
    const double norm = y.norm();
    if (norm == 0.0) return;
    const double lhs = g.eval(y).dot(y);
    const double rhs = sigma * std::pow(norm, 1.0 + p);
    const double margin = lhs / rhs - 1.0;
    if (margin < report.worst_margin) {
      report.worst_margin = margin;
      report.worst_sample = y;
    }
    if (lhs < rhs * (1.0 - 1e-9)) report.passed = false;
    ++report.samples_checked;
  };

  // Deterministic probes: the first axis vector and the all-ones vector.
  check(Vector::Unit(n, 0));
  check(Vector::Ones(n));

  Vector y(n);
  for (std::size_t s = 0; s < samples; ++s) {
    if (s % 2 == 0) {
      for (int i = 0; i < n; ++i) y[i] = box(rng);
    } else {
      for (int i = 0; i < n; ++i) y[i] = unit(rng);
      const double nrm = y.norm();
      if (nrm == 0.0) continue;
      y *= std::pow(10.0, decade(rng)) / nrm;
    }
    check(y);
  }
  return report;
}

ExponentialBounds exponential_lower_bounds(const Vector& y, int k) {
  require(k >= 1, ErrorKind::Validation, "k must be a positive integer");
  ExponentialBounds b;
  const double norm = y.norm();
  b.l2_lhs = norm * std::exp(norm);
  b.l2_rhs = std::pow(norm, k + 1) / std::tgamma(k + 1.0);
  for (int i = 0; i < y.size(); ++i) b.l1_lhs += std::abs(y[i]) * std::exp(std::abs(y[i]));
  const double scaled = y.size() > 0 ? norm / std::sqrt(static_cast<double>(y.size())) : 0.0;
  b.l1_rhs = scaled * std::exp(scaled);
  return b;
}

}  // namespace fxt
