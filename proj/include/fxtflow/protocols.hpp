#pragma once

#include "fxtflow/core.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace fxt {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// |y|_r for r >= 1, including r = infinity.
double lp_norm(const Vector& y, double r);

enum class ProtocolKind {
  NormSubgradient,           // subgradient of |y|_r
  Rescaled,                  // y / |y|_r^(1-p)
  Power,                     // y |y|_r^(q-1)
  ComponentwisePower,        // sign(y) .* |y|^alpha
  Signum,                    // sign(y)
  ExponentialL2,             // y e^{|y|_2} / |y|_2
  ExponentialL1,             // sign(y) .* e^{|y|}
  Identity,                  // y
  ExpScaledNormSubgradient,  // (e^{|y|_s} - 1) * subgradient of |y|_r
};

const char* to_string(ProtocolKind kind);

/// One sign-preserving map from the nonlinear-gradient family. Immutable.
class Protocol {
 public:
  static Protocol norm_subgradient(double r, double scale = 1.0);
  static Protocol rescaled(double p, double r, double scale = 1.0);
  static Protocol power(double q, double r, double scale = 1.0);
  static Protocol componentwise_power(double alpha, double scale = 1.0);
  static Protocol signum(double scale = 1.0);
  static Protocol exponential_l2(double scale = 1.0);
  static Protocol exponential_l1(double scale = 1.0);
  static Protocol identity(double scale = 1.0);
  static Protocol exp_scaled_norm_subgradient(double s, double r, double scale = 1.0);

  /// scale * g(y). Every kind maps 0 to 0. With regularization > 0 the
  /// discontinuities at the origin are smoothed: sign(z) becomes
  /// z / (|z| + regularization) and unit-vector terms y/|y| become
  /// y / (|y| + regularization).
  Vector eval(const Vector& y, double regularization = 0.0) const;

  ProtocolKind kind() const { return kind_; }
  double scale() const { return scale_; }
  double p() const { return p_; }
  double q() const { return q_; }
  double r() const { return r_; }
  double s() const { return s_; }
  double alpha() const { return alpha_; }

  /// Output component i depends on y_i only.
  bool is_componentwise() const;
  /// g(y) is a nonnegative multiple of y for every y.
  bool is_span_preserving() const;
  /// Nonzero limit at the origin (sliding-mode term).
  bool is_discontinuous_at_zero() const;

  Protocol scaled(double factor) const;
  std::string describe() const;

 private:
  Protocol(ProtocolKind kind, double scale) : kind_(kind), scale_(scale) {}

  ProtocolKind kind_;
  double scale_ = 1.0;
  double p_ = 0.0;
  double q_ = 0.0;
  double r_ = 2.0;
  double s_ = 2.0;
  double alpha_ = 1.0;
};

/// g = g_p + g_q + ...; evaluation is the sum of the terms.
class ProtocolSum {
 public:
  ProtocolSum(Protocol term) : terms_{std::move(term)} {}  // NOLINT(implicit)
  explicit ProtocolSum(std::vector<Protocol> terms);

  Vector eval(const Vector& y, double regularization = 0.0) const;

  const std::vector<Protocol>& terms() const { return terms_; }
  bool is_componentwise() const;
  bool is_span_preserving() const;
  std::string describe() const;

 private:
  std::vector<Protocol> terms_;
};

ProtocolSum operator+(const Protocol& a, const Protocol& b);
ProtocolSum operator+(const ProtocolSum& a, const Protocol& b);

struct ClassConstants {
  enum class Status {
    Tabulated,    // (exponent, coefficient) valid for the class inequality
    GlobalBound,  // exponential kinds: settling bound 1/(alpha mu) style
    Untabulated,  // membership must be checked numerically
  };
  Status status = Status::Untabulated;
  double exponent = 0.0;     // p in [0,1) or q > 1 (1 for linear maps)
  double coefficient = 0.0;  // sigma or rho, already multiplied by scale

  bool tabulated() const { return status == Status::Tabulated; }
};

/// Class exponent and coefficient of g on R^n:
/// g(y)'y >= coefficient * |y|_2^(1+exponent).
ClassConstants class_constants(const Protocol& g, int n);

struct MembershipReport {
  bool passed = true;
  double worst_margin = kInfinity;  // min over samples of g'y / (sigma |y|^(1+p)) - 1
  Vector worst_sample;
  std::size_t samples_checked = 0;
};

/// Samples nonzero y (uniform on [-10,10]^n plus log-scaled magnitudes down
/// to 1e-8, plus axis and all-ones probes) and checks
/// g(y)'y >= sigma |y|_2^(1+p) (1 - 1e-9).
MembershipReport verify_class_membership(const Protocol& g, double p, double sigma, int n,
                                         std::size_t samples, std::uint64_t seed);

struct ExponentialBounds {
  double l2_lhs = 0.0;  // y' g_e2(y) = |y| e^{|y|}
  double l2_rhs = 0.0;  // |y|^(k+1) / k!
  double l1_lhs = 0.0;  // sum |y_i| e^{|y_i|}
  double l1_rhs = 0.0;  // (|y|/sqrt n) e^{|y|/sqrt n}
};

ExponentialBounds exponential_lower_bounds(const Vector& y, int k);

}  // namespace fxt
