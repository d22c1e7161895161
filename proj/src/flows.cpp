#include "fxtflow/flows.hpp"

#include "fxtflow/linalg.hpp"

#include <cmath>

namespace fxt {
namespace {

Vector signed_power(const Vector& y, double a) {
  Vector out(y.size());
  for (int i = 0; i < y.size(); ++i) {
    const double m = std::abs(y[i]);
    out[i] = y[i] > 0.0 ? std::pow(m, a) : (y[i] < 0.0 ? -std::pow(m, a) : 0.0);
  }
  return out;
}

Vector newton_step(const Matrix& H, const Vector& rhs, const Vector& x) {
  Eigen::LDLT<Matrix> ldlt(H);
  if (ldlt.info() != Eigen::Success) throw SingularHessianError(x, "singular-hessian: factorization failed");
  const Vector d = ldlt.vectorD();
  const double top = std::max(1.0, d.cwiseAbs().maxCoeff());
  if (d.minCoeff() <= 1e-12 * top) {
    throw SingularHessianError(x, "singular-hessian: Hessian is singular or not positive definite");
  }
  return ldlt.solve(rhs);
}

bool is_orthogonal_projector(const Matrix& P) {
  if (P.rows() != P.cols() || !linalg::is_symmetric(P, 1e-10)) return false;
  return (P * P - P).norm() <= 1e-10 * std::max(1.0, P.norm());
}

void check_projection(const Matrix& A, const Matrix& P, int n) {
  require(A.cols() == n, ErrorKind::Validation, "constraint matrix has wrong column count");
  require(P.rows() == n, ErrorKind::Validation, "projection matrix has wrong row count");
  const double scale = linalg::spectral_norm(A) * linalg::spectral_norm(P);
  require(scale > 0.0, ErrorKind::InvalidProjection, "constraint or projection matrix is zero");
  require(linalg::spectral_norm(A * P) <= 1e-10 * scale, ErrorKind::InvalidProjection,
          "A P is not zero, so P does not map into null(A)");
  require(linalg::numerical_rank(P) == n - linalg::numerical_rank(A),
          ErrorKind::InvalidProjection, "rank(P) differs from dim null(A)");
}

void check_feasible(const Matrix& A, const Vector& b) {
  require(A.rows() == b.size(), ErrorKind::Validation, "A and b have different row counts");
  const Vector x = linalg::least_squares(A, b);
  require((A * x - b).norm() <= 1e-8 * b.norm() + 1e-14, ErrorKind::Infeasible,
          "b is not in the range of A");
}

}  // namespace

const char* to_string(FlowVariant v) {
  switch (v) {
    case FlowVariant::FirstOrder: return "first_order";
    case FlowVariant::Robust: return "robust";
    case FlowVariant::Newton: return "newton";
    case FlowVariant::TimeVaryingNewton: return "time_varying_newton";
    case FlowVariant::Projected: return "projected";
    case FlowVariant::Feasibility: return "feasibility";
    case FlowVariant::FreeInit: return "free_init";
    case FlowVariant::Proximal: return "proximal";
    case FlowVariant::Epgf: return "epgf";
    case FlowVariant::Epa: return "epa";
    case FlowVariant::Consensus: return "consensus";
    case FlowVariant::RowPartition: return "row_partition";
    case FlowVariant::ColumnPartition: return "column_partition";
  }
  return "unknown";
}

FlowSpec first_order_flow(const Objective& obj, const ProtocolSum& g) {
  obj.validate();
  FlowSpec spec;
  spec.variant = FlowVariant::FirstOrder;
  spec.description = "first_order: " + g.describe();
  spec.rhs = [obj, g](const Vector& x, double, double reg) -> Vector {
    return -g.eval(obj.grad(x), reg);
  };
  return spec;
}

FlowSpec robust_flow(const Objective& obj, const Protocol& g0, const Protocol& gq,
                     const std::optional<DisturbanceModel>& dist, double safety_multiplier) {
  obj.validate();
  const ClassConstants c0 = class_constants(g0, obj.dim);
  require(c0.tabulated() && c0.exponent == 0.0, ErrorKind::Validation,
          "robust flow needs a sliding term with p = 0, got " + g0.describe());
  const ClassConstants cq = class_constants(gq, obj.dim);
  require(cq.tabulated() && cq.exponent > 1.0, ErrorKind::Validation,
          "robust flow needs a high-order term with q > 1, got " + gq.describe());

  FlowSpec spec;
  spec.variant = FlowVariant::Robust;
  spec.description = "robust: " + g0.describe() + " + " + gq.describe();
  if (dist) {
    require(obj.pl_mu.has_value(), ErrorKind::CertificateMissing,
            "robust condition needs the PL constant");
    spec.robust_condition = robust_condition_check(c0.coefficient, cq.coefficient, cq.exponent,
                                                   *dist, *obj.pl_mu, safety_multiplier);
  }
  spec.rhs = [obj, g0, gq](const Vector& x, double, double reg) -> Vector {
    const Vector y = obj.grad(x);
    return -(g0.eval(y, reg) + gq.eval(y, reg));
  };
  return spec;
}

FlowSpec newton_flow(const Objective& obj, const ProtocolSum& g) {
  obj.validate();
  require(obj.has_hessian(), ErrorKind::Validation, "newton flow needs the Hessian");
  FlowSpec spec;
  spec.variant = FlowVariant::Newton;
  spec.description = "newton: " + g.describe();
  spec.rhs = [obj, g](const Vector& x, double, double reg) -> Vector {
    return -newton_step(obj.hessian(x), g.eval(obj.grad(x), reg), x);
  };
  return spec;
}

void TimeVaryingObjective::validate() const {
  require(dim > 0, ErrorKind::Validation, "objective dimension must be positive");
  require(static_cast<bool>(f) && static_cast<bool>(grad), ErrorKind::Validation,
          "time-varying objective needs f and grad");
}

Vector TimeVaryingObjective::grad_time_derivative(const Vector& x, double t) const {
  if (grad_t) return grad_t(x, t);
  const double h = 1e-6;
  return (grad(x, t + h) - grad(x, t - h)) / (2.0 * h);
}

Objective TimeVaryingObjective::at(double t) const {
  validate();
  Objective obj;
  obj.dim = dim;
  auto fn = f;
  auto gr = grad;
  obj.f = [fn, t](const Vector& x) { return fn(x, t); };
  obj.grad = [gr, t](const Vector& x) { return gr(x, t); };
  if (hessian) {
    auto he = hessian;
    obj.hessian = [he, t](const Vector& x) { return he(x, t); };
  }
  if (minimizer) {
    const Vector xs = minimizer(t);
    obj.f_star = fn(xs, t);
    obj.minimizer_projection = [xs](const Vector&) { return xs; };
  }
  return obj;
}

MonitorFn TimeVaryingObjective::monitor() const {
  auto fn = f;
  auto gr = grad;
  return [fn, gr](const Vector& x, double t) {
    return MonitorSample{fn(x, t), gr(x, t).norm()};
  };
}

FlowSpec time_varying_newton_flow(const TimeVaryingObjective& obj, const ProtocolSum& g) {
  obj.validate();
  require(static_cast<bool>(obj.hessian), ErrorKind::Validation,
          "time-varying newton flow needs the Hessian");
  FlowSpec spec;
  spec.variant = FlowVariant::TimeVaryingNewton;
  spec.description = "time_varying_newton: " + g.describe();
  spec.rhs = [obj, g](const Vector& x, double t, double reg) -> Vector {
    const Vector drive = g.eval(obj.grad(x, t), reg) + obj.grad_time_derivative(x, t);
    return -newton_step(obj.hessian(x, t), drive, x);
  };
  return spec;
}

Matrix orthogonal_projector(const Matrix& A) {
  require(A.size() > 0 && A.cwiseAbs().maxCoeff() > 0.0, ErrorKind::Validation,
          "constraint matrix is numerically zero");
  const int n = static_cast<int>(A.cols());
  // Column pivoting on A' picks a maximal independent set of rows of A.
  Eigen::ColPivHouseholderQR<Matrix> qr(A.transpose());
  qr.setThreshold(linalg::kZeroCutoff);
  const int r = static_cast<int>(qr.rank());
  if (r == n) return Matrix::Zero(n, n);
  Matrix At(r, n);
  const auto& perm = qr.colsPermutation().indices();
  for (int k = 0; k < r; ++k) At.row(k) = A.row(perm[k]);
  const Matrix gram = At * At.transpose();
  Eigen::LLT<Matrix> llt(gram);
  require(llt.info() == Eigen::Success, ErrorKind::Validation,
          "selected constraint rows are not independent");
  Matrix P = Matrix::Identity(n, n) - At.transpose() * llt.solve(At);
  return 0.5 * (P + P.transpose());
}

FlowSpec projected_flow(const Objective& obj, const Matrix& A, const Matrix& P,
                        const ProtocolSum& g) {
  obj.validate();
  require(obj.strongly_convex, ErrorKind::CertificateMissing,
          "projected flow needs an objective asserted strongly convex");
  check_projection(A, P, obj.dim);
  FlowSpec spec;
  spec.variant = FlowVariant::Projected;
  if (g.is_span_preserving() && is_orthogonal_projector(P)) {
    // g(Py) is a multiple of Py, and P is idempotent.
    spec.description = "projected (orthogonal, simplified): " + g.describe();
    spec.rhs = [obj, P, g](const Vector& x, double, double reg) -> Vector {
      return -g.eval(P * obj.grad(x), reg);
    };
  } else {
    spec.description = "projected: " + g.describe();
    spec.rhs = [obj, P, g](const Vector& x, double, double reg) -> Vector {
      return -(P * g.eval(P.transpose() * obj.grad(x), reg));
    };
  }
  return spec;
}

FlowSpec feasibility_flow(const Matrix& A, const Vector& b, const ProtocolSum& g_hat) {
  require(A.size() > 0, ErrorKind::Validation, "constraint matrix is empty");
  require(g_hat.is_span_preserving(), ErrorKind::Validation,
          "feasibility flow needs g_hat(y) in span{y}, got " + g_hat.describe());
  check_feasible(A, b);
  FlowSpec spec;
  spec.variant = FlowVariant::Feasibility;
  spec.description = "feasibility: " + g_hat.describe();
  spec.rhs = [A, b, g_hat](const Vector& x, double, double reg) -> Vector {
    return -(A.transpose() * g_hat.eval(A * x - b, reg));
  };
  return spec;
}

FlowSpec free_init_flow(const Objective& obj, const Matrix& A, const Vector& b, const Matrix& P,
                        const ProtocolSum& g, const ProtocolSum& g_hat) {
  const FlowSpec proj = projected_flow(obj, A, P, g);
  const FlowSpec feas = feasibility_flow(A, b, g_hat);
  FlowSpec spec;
  spec.variant = FlowVariant::FreeInit;
  spec.description = "free_init: " + g.describe() + " | " + g_hat.describe();
  auto r1 = proj.rhs;
  auto r2 = feas.rhs;
  spec.rhs = [r1, r2](const Vector& x, double t, double reg) -> Vector {
    return r1(x, t, reg) + r2(x, t, reg);
  };
  return spec;
}

FlowSpec proximal_flow(const Objective& f_obj, const ProxFunction& h, double lambda, double kp,
                       double kq, double p, double q) {
  f_obj.validate();
  require(f_obj.grad_lipschitz.has_value(), ErrorKind::CertificateMissing,
          "proximal flow needs the gradient Lipschitz constant");
  validate_prox_step(f_obj, lambda);
  const ProtocolSum g = Protocol::rescaled(p, 2.0, kp) + Protocol::power(q, 2.0, kq);
  FlowSpec spec;
  spec.variant = FlowVariant::Proximal;
  spec.description = "proximal: " + g.describe();
  spec.rhs = [f_obj, h, lambda, g](const Vector& x, double, double reg) -> Vector {
    return -g.eval(fb_residual(f_obj, h, lambda, x), reg);
  };
  return spec;
}

FlowSpec epgf_flow(const Objective& f_obj, const ProxFunction& h, double lambda) {
  f_obj.validate();
  require(f_obj.grad_lipschitz.has_value(), ErrorKind::CertificateMissing,
          "proximal flow needs the gradient Lipschitz constant");
  validate_prox_step(f_obj, lambda);
  FlowSpec spec;
  spec.variant = FlowVariant::Epgf;
  spec.description = "epgf";
  spec.rhs = [f_obj, h, lambda](const Vector& x, double, double) -> Vector {
    return -fb_residual(f_obj, h, lambda, x);
  };
  return spec;
}

FlowSpec epa_flow(const Graph& graph, const std::vector<Matrix>& blocks,
                  const std::vector<Vector>& rhs_blocks, double gain, double low_exponent,
                  double high_exponent) {
  const int N = graph.size();
  require(static_cast<int>(blocks.size()) == N && static_cast<int>(rhs_blocks.size()) == N,
          ErrorKind::Validation, "need one block per agent");
  const int n = static_cast<int>(blocks.front().cols());
  std::vector<Matrix> proj;
  for (int i = 0; i < N; ++i) {
    const Matrix& Ai = blocks[i];
    require(Ai.cols() == n && Ai.rows() == rhs_blocks[i].size(), ErrorKind::Validation,
            "agent block dimensions are inconsistent");
    require(linalg::numerical_rank(Ai) == Ai.rows(), ErrorKind::Validation,
            "agent block " + std::to_string(i) + " is not full row rank");
    const Matrix gram = Ai * Ai.transpose();
    proj.push_back(Matrix::Identity(n, n) - Ai.transpose() * gram.llt().solve(Ai));
  }
  const Matrix L = graph.laplacian();
  const auto nbrs = graph.neighbors();
  FlowSpec spec;
  spec.variant = FlowVariant::Epa;
  spec.description = "epa";
  spec.rhs = [=](const Vector& x, double, double) -> Vector {
    Vector out(N * n);
    for (int i = 0; i < N; ++i) {
      const Vector xi = x.segment(i * n, n);
      Vector cons = Vector::Zero(n);
      for (int j : nbrs[i]) {
        const Vector diff = xi - x.segment(j * n, n);
        cons += -L(i, j) * (signed_power(diff, low_exponent) + signed_power(diff, high_exponent));
      }
      const Vector res = blocks[i] * xi - rhs_blocks[i];
      const Vector local =
          blocks[i].transpose() * (signed_power(res, low_exponent) + signed_power(res, high_exponent));
      out.segment(i * n, n) = -gain * (proj[i] * cons + local);
    }
    return out;
  };
  return spec;
}

ResidualFn projected_gradient_residual(const Objective& obj, const Matrix& A) {
  const Matrix P = orthogonal_projector(A);
  return [obj, P](const Vector& x, double) { return (P * obj.grad(x)).norm(); };
}

}  // namespace fxt
