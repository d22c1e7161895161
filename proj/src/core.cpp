#include "fxtflow/core.hpp"

#include "fxtflow/linalg.hpp"

#include <cmath>
#include <sstream>

namespace fxt {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Validation: return "validation";
    case ErrorKind::CertificateMissing: return "certificate-missing";
    case ErrorKind::UnboundedObjective: return "unbounded-objective";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::SingularHessian: return "singular-hessian";
    case ErrorKind::InvalidProjection: return "invalid-projection";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::DistributednessViolation: return "distributedness-violation";
    case ErrorKind::Configuration: return "configuration";
    case ErrorKind::Usage: return "usage";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, std::string(to_string(kind)) + ": " + what);
}

void Objective::validate() const {
  require(dim > 0, ErrorKind::Validation, "objective dimension must be positive");
  require(static_cast<bool>(f), ErrorKind::Validation, "objective has no cost callable");
  require(static_cast<bool>(grad), ErrorKind::Validation, "objective has no gradient callable");
  if (pl_mu) require(*pl_mu > 0.0, ErrorKind::Validation, "PL constant must be positive");
}

void Trajectory::validate() const {
  const auto n = times.size();
  require(states.size() == n && costs.size() == n && grad_norms.size() == n,
          ErrorKind::Validation, "trajectory columns have different lengths");
  for (std::size_t i = 1; i < n; ++i) {
    require(times[i] > times[i - 1], ErrorKind::Validation,
            "trajectory times are not strictly increasing");
  }
  if (settling_time) {
    bool found = false;
    for (double t : times) found = found || t == *settling_time;
    require(found, ErrorKind::Validation, "settling time is not a sampled time");
  }
}

double pl_residual(const Objective& obj, const Vector& x) {
  require(obj.pl_mu.has_value() && obj.f_star.has_value(), ErrorKind::CertificateMissing,
          "PL residual needs both pl_mu and f_star");
  const Vector g = obj.grad(x);
  return 0.5 * g.squaredNorm() - *obj.pl_mu * (obj.f(x) - *obj.f_star);
}

Objective quadratic_objective(const Matrix& Q, const Vector& c) {
  require(Q.rows() == Q.cols() && Q.rows() > 0, ErrorKind::Validation,
          "quadratic matrix must be square and nonempty");
  require(c.size() == Q.rows(), ErrorKind::Validation, "linear term has wrong length");
  require(linalg::is_symmetric(Q), ErrorKind::Validation, "quadratic matrix is not symmetric");

  Eigen::SelfAdjointEigenSolver<Matrix> eig(Q);
  const Vector& vals = eig.eigenvalues();
  const Matrix& vecs = eig.eigenvectors();
  const double top = std::max(std::abs(vals.minCoeff()), std::abs(vals.maxCoeff()));
  const double cut = linalg::kZeroCutoff * top;
  require(vals.minCoeff() >= -std::max(cut, 1e-14), ErrorKind::Validation,
          "quadratic matrix is not positive semidefinite");

  const int n = static_cast<int>(Q.rows());
  Matrix range_basis(n, 0);
  Vector inv_vals;
  {
    std::vector<int> keep;
    for (int i = 0; i < n; ++i) {
      if (top > 0.0 && vals[i] > cut) keep.push_back(i);
    }
    range_basis.resize(n, static_cast<int>(keep.size()));
    inv_vals.resize(static_cast<int>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
      range_basis.col(static_cast<int>(k)) = vecs.col(keep[k]);
      inv_vals[static_cast<int>(k)] = 1.0 / vals[keep[k]];
    }
  }

  const Vector c_range = range_basis * (range_basis.transpose() * c);
  require((c - c_range).norm() <= 1e-8 * std::max(1.0, c.norm()), ErrorKind::UnboundedObjective,
          "linear term is not in the range of the quadratic matrix");

  // Least-squares minimizer of Qx = -c and the projector onto null(Q).
  const Vector x_ls = -(range_basis * inv_vals.asDiagonal() * (range_basis.transpose() * c));
  const Matrix null_proj = Matrix::Identity(n, n) - range_basis * range_basis.transpose();

  Objective obj;
  obj.dim = n;
  obj.strongly_convex = range_basis.cols() == n;
  obj.f = [Q, c](const Vector& x) { return 0.5 * x.dot(Q * x) + c.dot(x); };
  obj.grad = [Q, c](const Vector& x) -> Vector { return Q * x + c; };
  obj.hessian = [Q](const Vector&) -> Matrix { return Q; };
  obj.f_star = 0.5 * x_ls.dot(Q * x_ls) + c.dot(x_ls);
  if (range_basis.cols() > 0) {
    obj.pl_mu = vals[static_cast<int>(n - range_basis.cols())];
    obj.grad_lipschitz = vals.maxCoeff();
  } else {
    obj.grad_lipschitz = 0.0;
  }
  obj.minimizer_projection = [x_ls, null_proj](const Vector& x) -> Vector {
    return x_ls + null_proj * (x - x_ls);
  };
  return obj;
}

std::vector<GrowthSample> check_quadratic_growth(const Objective& obj,
                                                 const std::vector<Vector>& samples) {
  require(obj.pl_mu && obj.f_star && obj.has_minimizer_projection(),
          ErrorKind::CertificateMissing,
          "quadratic growth check needs pl_mu, f_star and a minimizer projection");
  std::vector<GrowthSample> out;
  out.reserve(samples.size());
  for (const auto& x : samples) {
    const Vector proj = obj.minimizer_projection(x);
    const double dist = (x - proj).norm();
    GrowthSample s;
    if (dist > 1e-14 * std::max(1.0, x.norm())) {
      s.cost_ratio = (obj.f(x) - *obj.f_star) / (dist * dist);
      s.gradient_ratio = obj.grad(x).norm() / dist;
    }
    out.push_back(s);
  }
  return out;
}

Vector finite_difference_gradient(const ScalarFn& f, const Vector& x, double step) {
  Vector g(x.size());
  Vector probe = x;
  for (int i = 0; i < x.size(); ++i) {
    const double h = step * std::max(1.0, std::abs(x[i]));
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

Matrix finite_difference_hessian(const VectorFn& grad, const Vector& x, double step) {
  const int n = static_cast<int>(x.size());
  Matrix H(n, n);
  Vector probe = x;
  for (int j = 0; j < n; ++j) {
    const double h = step * std::max(1.0, std::abs(x[j]));
    probe[j] = x[j] + h;
    const Vector up = grad(probe);
    probe[j] = x[j] - h;
    const Vector down = grad(probe);
    probe[j] = x[j];
    H.col(j) = (up - down) / (2.0 * h);
  }
  return H;
}

double relative_error(const Vector& a, const Vector& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

double relative_error(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace fxt
