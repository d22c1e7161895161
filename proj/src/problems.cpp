#include "fxtflow/problems.hpp"

#include "fxtflow/linalg.hpp"

#include <cmath>
#include <random>

namespace fxt {
namespace {

std::vector<Vector> uniform_states(int count, int dim, double lo, double hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<Vector> out;
  for (int k = 0; k < count; ++k) {
    Vector x(dim);
    for (int i = 0; i < dim; ++i) x[i] = u(rng);
    out.push_back(x);
  }
  return out;
}

ResidualFn distance_to(const Vector& target) {
  return [target](const Vector& x, double) { return (x - target).norm(); };
}

ResidualFn gradient_norm(const Objective& obj) {
  return [obj](const Vector& x, double) { return obj.grad(x).norm(); };
}

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

const MethodSpec& CaseInstance::method(const std::string& name) const {
  for (const auto& m : methods)
    if (m.name == name) return m;
  fail(ErrorKind::Usage, "case " + std::to_string(id) + " has no method '" + name + "'");
}

LogisticData make_logistic_data(int count, std::uint64_t seed) {
  require(count >= 1, ErrorKind::Validation, "need at least one sample");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> along(-5.0, 5.0);
  std::normal_distribution<double> across(0.0, 1.0);
  const double s = 1.0 / std::sqrt(2.0);
  LogisticData data;
  data.samples.resize(count, 2);
  data.labels.resize(count);
  for (int k = 0; k < count; ++k) {
    const double t = along(rng);
    double nu = across(rng);
    while (nu == 0.0) nu = across(rng);
    data.samples(k, 0) = s * (t + nu);
    data.samples(k, 1) = s * (t - nu);
    data.labels[k] = nu > 0.0 ? 1.0 : -1.0;
  }
  return data;
}

Objective logistic_objective(const LogisticData& data, double beta) {
  require(beta > 0.0, ErrorKind::Validation, "regularization must be positive");
  const int K = static_cast<int>(data.samples.rows());
  const int n = static_cast<int>(data.samples.cols());
  // Rows l_k z_k' so the margin is Zl x.
  const Matrix Zl = data.labels.asDiagonal() * data.samples;
  Objective obj;
  obj.dim = n;
  obj.f = [Zl, beta, K](const Vector& x) {
    const Vector m = Zl * x;
    double s = 0.0;
    for (int k = 0; k < K; ++k) s += softplus(-m[k]);
    return s / K + 0.5 * beta * x.squaredNorm();
  };
  obj.grad = [Zl, beta, K](const Vector& x) -> Vector {
    const Vector m = Zl * x;
    Vector w(K);
    for (int k = 0; k < K; ++k) w[k] = -logistic(-m[k]);
    return Zl.transpose() * w / K + beta * x;
  };
  obj.hessian = [Zl, beta, K, n](const Vector& x) -> Matrix {
    const Vector m = Zl * x;
    Vector w(K);
    for (int k = 0; k < K; ++k) {
      const double s = logistic(m[k]);
      w[k] = s * (1.0 - s);
    }
    return Zl.transpose() * w.asDiagonal() * Zl / K + beta * Matrix::Identity(n, n);
  };
  obj.pl_mu = beta;
  obj.strongly_convex = true;
  obj.grad_lipschitz = beta + 0.25 * linalg::largest_eigenvalue(Zl.transpose() * Zl) / K;
  return obj;
}

Vector gradient_descent_minimizer(const Objective& obj, const Vector& x0, double tol,
                                  int max_iter) {
  require(obj.grad_lipschitz && *obj.grad_lipschitz > 0.0, ErrorKind::CertificateMissing,
          "gradient descent needs the gradient Lipschitz constant");
  const double step = 1.0 / *obj.grad_lipschitz;
  Vector x = x0;
  for (int k = 0; k < max_iter; ++k) {
    const Vector g = obj.grad(x);
    if (g.norm() <= tol) return x;
    x -= step * g;
  }
  fail(ErrorKind::Divergence, "gradient descent did not reach the tolerance");
}

Objective least_squares_objective(const Matrix& A, const Vector& b) {
  require(A.rows() == b.size(), ErrorKind::Validation, "A and b have different row counts");
  const Matrix Q = A.transpose() * A;
  Objective obj = quadratic_objective(0.5 * (Q + Q.transpose()), -(A.transpose() * b));
  const double shift = 0.5 * b.squaredNorm();
  auto f = obj.f;
  obj.f = [f, shift](const Vector& x) { return f(x) + shift; };
  obj.f_star = *obj.f_star + shift;
  if (std::abs(*obj.f_star) < 1e-12 * (1.0 + shift)) obj.f_star = 0.0;
  return obj;
}

Objective dispatch_objective(const Vector& a, const Vector& b, const Vector& c) {
  require(a.size() == b.size() && b.size() == c.size() && a.size() > 0, ErrorKind::Validation,
          "cost coefficient vectors must have equal length");
  require(a.minCoeff() > 0.0, ErrorKind::Validation, "quadratic cost coefficients must be positive");
  Objective obj;
  obj.dim = static_cast<int>(a.size());
  obj.f = [a, b, c](const Vector& x) {
    return (a.array() * x.array().square() + b.array() * x.array() + c.array()).sum();
  };
  obj.grad = [a, b](const Vector& x) -> Vector { return (2.0 * a.array() * x.array() + b.array()).matrix(); };
  obj.hessian = [a](const Vector&) -> Matrix { return (2.0 * a).asDiagonal(); };
  obj.grad_lipschitz = 2.0 * a.maxCoeff();
  obj.pl_mu = 2.0 * a.minCoeff();
  obj.strongly_convex = true;
  return obj;
}

DispatchSolution dispatch_kkt(const Vector& a, const Vector& b, double demand) {
  require(a.size() == b.size() && a.size() > 0, ErrorKind::Validation,
          "cost vectors must have equal nonzero length");
  require(a.minCoeff() > 0.0, ErrorKind::Validation, "quadratic cost coefficients must be positive");
  // 2 a_i x_i + b_i = lambda for all i, sum x_i = demand.
  const Vector inv = (0.5 * a.cwiseInverse());
  DispatchSolution s;
  s.lambda = (demand + b.cwiseProduct(inv).sum()) / inv.sum();
  s.x = (s.lambda - b.array()).matrix().cwiseProduct(inv);
  return s;
}

Objective random_quadratic(int n, double mu, double lipschitz, std::uint64_t seed) {
  require(n >= 1, ErrorKind::Validation, "dimension must be positive");
  require(mu > 0.0 && lipschitz >= mu, ErrorKind::Validation, "need 0 < mu <= L");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = normal(rng);
  const Matrix U = Eigen::HouseholderQR<Matrix>(G).householderQ();
  Vector spec(n);
  spec[0] = mu;
  if (n > 1) spec[n - 1] = lipschitz;
  for (int i = 1; i + 1 < n; ++i) spec[i] = mu + (lipschitz - mu) * unit(rng);
  Matrix Q = U * spec.asDiagonal() * U.transpose();
  Q = 0.5 * (Q + Q.transpose());
  Vector center(n);
  for (int i = 0; i < n; ++i) center[i] = normal(rng);
  Objective obj = quadratic_objective(Q, -(Q * center));
  obj.pl_mu = mu;
  obj.grad_lipschitz = n > 1 ? lipschitz : mu;
  return obj;
}

CaseInstance build_case1(std::uint64_t seed, double safety_multiplier) {
  CaseInstance inst;
  inst.id = 1;
  inst.title = "logistic regression with disturbance";
  inst.seed = seed;
  const int K = 500;
  const double beta = 1.0;
  const LogisticData data = make_logistic_data(K, seed);
  Objective obj = logistic_objective(data, beta);
  const Vector xs = gradient_descent_minimizer(obj, Vector::Zero(2), 1e-10);
  obj.f_star = obj.f(xs);
  obj.minimizer_projection = [xs](const Vector&) { return xs; };
  inst.objective = obj;
  inst.reference_solution = xs;
  inst.reference_value = *obj.f_star;

  const DisturbanceModel dist = DisturbanceModel::state_scaled_plus_bounded(
      1.0, 1.0, DisturbanceModel::Direction::Rotating);
  IntegratorConfig cfg;
  cfg.dt = 1e-4;
  cfg.t_max = 5.0;
  cfg.record_stride = 10;
  cfg.settle_tol = 1e-3;
  cfg.stop_when_settled = false;
  cfg.seed = seed;
  const auto x0s = uniform_states(5, 2, -100.0, 100.0, seed + 1000);

  MethodSpec robust;
  robust.name = "g_0_2";
  robust.flow = robust_flow(obj, Protocol::rescaled(0.0, 2.0, 3.0), Protocol::power(2.0, 2.0, 3.0), dist,
                            safety_multiplier);
  robust.objective = obj;
  robust.disturbance = dist;
  robust.integrator = cfg;
  robust.settle_metric = distance_to(xs);
  robust.error_metric = distance_to(xs);
  robust.initial_states = x0s;
  robust.bound = robust_bound(1.0, 3.0, 3.0, 2.0, dist.epsilon, dist.dbar, safety_multiplier);
  inst.methods.push_back(robust);

  MethodSpec vanishing = robust;
  vanishing.name = "g_0.5_2";
  vanishing.flow = first_order_flow(
      obj, Protocol::rescaled(0.5, 2.0, 3.0) + Protocol::power(2.0, 2.0, 3.0));
  vanishing.bound.reset();
  inst.methods.push_back(vanishing);

  inst.data = {{"samples", data.samples}, {"labels", data.labels}, {"x_star", xs}};
  inst.scalars = {{"K", K}, {"beta", beta}, {"mu", beta}, {"epsilon", 1.0}, {"dbar", 1.0},
                  {"L_f", *obj.grad_lipschitz}};
  inst.notes = {{"data", "z = t(1,1)/sqrt2 + nu(1,-1)/sqrt2, t~U[-5,5], nu~N(0,1), label sign(nu)"},
                {"x_star", "gradient descent with step 1/L_f to |grad f| <= 1e-10"},
                {"disturbance", "(sin t, cos t)(1 + |x - x*|)"}};
  return inst;
}

CaseInstance build_case2(std::uint64_t seed) {
  CaseInstance inst;
  inst.id = 2;
  inst.title = "lasso with box constraint";
  inst.seed = seed;
  Matrix A(3, 4);
  A << 1, 0, -1, 0,
       1, 2, -1, -1,
       0, 0, 0, 1;
  const Vector b = Vector::Ones(3);
  const double gamma = 1.0, lambda = 0.1, p = 0.5, q = 2.0, kappa = 1.0;
  const double F_star = 1.25;
  const Objective f = least_squares_objective(A, b);
  const ProxFunction h = ProxFunction::l1_plus_box(gamma, Vector::Constant(4, -5.0),
                                                   Vector::Constant(4, 5.0));
  inst.objective = f;
  inst.prox = h;
  inst.prox_lambda = lambda;
  inst.reference_value = F_star;

  Objective env;
  env.dim = 4;
  env.f = [f, h, lambda](const Vector& x) { return fb_envelope(f, h, lambda, x); };
  env.grad = [f, h, lambda](const Vector& x) { return fb_envelope_gradient(f, h, lambda, x); };
  env.f_star = F_star;

  IntegratorConfig cfg;
  cfg.dt = 1e-4;
  cfg.t_max = 5.0;
  cfg.record_stride = 10;
  cfg.settle_tol = 1e-4;
  cfg.stop_when_settled = false;
  cfg.seed = seed;
  const auto x0s = uniform_states(3, 4, -5.0, 5.0, seed + 1000);
  ResidualFn gap = [f, h, lambda, F_star](const Vector& x, double) {
    return fb_envelope(f, h, lambda, x) - F_star;
  };

  const ProximalPlFit fit = fit_proximal_pl_constant(f, h, lambda, F_star, Vector::Constant(4, -5.0),
                                                     Vector::Constant(4, 5.0), 10000, seed + 7);

  MethodSpec fxt;
  fxt.name = "fxtpgf";
  fxt.flow = proximal_flow(f, h, lambda, kappa, kappa, p, q);
  fxt.objective = env;
  fxt.integrator = cfg;
  fxt.settle_metric = gap;
  fxt.error_metric = gap;
  fxt.initial_states = x0s;
  if (fit.mu > 0.0) fxt.bound = proximal_bound(fit.mu, lambda, *f.grad_lipschitz, kappa, kappa, p, q);
  inst.methods.push_back(fxt);

  MethodSpec epgf = fxt;
  epgf.name = "epgf";
  epgf.flow = epgf_flow(f, h, lambda);
  epgf.bound.reset();
  inst.methods.push_back(epgf);

  inst.data = {{"A", A}, {"b", b}};
  inst.scalars = {{"gamma", gamma}, {"lambda", lambda}, {"p", p}, {"q", q}, {"kappa_p", kappa},
                  {"kappa_q", kappa}, {"F_star", F_star}, {"L_f", *f.grad_lipschitz},
                  {"fitted_mu", fit.mu}};
  inst.notes = {{"h", "|x|_1 + indicator of [-5,5]^4"}};
  return inst;
}

CaseInstance build_case3(std::uint64_t seed) {
  CaseInstance inst;
  inst.id = 3;
  inst.title = "distributed linear equations with disturbance";
  inst.seed = seed;
  Matrix A(6, 5);
  A << 3, 4, -3, -2, -2,
       1, -2, -4, -5, 3,
       4, 5, -2, -2, -2,
       0, -4, 4, 4, 4,
       3, -4, -3, 4, 2,
       5, -3, -5, -5, 2;
  Vector b(6);
  b << 2, 0, 5, 4, -5, -4;
  const Graph graph = Graph::circle(4);
  const PartitionedSystem sys = PartitionedSystem::by_rows(A, b, {2, 2, 1, 1}, 1.0);
  const Objective dist_obj = row_partition_objective(sys, graph);
  const Objective cent_obj = least_squares_objective(A, b);
  inst.objective = cent_obj;
  inst.reference_solution = linalg::least_squares(A, b);
  inst.reference_value = 0.0;

  const ProtocolSum g_d = Protocol::signum(3.0) + Protocol::componentwise_power(1.5, 3.0);
  const ProtocolSum g_c2 = Protocol::rescaled(0.0, 2.0, 3.0) + Protocol::power(1.5, 2.0, 3.0);
  const auto dist20 = DisturbanceModel::sinusoid(Vector::Constant(20, 0.2), 1.0);
  const auto dist5 = DisturbanceModel::sinusoid(Vector::Constant(5, 0.2), 1.0);

  IntegratorConfig cfg;
  cfg.dt = 1e-6;
  cfg.t_max = 10.0;
  cfg.record_stride = 1000;
  cfg.settle_tol = 1e-3;
  cfg.stop_when_settled = false;
  cfg.seed = seed;
  const auto x0_dist = uniform_states(1, 20, -5.0, 5.0, seed + 1000);
  const auto x0_cent = uniform_states(1, 5, -5.0, 5.0, seed + 2000);

  const double lam_dist = *dist_obj.pl_mu;
  const double lam_cent = linalg::smallest_nonzero_eigenvalue(A * A.transpose());

  MethodSpec distributed;
  distributed.name = "distributed_g_d";
  distributed.flow = row_partition_flow(sys, graph, g_d);
  distributed.objective = dist_obj;
  distributed.disturbance = dist20;
  distributed.integrator = cfg;
  distributed.settle_metric = gradient_norm(dist_obj);
  distributed.error_metric = gradient_norm(dist_obj);
  distributed.initial_states = x0_dist;
  {
    const ClassConstants c0 = class_constants(Protocol::signum(3.0), 20);
    const ClassConstants cq = class_constants(Protocol::componentwise_power(1.5, 3.0), 20);
    distributed.bound = robust_bound(lam_dist, c0.coefficient, cq.coefficient, cq.exponent, 0.0,
                                     dist20.dbar);
  }
  inst.methods.push_back(distributed);

  MethodSpec c1;
  c1.name = "centralized_g_c1";
  c1.flow = first_order_flow(cent_obj, g_d);
  c1.objective = cent_obj;
  c1.disturbance = dist5;
  // The centralized sliding modes chatter at ~3 dt lambda_max(AA') in the
  // residual; dt = 1e-7 keeps |grad f| well under 1e-3 over a full period.
  c1.integrator = cfg;
  c1.integrator.dt = 1e-7;
  c1.integrator.t_max = 7.0;
  c1.integrator.record_stride = 10000;
  c1.settle_metric = gradient_norm(cent_obj);
  c1.error_metric = gradient_norm(cent_obj);
  c1.initial_states = x0_cent;
  {
    const ClassConstants c0 = class_constants(Protocol::signum(3.0), 5);
    const ClassConstants cq = class_constants(Protocol::componentwise_power(1.5, 3.0), 5);
    c1.bound = robust_bound(*cent_obj.pl_mu, c0.coefficient, cq.coefficient, cq.exponent, 0.0,
                            dist5.dbar);
  }
  inst.methods.push_back(c1);

  MethodSpec c2 = c1;
  c2.name = "centralized_g_c2";
  c2.flow = feasibility_flow(A, b, g_c2);
  c2.bound = feasibility_bound(3.0, 3.0, 0.0, 1.5, lam_cent);
  inst.methods.push_back(c2);

  MethodSpec epa = distributed;
  epa.name = "epa";
  epa.flow = epa_flow(graph, sys.blocks, sys.rhs, 3.0, 0.5, 1.5);
  epa.bound.reset();
  epa.integrator.dt = 1e-5;
  epa.integrator.record_stride = 100;
  inst.methods.push_back(epa);

  inst.data = {{"A", A}, {"b", b}, {"laplacian", graph.laplacian()}};
  inst.scalars = {{"delta", 1.0}, {"disturbance_amplitude", 0.2},
                  {"lambda2_distributed", lam_dist}, {"lambda2_AAt", lam_cent}};
  inst.notes = {{"partition", "rows {1,2} {3,4} {5} {6}"},
                {"graph", "circle, N = 4, unit weights"},
                {"disturbance", "0.2 sin t on every state component"}};
  return inst;
}

CaseInstance build_case4(std::uint64_t seed) {
  CaseInstance inst;
  inst.id = 4;
  inst.title = "economic dispatch";
  inst.seed = seed;
  Vector a(4), bc(4), c(4), d(4);
  a << 0.001562, 0.00194, 0.00482, 0.00228;
  bc << 7.92, 7.85, 7.97, 7.48;
  c << 561, 310, 78, 459;
  d << 60, 40, 50, 80;
  const double demand = d.sum();
  Objective obj = dispatch_objective(a, bc, c);
  const DispatchSolution kkt = dispatch_kkt(a, bc, demand);
  const Vector xs = kkt.x;
  obj.minimizer_projection = [xs](const Vector&) { return xs; };
  inst.objective = obj;
  inst.reference_solution = kkt.x;
  inst.reference_value = obj.f(xs);

  const Matrix L1 = Graph::circle(4).laplacian() / 4.0;
  const Matrix L2 = Graph::complete(4).laplacian() / 4.0;
  const Matrix ones = Matrix::Ones(1, 4);
  const ProtocolSum g = Protocol::signum() + Protocol::componentwise_power(1.5);

  IntegratorConfig cfg;
  cfg.dt = 1e-4;
  cfg.t_max = 150.0;
  cfg.record_stride = 100;
  cfg.settle_tol = 1e-2;
  cfg.stop_when_settled = false;
  cfg.seed = seed;

  const double mu = 2.0 * a.minCoeff();
  const ClassConstants c0 = class_constants(Protocol::signum(), 4);
  const ClassConstants cq = class_constants(Protocol::componentwise_power(1.5), 4);

  auto make = [&](const std::string& name, const Matrix& P, const ProtocolSum& proto,
                  bool with_bound) {
    MethodSpec m;
    m.name = name;
    m.flow = projected_flow(obj, ones, P, proto);
    m.objective = obj;
    m.integrator = cfg;
    m.settle_metric = distance_to(xs);
    m.error_metric = distance_to(xs);
    m.initial_states = {d};
    if (with_bound) {
      const DispatchProjection dp = dispatch_projection(P);
      m.bound = projected_bound(mu, dp.lambda2_ptp, c0.coefficient, cq.coefficient, 0.0,
                                cq.exponent);
    }
    return m;
  };
  inst.methods.push_back(make("fxt_L1", L1, g, true));
  inst.methods.push_back(make("fxt_L2", L2, g, true));
  inst.methods.push_back(make("sign_L2", L2, Protocol::signum(), false));
  inst.methods.push_back(make("laplacian_gradient_L2", L2, Protocol::identity(), false));

  Matrix table(4, 4);
  table << a.transpose(), bc.transpose(), c.transpose(), d.transpose();
  inst.data = {{"cost_abcd", table}, {"L1", L1}, {"L2", L2}, {"x_star", xs}};
  inst.scalars = {{"demand", demand}, {"lambda_star", kkt.lambda}, {"mu", mu}};
  inst.notes = {{"x0", "local demands d"}, {"x_star", "equal incremental cost solution"}};
  return inst;
}

CaseInstance build_case(int id, std::uint64_t seed, double safety_multiplier) {
  switch (id) {
    case 1: return build_case1(seed, safety_multiplier);
    case 2: return build_case2(seed);
    case 3: return build_case3(seed);
    case 4: return build_case4(seed);
    default: fail(ErrorKind::Usage, "unknown case id " + std::to_string(id) + " (expected 1-4)");
  }
}

}  // namespace fxt
