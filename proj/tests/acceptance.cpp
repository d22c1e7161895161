// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on failure.
#include "fxtflow/bounds.hpp"
#include "fxtflow/cases.hpp"
#include "fxtflow/flows.hpp"
#include "fxtflow/linalg.hpp"
#include "fxtflow/network.hpp"
#include "fxtflow/problems.hpp"
#include "fxtflow/proximal.hpp"
#include "fxtflow/regret.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <algorithm>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace fxt;

namespace {

struct Outcome {
  bool passed = true;
  std::ostringstream detail;
  int failures = 0;

  void fail(const std::string& what) {
    passed = false;
    if (failures++ < 5) detail << " [" << what << "]";
  }
};

void report(int id, const std::string& title, Outcome& o, double seconds) {
  std::printf("criterion %d: %s - %s (%.1fs)%s\n", id, o.passed ? "PASS" : "FAIL", title.c_str(),
              seconds, o.detail.str().c_str());
  std::fflush(stdout);
}

template <typename F>
bool run_criterion(int id, const std::string& title, F body) {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.fail(std::string("exception: ") + e.what());
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report(id, title, o, secs);
  return o.passed;
}

void case_criterion(int id, Outcome& o) {
  const CaseInstance inst = build_case(id, static_cast<std::uint64_t>(id));
  const CaseResult result = run_case(inst);
  for (const auto& c : result.checks) {
    if (!c.passed) o.fail(c.name + ": " + c.detail);
  }
  if (o.passed) {
    for (const auto& c : result.checks) o.detail << " " << c.name << "(" << c.detail << ")";
  }
}

// ---------------------------------------------------------------------------
// Criterion 5: measured settling against closed-form bounds.

Vector unit_vector(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> nd;
  Vector v(n);
  do {
    for (int i = 0; i < n; ++i) v[i] = nd(rng);
  } while (v.norm() < 1e-3);
  return v / v.norm();
}

// Largest local Lipschitz constant of the protocol on |y| <= G (smooth terms).
double protocol_stiffness(const ProtocolSum& g, double G, int n) {
  double s = 0.0;
  for (const auto& t : g.terms()) {
    switch (t.kind()) {
      case ProtocolKind::Power: {
        // |y|_r <= n^(1/r - 1/2) |y|_2 for r < 2
        const double Gr = G * std::pow(static_cast<double>(n), std::max(0.0, 1.0 / t.r() - 0.5));
        s += t.scale() * t.q() * std::pow(Gr, t.q() - 1.0) * std::sqrt(static_cast<double>(n));
        break;
      }
      case ProtocolKind::ComponentwisePower:
        if (t.alpha() > 1.0) s += t.scale() * t.alpha() * std::pow(G, t.alpha() - 1.0);
        break;
      case ProtocolKind::Identity: s += t.scale(); break;
      case ProtocolKind::ExponentialL2:
      case ProtocolKind::ExponentialL1: s += 2.0 * t.scale() * std::exp(G); break;
      default: break;
    }
  }
  return s;
}

// Size of g near the origin for terms that do not vanish there.
double protocol_jump(const ProtocolSum& g, int n) {
  double c = 0.0;
  for (const auto& t : g.terms()) {
    const bool sliding = t.is_discontinuous_at_zero();
    if (sliding) c += t.scale() * std::sqrt(static_cast<double>(n));
  }
  return c;
}

// Discretization rule: dt keeps the smooth part stable and the sliding chatter
// below kChatter in the settle metric; the tolerance sits above that chatter.
struct StepRule {
  double dt = 1e-4;
  double tol = 1e-6;
};

constexpr double kChatter = 2.5e-4;

StepRule step_rule(const ProtocolSum& g, int n, double lipschitz, double G0, double bound) {
  StepRule r;
  const double stiff = protocol_stiffness(g, G0, n);
  const double jump = protocol_jump(g, n);
  r.dt = std::min(1e-3, bound / 2000.0);
  if (stiff > 0.0) r.dt = std::min(r.dt, 0.05 / (lipschitz * stiff));
  if (jump > 0.0) r.dt = std::min(r.dt, kChatter / (lipschitz * jump));
  r.tol = std::max(1e-6, 4.0 * r.dt * lipschitz * jump);
  // Terms y|y|^(p-1) with p > 0 chatter at (dt L sigma sqrt n)^(1/(1-p)).
  for (const auto& t : g.terms()) {
    double p = -1.0;
    if (t.kind() == ProtocolKind::Rescaled && t.p() > 0.0) p = t.p();
    if (t.kind() == ProtocolKind::ComponentwisePower && t.alpha() > 0.0 && t.alpha() < 1.0)
      p = t.alpha();
    if (p > 0.0) {
      const double base = r.dt * lipschitz * t.scale() * std::sqrt(static_cast<double>(n));
      r.tol = std::max(r.tol, 4.0 * std::pow(base, 1.0 / (1.0 - p)));
    }
  }
  return r;
}

struct PairConstants {
  double sigma, rho, p, q;
};

PairConstants pair_constants(const ProtocolSum& g, int n) {
  const auto a = class_constants(g.terms().at(0), n);
  const auto b = class_constants(g.terms().at(1), n);
  return {a.coefficient, b.coefficient, a.exponent, b.exponent};
}

struct SettleRun {
  std::string label;
  double measured = 0.0;
  double bound = 0.0;
  bool settled = false;
};

SettleRun settle(const std::string& label, const RhsFn& rhs, const Vector& x0, const Objective& obj,
                 const ResidualFn& metric, const StepRule& rule, double bound) {
  IntegratorConfig cfg;
  cfg.dt = rule.dt;
  cfg.settle_tol = rule.tol;
  cfg.t_max = std::max(bound * 1.1 + 0.05, 20.0 * rule.dt);
  // about 20000 samples per run; the settling time is resolved to t_max / 20000
  cfg.record_stride = std::max(1, static_cast<int>(cfg.t_max / rule.dt / 20000.0));
  cfg.stop_when_settled = true;
  if (std::getenv("FXTFLOW_ACCEPTANCE_STEPS")) {
    std::printf("%s steps=%.3g dt=%.3g tol=%.3g bound=%.4g\n", label.c_str(), cfg.t_max / rule.dt,
                rule.dt, rule.tol, bound);
    SettleRun r;
    r.label = label;
    r.bound = bound;
    r.measured = 0.0;
    r.settled = true;
    return r;
  }
  const Trajectory t = integrate(rhs, x0, obj, DisturbanceModel::none(), cfg, metric);
  SettleRun r;
  r.label = label;
  r.bound = bound;
  r.settled = t.settling_time.has_value();
  r.measured = t.settling_time.value_or(t.final_time());
  return r;
}

void settling_suite(Outcome& o) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> dim(1, 20);
  std::uniform_real_distribution<double> log_mu(std::log(0.1), std::log(10.0));
  std::uniform_real_distribution<double> cond(1.0, 10.0);
  const double G0 = 10.0;

  // other norms, first-order and Newton only
  const std::vector<std::pair<std::string, ProtocolSum>> norm_pairs = {
      {"subgrad1+power2.5r1", Protocol::norm_subgradient(1.0) + Protocol::power(2.5, 1.0)},
      {"subgradinf+power1.5r4", Protocol::norm_subgradient(kInfinity) + Protocol::power(1.5, 4.0)},
      {"rescaled.3rinf+power2rinf", Protocol::rescaled(0.3, kInfinity) + Protocol::power(2.0, kInfinity)},
      {"rescaled0r1+power3r1.5", Protocol::rescaled(0.0, 1.0) + Protocol::power(3.0, 1.5)},
  };
  const std::vector<std::pair<std::string, ProtocolSum>> pairs = {
      {"subgrad2+power2", Protocol::norm_subgradient(2.0) + Protocol::power(2.0, 2.0)},
      {"rescaled.5r1.5+power1.5r3", Protocol::rescaled(0.5, 1.5) + Protocol::power(1.5, 3.0)},
      {"cw.5+cw2", Protocol::componentwise_power(0.5) + Protocol::componentwise_power(2.0)},
      {"sign+cw1.5", Protocol::signum() + Protocol::componentwise_power(1.5)},
  };
  // the feasibility flow needs span-preserving pairs, i.e. r = 2
  const std::vector<std::pair<std::string, ProtocolSum>> feas_pairs = {
      pairs[0], {"rescaled.3+power2.5", Protocol::rescaled(0.3, 2.0) + Protocol::power(2.5, 2.0)}};
  const std::vector<std::pair<std::string, ProtocolSum>> cw_pairs = {pairs[2], pairs[3]};

  std::vector<SettleRun> runs;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = dim(rng);
    const double mu = std::exp(log_mu(rng));
    const double L = n > 1 ? mu * cond(rng) : mu;
    const Objective obj = random_quadratic(n, mu, L, 1000 + trial);
    const Matrix Q = obj.hessian(Vector::Zero(n));
    const Vector xs = obj.minimizer_projection(Vector::Zero(n));
    const std::string tag = "q" + std::to_string(trial) + "(n=" + std::to_string(n) + ")";
    const ResidualFn grad_metric = [obj](const Vector& x, double) { return obj.grad(x).norm(); };
    // x0 with |grad f(x0)| = G0
    const Vector y0 = G0 * unit_vector(rng, n);
    const Vector x0 = xs + Q.ldlt().solve(y0);

    std::vector<std::pair<std::string, ProtocolSum>> all_pairs = pairs;
    all_pairs.insert(all_pairs.end(), norm_pairs.begin(), norm_pairs.end());
    for (const auto& [name, g] : all_pairs) {
      const auto c = pair_constants(g, n);
      // first-order flow, nominal bound
      const double b1 = nominal_bound(mu, c.sigma, c.rho, c.p, c.q).value;
      runs.push_back(settle(tag + " first_order " + name, first_order_flow(obj, g).rhs, x0, obj,
                            grad_metric, step_rule(g, n, L, G0, b1), b1));
      // Newton flow: the gradient obeys y' = -g(y), so the effective Lipschitz constant is 1
      const double b3 = newton_bound(c.sigma, c.rho, c.p, c.q).value;
      runs.push_back(settle(tag + " newton " + name, newton_flow(obj, g).rhs, x0, obj, grad_metric,
                            step_rule(g, n, 1.0, G0, b3), b3));
    }

    // exponential protocol, global bound 1/(alpha mu)
    {
      const double alpha = 1.0, Ge = 3.0;
      const ProtocolSum g = Protocol::exponential_l2(alpha);
      const double b = exponential_bound(alpha, mu, ExponentialVariant::L2).value;
      const Vector x0e = xs + Q.ldlt().solve(Ge * unit_vector(rng, n));
      runs.push_back(settle(tag + " exponential_l2", first_order_flow(obj, g).rhs, x0e, obj,
                            grad_metric, step_rule(g, n, L, Ge, b), b));
    }

    // finite-time protocol, bound grows with V0
    {
      const double p = 0.5;
      const ProtocolSum g = Protocol::rescaled(p, 2.0);
      const double v0 = obj.f(x0) - *obj.f_star;
      const double b = finite_time_bound(mu, class_constants(g.terms()[0], n).coefficient, p, v0).value;
      runs.push_back(settle(tag + " finite_time", first_order_flow(obj, g).rhs, x0, obj, grad_metric,
                            step_rule(g, n, L, G0, b), b));
    }

    if (n >= 2) {
      std::uniform_int_distribution<int> rows(1, std::max(1, n / 2));
      const int m = rows(rng);
      Matrix A(m, n);
      std::normal_distribution<double> nd;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = nd(rng) / std::sqrt(static_cast<double>(n));
      const Vector xf = xs + unit_vector(rng, n);
      const Vector b = A * xf;
      const Matrix P = orthogonal_projector(A);
      const double l2 = linalg::smallest_nonzero_eigenvalue(P.transpose() * P);

      // constrained optimum from the KKT system
      Matrix K = Matrix::Zero(n + m, n + m);
      K.topLeftCorner(n, n) = Q;
      K.topRightCorner(n, m) = A.transpose();
      K.bottomLeftCorner(m, n) = A;
      Vector rhs(n + m);
      rhs.head(n) = Q * xs;
      rhs.tail(m) = b;
      const Vector xc = K.fullPivLu().solve(rhs).head(n);
      const Vector w = P * unit_vector(rng, n);
      const double s = G0 / (P * Q * w).norm();
      const Vector x0p = xc + s * w;
      const ResidualFn proj_metric = projected_gradient_residual(obj, A);
      for (const auto& [name, g] : pairs) {
        const auto c = pair_constants(g, n);
        const double bp = projected_bound(mu, l2, c.sigma, c.rho, c.p, c.q).value;
        runs.push_back(settle(tag + " projected " + name, projected_flow(obj, A, P, g).rhs, x0p, obj,
                              proj_metric, step_rule(g, n, L, G0, bp), bp));
      }

      // feasibility flow on y = Ax - b
      const Matrix AAt = A * A.transpose();
      const double la = linalg::smallest_nonzero_eigenvalue(AAt);
      const double lA = linalg::largest_eigenvalue(AAt);
      const Vector x0f = xf + A.transpose() * AAt.ldlt().solve(G0 * unit_vector(rng, m));
      const ResidualFn feas_metric = [A, b](const Vector& x, double) { return (A * x - b).norm(); };
      for (const auto& [name, g] : feas_pairs) {
        const auto c = pair_constants(g, m);
        const double bf = feasibility_bound(c.sigma, c.rho, c.p, c.q, la).value;
        runs.push_back(settle(tag + " feasibility " + name, feasibility_flow(A, b, g).rhs, x0f, obj,
                              feas_metric, step_rule(g, m, lA, G0, bf), bf));
      }
    }

    // consensus on a random connected graph with max(n, 2) nodes
    {
      const int N = std::max(n, 2);
      std::vector<Edge> edges;
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (int v = 1; v < N; ++v) {
        std::uniform_int_distribution<int> pick(0, v - 1);
        edges.push_back({pick(rng), v, 0.5 + u(rng)});
      }
      for (int a = 0; a < N; ++a)
        for (int c = a + 2; c < N; ++c)
          if (u(rng) < 0.15) edges.push_back({a, c, 0.5 + u(rng)});
      const Graph graph(N, edges);
      const Objective cobj = consensus_objective(graph);
      const Matrix Lap = graph.laplacian();
      const double l2 = graph.algebraic_connectivity();
      const double lmax = linalg::largest_eigenvalue(Lap);
      Vector x0c = unit_vector(rng, N);
      x0c *= G0 / (Lap * x0c).norm();
      const ResidualFn cons_metric = [Lap](const Vector& x, double) { return (Lap * x).norm(); };
      for (const auto& [name, g] : cw_pairs) {
        const auto c = pair_constants(g, N);
        const double bc = consensus_bound(l2, c.sigma, c.rho, c.p, c.q).value;
        runs.push_back(settle(tag + " consensus " + name, consensus_flow(graph, g).rhs, x0c, cobj,
                              cons_metric, step_rule(g, N, lmax, G0, bc), bc));
      }
    }
  }

  double worst_ratio = 0.0;
  for (const auto& r : runs) {
    if (!r.settled) {
      o.fail(r.label + " did not settle by " + std::to_string(r.measured) + " (bound " +
             std::to_string(r.bound) + ")");
      continue;
    }
    if (r.measured > r.bound * 1.05 + 0.01) {
      o.fail(r.label + " settled at " + std::to_string(r.measured) + " > bound " +
             std::to_string(r.bound));
    }
    worst_ratio = std::max(worst_ratio, r.measured / r.bound);
  }
  o.detail << " runs=" << runs.size() << " worst measured/bound=" << worst_ratio;
}

// ---------------------------------------------------------------------------
// Criterion 6: regret on f = x^2/2.

void regret_suite(Outcome& o) {
  const Objective obj = quadratic_objective(Matrix::Identity(1, 1), Vector::Zero(1));
  struct Kind {
    RegretProtocol kind;
    double p, q, tol;
    std::string name;
  };
  // The exponential protocol slides near 0 and chatters at about dt.
  const std::vector<Kind> kinds = {
      {RegretProtocol::G1, 0.0, 2.0, 1e-9, "g1"},
      {RegretProtocol::Gp, 0.5, 2.0, 1e-6, "gp(p=.5)"},
      {RegretProtocol::Gpq, 0.5, 2.0, 1e-6, "gpq(p=.5,q=2)"},
      {RegretProtocol::Gpq, 0.5, 3.0, 1e-6, "gpq(p=.5,q=3)"},
      {RegretProtocol::Gpq, 0.0, 5.0, 1e-3, "gpq(p=0,q=5)"},
      {RegretProtocol::Ge, 0.0, 2.0, 1e-3, "ge"},
  };
  double worst = 0.0;
  for (const auto& k : kinds) {
    for (double v0 : {0.5, 2.0, 8.0, 50.0}) {
      IntegratorConfig cfg;
      cfg.dt = 1e-4;
      cfg.t_max = 40.0;
      cfg.settle_tol = k.tol;
      const Vector x0 = Vector::Constant(1, std::sqrt(2.0 * v0));
      const auto res = regret_compliance(obj, k.kind, {x0}, cfg, k.p, k.q);
      const auto& rep = res.rows.at(0).report;
      const std::string label = k.name + " V0=" + std::to_string(v0);
      if (rep.truncated) o.fail(label + " never settled");
      if (rep.measured > *rep.bound * 1.05)
        o.fail(label + " measured " + std::to_string(rep.measured) + " > " + std::to_string(*rep.bound));
      worst = std::max(worst, rep.measured / *rep.bound);
      if (k.kind == RegretProtocol::G1 && std::abs(rep.measured - v0 / 2.0) > 0.01 * v0 / 2.0)
        o.fail(label + " not within 1% of V0/(2 mu): " + std::to_string(rep.measured));
      if (k.kind == RegretProtocol::Ge && rep.measured > 1.0)
        o.fail(label + " exceeds 1/mu^2");
    }
  }
  o.detail << " worst measured/bound=" << worst;
}

// ---------------------------------------------------------------------------
// Criterion 7: protocol class membership and the norm inequalities.

void class_suite(Outcome& o) {
  std::vector<Protocol> protocols;
  for (double r : {1.0, 1.5, 2.0, 3.0, kInfinity}) {
    protocols.push_back(Protocol::norm_subgradient(r));
    protocols.push_back(Protocol::rescaled(0.0, r));
    protocols.push_back(Protocol::rescaled(0.5, r));
    protocols.push_back(Protocol::power(1.5, r));
    protocols.push_back(Protocol::power(3.0, r));
  }
  for (double a : {0.0, 0.3, 0.8, 1.5, 3.0}) protocols.push_back(Protocol::componentwise_power(a));
  protocols.push_back(Protocol::signum(2.0));

  std::size_t checked = 0;
  for (int n : {1, 2, 5, 50}) {
    for (const auto& g : protocols) {
      const auto c = class_constants(g, n);
      if (!c.tabulated()) {
        o.fail(g.describe() + " has no tabulated constants");
        continue;
      }
      const auto rep = verify_class_membership(g, c.exponent, c.coefficient, n, 10000,
                                               static_cast<std::uint64_t>(n * 1000 + checked));
      checked += rep.samples_checked;
      if (!rep.passed)
        o.fail(g.describe() + " n=" + std::to_string(n) + " margin " + std::to_string(rep.worst_margin));
    }
  }

  // Norm sandwich |x|_r <= |x|_s <= n^(1/s - 1/r) |x|_r for r > s >= 1, and the
  // exponential lower bounds.
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> dim(1, 50);
  std::uniform_real_distribution<double> scale_exp(-4.0, 1.5);
  std::normal_distribution<double> nd;
  const std::vector<std::pair<double, double>> sr = {{1, 2}, {1, 3}, {1.5, 4}, {2, kInfinity}, {1, kInfinity}};
  int sandwich_failures = 0, exp_failures = 0;
  for (int k = 0; k < 10000; ++k) {
    const int n = dim(rng);
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = nd(rng);
    x *= std::pow(10.0, scale_exp(rng));
    for (const auto& [s, r] : sr) {
      const double ns = lp_norm(x, s), nr = lp_norm(x, r);
      const double factor = std::pow(static_cast<double>(n), 1.0 / s - (std::isinf(r) ? 0.0 : 1.0 / r));
      if (nr > ns * (1 + 1e-12) || ns > factor * nr * (1 + 1e-12)) ++sandwich_failures;
    }
    const int order = 1 + k % 6;
    const auto e = exponential_lower_bounds(x, order);
    if (e.l2_lhs < e.l2_rhs * (1 - 1e-12) || e.l1_lhs < e.l1_rhs * (1 - 1e-12)) ++exp_failures;
    // independent evaluation of both sides
    const double nx = x.norm();
    double fact = 1.0;
    for (int i = 2; i <= order; ++i) fact *= i;
    double l1 = 0.0;
    for (int i = 0; i < n; ++i) l1 += std::abs(x[i]) * std::exp(std::abs(x[i]));
    const double sn = nx / std::sqrt(static_cast<double>(n));
    if (std::abs(e.l2_lhs - nx * std::exp(nx)) > 1e-9 * nx * std::exp(nx) ||
        std::abs(e.l2_rhs - std::pow(nx, order + 1) / fact) > 1e-9 * std::pow(nx, order + 1) / fact ||
        std::abs(e.l1_lhs - l1) > 1e-9 * l1 || std::abs(e.l1_rhs - sn * std::exp(sn)) > 1e-9 * sn * std::exp(sn))
      ++exp_failures;
  }
  if (sandwich_failures) o.fail(std::to_string(sandwich_failures) + " norm sandwich violations");
  if (exp_failures) o.fail(std::to_string(exp_failures) + " exponential inequality violations");
  o.detail << " protocols=" << protocols.size() << " x 4 dims, samples=" << checked;
}

// ---------------------------------------------------------------------------
// Criterion 8: derivative checks and the prox oracle.

void numerics_suite(Outcome& o) {
  std::mt19937_64 rng(88);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  auto random_x = [&](int n) {
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = u(rng);
    return x;
  };

  std::vector<std::pair<std::string, Objective>> objs = {
      {"random_quadratic", random_quadratic(8, 0.5, 6.0, 3)},
      {"logistic", logistic_objective(make_logistic_data(500, 1), 1.0)},
      {"least_squares", build_case3(3).objective},
      {"dispatch", build_case4(4).objective},
      {"consensus", consensus_objective(Graph::circle(6))},
  };
  int grad_checks = 0;
  double worst_grad = 0.0, worst_hess = 0.0;
  for (const auto& [name, obj] : objs) {
    for (int k = 0; k < 50; ++k) {
      Vector x = random_x(obj.dim);
      if (name == "dispatch") x = x * 20.0 + Vector::Constant(obj.dim, 50.0);
      const Vector g = obj.grad(x);
      const double eg = relative_error(finite_difference_gradient(obj.f, x), g);
      worst_grad = std::max(worst_grad, eg);
      if (eg > 1e-5) o.fail(name + " gradient error " + std::to_string(eg));
      if (obj.has_hessian()) {
        const double eh = relative_error(finite_difference_hessian(obj.grad, x), obj.hessian(x));
        worst_hess = std::max(worst_hess, eh);
        if (eh > 1e-4) o.fail(name + " hessian error " + std::to_string(eh));
      }
      ++grad_checks;
    }
  }

  // Case 2 envelope gradient and Moreau gradients
  const CaseInstance c2 = build_case2(2);
  const ProxFunction& h = *c2.prox;
  const double lam = *c2.prox_lambda;
  const Objective& f = c2.objective;
  double worst_env = 0.0, worst_moreau = 0.0;
  for (int k = 0; k < 200; ++k) {
    const Vector x = random_x(4) * 5.0 / 3.0;
    const ScalarFn F = [&](const Vector& z) { return fb_envelope(f, h, lam, z); };
    const double e = relative_error(finite_difference_gradient(F, x), fb_envelope_gradient(f, h, lam, x));
    worst_env = std::max(worst_env, e);
    if (e > 1e-4) o.fail("envelope gradient error " + std::to_string(e));
    const ScalarFn M = [&](const Vector& z) { return moreau(h, lam, z); };
    const double em = relative_error(finite_difference_gradient(M, x), moreau_gradient(h, lam, x));
    worst_moreau = std::max(worst_moreau, em);
    if (em > 1e-5) o.fail("moreau gradient error " + std::to_string(em));
  }

  // prox of gamma|z| + box on a 1e-4 grid
  std::uniform_real_distribution<double> wide(-8.0, 8.0);
  double worst_prox = 0.0;
  const double gamma = 1.0, lo = -5.0, hi = 5.0, step = 0.7;
  const ProxFunction hb = ProxFunction::l1_plus_box(gamma, Vector::Constant(1, lo), Vector::Constant(1, hi));
  for (int k = 0; k < 1000; ++k) {
    const double x = wide(rng);
    double best = lo, best_val = kInfinity;
    for (long i = 0; i <= 100000; ++i) {
      const double z = lo + 1e-4 * static_cast<double>(i);
      const double v = gamma * std::abs(z) + (z - x) * (z - x) / (2.0 * step);
      if (v < best_val) {
        best_val = v;
        best = z;
      }
    }
    const double err = std::abs(prox(hb, step, Vector::Constant(1, x))[0] - best);
    worst_prox = std::max(worst_prox, err);
    if (err > 1e-3) o.fail("prox error " + std::to_string(err) + " at x=" + std::to_string(x));
  }
  o.detail << " gradient checks=" << grad_checks << " worst grad=" << worst_grad
           << " hess=" << worst_hess << " envelope=" << worst_env << " moreau=" << worst_moreau
           << " prox=" << worst_prox;
}

}  // namespace

int main(int argc, char** argv) {
  // Optional list of criterion numbers to run, default all.
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  auto want = [&](int id) {
    return selected.empty() || std::find(selected.begin(), selected.end(), id) != selected.end();
  };

  bool ok = true;
  if (want(1)) ok &= run_criterion(1, "case 1 robust settling and vanishing-only floor", [](Outcome& o) { case_criterion(1, o); });
  if (want(2)) ok &= run_criterion(2, "case 2 proximal flow vs EPGF", [](Outcome& o) { case_criterion(2, o); });
  if (want(3)) ok &= run_criterion(3, "case 3 distributed linear equations", [](Outcome& o) { case_criterion(3, o); });
  if (want(4)) ok &= run_criterion(4, "case 4 economic dispatch", [](Outcome& o) { case_criterion(4, o); });
  if (want(5)) ok &= run_criterion(5, "settling bounds on random quadratics and graphs", settling_suite);
  if (want(6)) ok &= run_criterion(6, "regret bounds on x^2/2", regret_suite);
  if (want(7)) ok &= run_criterion(7, "protocol class membership and norm inequalities", class_suite);
  if (want(8)) ok &= run_criterion(8, "finite differences and prox oracle", numerics_suite);
  std::printf("acceptance: %s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}
