#include "fxtflow/core.hpp"
#include "fxtflow/problems.hpp"
#include "fxtflow/proximal.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace fxt;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Matrix lasso_A() {
  Matrix A(3, 4);
  A << 1, 0, -1, 0, 1, 2, -1, -1, 0, 0, 0, 1;
  return A;
}

// Cyclic coordinate descent for 1/2|Ax-b|^2 + |x|_1 on [-5,5]^4: exact
// one-dimensional minimization per coordinate.
Vector lasso_coordinate_descent(const Matrix& A, const Vector& b) {
  Vector x = Vector::Zero(A.cols());
  for (int sweep = 0; sweep < 20000; ++sweep) {
    const Vector before = x;
    for (int j = 0; j < A.cols(); ++j) {
      const double a2 = A.col(j).squaredNorm();
      const Vector r = b - A * x + A.col(j) * x[j];
      const double rho = A.col(j).dot(r);
      double z = 0.0;
      if (rho > 1.0) z = (rho - 1.0) / a2;
      if (rho < -1.0) z = (rho + 1.0) / a2;
      x[j] = std::clamp(z, -5.0, 5.0);
    }
    if ((x - before).norm() < 1e-15) break;
  }
  return x;
}

std::vector<Vector> random_vectors(int count, int n, double scale, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<Vector> out;
  for (int k = 0; k < count; ++k) {
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = u(rng);
    out.push_back(x);
  }
  return out;
}

}  // namespace

TEST_SUITE("proximal") {

TEST_CASE("prox examples") {
  const Vector a = prox(ProxFunction::l1(1.0), 1.0, vec({2, -0.5}));
  CHECK(a[0] == doctest::Approx(1.0));
  CHECK(a[1] == 0.0);
  const Vector b = prox(ProxFunction::box(2, -5, 5), 0.3, vec({7, -2}));
  CHECK(b[0] == 5.0);
  CHECK(b[1] == -2.0);
  const Vector x = vec({1.5, -8, 0});
  CHECK(prox(ProxFunction::zero(), 2.0, x) == x);
}

TEST_CASE("moreau examples") {
  CHECK(moreau(ProxFunction::l1(1.0), 1.0, vec({2})) == doctest::Approx(1.5));
  CHECK(moreau(ProxFunction::box(2, -5, 5), 0.5, vec({1, -4})) == 0.0);
  CHECK(moreau(ProxFunction::zero(), 0.5, vec({1, -4})) == 0.0);
}

TEST_CASE("fb residual examples") {
  const Objective q = random_quadratic(3, 1.0, 2.0, 1);
  const Vector x = vec({0.3, -1, 2});
  CHECK((fb_residual(q, ProxFunction::zero(), 0.1, x) - q.grad(x)).norm() < 1e-12);

  Objective flat;
  flat.dim = 2;
  flat.f = [](const Vector&) { return 4.0; };
  flat.grad = [](const Vector& v) { return Vector::Zero(v.size()); };
  flat.grad_lipschitz = 0.0;
  CHECK(fb_residual(flat, ProxFunction::l1(2.0), 0.5, Vector::Zero(2)).norm() == 0.0);
}

TEST_CASE("lasso optimum from an independent solver") {
  const Matrix A = lasso_A();
  const Vector b = Vector::Ones(3);
  const Objective f = least_squares_objective(A, b);
  const ProxFunction h = ProxFunction::l1_plus_box(1.0, Vector::Constant(4, -5), Vector::Constant(4, 5));
  const Vector xs = lasso_coordinate_descent(A, b);
  CHECK(f.f(xs) + h.value(xs) == doctest::Approx(1.25).epsilon(1e-9));
  CHECK(fb_residual(f, h, 0.1, xs).norm() <= 1e-8);
  CHECK(fb_envelope(f, h, 0.1, xs) == doctest::Approx(1.25).epsilon(1e-9));
  CHECK(proximal_pl_residual(f, h, 0.1, 0.5, 1.25, xs) == doctest::Approx(0.0).epsilon(1e-9));
  // L_f is the top eigenvalue of A'A
  Eigen::SelfAdjointEigenSolver<Matrix> es(A.transpose() * A);
  CHECK(*f.grad_lipschitz == doctest::Approx(es.eigenvalues().maxCoeff()));
  CHECK(*f.grad_lipschitz == doctest::Approx(7.83).epsilon(1e-3));
}

TEST_CASE("fb envelope with h = 0") {
  const Objective q = random_quadratic(4, 0.5, 3.0, 2);
  const Vector x = vec({1, -1, 2, 0});
  const double lam = 0.2;
  CHECK(fb_envelope(q, ProxFunction::zero(), lam, x) ==
        doctest::Approx(q.f(x) - 0.5 * lam * q.grad(x).squaredNorm()));
  const Vector xs = q.minimizer_projection(x);
  CHECK(fb_envelope(q, ProxFunction::zero(), lam, xs) == doctest::Approx(*q.f_star));
  CHECK_THROWS_AS(fb_envelope(q, ProxFunction::zero(), 0.5, x), Error);
}

TEST_CASE("proximal pl residual") {
  const Objective q = random_quadratic(3, 1.0, 2.0, 3);
  CHECK_THROWS_AS(proximal_pl_residual(q, ProxFunction::zero(), 0.1, 1.0, std::nullopt, Vector::Zero(3)),
                  Error);
  // strongly convex with h = 0 and mu = the strong convexity constant
  for (const auto& x : random_vectors(1000, 3, 10, 4)) {
    CHECK(proximal_pl_residual(q, ProxFunction::zero(), 0.1, 1.0, *q.f_star, x) >= -1e-9);
  }
}

TEST_CASE("fitted proximal PL constant on the lasso") {
  const Objective f = least_squares_objective(lasso_A(), Vector::Ones(3));
  const ProxFunction h = ProxFunction::l1_plus_box(1.0, Vector::Constant(4, -5), Vector::Constant(4, 5));
  const auto fit = fit_proximal_pl_constant(f, h, 0.1, 1.25, Vector::Constant(4, -5),
                                            Vector::Constant(4, 5), 10000, 11);
  CHECK(fit.mu > 0.0);
  CHECK(fit.samples_used > 9000);
  for (const auto& x : random_vectors(10000, 4, 5, 11)) {
    CHECK(proximal_pl_residual(f, h, 0.1, fit.mu, 1.25, x) >= -1e-9);
  }
}

TEST_CASE("prox is nonexpansive") {
  const std::vector<ProxFunction> kinds = {
      ProxFunction::zero(), ProxFunction::l1(0.7), ProxFunction::box(3, -1, 2),
      ProxFunction::l1_plus_box(1.3, Vector::Constant(3, -2), Vector::Constant(3, 0.5))};
  const auto xs = random_vectors(1000, 3, 5, 6);
  const auto ys = random_vectors(1000, 3, 5, 7);
  for (const auto& h : kinds) {
    for (int k = 0; k < 1000; ++k) {
      CHECK((prox(h, 0.4, xs[k]) - prox(h, 0.4, ys[k])).norm() <= (xs[k] - ys[k]).norm() + 1e-12);
    }
  }
}

TEST_CASE("moreau gradient matches finite differences") {
  const std::vector<ProxFunction> kinds = {
      ProxFunction::l1(0.7), ProxFunction::box(3, -1, 2),
      ProxFunction::l1_plus_box(1.3, Vector::Constant(3, -2), Vector::Constant(3, 0.5))};
  for (const auto& h : kinds) {
    for (const auto& x : random_vectors(100, 3, 5, 8)) {
      const ScalarFn m = [&h](const Vector& z) { return moreau(h, 0.4, z); };
      const Vector g = moreau_gradient(h, 0.4, x);
      CHECK(relative_error(finite_difference_gradient(m, x), g) <= 1e-5);
    }
  }
}

TEST_CASE("fb envelope gradient matches finite differences") {
  const Objective f = least_squares_objective(lasso_A(), Vector::Ones(3));
  const ProxFunction h = ProxFunction::l1_plus_box(1.0, Vector::Constant(4, -5), Vector::Constant(4, 5));
  const ScalarFn F = [&](const Vector& z) { return fb_envelope(f, h, 0.1, z); };
  for (const auto& x : random_vectors(200, 4, 5, 9)) {
    CHECK(relative_error(finite_difference_gradient(F, x), fb_envelope_gradient(f, h, 0.1, x)) <= 1e-4);
  }
}

TEST_CASE("l1 plus box prox against a brute force grid") {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-8, 8);
  const double gamma = 1.0, lam = 0.7, lo = -5, hi = 5;
  const ProxFunction h = ProxFunction::l1_plus_box(gamma, Vector::Constant(1, lo), Vector::Constant(1, hi));
  for (int k = 0; k < 1000; ++k) {
    const double x = u(rng);
    double best = lo, best_val = kInfinity;
    for (long i = 0; i <= 100000; ++i) {
      const double z = lo + 1e-4 * static_cast<double>(i);
      const double v = gamma * std::abs(z) + (z - x) * (z - x) / (2 * lam);
      if (v < best_val) {
        best_val = v;
        best = z;
      }
    }
    CHECK(std::abs(prox(h, lam, Vector::Constant(1, x))[0] - best) <= 1e-3);
  }
}

TEST_CASE("box keeps values in the domain") {
  const ProxFunction h = ProxFunction::l1_plus_box(1.0, Vector::Constant(4, -5), Vector::Constant(4, 5));
  for (const auto& x : random_vectors(100, 4, 50, 12)) CHECK(h.in_domain(prox(h, 0.1, x)));
  CHECK(std::isinf(h.value(Vector::Constant(4, 6))));
}

}  // TEST_SUITE
