#include <cmath>
#include <random>

#include "aropt/aro/counterparts.hpp"
#include "aropt/aro/elimination.hpp"
#include "aropt/aro/problem.hpp"
#include "aropt/aro/sos.hpp"
#include "aropt/conic/solver.hpp"
#include "doctest.h"

using namespace aropt;
using poly::Polynomial;

namespace {

Polynomial random_quadratic(std::mt19937_64& rng, int nvars) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Polynomial p(u(rng));
  for (int i = 0; i < nvars; ++i) {
    p += Polynomial::variable(i, u(rng));
    for (int j = i; j < nvars; ++j) p += Polynomial::variable(i, u(rng)) * Polynomial::variable(j);
  }
  return p;
}

// Random problem with affine equalities A x = M [1; y; zeta] and quadratic G.
aro::AroProblem random_problem(std::mt19937_64& rng, int ny, int nz, int nx, int ng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  aro::AroProblem p = aro::make_problem_space(ny, nz, nx);
  for (int i = 0; i < nx; ++i) {
    Polynomial L(u(rng));
    for (int k = 0; k < nx; ++k) L += Polynomial::variable(p.x.index(k), (i == k ? 3.0 : 0.0) + u(rng));
    for (int k = 0; k < ny; ++k) L += Polynomial::variable(p.y.index(k), u(rng));
    for (int k = 0; k < nz; ++k) L += Polynomial::variable(p.zeta.index(k), u(rng));
    p.equalities.push_back(L);
  }
  for (int i = 0; i < ng; ++i) p.inequalities.push_back(random_quadratic(rng, p.space.size()));
  p.omega = uncertainty::Ellipsoid::unit_ball(nz);
  return p;
}

Eigen::VectorXd random_vector(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return Eigen::VectorXd::NullaryExpr(n, [&]() { return u(rng); });
}

// min over zeta in [-rho, rho] of a zeta^2 + beta zeta + gamma
double interval_min(double a, double beta, double g, double rho) {
  double m = std::min(a * rho * rho + beta * rho, a * rho * rho - beta * rho) + g;
  if (a > 0.0) {
    const double z = -beta / (2.0 * a);
    if (std::abs(z) <= rho) m = std::min(m, a * z * z + beta * z + g);
  }
  return m;
}

// Largest s in [lo, hi] with pred(s) true, assuming pred(lo) true and
// pred monotone on the segment.
template <class Pred>
double bisect(double lo, double hi, Pred pred) {
  for (int k = 0; k < 60; ++k) {
    const double mid = 0.5 * (lo + hi);
    (pred(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

TEST_CASE("property: eliminated constraints reproduce the source polynomial") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const aro::AroProblem p = random_problem(rng, 3, 2, 3, 4);
    const aro::LinearizedStage st = aro::linearize_equalities(p, Eigen::VectorXd::Zero(3));
    CHECK((st.A * st.A_inv - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-8);
    const aro::EliminatedStage e = aro::eliminate_state(p, st);
    REQUIRE(e.constraints.size() == 4);
    for (int s = 0; s < 5; ++s) {
      const Eigen::VectorXd y = random_vector(rng, 3), z = random_vector(rng, 2);
      const Eigen::VectorXd x = st.recover_at(y, z);
      const Eigen::VectorXd pt = p.point(y, z, x);
      const std::span<const double> sp(pt.data(), static_cast<std::size_t>(pt.size()));
      // recover solves the (here exact) linearized equalities
      for (int i = 0; i < 3; ++i) CHECK(std::abs(p.equalities[i].eval(sp)) <= 1e-10);
      for (int i = 0; i < 4; ++i) {
        const aro::QuadraticRobustConstraint& q = e.constraints[i];
        CHECK(q.A.isApprox(q.A.transpose()));
        CHECK(q.C.isApprox(q.C.transpose()));
        CHECK(std::abs(q.eval(y, z) - p.inequalities[i].eval(sp)) <= 1e-10 * (1.0 + std::abs(q.eval(y, z))));
      }
    }
  }
}

TEST_CASE("property: recover satisfies nonlinear equalities linearized at the anchor") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    aro::AroProblem p = random_problem(rng, 2, 2, 3, 0);
    for (int i = 0; i < 3; ++i)
      p.equalities[i] += 0.3 * Polynomial::variable(p.x.index(i)) * Polynomial::variable(p.x.index((i + 1) % 3));
    const Eigen::VectorXd anchor = random_vector(rng, 3, 0.5);
    const aro::LinearizedStage st = aro::linearize_equalities(p, anchor);
    for (int s = 0; s < 5; ++s) {
      const Eigen::VectorXd y = random_vector(rng, 2), z = random_vector(rng, 2);
      Eigen::VectorXd r1(5);
      r1(0) = 1.0;
      r1.segment(1, 2) = y;
      r1.segment(3, 2) = z;
      const Eigen::VectorXd residual = st.A * st.recover_at(y, z) + st.offset * r1;
      CHECK(residual.norm() <= 1e-10);
    }
  }
}

TEST_CASE("property: eliminated degree stays quadratic in y and zeta") {
  std::mt19937_64 rng(13);
  const aro::AroProblem p = random_problem(rng, 2, 2, 2, 3);
  const aro::EliminatedStage e = aro::eliminate_state(p, aro::linearize_equalities(p, Eigen::VectorXd::Zero(2)));
  for (const auto& q : e.constraints)
    for (int s = 0; s < 5; ++s) {
      const Eigen::VectorXd y = random_vector(rng, 2), z = random_vector(rng, 2);
      const Eigen::VectorXd dy = random_vector(rng, 2), dz = random_vector(rng, 2);
      // Third finite difference along a line vanishes for a quadratic.
      auto f = [&](double t) { return q.eval(y + t * dy, z + t * dz); };
      const double third = f(3.0) - 3.0 * f(2.0) + 3.0 * f(1.0) - f(0.0);
      CHECK(std::abs(third) <= 1e-9);
    }
}

TEST_CASE("property: S-lemma is exact on 1-D instances") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    aro::QuadraticRobustConstraint q;
    q.A = Eigen::MatrixXd::Constant(1, 1, u(rng));
    q.B = Eigen::MatrixXd::Constant(1, 1, u(rng));
    q.b = Eigen::VectorXd::Constant(1, u(rng));
    q.C = Eigen::MatrixXd::Constant(1, 1, -0.5 - std::abs(u(rng)));  // concave in y: an interval
    q.c = Eigen::VectorXd::Constant(1, u(rng));
    q.d = 2.0 + std::abs(u(rng));
    const double rho = 0.3 + 0.5 * std::abs(u(rng));
    const uncertainty::Ellipsoid omega(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1), rho * rho);
    auto analytic = [&](double y) {
      return interval_min(q.A(0, 0), q.B(0, 0) * y + q.b(0), q.C(0, 0) * y * y + q.c(0) * y + q.d, rho) >= 0.0;
    };
    auto block = [&](double y) { return aro::slemma_margin(q, omega, Eigen::VectorXd::Constant(1, y)) >= 0.0; };
    REQUIRE(analytic(0.0));
    REQUIRE(block(0.0));
    CHECK(std::abs(bisect(0.0, 10.0, block) - bisect(0.0, 10.0, analytic)) <= 1e-6);
    auto neg = [](auto f) { return [f](double s) { return f(-s); }; };
    CHECK(std::abs(bisect(0.0, 10.0, neg(block)) - bisect(0.0, 10.0, neg(analytic))) <= 1e-6);
  }
}

TEST_CASE("property: S-lemma and Putinar certificates are sound under sampling") {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::normal_distribution<double> normal;
  int certified = 0;
  for (int trial = 0; trial < 20; ++trial) {
    aro::QuadraticRobustConstraint q;
    Eigen::MatrixXd M = Eigen::MatrixXd::NullaryExpr(2, 2, [&]() { return u(rng); });
    q.A = 0.5 * (M + M.transpose());
    q.B = Eigen::MatrixXd::NullaryExpr(2, 2, [&]() { return u(rng); });
    q.b = random_vector(rng, 2);
    q.C = -Eigen::MatrixXd::Identity(2, 2) * 0.3;
    q.c = random_vector(rng, 2);
    q.d = 1.5;
    const uncertainty::Ellipsoid omega(random_vector(rng, 2, 0.3), Eigen::MatrixXd::Identity(2, 2) * 2.0, 0.5);
    const Eigen::VectorXd y = random_vector(rng, 2, 0.5);
    if (aro::slemma_margin(q, omega, y) < 0.0) continue;
    ++certified;
    const Eigen::MatrixXd T = omega.unit_ball_map();
    double worst = INFINITY;
    for (int s = 0; s < 10000; ++s) {
      Eigen::VectorXd v(2);
      v << normal(rng), normal(rng);
      v /= v.norm();
      if (s % 4 == 3) v *= std::sqrt(std::abs(u(rng)));
      worst = std::min(worst, q.eval(y, omega.center() + T * v));
    }
    CHECK(worst >= -1e-6);
  }
  CHECK(certified >= 3);

  // Putinar: h(zeta) = c - (zeta - a)^2 on [-1, 1], certified at level 1 or 2.
  for (int trial = 0; trial < 10; ++trial) {
    const double a = u(rng), c = 1.0 + 4.0 * std::abs(u(rng)) - 2.0;
    const Polynomial z = Polynomial::variable(0);
    const Polynomial h = c - (z - a) * (z - a);
    aro::SosProgram sp;
    const int id = sp.add_identity();
    sp.add_constant(id, h);
    uncertainty::SemialgebraicSet set;
    set.inequalities = {1.0 - z * z};
    const int vars[] = {0};
    aro::putinar_counterpart(sp, id, set, vars, 2);
    if (!conic::solve(sp.build()).optimal()) continue;
    double worst = INFINITY;
    for (int s = 0; s <= 10000; ++s) {
      const double zv = -1.0 + 2.0 * s / 10000.0;
      const double pt[] = {zv};
      worst = std::min(worst, h.eval(pt));
    }
    CHECK(worst >= -1e-6);
  }
}
