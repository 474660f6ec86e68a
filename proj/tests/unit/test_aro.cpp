#include <cmath>

#include "aropt/aro/counterparts.hpp"
#include "aropt/aro/elimination.hpp"
#include "aropt/aro/problem.hpp"
#include "aropt/aro/sos.hpp"
#include "aropt/conic/solver.hpp"
#include "doctest.h"

using namespace aropt;
using poly::Polynomial;

namespace {

// One control, one uncertain parameter, one state: L = x - y - zeta.
aro::AroProblem affine_problem() {
  aro::AroProblem p = aro::make_problem_space(1, 1, 1);
  const Polynomial x = Polynomial::variable(p.x.index(0));
  const Polynomial y = Polynomial::variable(p.y.index(0));
  const Polynomial z = Polynomial::variable(p.zeta.index(0));
  p.equalities = {x - y - z};
  p.omega = uncertainty::Ellipsoid::unit_ball(1);
  p.y_lower = Eigen::VectorXd::Constant(1, -1.0);
  p.y_upper = Eigen::VectorXd::Constant(1, 1.0);
  return p;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double a : v) out(i++) = a;
  return out;
}

// Robust LP counterpart with y fixed by an equality; true when the solver
// finds the certificate.
bool lp_robust_at(const aro::AffineUncertainConstraint& h, const uncertainty::Polyhedron& omega, double y) {
  conic::LmiBuilder lb;
  const int yv = lb.add_variables(1);
  lb.add_equality(conic::AffineExpr(-y).add(yv, 1.0));
  const int vars[] = {yv};
  aro::robust_lp_counterpart(h, omega, lb, vars);
  const conic::SolveResult res = conic::solve(lb.build());
  return res.optimal();
}

conic::SolveStatus putinar_status(const Polynomial& h, const Polynomial& g, int var, int level) {
  aro::SosProgram sp;
  const int id = sp.add_identity();
  sp.add_constant(id, h);
  uncertainty::SemialgebraicSet set;
  set.inequalities = {g};
  const int vars[] = {var};
  aro::putinar_counterpart(sp, id, set, vars, level);
  return conic::solve(sp.build()).status;
}

}  // namespace

TEST_CASE("linearize: affine equalities are reproduced exactly") {
  const aro::AroProblem p = affine_problem();
  const aro::LinearizedStage st = aro::linearize_equalities(p, vec({0.0}));
  CHECK(st.A(0, 0) == doctest::Approx(1.0));
  CHECK((st.A * st.A_inv - Eigen::MatrixXd::Identity(1, 1)).norm() < 1e-8);
  // offset [1; y; zeta] = -y - zeta
  CHECK(st.offset(0, 0) == doctest::Approx(0.0));
  CHECK(st.offset(0, 1) == doctest::Approx(-1.0));
  CHECK(st.offset(0, 2) == doctest::Approx(-1.0));
  CHECK(st.recover_at(vec({0.3}), vec({0.2}))(0) == doctest::Approx(0.5));
}

TEST_CASE("linearize: zero Jacobian is rank deficient") {
  aro::AroProblem p = aro::make_problem_space(1, 0, 1);
  const Polynomial x = Polynomial::variable(p.x.index(0));
  p.equalities = {x * x - Polynomial::variable(p.y.index(0))};
  CHECK_THROWS_AS(aro::linearize_equalities(p, vec({0.0})), aro::RankDeficient);
}

TEST_CASE("eliminate: direct substitution of the state") {
  aro::AroProblem p = affine_problem();
  const Polynomial x = Polynomial::variable(p.x.index(0));
  p.inequalities = {1.0 - x * x};
  const aro::EliminatedStage e = aro::eliminate_state(p, aro::linearize_equalities(p, vec({0.0})));
  REQUIRE(e.constraints.size() == 1);
  const aro::QuadraticRobustConstraint& q = e.constraints[0];
  CHECK(q.A(0, 0) == doctest::Approx(-1.0));
  CHECK(q.B(0, 0) == doctest::Approx(-2.0));
  CHECK(q.C(0, 0) == doctest::Approx(-1.0));
  CHECK(q.b(0) == doctest::Approx(0.0));
  CHECK(q.c(0) == doctest::Approx(0.0));
  CHECK(q.d == doctest::Approx(1.0));
  CHECK_FALSE(q.psd);
}

TEST_CASE("eliminate: constraints without the state pass through") {
  aro::AroProblem p = affine_problem();
  const Polynomial y = Polynomial::variable(p.y.index(0));
  const Polynomial z = Polynomial::variable(p.zeta.index(0));
  p.inequalities = {2.0 + 3.0 * y + y * y - 0.5 * z * z + 4.0 * z};
  const aro::QuadraticRobustConstraint q =
      aro::eliminate_state(p, aro::linearize_equalities(p, vec({0.0}))).constraints.at(0);
  CHECK(q.C(0, 0) == doctest::Approx(1.0));
  CHECK(q.c(0) == doctest::Approx(3.0));
  CHECK(q.d == doctest::Approx(2.0));
  CHECK(q.A(0, 0) == doctest::Approx(-0.5));
  CHECK(q.b(0) == doctest::Approx(4.0));
  CHECK(q.B(0, 0) == doctest::Approx(0.0));
  CHECK(q.psd);
}

TEST_CASE("eliminate: the trust region is concave in y") {
  aro::AroProblem p = aro::make_problem_space(2, 1, 2);
  const Polynomial x0 = Polynomial::variable(p.x.index(0)), x1 = Polynomial::variable(p.x.index(1));
  const Polynomial y0 = Polynomial::variable(p.y.index(0)), y1 = Polynomial::variable(p.y.index(1));
  const Polynomial z = Polynomial::variable(p.zeta.index(0));
  p.equalities = {2.0 * x0 + x1 - y0 - z, x1 - 3.0 * y1 + 0.5 * z - 1.0};
  p.omega = uncertainty::Ellipsoid::unit_ball(1);
  const Eigen::VectorXd center = vec({0.2, -0.1});
  const aro::EliminatedStage e =
      aro::eliminate_state(p, aro::linearize_equalities(p, vec({0.0, 0.0}), center, 0.5));
  REQUIRE(e.constraints.size() == 1);
  const aro::QuadraticRobustConstraint& q = e.constraints[0];
  CHECK(q.label == "trust region");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q.C);
  CHECK(es.eigenvalues().maxCoeff() <= 1e-12);
  // Against 0.25 - ||x(y, zeta) - center||^2 with x solved directly.
  for (const auto& [yv, zv] : {std::pair{vec({0.3, 0.1}), 0.4}, {vec({-1.0, 2.0}), -0.7}}) {
    const double x1v = 3.0 * yv(1) - 0.5 * zv + 1.0;
    const double x0v = (yv(0) + zv - x1v) / 2.0;
    const double want = 0.25 - std::pow(x0v - 0.2, 2) - std::pow(x1v + 0.1, 2);
    CHECK(q.eval(yv, vec({zv})) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("robust LP: no uncertainty reduces to the nominal constraint") {
  aro::AffineUncertainConstraint h;
  h.h1 = conic::AffineExpr(1.0).add(0, -1.0);  // 1 - y
  h.h2 = {conic::AffineExpr(0.0)};
  const auto omega = uncertainty::Polyhedron::box(vec({-1.0}), vec({1.0}));
  CHECK(lp_robust_at(h, omega, 0.9));
  CHECK_FALSE(lp_robust_at(h, omega, 1.1));
}

TEST_CASE("robust LP: 1 - y + zeta y on [-1, 1]") {
  // Feasible iff 1 - y - |y| >= 0, that is y <= 1/2.
  aro::AffineUncertainConstraint h;
  h.h1 = conic::AffineExpr(1.0).add(0, -1.0);
  h.h2 = {conic::AffineExpr().add(0, 1.0)};
  const auto omega = uncertainty::Polyhedron::box(vec({-1.0}), vec({1.0}));
  CHECK(lp_robust_at(h, omega, 0.45));
  CHECK(lp_robust_at(h, omega, -5.0));
  CHECK_FALSE(lp_robust_at(h, omega, 0.55));
}

TEST_CASE("robust LP: 1 + zeta'(y, y) on the square") {
  aro::AffineUncertainConstraint h;
  h.h1 = conic::AffineExpr(1.0);
  h.h2 = {conic::AffineExpr().add(0, 1.0), conic::AffineExpr().add(0, 1.0)};
  const auto omega = uncertainty::Polyhedron::box(vec({-1.0, -1.0}), vec({1.0, 1.0}));
  CHECK(lp_robust_at(h, omega, 0.45));
  CHECK(lp_robust_at(h, omega, -0.45));
  CHECK_FALSE(lp_robust_at(h, omega, 0.55));
  CHECK_FALSE(lp_robust_at(h, omega, -0.55));
}

TEST_CASE("S-lemma: 1 - (y + zeta)^2 on |zeta| <= 0.5") {
  aro::QuadraticRobustConstraint q;
  q.A = Eigen::MatrixXd::Constant(1, 1, -1.0);
  q.B = Eigen::MatrixXd::Constant(1, 1, -2.0);
  q.b = Eigen::VectorXd::Zero(1);
  q.C = Eigen::MatrixXd::Constant(1, 1, -1.0);
  q.c = Eigen::VectorXd::Zero(1);
  q.d = 1.0;
  const uncertainty::Ellipsoid omega(vec({0.0}), Eigen::MatrixXd::Identity(1, 1), 0.25);
  CHECK(aro::slemma_margin(q, omega, vec({0.0})) >= 0.0);
  CHECK(aro::slemma_margin(q, omega, vec({0.45})) >= 0.0);
  CHECK(aro::slemma_margin(q, omega, vec({0.6})) < 0.0);
  CHECK(aro::slemma_margin(q, omega, vec({-0.6})) < 0.0);
}

TEST_CASE("S-lemma: block layout") {
  aro::QuadraticRobustConstraint q;
  q.A = Eigen::MatrixXd::Zero(2, 2);
  q.B = Eigen::MatrixXd::Zero(1, 2);
  q.b = Eigen::VectorXd::Zero(2);
  q.C = Eigen::MatrixXd::Constant(1, 1, 2.0);
  q.c = vec({3.0});
  q.d = 0.5;
  SUBCASE("no uncertainty terms: the corner is gamma + c'y + d, lambda = 0 suffices") {
    const aro::SlemmaCounterpart s = aro::slemma_counterpart(q, uncertainty::Ellipsoid::unit_ball(2));
    const Eigen::MatrixXd M = s.eval(vec({1.0}), 2.0, 0.0);
    CHECK(M(0, 0) == doctest::Approx(2.0 + 3.0 + 0.5));
    CHECK(M.bottomRightCorner(2, 2).norm() == doctest::Approx(0.0));
    CHECK(M.block(1, 0, 2, 1).norm() == doctest::Approx(0.0));
    CHECK(aro::slemma_margin(q, uncertainty::Ellipsoid::unit_ball(2), vec({-0.1})) >= 0.0);
  }
  SUBCASE("centered unit ball: the corner loses lambda") {
    const aro::SlemmaCounterpart s = aro::slemma_counterpart(q, uncertainty::Ellipsoid::unit_ball(2));
    const Eigen::MatrixXd M = s.eval(vec({1.0}), 2.0, 0.7);
    CHECK(M(0, 0) == doctest::Approx(2.0 + 3.0 + 0.5 - 0.7));
    CHECK(M(1, 1) == doctest::Approx(0.7));
    CHECK(M(2, 2) == doctest::Approx(0.7));
  }
  SUBCASE("off-center ellipsoid") {
    const uncertainty::Ellipsoid omega(vec({1.0, -2.0}), Eigen::MatrixXd::Identity(2, 2) * 2.0, 3.0);
    const aro::SlemmaCounterpart s = aro::slemma_counterpart(q, omega);
    const Eigen::MatrixXd M = s.eval(vec({1.0}), 2.0, 0.5);
    // gamma + c'y + d - lambda (r - z' S z) with z' S z = 10
    CHECK(M(0, 0) == doctest::Approx(5.5 - 0.5 * (3.0 - 10.0)));
    CHECK(M(1, 0) == doctest::Approx(-0.5 * 2.0 * 1.0));
    CHECK(M(2, 0) == doctest::Approx(-0.5 * 2.0 * -2.0));
  }
}

TEST_CASE("Putinar: the generator certifies itself") {
  const Polynomial z = Polynomial::variable(0);
  CHECK(putinar_status(1.0 - z * z, 1.0 - z * z, 0, 1) == conic::SolveStatus::Optimal);
}

TEST_CASE("Putinar: 1 + zeta on the interval") {
  const Polynomial z = Polynomial::variable(0);
  CHECK(putinar_status(1.0 + z, 1.0 - z * z, 0, 1) == conic::SolveStatus::Optimal);
}

TEST_CASE("Putinar: zeta is negative on the interval") {
  const Polynomial z = Polynomial::variable(0);
  for (int level : {1, 2}) {
    const conic::SolveStatus s = putinar_status(z, 1.0 - z * z, 0, level);
    CHECK(s != conic::SolveStatus::Optimal);
    CHECK(s != conic::SolveStatus::AlmostOptimal);
  }
}

TEST_CASE("Putinar: a set without a ball or box is rejected") {
  const Polynomial z = Polynomial::variable(0);
  aro::SosProgram sp;
  const int id = sp.add_identity();
  sp.add_constant(id, z);
  uncertainty::SemialgebraicSet set;
  set.inequalities = {z};
  const int vars[] = {0};
  CHECK_THROWS_AS(aro::putinar_counterpart(sp, id, set, vars, 1), ModelError);
}

TEST_CASE("eliminate: cubic constraints are rejected") {
  aro::AroProblem p = affine_problem();
  const Polynomial x = Polynomial::variable(p.x.index(0));
  p.inequalities = {1.0 - x * x * x};
  CHECK_THROWS_AS(aro::eliminate_state(p, aro::linearize_equalities(p, vec({0.0}))), aro::DegreeError);
}
