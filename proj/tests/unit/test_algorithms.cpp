#include <cmath>
#include <random>

#include "aropt/acopf/model.hpp"
#include "aropt/acopf/network.hpp"
#include "aropt/acopf/nominal.hpp"
#include "aropt/algorithms/alternating.hpp"
#include "aropt/algorithms/outer.hpp"
#include "aropt/algorithms/projections.hpp"
#include "aropt/algorithms/sampling.hpp"
#include "doctest.h"

using namespace aropt;
using namespace aropt::algorithms;

namespace {

std::string case_path(const std::string& name) { return std::string(AROPT_DATA_DIR) + "/" + name + ".m"; }

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double a : v) out(i++) = a;
  return out;
}

aro::QuadraticRobustConstraint constraint(int ny, int nz) {
  aro::QuadraticRobustConstraint q;
  q.A = Eigen::MatrixXd::Zero(nz, nz);
  q.B = Eigen::MatrixXd::Zero(ny, nz);
  q.b = Eigen::VectorXd::Zero(nz);
  q.C = Eigen::MatrixXd::Zero(ny, ny);
  q.c = Eigen::VectorXd::Zero(ny);
  return q;
}

QuadraticObjective linear_objective(const Eigen::VectorXd& g) {
  QuadraticObjective f;
  f.H = Eigen::MatrixXd::Zero(g.size(), g.size());
  f.g = g;
  return f;
}

// min y s.t. 1 - (y + zeta)^2 >= 0 for all zeta^2 <= 1/4, y in [-2, 2].
ArcSubproblem toy() {
  aro::QuadraticRobustConstraint q = constraint(1, 1);
  q.A(0, 0) = -1.0;
  q.B(0, 0) = -2.0;
  q.C(0, 0) = -1.0;
  q.d = 1.0;
  const uncertainty::Ellipsoid omega(vec({0.0}), Eigen::MatrixXd::Identity(1, 1), 0.25);
  return make_subproblem({q}, omega, vec({-2.0}), vec({2.0}), linear_objective(vec({1.0})));
}

// Two certain constraints gamma_i + c_i'y + d_i >= 0 with PSD C_i.
ArcSubproblem halfspaces() {
  aro::QuadraticRobustConstraint q1 = constraint(2, 0), q2 = constraint(2, 0);
  q1.C << 1.0, 0.2, 0.2, 0.5;
  q1.c = vec({0.3, -0.2});
  q1.d = -0.8;
  q2.C << 0.4, 0.0, 0.0, 1.0;
  q2.c = vec({-0.5, 0.1});
  q2.d = -0.6;
  return make_subproblem({q1, q2}, std::nullopt, vec({-1.0, -1.0}), vec({1.0, 1.0}), linear_objective(vec({1.0, 1.0})));
}

}  // namespace

TEST_CASE("subproblem: partition of the controls") {
  const ArcSubproblem s = halfspaces();
  CHECK(s.num_gamma == 2);
  CHECK(s.nc.size() == 2);
  CHECK(s.c.empty());
  CHECK(s.projected_gammas().size() == 2);
  const ArcSubproblem t = toy();
  CHECK(t.concave[0]);
  CHECK(t.projected_gammas().empty());
}

TEST_CASE("lower bound: toy robust optimum") {
  const LowerBound lb = sdp_lower_bound(toy());
  REQUIRE(lb.status == StepStatus::Solved);
  CHECK(lb.value == doctest::Approx(-0.5).epsilon(1e-6));
}

TEST_CASE("lower bound: an empty trust region is infeasible") {
  ArcSubproblem s = toy();
  s.constraints[0].d = -1.0;  // -1 - (y + zeta)^2 >= 0 never holds
  CHECK(sdp_lower_bound(s).status == StepStatus::Infeasible);
}

TEST_CASE("project B") {
  aro::QuadraticRobustConstraint q = constraint(1, 0);
  q.C(0, 0) = 1.0;
  const ArcSubproblem s = make_subproblem({q}, std::nullopt, vec({-5.0}), vec({5.0}), linear_objective(vec({1.0})));
  ArcPoint p{vec({2.0}), vec({0.0}), vec({0.0})};
  const ArcPoint b = project_B(p, s);
  CHECK(b.gamma(0) == doctest::Approx(4.0));
  CHECK(b.y(0) == 2.0);
  const ArcPoint again = project_B(b, s);
  CHECK(again.gamma(0) == b.gamma(0));
  SUBCASE("concave constraints are never projected") {
    const ArcSubproblem t = toy();
    ArcPoint r{vec({0.3}), vec({7.0}), vec({1.0})};
    CHECK(project_B(r, t).gamma(0) == 7.0);
  }
}

TEST_CASE("project A: halfspace") {
  aro::QuadraticRobustConstraint q = constraint(1, 0);
  q.C(0, 0) = 1.0;
  q.d = -1.0;  // gamma >= 1
  const ArcSubproblem s = make_subproblem({q}, std::nullopt, vec({-5.0}), vec({5.0}), linear_objective(vec({1.0})));
  const Projection p = project_A(ArcPoint{vec({0.0}), vec({0.0}), vec({0.0})}, s, 1e5);
  REQUIRE(p.status == StepStatus::Solved);
  CHECK(p.point.gamma(0) == doctest::Approx(1.0).epsilon(1e-7));
  // The distance is flat in y to second order, so y is loose at solver accuracy.
  CHECK(std::abs(p.point.y(0)) <= 1e-3);
  CHECK(p.distance == doctest::Approx(1.0).epsilon(1e-6));
  SUBCASE("a point of A stays put") {
    const Projection again = project_A(p.point, s, 1e5);
    REQUIRE(again.status == StepStatus::Solved);
    CHECK(again.distance <= 1e-6);
    CHECK(again.point.gamma(0) == doctest::Approx(p.point.gamma(0)).epsilon(1e-6));
  }
}

TEST_CASE("project A: distance matches a quadratic programming oracle") {
  // Frozen from an independent QP solve (Clarabel via CVXPY, tolerances 1e-12).
  constexpr double kDistance = 1.0174705176130547;
  const Projection p = project_A(ArcPoint{vec({0.2, 0.1}), vec({0.0, 0.0}), Eigen::VectorXd::Zero(2)}, halfspaces(), 10.0);
  REQUIRE(p.status == StepStatus::Solved);
  CHECK(std::abs(p.distance - kDistance) <= 1e-6);
  CHECK(p.point.y(0) == doctest::Approx(0.1053839).epsilon(1e-5));
  CHECK(p.point.gamma(1) == doctest::Approx(0.65158793).epsilon(1e-5));
}

TEST_CASE("project A: empty objective cap fails") {
  const Projection p = project_A(ArcPoint{vec({0.2, 0.1}), vec({0.0, 0.0}), Eigen::VectorXd::Zero(2)}, halfspaces(), -5.0);
  CHECK(p.status != StepStatus::Solved);
}

TEST_CASE("alternating projections: start already in B") {
  const ApResult r = alternating_projections(toy());
  REQUIRE(r.status == ApStatus::Feasible);
  CHECK(r.iterations == 1);
  CHECK(r.objective == doctest::Approx(-0.5).epsilon(1e-6));
  CHECK(r.lower_bound <= r.objective + 1e-6);
  CHECK(r.fixed_point_residual <= 1e-5);
}

TEST_CASE("alternating projections: nonconvex coupling converges") {
  const ArcSubproblem s = halfspaces();
  const ApResult r = alternating_projections(s);
  REQUIRE(r.status == ApStatus::Feasible);
  CHECK(r.lower_bound <= r.objective + 1e-6);
  CHECK(r.fixed_point_residual <= 1e-5);
  // the point satisfies the true constraints y'Cy + c'y + d >= 0
  for (const auto& q : s.constraints) CHECK(r.point.y.dot(q.C * r.point.y) + q.c.dot(r.point.y) + q.d >= -1e-6);
  // fixed point: projecting on B and back on A moves by at most tol
  const ArcPoint b = project_B(r.point, s);
  CHECK(split_distance(r.point, b, s) <= 1e-5);
}

TEST_CASE("alternating projections: line search accepts decreasing objectives") {
  ApParams params;
  params.nu = {0.5};
  params.max_iterations = 60;
  const ApResult r = alternating_projections(halfspaces(), params);
  REQUIRE(r.status == ApStatus::Feasible);
  for (std::size_t i = 1; i < r.accepted.size(); ++i) CHECK(r.accepted[i] <= r.accepted[i - 1] + 1e-6);
  CHECK(r.objective == doctest::Approx(r.accepted.back()));
}

TEST_CASE("alternating projections: parameter validation") {
  ApParams p;
  p.tol = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.max_iterations = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.nu = {0.5, 1.5};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  OuterParams o;
  o.tol = -1.0;
  CHECK_THROWS_AS(o.validate(), std::invalid_argument);
}

TEST_CASE("outer: epsilon rule") {
  CHECK(size_epsilon_rule(9)(2.0) == doctest::Approx(0.2));
  CHECK(size_epsilon_rule(30)(3.0) == doctest::Approx(0.1));
}

TEST_CASE("outer: case9 robust run is feasible and sound under sampling") {
  const acopf::AcopfModel m = acopf::make_model(acopf::load_matpower(case_path("case9")));
  const acopf::WarmStart ws = acopf::squeeze_warm_start(m);
  const aro::AroProblem prob = acopf::build_aro(m, acopf::load_uncertainty(m, 0.05, false));
  const OuterHistory h = dynamic_outer(prob, ws.y, ws.x);
  const OuterIterate* best = h.best();
  REQUIRE(best != nullptr);
  CHECK(best->ap.lower_bound <= best->objective + 1e-6);
  CHECK(best->ap.fixed_point_residual <= OuterParams{}.ap.tol);
  CHECK(best->objective >= acopf::nominal_sdp_bound(m.net).objective - 1e-6);
  // Every eliminated constraint of the first trust region holds on Omega.
  const aro::LinearizedStage st = aro::linearize_equalities(prob, ws.x, ws.x, best->epsilon);
  const aro::EliminatedStage e = aro::eliminate_state(prob, st);
  std::mt19937_64 rng(31);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  const Eigen::MatrixXd T = prob.omega->unit_ball_map();
  double worst = INFINITY;
  for (int s = 0; s < 10000; ++s) {
    Eigen::VectorXd u(prob.nzeta());
    for (int i = 0; i < u.size(); ++i) u(i) = normal(rng);
    u /= u.norm();
    if (s % 2) u *= std::pow(uniform(rng), 1.0 / u.size());
    const Eigen::VectorXd zeta = prob.omega->center() + T * u;
    for (const auto& q : e.constraints) worst = std::min(worst, q.eval(best->y, zeta));
  }
  CHECK(worst >= -1e-6);
}

TEST_CASE("outer: zero uncertainty stays at the nominal optimum") {
  const acopf::AcopfModel m = acopf::make_model(acopf::load_matpower(case_path("case9")));
  const acopf::WarmStart ws = acopf::squeeze_warm_start(m);
  const aro::AroProblem prob = acopf::build_aro(m, std::nullopt);
  OuterParams params;
  params.max_iterations = 10;
  const OuterHistory h = dynamic_outer(prob, ws.y, ws.x, params);
  REQUIRE(h.best() != nullptr);
  CHECK(h.iterates.size() <= 3);
  const double nominal = acopf::nominal_sdp_bound(m.net).objective;
  CHECK(h.best()->objective >= nominal - 1e-6);
  CHECK((h.best()->objective - nominal) / nominal <= 1e-3);
}

TEST_CASE("outer: finitely many iterations on a synthetic instance") {
  // min y s.t. 1 - x^2 >= 0 with x = y + zeta, zeta^2 <= 1/4, y in [-2, 2].
  aro::AroProblem p = aro::make_problem_space(1, 1, 1);
  const poly::Polynomial x = poly::Polynomial::variable(p.x.index(0));
  const poly::Polynomial y = poly::Polynomial::variable(p.y.index(0));
  const poly::Polynomial z = poly::Polynomial::variable(p.zeta.index(0));
  p.equalities = {x - y - z};
  p.inequalities = {1.0 - x * x};
  p.objective = y;
  p.y_lower = vec({-2.0});
  p.y_upper = vec({2.0});
  p.omega = uncertainty::Ellipsoid(vec({0.0}), Eigen::MatrixXd::Identity(1, 1), 0.25);
  OuterParams params;
  params.max_iterations = 1000;
  params.epsilon_rule = [](double) { return 1.0; };
  const OuterHistory h = dynamic_outer(p, vec({0.0}), vec({0.0}), params);
  REQUIRE(h.best() != nullptr);
  const double beta = h.iterates.front().ap.lower_bound;
  const double f0 = 0.0;
  CHECK(static_cast<double>(h.iterates.size()) <= std::ceil((f0 - beta) / params.tol) + 1.0);
  CHECK(h.best()->objective == doctest::Approx(-0.5).epsilon(1e-4));
  const SampleReport s = sample_robustness(p, h.best()->y, h.best()->x, 10000, 7);
  CHECK(s.recovered == 10000);
  CHECK(s.worst >= -1e-6);
}

TEST_CASE("outer: a trust region narrower than the uncertainty is infeasible") {
  aro::AroProblem p = aro::make_problem_space(1, 1, 1);
  const poly::Polynomial x = poly::Polynomial::variable(p.x.index(0));
  const poly::Polynomial y = poly::Polynomial::variable(p.y.index(0));
  const poly::Polynomial z = poly::Polynomial::variable(p.zeta.index(0));
  p.equalities = {x - y - z};
  p.inequalities = {1.0 - x * x};
  p.objective = y;
  p.y_lower = vec({-2.0});
  p.y_upper = vec({2.0});
  p.omega = uncertainty::Ellipsoid(vec({0.0}), Eigen::MatrixXd::Identity(1, 1), 0.25);
  OuterParams params;
  params.epsilon_rule = [](double) { return 0.3; };  // |x| <= 0.3 but x - y ranges over 1
  const OuterHistory h = dynamic_outer(p, vec({0.0}), vec({0.0}), params);
  CHECK(h.best() == nullptr);
  CHECK(h.iterates.back().status == OuterStatus::LowerBoundInfeasible);
}

TEST_CASE("outer: case6ww at 10% has an infeasible lower bound") {
  const acopf::AcopfModel m = acopf::make_model(acopf::load_matpower(case_path("case6ww")));
  const acopf::WarmStart ws = acopf::squeeze_warm_start(m);
  const aro::AroProblem prob = acopf::build_aro(m, acopf::load_uncertainty(m, 0.10, false));
  const OuterHistory h = dynamic_outer(prob, ws.y, ws.x);
  CHECK(h.best() == nullptr);
  CHECK(h.iterates.back().status == OuterStatus::LowerBoundInfeasible);
  CHECK(std::isinf(h.iterates.back().objective));
  CHECK(std::string(outer_flag(h.iterates.back().status)) == "LNF");
}
