#include "aropt/algorithms/subproblem.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "aropt/aro/counterparts.hpp"

namespace aropt::algorithms {

namespace {

// Entries of C below this fraction of the constraint's largest coefficient
// are treated as rounding noise from the elimination.
constexpr double kZeroRelative = 1e-12;

double coefficient_scale(const aro::QuadraticRobustConstraint& q) {
  double s = std::abs(q.d);
  for (const Eigen::MatrixXd* M : {&q.A, &q.B, &q.C})
    if (M->size()) s = std::max(s, M->cwiseAbs().maxCoeff());
  for (const Eigen::VectorXd* v : {&q.b, &q.c})
    if (v->size()) s = std::max(s, v->cwiseAbs().maxCoeff());
  return s;
}

}  // namespace

QuadraticObjective QuadraticObjective::from_polynomial(const poly::Polynomial& p, const std::vector<int>& vars) {
  const Eigen::MatrixXd Q = Eigen::MatrixXd(aro::homogeneous_form(p, vars));
  const int n = static_cast<int>(vars.size());
  QuadraticObjective f;
  f.f0 = Q(0, 0);
  f.g = 2.0 * Q.block(1, 0, n, 1);
  f.H = Q.block(1, 1, n, n);
  if (n > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f.H, Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) < -aro::kPsdFlagTolerance) throw ModelError("objective is not convex");
  }
  return f;
}

std::vector<int> ArcSubproblem::projected_gammas() const {
  std::vector<int> out;
  for (int i = 0; i < num_constraints(); ++i)
    if (gamma_index[i] >= 0 && !concave[i]) out.push_back(gamma_index[i]);
  return out;
}

ArcSubproblem make_subproblem(std::vector<aro::QuadraticRobustConstraint> constraints,
                              const std::optional<uncertainty::Ellipsoid>& omega, Eigen::VectorXd y_lower,
                              Eigen::VectorXd y_upper, QuadraticObjective objective) {
  const int ny = static_cast<int>(y_lower.size());
  require_dim(y_upper.size() == ny, "control bounds differ in size");
  require_dim(objective.H.rows() == ny && objective.g.size() == ny, "objective size differs from the control");
  ArcSubproblem sub;
  sub.y_lower = std::move(y_lower);
  sub.y_upper = std::move(y_upper);
  sub.objective = std::move(objective);
  std::vector<bool> in_nc(ny, false);
  for (aro::QuadraticRobustConstraint& q : constraints) {
    require_dim(q.ny() == ny, "constraint control size differs from the bounds");
    if (omega) q = aro::to_unit_ball(q, *omega);
    else require_dim(q.nzeta() == 0, "constraint has uncertainty but no set was given");
    const double tiny = kZeroRelative * coefficient_scale(q);
    q.C = q.C.unaryExpr([tiny](double v) { return std::abs(v) <= tiny ? 0.0 : v; });
    const bool zero = q.C.isZero(0.0);
    bool concave = zero;
    if (!zero) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q.C, Eigen::EigenvaluesOnly);
      concave = es.eigenvalues()(ny - 1) <= aro::kPsdFlagTolerance;
    }
    sub.gamma_index.push_back(zero ? -1 : sub.num_gamma++);
    sub.concave.push_back(concave);
    if (!concave)
      for (int j = 0; j < ny; ++j)
        if (!q.C.row(j).isZero(0.0)) in_nc[j] = true;
    sub.constraints.push_back(std::move(q));
  }
  for (int j = 0; j < ny; ++j) (in_nc[j] ? sub.nc : sub.c).push_back(j);
  return sub;
}

ArcSubproblem make_subproblem(const aro::AroProblem& prob, const aro::EliminatedStage& stage) {
  std::vector<int> yv(prob.ny());
  for (int i = 0; i < prob.ny(); ++i) yv[i] = prob.y.index(i);
  std::vector<aro::QuadraticRobustConstraint> cons = stage.constraints;
  std::vector<int> yz = yv;
  for (int i = 0; i < prob.nzeta(); ++i) yz.push_back(prob.zeta.index(i));
  for (const poly::Polynomial& p : prob.control_inequalities) {
    const Eigen::MatrixXd Q = Eigen::MatrixXd(aro::homogeneous_form(p, yz));
    cons.push_back(aro::QuadraticRobustConstraint::from_form(Q, prob.ny(), prob.nzeta()));
    cons.back().label = "control";
  }
  return make_subproblem(std::move(cons), prob.omega, prob.y_lower, prob.y_upper,
                         QuadraticObjective::from_polynomial(prob.objective, yv));
}

double lmi_margin(const ArcSubproblem& sub, const ArcPoint& p) {
  double m = std::numeric_limits<double>::infinity();
  std::optional<uncertainty::Ellipsoid> ball;
  if (sub.nzeta() > 0) ball = uncertainty::Ellipsoid::unit_ball(sub.nzeta());
  for (int i = 0; i < sub.num_constraints(); ++i) {
    const aro::QuadraticRobustConstraint& q = sub.constraints[i];
    const int g = sub.gamma_index[i];
    const double gamma = g >= 0 ? p.gamma(g) : 0.0;
    if (sub.nzeta() == 0) {
      m = std::min(m, gamma + q.c.dot(p.y) + q.d);
      continue;
    }
    const aro::SlemmaCounterpart s = aro::slemma_counterpart(q, *ball);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.eval(p.y, gamma, p.lambda(i)), Eigen::EigenvaluesOnly);
    m = std::min(m, es.eigenvalues()(0));
  }
  return m;
}

}  // namespace aropt::algorithms
