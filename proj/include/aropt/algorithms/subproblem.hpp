#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "aropt/aro/elimination.hpp"
#include "aropt/aro/problem.hpp"
#include "aropt/uncertainty/sets.hpp"

namespace aropt::algorithms {

// f(y) = y' H y + g' y + f0 with H positive semidefinite.
struct QuadraticObjective {
  Eigen::MatrixXd H;
  Eigen::VectorXd g;
  double f0 = 0.0;

  double eval(const Eigen::VectorXd& y) const { return y.dot(H * y) + g.dot(y) + f0; }
  // From a polynomial of degree <= 2 in the listed variables.
  static QuadraticObjective from_polynomial(const poly::Polynomial& p, const std::vector<int>& vars);
};

// One step of the outer loop after elimination: minimize f(y) over y in the
// box such that every constraint holds for all zeta in the unit ball. Each
// constraint with C != 0 owns a gamma standing for y'Cy. Concave constraints
// (C negative semidefinite) keep gamma <= y'Cy inside the convex set A and are
// never projected; the others form the nonconvex set B.
struct ArcSubproblem {
  std::vector<aro::QuadraticRobustConstraint> constraints;  // zeta in the unit ball
  Eigen::VectorXd y_lower, y_upper;
  QuadraticObjective objective;
  std::vector<int> gamma_index;  // per constraint, -1 when C = 0
  std::vector<bool> concave;     // per constraint
  std::vector<int> nc, c;        // y entries inside / outside nonconcave C
  int num_gamma = 0;

  int ny() const { return static_cast<int>(y_lower.size()); }
  int nzeta() const { return constraints.empty() ? 0 : constraints.front().nzeta(); }
  int num_constraints() const { return static_cast<int>(constraints.size()); }
  // gamma entries belonging to nonconcave constraints
  std::vector<int> projected_gammas() const;
};

// Sorts constraints into concave / nonconcave, drops numerically zero C
// entries and maps zeta onto the unit ball of omega (no-op without omega).
ArcSubproblem make_subproblem(std::vector<aro::QuadraticRobustConstraint> constraints,
                              const std::optional<uncertainty::Ellipsoid>& omega, Eigen::VectorXd y_lower,
                              Eigen::VectorXd y_upper, QuadraticObjective objective);

// From an eliminated outer-loop stage of prob.
ArcSubproblem make_subproblem(const aro::AroProblem& prob, const aro::EliminatedStage& stage);

struct ArcPoint {
  Eigen::VectorXd y, gamma, lambda;
};

// Smallest eigenvalue of every S-lemma block at p, minimum over constraints.
double lmi_margin(const ArcSubproblem& sub, const ArcPoint& p);

}  // namespace aropt::algorithms
