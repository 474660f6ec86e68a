#pragma once

#include <Eigen/Dense>
#include <string>

#include "aropt/algorithms/subproblem.hpp"
#include "aropt/conic/solver.hpp"

namespace aropt::algorithms {

enum class StepStatus { Solved, Infeasible, NumericalProblem };

const char* step_status_name(StepStatus s);

struct LowerBound {
  StepStatus status = StepStatus::NumericalProblem;
  double value = 0.0;
  ArcPoint start;
  Eigen::MatrixXd Y;  // lifted [1; y][1; y]'
  double seconds = 0.0;
  std::string message;
};

// SDP relaxation of the subproblem: gamma_i = <Y, C_i>, Y PSD with first
// column [1; y], all S-lemma blocks, lambda >= 0 and the box. Infeasible
// means the subproblem is infeasible over its trust region.
LowerBound sdp_lower_bound(const ArcSubproblem& sub, const conic::SolverOptions& options = {});

// gamma_i := y'C_i y for every nonconcave constraint; y, lambda and the
// concave gammas are kept.
ArcPoint project_B(const ArcPoint& p, const ArcSubproblem& sub);

struct Projection {
  StepStatus status = StepStatus::NumericalProblem;
  ArcPoint point;
  double distance = 0.0;
  std::string message;
};

// Euclidean projection of (y_nc, gamma_nonconcave) of the target onto
// A intersected with {f <= f0}. lambda, y_c and the concave gammas are free.
Projection project_A(const ArcPoint& target, const ArcSubproblem& sub, double f0,
                     const conic::SolverOptions& options = {});

// Best y_c and lambda for fixed y_nc and nonconcave gammas: minimizes f over A.
Projection polish_controls(const ArcPoint& fixed, const ArcSubproblem& sub, const conic::SolverOptions& options = {});

// ||(y_nc, gamma_nonconcave)(a) - (...)(b)||
double split_distance(const ArcPoint& a, const ArcPoint& b, const ArcSubproblem& sub);

}  // namespace aropt::algorithms
