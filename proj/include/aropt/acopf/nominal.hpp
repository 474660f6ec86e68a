#pragma once

#include <Eigen/Dense>
#include <string>

#include "aropt/acopf/model.hpp"
#include "aropt/conic/solver.hpp"

namespace aropt::acopf {

// Reported objectives are divided by this factor in tables.
constexpr double kReportScale = 100.0;

struct NominalBound {
  conic::SolveStatus status = conic::SolveStatus::NumericalProblem;
  double objective = 0.0;  // currency units per hour
  Eigen::MatrixXd W;       // relaxed x x'
  Eigen::VectorXd x;       // rank-one estimate, reference angle zero
  double rank_ratio = 0.0;  // third over first eigenvalue of W
  int iterations = 0;
  double seconds = 0.0;
  std::string message;

  double reported() const { return objective / kReportScale; }
};

// Rank relaxation of the nominal ACOPF: W PSD of order 2n in place of x x',
// generator, voltage and branch current windows, power balances, convex
// quadratic cost through second-order cone epigraphs. The reference angle
// constraint is dropped since every constraint is invariant under a common
// phase rotation.
NominalBound nominal_sdp_bound(const PowerNetwork& net, const conic::SolverOptions& options = {});

// Copy with every window [lo, hi] tightened to [lo + s|lo|, hi - s|hi|].
PowerNetwork squeeze_bounds(const PowerNetwork& net, double shrink);

struct WarmStart {
  Eigen::VectorXd y, x;
  double sdp_objective = 0.0;
  double rank_ratio = 0.0;
  double condition = 0.0;  // of the equality Jacobian at x
};

// Solves the squeezed nominal relaxation, reads the control from its rank-one
// estimate and recovers x by Newton power flow at zeta = 0. Throws ModelError
// when the relaxation fails, the power flow does not converge or the anchor
// Jacobian is rank deficient.
WarmStart squeeze_warm_start(const AcopfModel& model, double shrink = 0.005, const conic::SolverOptions& options = {});

}  // namespace aropt::acopf
