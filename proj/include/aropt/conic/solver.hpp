#pragma once

#include <Eigen/Dense>
#include <string>

#include "aropt/conic/program.hpp"

namespace aropt::conic {

// AlmostOptimal: the method stalled or hit the iteration limit at a point that
// meets the reduced tolerances.
enum class SolveStatus { Optimal, AlmostOptimal, PrimalInfeasible, DualInfeasible, NumericalProblem };

const char* status_name(SolveStatus status);

enum class SchurMode { Auto, Dense, Sparse };

struct SolverOptions {
  double feasibility_tolerance = 1e-8;
  double gap_tolerance = 1e-8;
  double infeasibility_tolerance = 1e-8;
  double reduced_tolerance = 1e-6;  // AlmostOptimal threshold on an early exit
  int max_iterations = 200;
  double step_factor = 0.99;
  SchurMode schur = SchurMode::Auto;
  bool parallel = true;
  int verbosity = 0;
  // On NumericalProblem, look for an improving ray with a phase 1 solve.
  bool phase1 = true;
};

struct SolveResult {
  SolveStatus status = SolveStatus::NumericalProblem;
  // For Optimal and NumericalProblem: the last iterate in original units.
  // For PrimalInfeasible: (y, z) is a Farkas ray with b'y = 1, A'y + z = 0.
  // For DualInfeasible: x is an improving ray with c'x = -1, A x = 0.
  Eigen::VectorXd x, y, z;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_residual = 0.0;  // relative, see solve()
  double dual_residual = 0.0;
  double relative_gap = 0.0;
  int iterations = 0;
  double seconds = 0.0;
  std::string message;

  bool optimal() const { return status == SolveStatus::Optimal || status == SolveStatus::AlmostOptimal; }
};

// Homogeneous self-dual interior-point method with Nesterov-Todd scaling and
// Mehrotra predictor-corrector steps. A NumericalProblem outcome is followed
// by a phase 1 solve that may turn it into DualInfeasible. Residuals are reported as
//   |A x - b| / (1 + |b|),  |c - A'y - z| / (1 + |c|),
//   max(|c'x - b'y|, x'z) / (1 + |c'x| + |b'y|).
SolveResult solve(const ConicProgram& program, const SolverOptions& options = {});

}  // namespace aropt::conic
