#pragma once

#include <string>
#include <vector>

#include "aropt/algorithms/projections.hpp"

namespace aropt::algorithms {

struct ApParams {
  double tol = 1e-5;
  double f0 = 1e5;
  int max_iterations = 100;  // N
  std::vector<double> nu;    // step sequence; empty means nu_i = 1
  // Stop with NC when the displacement fell by less than stall_fraction over
  // stall_window consecutive iterations. stall_window <= 0 disables the rule.
  int stall_window = 10;
  double stall_fraction = 0.01;
  conic::SolverOptions solver;

  double nu_at(int i) const { return nu.empty() ? 1.0 : nu[std::min<std::size_t>(i - 1, nu.size() - 1)]; }
  // Throws std::invalid_argument on tol <= 0, N < 1 or nu outside (0, 1].
  void validate() const;
};

enum class ApStatus { Feasible, Infeasible, Inconclusive, NumericalProblem };

const char* ap_status_name(ApStatus s);

struct ApResult {
  ApStatus status = ApStatus::Inconclusive;
  ArcPoint point;             // best feasible point
  double objective = 0.0;     // f at point
  double lower_bound = 0.0;   // SDP relaxation value
  ArcPoint start;             // relaxation solution
  int iterations = 0;
  bool premature = false;     // NC from the stall rule
  double fixed_point_residual = 0.0;  // split distance between the last A and B points
  double lower_bound_seconds = 0.0;
  double seconds = 0.0;
  std::vector<double> displacements;  // per iteration
  std::vector<double> accepted;       // objectives of accepted feasible points
  std::string message;
};

// Alternating projections between A (convex: box, S-lemma blocks, lambda >= 0,
// concave gamma links, f <= f0) and B (gamma = y'Cy), started at the SDP
// relaxation. A converged pair is polished over y_c; with nu_i < 1 the
// objective cap is lowered to nu f + (1 - nu) beta and the search restarts.
ApResult alternating_projections(const ArcSubproblem& sub, const ApParams& params = {});

}  // namespace aropt::algorithms
