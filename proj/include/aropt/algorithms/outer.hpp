#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "aropt/algorithms/alternating.hpp"
#include "aropt/aro/problem.hpp"

namespace aropt::algorithms {

struct StateSolve {
  bool converged = false;
  Eigen::VectorXd x;
  int iterations = 0;
  double residual = 0.0;
};

// Newton iteration on L(y, zeta, x) = 0 in x. An empty zeta means zeta = 0.
StateSolve solve_state(const aro::AroProblem& prob, const Eigen::VectorXd& y, const Eigen::VectorXd& zeta,
                       const Eigen::VectorXd& start, double tol = 1e-8, int max_iterations = 30);

// Trust-region radius from the norm of the last state.
using EpsilonRule = std::function<double(double)>;

// ||x|| / 10 for fewer than 30 buses, ||x|| / 30 otherwise.
EpsilonRule size_epsilon_rule(int buses);

struct OuterParams {
  double tol = 1e-5;
  int max_iterations = 1;
  EpsilonRule epsilon_rule;  // empty: size rule with dim(x) / 2 buses
  int rank_retries = 5;
  ApParams ap;

  void validate() const;
};

enum class OuterStatus { Feasible, LowerBoundInfeasible, NoConvergence, NumericalProblem, RankDeficient, StateFailure };

// Table flag: "F", "LNF", "NC", "NP", "RD" or "PF".
const char* outer_flag(OuterStatus s);

struct OuterIterate {
  int j = 0;
  OuterStatus status = OuterStatus::NumericalProblem;
  double epsilon = 0.0;
  double condition = 0.0;   // of the equality Jacobian at the anchor
  int rank_retries = 0;
  Eigen::VectorXd y, x;     // x solves L(y, 0, x) = 0 when Feasible
  double objective = 0.0;   // infinity unless Feasible
  ApResult ap;
  double seconds = 0.0;
  std::string message;
};

struct OuterHistory {
  std::vector<OuterIterate> iterates;

  // Feasible iterate with the lowest objective, or nullptr.
  const OuterIterate* best() const;
};

// Repeats linearize -> eliminate -> S-lemma -> alternating projections around
// the last state, starting from a nominal point with L(y0, 0, x0) = 0. Stops
// after a non-feasible iterate, when the objective improves by at most tol,
// or after max_iterations. A rank-deficient anchor is retried with half the
// radius at a nearby solution of L(y, 0, .) = 0.
OuterHistory dynamic_outer(const aro::AroProblem& prob, const Eigen::VectorXd& y0, const Eigen::VectorXd& x0,
                           const OuterParams& params = {});

}  // namespace aropt::algorithms
