#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "aropt/aro/problem.hpp"
#include "aropt/conic/solver.hpp"
#include "aropt/poly/monomial.hpp"

namespace aropt::verify {

struct DegreeConfig {
  int degree = 4;         // total certificate degree, even
  int sigma0_degree = 2;  // degree of the multiplier without a generator
  bool chaining = true;   // append each certified constraint to later subproblems
  // Solve all subproblems without chaining first, then re-solve the failures
  // with the chained constraints of the successful ones.
  bool parallel = false;
  // Checks are skipped when the indeterminates outnumber this cap.
  int max_variables = 40;
  // Stop the feasibility check at the first inconclusive constraint.
  bool stop_early = false;
  // Subproblem order over [inequalities; state set]. Empty: that order.
  std::vector<int> order;
  conic::SolverOptions solver;

  // Degree 4 up to 9 buses, degree 2 above.
  static DegreeConfig for_buses(int buses);
  void validate() const;
};

enum class Verdict { Feasible, NotFeasible, Inconclusive, Skipped };

// "F", "NF", "IC" or "--".
const char* verdict_flag(Verdict v);

constexpr double kVerdictTolerance = 1e-7;
constexpr double kResidualTolerance = 1e-7;

struct ConstraintBound {
  int index = 0;  // into [inequalities; state set]
  std::string label;
  // Certified upper bound on -min G over the set: -inf when the program is
  // unbounded, +inf when no certificate was found.
  double t = 0.0;
  bool certified = false;
  conic::SolveStatus status = conic::SolveStatus::NumericalProblem;
  double residual = 0.0;   // identity coefficient mismatch
  double min_eigen = 0.0;  // smallest Gram eigenvalue
  int chained = 0;         // redundant constraints in the subproblem
  bool bounded = false;    // found by the bounded-multiplier retry
  double seconds = 0.0;
};

struct FeasibilityReport {
  std::vector<ConstraintBound> bounds;
  Verdict verdict = Verdict::Inconclusive;  // Feasible or Inconclusive, Skipped over the cap
  int variables = 0;
  double seconds = 0.0;
  std::string message;
};

// For every inequality and state-set constraint, minimizes t such that
// G_i + t has a Putinar certificate on
//   E_y = {(zeta, x) : zeta in Omega, x in the relaxed state set, L(y, zeta, x) = 0}
// with free multipliers on the equalities. Feasible iff every bound is at most
// kVerdictTolerance; a failed solve makes its constraint inconclusive. A solve
// that fails is retried once with the Gram traces bounded, and a bound only
// counts when the identity residual and Gram eigenvalues pass the check.
FeasibilityReport feasibility_check(const aro::AroProblem& prob, const Eigen::VectorXd& y, const DegreeConfig& config);

struct InfeasibilityReport {
  // The main solve failed and the bounded-multiplier retry produced the result.
  bool bounded = false;
  // p(u) = sum coefficients[k] * monomials[k] in the unit-ball coordinates u
  // of Omega, u_j the j-th coordinate.
  std::vector<poly::Monomial> monomials;
  Eigen::VectorXd coefficients;
  double objective = 0.0;
  Verdict verdict = Verdict::Inconclusive;  // NotFeasible or Inconclusive, Skipped over the cap
  conic::SolveStatus status = conic::SolveStatus::NumericalProblem;
  double residual = 0.0;
  int variables = 0;
  double seconds = 0.0;
  std::string message;

  // p at a point of Omega.
  double eval(const aro::AroProblem& prob, const Eigen::VectorXd& zeta) const;
};

// Minimizes the integral of p over the unit ball subject to ||p||_2 <= 1 and
// p >= 0 on U_y = {zeta in Omega, x in S_x, L = 0, G >= 0} certified with
// Putinar at the configured degree, p in zeta only of that degree. The
// relaxed state set enters as redundant generators. A negative optimum proves
// that y is not robustly feasible. Failed solves get the same bounded retry.
InfeasibilityReport infeasibility_check(const aro::AroProblem& prob, const Eigen::VectorXd& y,
                                        const DegreeConfig& config);

// As above over U with y free in S_y. A negative optimum proves that for
// some zeta in Omega no (y, x) is feasible.
InfeasibilityReport global_infeasibility_check(const aro::AroProblem& prob, const DegreeConfig& config);

}  // namespace aropt::verify
