#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "aropt/error.hpp"
#include "aropt/poly/polynomial.hpp"
#include "aropt/uncertainty/sets.hpp"

namespace aropt::aro {

class DegreeError : public ModelError {
 public:
  using ModelError::ModelError;
};

// Two-stage problem
//   min f(y)  s.t.  y in S_y and for all zeta in Omega there is x with
//   L(y, zeta, x) = 0, G(y, zeta, x) >= 0, x in S_x.
// Variables are ordered [y; zeta; x] in one space. Without uncertainty the
// zeta block is empty (dim 0) and not registered in the space.
struct AroProblem {
  poly::VariableSpace space;
  poly::VariableBlock y, zeta, x;

  poly::Polynomial objective;  // in y
  Eigen::VectorXd y_lower, y_upper;
  poly::PolynomialVector control_inequalities;  // extra >= 0 constraints in y

  poly::PolynomialVector equalities;    // L, one per state variable
  poly::PolynomialVector inequalities;  // G >= 0
  poly::PolynomialVector state_set;     // S_x as >= 0 constraints in x
  poly::PolynomialVector relaxed_state_set;  // compact outer set for the checks
  std::vector<std::string> inequality_labels, state_labels;

  std::optional<uncertainty::Ellipsoid> omega;

  int ny() const { return y.dim; }
  int nzeta() const { return zeta.dim; }
  int nx() const { return x.dim; }
  // Dimension of the reduced space [1; y; zeta].
  int reduced_dim() const { return 1 + y.dim + zeta.dim; }

  // Point of the full space from its parts (zeta may be empty when nzeta()==0).
  Eigen::VectorXd point(const Eigen::VectorXd& yv, const Eigen::VectorXd& zv, const Eigen::VectorXd& xv) const;

  // Throws ModelError when the equality count differs from dim(x), when a
  // term of L couples x with y, when S_x mentions y or zeta, or when Omega's
  // dimension differs from the zeta block.
  void validate() const;
};

// Builds the variable blocks in [y; zeta; x] order. nzeta may be 0.
AroProblem make_problem_space(int ny, int nzeta, int nx);

}  // namespace aropt::aro
