#pragma once

#include <span>
#include <tuple>
#include <vector>

#include "aropt/aro/elimination.hpp"
#include "aropt/conic/lmi.hpp"
#include "aropt/uncertainty/sets.hpp"

namespace aropt::aro {

// h(y, zeta) = h1(y) + zeta' h2(y) with h1, h2 affine in local y indices.
struct AffineUncertainConstraint {
  conic::AffineExpr h1;
  std::vector<conic::AffineExpr> h2;
};

// Emits z >= 0, b'z - h1(y) <= 0, A'z + h2(y) = 0 for Omega = {A zeta <= b}.
// y_vars maps local y indices to builder variables. Returns the first z index.
int robust_lp_counterpart(const AffineUncertainConstraint& h, const uncertainty::Polyhedron& omega,
                          conic::LmiBuilder& lb, std::span<const int> y_vars);

// PSD block of order 1 + nzeta whose entries are affine in the local
// variables [y (ny); gamma; lambda]:
//   [ gamma + c'y + d - lambda (r - z*' S z*)   (B'y + b)'/2 - lambda (S z*)' ]
//   [ (B'y + b)/2 - lambda S z*                 lambda S + A                  ]
// With nzeta == 0 the block is the scalar gamma + c'y + d.
struct SlemmaCounterpart {
  int ny = 0;
  int order = 0;
  std::vector<std::tuple<int, int, conic::AffineExpr>> lower;

  int gamma_var() const { return ny; }
  int lambda_var() const { return ny + 1; }
  // Block value at the given local variables.
  Eigen::MatrixXd eval(const Eigen::VectorXd& y, double gamma, double lambda) const;
};

SlemmaCounterpart slemma_counterpart(const QuadraticRobustConstraint& qc, const uncertainty::Ellipsoid& omega);
// The scalar block gamma + c'y + d of a constraint without uncertainty.
SlemmaCounterpart certain_counterpart(const QuadraticRobustConstraint& qc);

// Adds the block and lambda >= 0 to the builder. vars maps the local indices
// [y; gamma; lambda] to builder variables; a negative gamma entry means gamma
// is the constant gamma_value.
void emit(const SlemmaCounterpart& s, conic::LmiBuilder& lb, std::span<const int> y_vars, int gamma_var,
          int lambda_var, double gamma_value = 0.0);

// Largest smallest-eigenvalue of the block over lambda >= 0 at fixed y with
// gamma = y'Cy, capped at 1; nonnegative iff the constraint holds on all of Omega.
double slemma_margin(const QuadraticRobustConstraint& qc, const uncertainty::Ellipsoid& omega,
                     const Eigen::VectorXd& y);

// Rewrites qc in the coordinates u with zeta = center + T u, T the unit-ball
// map of omega, so that the new uncertainty set is the unit ball.
QuadraticRobustConstraint to_unit_ball(const QuadraticRobustConstraint& qc, const uncertainty::Ellipsoid& omega);

}  // namespace aropt::aro
