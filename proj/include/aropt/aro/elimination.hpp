#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <string>
#include <vector>

#include "aropt/aro/problem.hpp"

namespace aropt::aro {

// Symmetric matrix Q with p(v) = [1; v]' Q [1; v], v being the variables
// listed in vars. Throws DegreeError when p has degree > 2 or mentions a
// variable outside vars.
Eigen::SparseMatrix<double> homogeneous_form(const poly::Polynomial& p, const std::vector<int>& vars);

// zeta' A zeta + (y' B + b') zeta + y' C y + c' y + d
struct QuadraticRobustConstraint {
  Eigen::MatrixXd A;  // nzeta x nzeta
  Eigen::MatrixXd B;  // ny x nzeta
  Eigen::VectorXd b;
  Eigen::MatrixXd C;  // ny x ny
  Eigen::VectorXd c;
  double d = 0.0;
  bool psd = false;  // C positive semidefinite
  std::string label;

  int ny() const { return static_cast<int>(C.rows()); }
  int nzeta() const { return static_cast<int>(A.rows()); }
  double eval(const Eigen::VectorXd& y, const Eigen::VectorXd& zeta) const;

  // From the homogeneous form over [1; y; zeta].
  static QuadraticRobustConstraint from_form(const Eigen::MatrixXd& Q, int ny, int nzeta);
};

constexpr double kPsdFlagTolerance = 1e-9;
constexpr double kRankConditionLimit = 1e10;

class RankDeficient : public ModelError {
 public:
  RankDeficient(const std::string& what, double condition) : ModelError(what), condition(condition) {}
  double condition;
};

// A x + Lhat2(y, zeta) = 0, valid near the anchor, with the trust region
// ||x - center|| <= epsilon.
struct LinearizedStage {
  Eigen::VectorXd anchor;
  Eigen::MatrixXd A, A_inv;
  Eigen::MatrixXd offset;  // Lhat2 = offset * [1; y; zeta]
  Eigen::VectorXd center;
  double epsilon = 0.0;
  double condition = 0.0;

  // x(y, zeta) = recover() * [1; y; zeta]
  Eigen::MatrixXd recover() const { return -A_inv * offset; }
  Eigen::VectorXd recover_at(const Eigen::VectorXd& y, const Eigen::VectorXd& zeta) const;
};

// First-order expansion of L in x at the anchor (zeta = 0). The offset must
// be affine in (y, zeta). Throws RankDeficient when cond(A) > 1e10.
LinearizedStage linearize_equalities(const AroProblem& prob, const Eigen::VectorXd& anchor,
                                     const Eigen::VectorXd& center, double epsilon);
LinearizedStage linearize_equalities(const AroProblem& prob, const Eigen::VectorXd& anchor);

struct EliminatedStage {
  std::vector<QuadraticRobustConstraint> constraints;
  Eigen::MatrixXd recover;  // x = recover * [1; y; zeta]
};

// Substitutes x(y, zeta) into G, S_x and the trust region (when epsilon > 0).
// Throws DegreeError when a result is not quadratic.
EliminatedStage eliminate_state(const AroProblem& prob, const LinearizedStage& stage);

}  // namespace aropt::aro
