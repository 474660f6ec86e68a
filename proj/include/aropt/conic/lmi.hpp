#pragma once

#include <tuple>
#include <utility>
#include <vector>

#include "aropt/conic/program.hpp"

namespace aropt::conic {

struct AffineExpr {
  double constant = 0.0;
  std::vector<std::pair<int, double>> terms;

  AffineExpr() = default;
  AffineExpr(double c) : constant(c) {}  // NOLINT(google-explicit-constructor)
  AffineExpr& add(int var, double coef) {
    if (coef != 0.0) terms.emplace_back(var, coef);
    return *this;
  }
  double eval(const Eigen::VectorXd& u) const;
};

// Builds "minimize f'u s.t. affine expressions in cones" and maps it onto the
// dual side of a standard-form program: the solver's y equals u.
class LmiBuilder {
 public:
  int add_variables(int n);
  int num_variables() const { return nvars_; }

  void add_objective(int var, double coef);
  void set_objective_constant(double c) { objective_constant_ = c; }

  void add_nonneg(const AffineExpr& e);
  void add_equality(const AffineExpr& e);
  // e[0] >= || e[1..] ||
  void add_soc(const std::vector<AffineExpr>& e);
  // Symmetric matrix given by its lower-triangle entries (i >= j) must be PSD.
  // Unlisted entries are zero.
  void add_lmi(int order, const std::vector<std::tuple<int, int, AffineExpr>>& lower);

  ConicProgram build() const;
  // Objective of the built program at u (constant included).
  double objective(const Eigen::VectorXd& u) const;
  const Eigen::VectorXd& objective_vector() const { return f_; }

 private:
  struct Slice {
    ConeKind kind;
    int order;
    std::vector<AffineExpr> entries;  // in cone-vector coordinates (svec for PSD)
  };
  int nvars_ = 0;
  Eigen::VectorXd f_;
  double objective_constant_ = 0.0;
  std::vector<AffineExpr> equalities_;
  std::vector<Slice> slices_;
};

}  // namespace aropt::conic
