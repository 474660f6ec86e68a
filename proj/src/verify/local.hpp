#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "aropt/aro/problem.hpp"
#include "aropt/aro/sos.hpp"
#include "aropt/conic/solver.hpp"
#include "aropt/verify/checks.hpp"

namespace aropt::verify::detail {

// Polynomials of a problem with y fixed (or free) and zeta = center + T u,
// where the unit-ball coordinates u take fresh variable indices.
class LocalSystem {
 public:
  // fixed_y == nullptr keeps y as indeterminates.
  LocalSystem(const aro::AroProblem& prob, const Eigen::VectorXd* fixed_y);

  poly::Polynomial map(const poly::Polynomial& p) const;
  poly::PolynomialVector map(const poly::PolynomialVector& v) const;

  const std::vector<int>& vars() const { return vars_; }
  const std::vector<int>& u() const { return u_; }
  // 1 - ||u||^2, absent without uncertainty.
  std::optional<poly::Polynomial> ball() const;
  // Unit-ball coordinates of zeta.
  Eigen::VectorXd to_u(const Eigen::VectorXd& zeta) const;

 private:
  const aro::AroProblem& prob_;
  std::optional<Eigen::VectorXd> y_;
  std::vector<int> vars_, u_;
  Eigen::VectorXd center_;
  Eigen::MatrixXd T_;
};

// Appends the sum of the concave quadratic generators when that sum bounds
// every indeterminate, so that the set carries an explicit ball constraint.
void add_redundant_ball(uncertainty::SemialgebraicSet& set, const std::vector<int>& vars);

// Divides each polynomial by its largest absolute coefficient.
void normalize(poly::PolynomialVector& v);

// Retry bound on the total trace of the Gram matrices, for instances whose
// optimal certificates need unbounded multipliers. Any bounded certificate is
// still a certificate.
constexpr double kMultiplierBound = 1e3;

// Adds sum of Gram traces <= bound.
void bound_multipliers(aro::SosProgram& sp, const aro::PutinarMultipliers& mult, double bound);

struct CertificateCheck {
  double residual = 0.0;
  double min_eigen = 0.0;
  bool ok = false;
};

// Identity residual and Gram eigenvalues of a solved certificate.
CertificateCheck check_certificate(const aro::SosProgram& sp, int id, const aro::PutinarMultipliers& mult,
                                   const Eigen::VectorXd& x);

}  // namespace aropt::verify::detail
