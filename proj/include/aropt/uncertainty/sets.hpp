#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "aropt/poly/polynomial.hpp"

namespace aropt::uncertainty {

constexpr double kContainsTolerance = 1e-9;

// {z : (z - center)' shape (z - center) <= radius}
class Ellipsoid {
 public:
  Ellipsoid(Eigen::VectorXd center, Eigen::MatrixXd shape, double radius);

  static Ellipsoid unit_ball(int n);

  int dim() const { return static_cast<int>(center_.size()); }
  const Eigen::VectorXd& center() const { return center_; }
  const Eigen::MatrixXd& shape() const { return shape_; }
  double radius() const { return radius_; }
  bool is_centered() const { return center_.isZero(0.0); }

  // radius - (z - center)' shape (z - center), positive inside.
  double margin(const Eigen::VectorXd& z) const;

  // The defining inequality over the variables first .. first+dim-1.
  poly::Polynomial as_polynomial(int first) const;

  // Affine map u -> center + T u sending the unit ball onto the ellipsoid.
  Eigen::MatrixXd unit_ball_map() const;

 private:
  Eigen::VectorXd center_;
  Eigen::MatrixXd shape_;
  double radius_;
};

// {z : A z <= b}
struct Polyhedron {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;

  int dim() const { return static_cast<int>(A.cols()); }
  static Polyhedron box(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);
};

// {v : g_j(v) >= 0 for all j}
struct SemialgebraicSet {
  poly::PolynomialVector inequalities;

  // True when some member alone bounds the listed variables: a concave
  // quadratic with negative definite Hessian on them, or one bounding
  // quadratic per variable.
  bool has_ball_or_box(std::span<const int> vars) const;
};

bool contains(const Ellipsoid& set, const Eigen::VectorXd& z, double tol = kContainsTolerance);
bool contains(const Polyhedron& set, const Eigen::VectorXd& z, double tol = kContainsTolerance);
bool contains(const SemialgebraicSet& set, std::span<const double> point, double tol = kContainsTolerance);

}  // namespace aropt::uncertainty
