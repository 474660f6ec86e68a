#pragma once

#include <Eigen/Dense>
#include <vector>

#include "aropt/poly/polynomial.hpp"

namespace aropt::poly {

// v -> matrix * (variables listed in inputs) + offset, one output per row.
struct AffineVectorMap {
  Eigen::MatrixXd matrix;
  std::vector<int> inputs;
  PolynomialVector offset;

  int rows() const { return static_cast<int>(offset.size()); }
  Polynomial output(int i) const;

  static AffineVectorMap identity(const VariableBlock& block);
};

// Composes p with x := map, x being the variables of block. The map must not
// reference block variables.
Polynomial substitute_affine(const Polynomial& p, const VariableBlock& block,
                             const AffineVectorMap& map);
PolynomialVector substitute_affine(const PolynomialVector& v, const VariableBlock& block,
                                   const AffineVectorMap& map);

struct Taylor1 {
  AffineVectorMap map;  // inputs are the block variables
  Eigen::MatrixXd jacobian;
};

// First-order expansion of F in the block variables at anchor. Other variables
// are kept symbolically in the offset; the Jacobian is taken with them at 0.
Taylor1 taylor1(const PolynomialVector& F, const VariableBlock& block,
                const Eigen::VectorXd& anchor);

// Dense Jacobian of F in the block variables at a full-space point.
Eigen::MatrixXd jacobian(const PolynomialVector& F, const VariableBlock& block,
                         std::span<const double> point);

}  // namespace aropt::poly
