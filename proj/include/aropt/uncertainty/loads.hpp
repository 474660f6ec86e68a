#pragma once

#include <Eigen/Dense>
#include <vector>

#include "aropt/uncertainty/sets.hpp"

namespace aropt::uncertainty {

// Bus indices whose active demand is positive; one uncertainty coordinate each.
std::vector<int> uncertain_buses(const Eigen::VectorXd& loads);

// Load ellipsoid in MW: diagonal shape 1/(w P_k)^2, or the correlated variant
// Diag(sqrt(s)) R Diag(sqrt(s)) with R_ij = 1/n_buses off the diagonal.
Ellipsoid build_load_ellipsoid(const Eigen::VectorXd& loads, double w, bool correlated, int n_buses);

}  // namespace aropt::uncertainty
