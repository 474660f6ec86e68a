#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "aropt/aro/problem.hpp"

namespace aropt::algorithms {

struct SampleReport {
  int samples = 0;
  int recovered = 0;   // Newton converged on L(y, zeta, .) = 0
  double worst = 0.0;  // smallest G or S_x value over recovered samples
  std::string worst_label;
  Eigen::VectorXd worst_zeta;
};

// Draws points of Omega (half on the boundary, half uniform in the interior),
// recovers the state by Newton from x0 and records the smallest constraint
// value. Deterministic for a fixed seed.
SampleReport sample_robustness(const aro::AroProblem& prob, const Eigen::VectorXd& y, const Eigen::VectorXd& x0,
                               int samples, std::uint64_t seed);

}  // namespace aropt::algorithms
