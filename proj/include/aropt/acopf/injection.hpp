#pragma once

#include <Eigen/Sparse>
#include <vector>

#include "aropt/acopf/network.hpp"

namespace aropt::acopf {

using RealSparse = Eigen::SparseMatrix<double>;

// Symmetric quadratic forms in x = [Re V; Im V]:
//   x' P[k] x = active injection at bus k
//   x' Q[k] x = reactive injection at bus k
//   x' M[k] x = |V_k|^2
//   x' flow_from[l] x = |I_l|^2 at the from end, flow_to[l] at the to end.
struct InjectionMatrices {
  int n = 0;
  std::vector<RealSparse> P, Q, M;
  std::vector<RealSparse> flow_from, flow_to;
};

// Real symmetric form R of a complex matrix H with x' R x = Re(V^H H V).
RealSparse hermitian_real_form(const ComplexSparse& H);

InjectionMatrices build_injection_matrices(const PowerNetwork& net);

// x' Q x for a sparse symmetric Q.
double quadratic_form(const RealSparse& Q, const Eigen::VectorXd& x);

// x = [Re V; Im V]
Eigen::VectorXd stack_voltage(const Eigen::VectorXcd& V);
Eigen::VectorXcd unstack_voltage(const Eigen::VectorXd& x);

}  // namespace aropt::acopf
