#include "aropt/acopf/powerflow.hpp"

#include <Eigen/LU>
#include <cmath>

namespace aropt::acopf {

const char* power_flow_status_name(PowerFlowStatus s) {
  switch (s) {
    case PowerFlowStatus::Converged: return "converged";
    case PowerFlowStatus::NoConvergence: return "no convergence";
    case PowerFlowStatus::SingularJacobian: return "singular Jacobian";
  }
  return "?";
}

Eigen::VectorXd flat_start(const AcopfModel& model, const Eigen::VectorXd& y) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(model.nx());
  for (int k = 0; k < model.n; ++k) x(k) = 1.0;
  for (int k : model.gens) x(k) = std::sqrt(std::max(y(model.vg_index[k]), 0.0));
  return x;
}

PowerFlowResult newton_power_flow(const AcopfModel& model, const Eigen::VectorXd& y, const Eigen::VectorXd& zeta,
                                  const std::optional<Eigen::VectorXd>& start, const PowerFlowOptions& options) {
  require_dim(y.size() == model.ny, "power flow: control vector has the wrong size");
  PowerFlowResult res;
  res.x = start ? *start : flat_start(model, y);
  require_dim(res.x.size() == model.nx(), "power flow: start has the wrong size");
  for (res.iterations = 0;; ++res.iterations) {
    const Eigen::VectorXd r = model.equality_residual(y, zeta, res.x);
    res.residual = r.lpNorm<Eigen::Infinity>();
    if (!std::isfinite(res.residual)) {
      res.status = PowerFlowStatus::NoConvergence;
      return res;
    }
    if (res.residual <= options.tolerance) {
      res.status = PowerFlowStatus::Converged;
      return res;
    }
    if (res.iterations >= options.max_iterations) break;
    const Eigen::MatrixXd J = model.equality_jacobian(res.x);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) {
      res.status = PowerFlowStatus::SingularJacobian;
      return res;
    }
    res.x -= lu.solve(r);
  }
  res.status = PowerFlowStatus::NoConvergence;
  return res;
}

Eigen::VectorXd case_dispatch(const AcopfModel& model) {
  Eigen::VectorXd y(model.ny);
  for (const Generator& g : model.net.generators) {
    if (g.bus == model.ref) y(model.t_index) = g.pg;
    else y(model.pg_index[g.bus]) = g.pg;
    y(model.vg_index[g.bus]) = g.vg * g.vg;
  }
  return y;
}

}  // namespace aropt::acopf
