#pragma once

#include <Eigen/Dense>
#include <optional>

#include "aropt/acopf/model.hpp"

namespace aropt::acopf {

enum class PowerFlowStatus { Converged, NoConvergence, SingularJacobian };

const char* power_flow_status_name(PowerFlowStatus s);

struct PowerFlowOptions {
  double tolerance = 1e-8;  // infinity norm of L
  int max_iterations = 30;
};

struct PowerFlowResult {
  PowerFlowStatus status = PowerFlowStatus::NoConvergence;
  Eigen::VectorXd x;
  int iterations = 0;
  double residual = 0.0;

  bool converged() const { return status == PowerFlowStatus::Converged; }
};

// Flat start: Re V = sqrt(V^g) at generator buses, 1 elsewhere, Im V = 0.
Eigen::VectorXd flat_start(const AcopfModel& model, const Eigen::VectorXd& y);

// Newton iteration on L(y, zeta, .) = 0. An empty zeta means zeta = 0.
PowerFlowResult newton_power_flow(const AcopfModel& model, const Eigen::VectorXd& y, const Eigen::VectorXd& zeta,
                                  const std::optional<Eigen::VectorXd>& start = std::nullopt,
                                  const PowerFlowOptions& options = {});

// y from the dispatch stored in the case file (generator Pg and Vg).
Eigen::VectorXd case_dispatch(const AcopfModel& model);

}  // namespace aropt::acopf
