#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "aropt/acopf/injection.hpp"
#include "aropt/acopf/network.hpp"
#include "aropt/aro/problem.hpp"
#include "aropt/uncertainty/sets.hpp"

namespace aropt::acopf {

// alpha_k = (Pmax_k - Pmin_k) / sum over generators, 0 at buses without one.
Eigen::VectorXd participation_factors(const PowerNetwork& net);

// Index bookkeeping for the robust ACOPF.
//   y = [t; P^g over PV buses; V^g over generator buses]   (per unit)
//   zeta: one coordinate per bus with positive active load
//   x = [Re V; Im V]
// Equalities, in order: active balance at PV buses, active balance at PQ
// buses, reactive balance at PQ buses, |V_k|^2 - V^g_k at generator buses,
// Im V at the reference bus.
struct AcopfModel {
  PowerNetwork net;
  InjectionMatrices mats;
  int n = 0;
  int ref = -1;
  std::vector<int> pv, pq, gens, loads;
  std::vector<int> zeta_of_bus;  // -1 when the bus has no uncertainty coordinate
  Eigen::VectorXd alpha, gamma;  // per bus
  std::vector<int> pg_index, vg_index;  // bus -> y index, or -1
  int t_index = 0;
  int ny = 0;

  int nzeta() const { return static_cast<int>(loads.size()); }
  int nx() const { return 2 * n; }

  Eigen::VectorXd equality_residual(const Eigen::VectorXd& y, const Eigen::VectorXd& zeta,
                                    const Eigen::VectorXd& x) const;
  Eigen::MatrixXd equality_jacobian(const Eigen::VectorXd& x) const;

  // Operating point quantities at a state x, per unit.
  Eigen::VectorXd active_injections(const Eigen::VectorXd& x) const;
  Eigen::VectorXd reactive_injections(const Eigen::VectorXd& x) const;

  // Cost in currency units per hour of the control vector.
  double cost(const Eigen::VectorXd& y) const;
  // y that reproduces the state x at zeta = 0: t = reference generation,
  // P^g = generation at PV buses, V^g = |V|^2 at generator buses.
  Eigen::VectorXd control_from_state(const Eigen::VectorXd& x) const;
};

// Validates the network and sets up the layout.
AcopfModel make_model(const PowerNetwork& net);

// Robust ACOPF in the two-stage form. Without omega the problem is nominal.
// Inequalities: reference P window against Pmin and t, Q windows at
// generator buses, then branch current limits (from, to) for rated branches.
// State set: voltage windows at PQ buses.
aro::AroProblem build_aro(const AcopfModel& model, const std::optional<uncertainty::Ellipsoid>& omega);

// Order of the posterior feasibility subproblems over [inequalities; state
// set]: generator P, generator Q, voltage windows, then branch limits.
std::vector<int> certificate_order(const AcopfModel& model, const aro::AroProblem& prob);

// Ellipsoid over the zeta coordinates for a load fraction w.
uncertainty::Ellipsoid load_uncertainty(const AcopfModel& model, double w, bool correlated);

}  // namespace aropt::acopf
