#include "aropt/algorithms/alternating.hpp"

#include <chrono>
#include <limits>
#include <stdexcept>

namespace aropt::algorithms {

const char* ap_status_name(ApStatus s) {
  switch (s) {
    case ApStatus::Feasible: return "feasible";
    case ApStatus::Infeasible: return "infeasible";
    case ApStatus::Inconclusive: return "inconclusive";
    case ApStatus::NumericalProblem: return "numerical problem";
  }
  return "?";
}

void ApParams::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("AP tolerance must be positive");
  if (max_iterations < 1) throw std::invalid_argument("AP iteration cap must be at least 1");
  for (double v : nu)
    if (!(v > 0.0 && v <= 1.0)) throw std::invalid_argument("AP step sequence must lie in (0, 1]");
}

namespace {

ArcPoint scale(const ArcPoint& p, double s) { return {s * p.y, s * p.gamma, s * p.lambda}; }

}  // namespace

ApResult alternating_projections(const ArcSubproblem& sub, const ApParams& params) {
  params.validate();
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  ApResult out;
  const LowerBound lb = sdp_lower_bound(sub, params.solver);
  out.lower_bound_seconds = lb.seconds;
  out.message = lb.message;
  if (lb.status != StepStatus::Solved) {
    out.status = lb.status == StepStatus::Infeasible ? ApStatus::Infeasible : ApStatus::NumericalProblem;
    out.seconds = elapsed();
    return out;
  }
  out.lower_bound = lb.value;
  out.start = lb.start;

  const double beta = lb.value;
  double f0 = params.f0;
  ArcPoint p0 = lb.start;
  ArcPoint p1;
  double dist = std::numeric_limits<double>::infinity();
  bool found = false;
  int i = 0;
  while (dist > params.tol && i <= params.max_iterations) {
    ++i;
    p1 = project_B(p0, sub);
    const Projection pa = project_A(p1, sub, f0, params.solver);
    if (pa.status != StepStatus::Solved) {
      out.message = "projection on A: " + pa.message;
      if (!found && pa.status == StepStatus::NumericalProblem) {
        out.status = ApStatus::NumericalProblem;
        out.iterations = i;
        out.seconds = elapsed();
        return out;
      }
      break;
    }
    p0 = pa.point;
    dist = pa.distance;
    out.displacements.push_back(dist);
    if (dist < params.tol) {
      out.fixed_point_residual = dist;
      // Best y_c for the converged y_nc, with gamma taken exactly on B.
      Projection pol = polish_controls(project_B(p0, sub), sub, params.solver);
      if (pol.status != StepStatus::Solved) pol = polish_controls(p0, sub, params.solver);
      const ArcPoint best = pol.status == StepStatus::Solved ? pol.point : p0;
      const double fb = sub.objective.eval(best.y);
      if (!found || fb <= out.objective) {
        out.point = best;
        out.objective = fb;
      }
      found = true;
      out.accepted.push_back(fb);
      const double nu = params.nu_at(i);
      f0 = nu * sub.objective.eval(p0.y) + (1.0 - nu) * beta;
      p1 = scale(p0, 1.0 / nu);
      dist = split_distance(p0, p1, sub);
      continue;
    }
    const int w = params.stall_window;
    const int n = static_cast<int>(out.displacements.size());
    if (!found && w > 0 && n > w) {
      const double before = out.displacements[n - 1 - w];
      if (before - dist < params.stall_fraction * before) {
        out.premature = true;
        break;
      }
    }
  }
  out.iterations = i;
  out.status = found ? ApStatus::Feasible : ApStatus::Inconclusive;
  out.seconds = elapsed();
  return out;
}

}  // namespace aropt::algorithms
