#include "aropt/algorithms/outer.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "aropt/aro/elimination.hpp"
#include "aropt/poly/affine.hpp"

namespace aropt::algorithms {

StateSolve solve_state(const aro::AroProblem& prob, const Eigen::VectorXd& y, const Eigen::VectorXd& zeta,
                       const Eigen::VectorXd& start, double tol, int max_iterations) {
  require_dim(start.size() == prob.nx(), "state start has the wrong size");
  StateSolve out;
  out.x = start;
  Eigen::VectorXd r(prob.nx());
  for (out.iterations = 0;; ++out.iterations) {
    const Eigen::VectorXd pt = prob.point(y, zeta, out.x);
    const std::span<const double> sp(pt.data(), static_cast<std::size_t>(pt.size()));
    for (int i = 0; i < prob.nx(); ++i) r(i) = prob.equalities[i].eval(sp);
    out.residual = r.lpNorm<Eigen::Infinity>();
    if (!std::isfinite(out.residual)) return out;
    if (out.residual <= tol) {
      out.converged = true;
      return out;
    }
    if (out.iterations >= max_iterations) return out;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(poly::jacobian(prob.equalities, prob.x, sp));
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) return out;
    out.x -= lu.solve(r);
  }
}

EpsilonRule size_epsilon_rule(int buses) {
  const double div = buses < 30 ? 10.0 : 30.0;
  return [div](double norm) { return norm / div; };
}

void OuterParams::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("outer tolerance must be positive");
  if (max_iterations < 1) throw std::invalid_argument("outer iteration cap must be at least 1");
  if (rank_retries < 0) throw std::invalid_argument("rank retries must be nonnegative");
  ap.validate();
}

const char* outer_flag(OuterStatus s) {
  switch (s) {
    case OuterStatus::Feasible: return "F";
    case OuterStatus::LowerBoundInfeasible: return "LNF";
    case OuterStatus::NoConvergence: return "NC";
    case OuterStatus::NumericalProblem: return "NP";
    case OuterStatus::RankDeficient: return "RD";
    case OuterStatus::StateFailure: return "PF";
  }
  return "?";
}

const OuterIterate* OuterHistory::best() const {
  const OuterIterate* b = nullptr;
  for (const OuterIterate& it : iterates)
    if (it.status == OuterStatus::Feasible && (!b || it.objective < b->objective)) b = &it;
  return b;
}

namespace {

// Unit right singular vector of the smallest singular value of the Jacobian.
Eigen::VectorXd weakest_direction(const aro::AroProblem& prob, const Eigen::VectorXd& y, const Eigen::VectorXd& x) {
  const Eigen::VectorXd pt = prob.point(y, Eigen::VectorXd(), x);
  const Eigen::MatrixXd J =
      poly::jacobian(prob.equalities, prob.x, std::span<const double>(pt.data(), static_cast<std::size_t>(pt.size())));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeFullV);
  return svd.matrixV().col(J.cols() - 1);
}

}  // namespace

OuterHistory dynamic_outer(const aro::AroProblem& prob, const Eigen::VectorXd& y0, const Eigen::VectorXd& x0,
                           const OuterParams& params) {
  params.validate();
  require_dim(y0.size() == prob.ny() && x0.size() == prob.nx(), "start point has the wrong size");
  const EpsilonRule rule = params.epsilon_rule ? params.epsilon_rule : size_epsilon_rule(prob.nx() / 2);
  OuterHistory hist;
  Eigen::VectorXd y_prev = y0, x_prev = x0;
  double f_prev = std::numeric_limits<double>::infinity();

  for (int j = 1; j <= params.max_iterations; ++j) {
    const auto t0 = std::chrono::steady_clock::now();
    OuterIterate it;
    it.j = j;
    it.objective = std::numeric_limits<double>::infinity();
    it.epsilon = rule(x_prev.norm());
    Eigen::VectorXd anchor = x_prev;
    std::optional<aro::LinearizedStage> stage;
    for (;;) {
      try {
        stage = aro::linearize_equalities(prob, anchor, anchor, it.epsilon);
        break;
      } catch (const aro::RankDeficient& e) {
        it.condition = e.condition;
        if (it.rank_retries >= params.rank_retries) {
          it.message = e.what();
          break;
        }
        ++it.rank_retries;
        it.epsilon *= 0.5;
        const Eigen::VectorXd moved = anchor + it.epsilon * weakest_direction(prob, y_prev, anchor);
        const StateSolve s = solve_state(prob, y_prev, Eigen::VectorXd(), moved);
        anchor = s.converged ? s.x : moved;
      }
    }
    if (!stage) {
      it.status = OuterStatus::RankDeficient;
      it.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      hist.iterates.push_back(std::move(it));
      break;
    }
    it.condition = stage->condition;
    const aro::EliminatedStage elim = aro::eliminate_state(prob, *stage);
    const ArcSubproblem sub = make_subproblem(prob, elim);
    it.ap = alternating_projections(sub, params.ap);
    it.message = it.ap.message;
    switch (it.ap.status) {
      case ApStatus::Feasible: it.status = OuterStatus::Feasible; break;
      case ApStatus::Infeasible: it.status = OuterStatus::LowerBoundInfeasible; break;
      case ApStatus::Inconclusive: it.status = OuterStatus::NoConvergence; break;
      case ApStatus::NumericalProblem: it.status = OuterStatus::NumericalProblem; break;
    }
    if (it.status == OuterStatus::Feasible) {
      it.y = it.ap.point.y;
      it.objective = it.ap.objective;
      const StateSolve s = solve_state(prob, it.y, Eigen::VectorXd(), stage->recover_at(it.y, Eigen::VectorXd::Zero(prob.nzeta())));
      if (s.converged) {
        it.x = s.x;
      } else {
        it.status = OuterStatus::StateFailure;
        it.message = "state recovery at zeta = 0 did not converge";
      }
    }
    it.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool feasible = it.status == OuterStatus::Feasible;
    const double f = it.objective;
    if (feasible) {
      y_prev = it.y;
      x_prev = it.x;
    }
    hist.iterates.push_back(std::move(it));
    if (!feasible || f_prev - f <= params.tol) break;
    f_prev = f;
  }
  return hist;
}

}  // namespace aropt::algorithms
