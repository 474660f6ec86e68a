#include "aropt/algorithms/projections.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>

#include "aropt/aro/counterparts.hpp"
#include "aropt/conic/lmi.hpp"

namespace aropt::algorithms {

using conic::AffineExpr;

const char* step_status_name(StepStatus s) {
  switch (s) {
    case StepStatus::Solved: return "solved";
    case StepStatus::Infeasible: return "infeasible";
    case StepStatus::NumericalProblem: return "numerical problem";
  }
  return "?";
}

namespace {

// Rows L with L'L = M for M positive semidefinite up to rounding.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& M) {
  if (M.size() == 0) return Eigen::MatrixXd(0, M.cols());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  const double cut = 1e-14 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    if (es.eigenvalues()(i) > cut) keep.push_back(i);
  Eigen::MatrixXd L(static_cast<Eigen::Index>(keep.size()), M.cols());
  for (std::size_t k = 0; k < keep.size(); ++k)
    L.row(static_cast<Eigen::Index>(k)) = std::sqrt(es.eigenvalues()(keep[k])) * es.eigenvectors().col(keep[k]).transpose();
  return L;
}

AffineExpr scaled(const AffineExpr& e, double s) {
  AffineExpr out(s * e.constant);
  for (const auto& [v, c] : e.terms) out.add(v, s * c);
  return out;
}

void accumulate(AffineExpr& dst, const AffineExpr& e, double s) {
  dst.constant += s * e.constant;
  for (const auto& [v, c] : e.terms) dst.add(v, s * c);
}

// L v as affine expressions.
std::vector<AffineExpr> apply(const Eigen::MatrixXd& L, const std::vector<AffineExpr>& v) {
  std::vector<AffineExpr> out(L.rows());
  for (Eigen::Index r = 0; r < L.rows(); ++r)
    for (Eigen::Index j = 0; j < L.cols(); ++j)
      if (L(r, j) != 0.0) accumulate(out[r], v[j], L(r, j));
  return out;
}

// ||L v||^2 <= u  as  ||(2 L v, u - 1)|| <= u + 1
void add_square_bound(conic::LmiBuilder& lb, const Eigen::MatrixXd& L, const std::vector<AffineExpr>& v,
                      const AffineExpr& u) {
  if (L.rows() == 0) {
    lb.add_nonneg(u);
    return;
  }
  std::vector<AffineExpr> cone;
  AffineExpr top = u;
  top.constant += 1.0;
  cone.push_back(top);
  for (const AffineExpr& e : apply(L, v)) cone.push_back(scaled(e, 2.0));
  AffineExpr last = u;
  last.constant -= 1.0;
  cone.push_back(last);
  lb.add_soc(cone);
}

// Variables of the set A as affine expressions, so that parts can be fixed.
struct SetA {
  std::vector<AffineExpr> y, gamma;
  std::vector<int> lambda;  // per constraint, -1 without uncertainty
  Eigen::MatrixXi ybar;     // lifted block variables, lifted link only
};

enum class GammaLink { Lifted, Convex };

SetA add_set_A(const ArcSubproblem& sub, conic::LmiBuilder& lb, GammaLink link, const ArcPoint* fixed) {
  const int ny = sub.ny();
  const int m = sub.num_constraints();
  SetA s;
  s.y.resize(ny);
  std::vector<bool> y_fixed(ny, false), g_fixed(sub.num_gamma, false);
  if (fixed) {
    for (int j : sub.nc) y_fixed[j] = true;
    for (int g : sub.projected_gammas()) g_fixed[g] = true;
  }
  for (int j = 0; j < ny; ++j) {
    if (y_fixed[j]) {
      s.y[j] = AffineExpr(fixed->y(j));
      continue;
    }
    s.y[j] = AffineExpr().add(lb.add_variables(1), 1.0);
    if (std::isfinite(sub.y_lower(j))) {
      AffineExpr e = s.y[j];
      e.constant -= sub.y_lower(j);
      lb.add_nonneg(e);
    }
    if (std::isfinite(sub.y_upper(j))) lb.add_nonneg(AffineExpr(sub.y_upper(j)).add(s.y[j].terms[0].first, -1.0));
  }
  s.gamma.resize(sub.num_gamma);
  if (link == GammaLink::Lifted) {
    // Y = [1 y'; y Ybar] PSD, gamma_i = <Ybar, C_i> substituted directly
    std::vector<std::tuple<int, int, AffineExpr>> entries;
    entries.emplace_back(0, 0, AffineExpr(1.0));
    Eigen::MatrixXi& ybar = s.ybar;
    ybar = Eigen::MatrixXi::Constant(ny, ny, -1);
    for (int j = 0; j < ny; ++j) {
      entries.emplace_back(1 + j, 0, s.y[j]);
      for (int k = 0; k <= j; ++k) {
        ybar(j, k) = ybar(k, j) = lb.add_variables(1);
        entries.emplace_back(1 + j, 1 + k, AffineExpr().add(ybar(j, k), 1.0));
      }
    }
    lb.add_lmi(1 + ny, entries);
    for (int i = 0; i < m; ++i) {
      const int g = sub.gamma_index[i];
      if (g < 0) continue;
      const Eigen::MatrixXd& C = sub.constraints[i].C;
      AffineExpr e;
      for (int j = 0; j < ny; ++j)
        for (int k = 0; k < ny; ++k)
          if (C(j, k) != 0.0) e.add(ybar(j, k), C(j, k));
      s.gamma[g] = e;
    }
  } else {
    for (int g = 0; g < sub.num_gamma; ++g)
      s.gamma[g] = g_fixed[g] ? AffineExpr(fixed->gamma(g)) : AffineExpr().add(lb.add_variables(1), 1.0);
  }
  s.lambda.assign(m, -1);
  std::optional<uncertainty::Ellipsoid> ball;
  if (sub.nzeta() > 0) ball = uncertainty::Ellipsoid::unit_ball(sub.nzeta());

  for (int i = 0; i < m; ++i) {
    const aro::SlemmaCounterpart sc = ball ? aro::slemma_counterpart(sub.constraints[i], *ball)
                                           : aro::certain_counterpart(sub.constraints[i]);
    if (sc.order > 1) {
      s.lambda[i] = lb.add_variables(1);
      lb.add_nonneg(AffineExpr().add(s.lambda[i], 1.0));
    }
    const int g = sub.gamma_index[i];
    auto map = [&](const AffineExpr& e) {
      AffineExpr out(e.constant);
      for (const auto& [v, c] : e.terms) {
        if (v < sc.ny) accumulate(out, s.y[v], c);
        else if (v == sc.gamma_var()) {
          if (g >= 0) accumulate(out, s.gamma[g], c);
        } else out.add(s.lambda[i], c);
      }
      return out;
    };
    if (sc.order == 1) {
      lb.add_nonneg(map(std::get<2>(sc.lower.front())));
      continue;
    }
    std::vector<std::tuple<int, int, AffineExpr>> entries;
    entries.reserve(sc.lower.size());
    for (const auto& [a, b, e] : sc.lower) entries.emplace_back(a, b, map(e));
    lb.add_lmi(sc.order, entries);
  }

  if (link == GammaLink::Convex) {
    // gamma <= y'Cy  <=>  y'(-C)y <= -gamma for concave constraints
    for (int i = 0; i < m; ++i) {
      const int g = sub.gamma_index[i];
      if (g < 0 || !sub.concave[i]) continue;
      add_square_bound(lb, psd_factor(-sub.constraints[i].C), s.y, scaled(s.gamma[g], -1.0));
    }
  }
  return s;
}

// Magnitude of the objective coefficients, used to keep f / scale near unit size.
double objective_scale(const QuadraticObjective& f) {
  return std::max({1.0, std::abs(f.f0), f.g.lpNorm<Eigen::Infinity>(), f.H.lpNorm<Eigen::Infinity>()});
}

// f(y) <= rhs, posed as f(y) / scale <= rhs / scale
void add_objective_bound(const QuadraticObjective& f, conic::LmiBuilder& lb, const std::vector<AffineExpr>& y,
                         const AffineExpr& rhs) {
  const double sc = 1.0 / objective_scale(f);
  AffineExpr r = scaled(rhs, sc);
  r.constant -= sc * f.f0;
  for (std::size_t j = 0; j < y.size(); ++j)
    if (f.g(static_cast<Eigen::Index>(j)) != 0.0) accumulate(r, y[j], -sc * f.g(static_cast<Eigen::Index>(j)));
  add_square_bound(lb, psd_factor(sc * f.H), y, r);
}

StepStatus classify(const conic::SolveResult& res) {
  if (res.optimal()) return StepStatus::Solved;
  if (res.status == conic::SolveStatus::DualInfeasible) return StepStatus::Infeasible;
  return StepStatus::NumericalProblem;
}

ArcPoint read_point(const SetA& s, const ArcSubproblem& sub, const Eigen::VectorXd& u) {
  ArcPoint p;
  p.y.resize(sub.ny());
  for (int j = 0; j < sub.ny(); ++j) p.y(j) = s.y[j].eval(u);
  p.gamma.resize(sub.num_gamma);
  for (int g = 0; g < sub.num_gamma; ++g) p.gamma(g) = s.gamma[g].eval(u);
  p.lambda = Eigen::VectorXd::Zero(sub.num_constraints());
  for (int i = 0; i < sub.num_constraints(); ++i)
    if (s.lambda[i] >= 0) p.lambda(i) = u(s.lambda[i]);
  return p;
}

std::string describe(const conic::SolveResult& res) {
  std::string out = conic::status_name(res.status);
  if (!res.message.empty()) out += ": " + res.message;
  return out;
}

}  // namespace

LowerBound sdp_lower_bound(const ArcSubproblem& sub, const conic::SolverOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  conic::LmiBuilder lb;
  const SetA s = add_set_A(sub, lb, GammaLink::Lifted, nullptr);
  const int e = lb.add_variables(1);
  lb.add_objective(e, 1.0);
  add_objective_bound(sub.objective, lb, s.y, AffineExpr().add(e, objective_scale(sub.objective)));
  const conic::SolveResult res = conic::solve(lb.build(), options);
  LowerBound out;
  out.status = classify(res);
  out.message = describe(res);
  if (out.status == StepStatus::Solved) {
    out.start = read_point(s, sub, res.y);
    out.value = sub.objective.eval(out.start.y);
    out.Y = Eigen::MatrixXd::Zero(1 + sub.ny(), 1 + sub.ny());
    out.Y(0, 0) = 1.0;
    out.Y.block(1, 0, sub.ny(), 1) = out.start.y;
    out.Y.block(0, 1, 1, sub.ny()) = out.start.y.transpose();
    for (int j = 0; j < sub.ny(); ++j)
      for (int k = 0; k < sub.ny(); ++k) out.Y(1 + j, 1 + k) = res.y(s.ybar(j, k));
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

ArcPoint project_B(const ArcPoint& p, const ArcSubproblem& sub) {
  ArcPoint out = p;
  for (int i = 0; i < sub.num_constraints(); ++i) {
    const int g = sub.gamma_index[i];
    if (g >= 0 && !sub.concave[i]) out.gamma(g) = p.y.dot(sub.constraints[i].C * p.y);
  }
  return out;
}

double split_distance(const ArcPoint& a, const ArcPoint& b, const ArcSubproblem& sub) {
  double s = 0.0;
  for (int j : sub.nc) s += (a.y(j) - b.y(j)) * (a.y(j) - b.y(j));
  for (int g : sub.projected_gammas()) s += (a.gamma(g) - b.gamma(g)) * (a.gamma(g) - b.gamma(g));
  return std::sqrt(s);
}

Projection project_A(const ArcPoint& target, const ArcSubproblem& sub, double f0, const conic::SolverOptions& options) {
  conic::LmiBuilder lb;
  const SetA s = add_set_A(sub, lb, GammaLink::Convex, nullptr);
  add_objective_bound(sub.objective, lb, s.y, AffineExpr(f0));
  const int dist = lb.add_variables(1);
  lb.add_objective(dist, 1.0);
  std::vector<AffineExpr> cone{AffineExpr().add(dist, 1.0)};
  for (int j : sub.nc) {
    AffineExpr e = s.y[j];
    e.constant -= target.y(j);
    cone.push_back(e);
  }
  for (int g : sub.projected_gammas()) {
    AffineExpr e = s.gamma[g];
    e.constant -= target.gamma(g);
    cone.push_back(e);
  }
  if (cone.size() == 1) lb.add_nonneg(cone.front());
  else lb.add_soc(cone);
  const conic::SolveResult res = conic::solve(lb.build(), options);
  Projection out;
  out.status = classify(res);
  out.message = describe(res);
  if (out.status == StepStatus::Solved) {
    out.point = read_point(s, sub, res.y);
    out.distance = split_distance(out.point, target, sub);
  }
  return out;
}

Projection polish_controls(const ArcPoint& fixed, const ArcSubproblem& sub, const conic::SolverOptions& options) {
  conic::LmiBuilder lb;
  const SetA s = add_set_A(sub, lb, GammaLink::Convex, &fixed);
  const int e = lb.add_variables(1);
  lb.add_objective(e, 1.0);
  add_objective_bound(sub.objective, lb, s.y, AffineExpr().add(e, objective_scale(sub.objective)));
  const conic::SolveResult res = conic::solve(lb.build(), options);
  Projection out;
  out.status = classify(res);
  out.message = describe(res);
  if (out.status == StepStatus::Solved) {
    out.point = read_point(s, sub, res.y);
    out.distance = split_distance(out.point, fixed, sub);
  }
  return out;
}

}  // namespace aropt::algorithms
