#include "aropt/aro/counterparts.hpp"

#include "aropt/conic/solver.hpp"

namespace aropt::aro {

int robust_lp_counterpart(const AffineUncertainConstraint& h, const uncertainty::Polyhedron& omega,
                          conic::LmiBuilder& lb, std::span<const int> y_vars) {
  const int rows = static_cast<int>(omega.A.rows());
  require_dim(static_cast<int>(h.h2.size()) == omega.dim(), "h2 must have one entry per uncertainty coordinate");
  auto map = [&](const conic::AffineExpr& e) {
    conic::AffineExpr out(e.constant);
    for (const auto& [v, c] : e.terms) out.add(y_vars[v], c);
    return out;
  };
  const int z0 = lb.add_variables(rows);
  for (int i = 0; i < rows; ++i) lb.add_nonneg(conic::AffineExpr().add(z0 + i, 1.0));
  // h1(y) - b'z >= 0
  conic::AffineExpr gap = map(h.h1);
  for (int i = 0; i < rows; ++i) gap.add(z0 + i, -omega.b(i));
  lb.add_nonneg(gap);
  // A'z + h2(y) = 0
  for (int j = 0; j < omega.dim(); ++j) {
    conic::AffineExpr e = map(h.h2[j]);
    for (int i = 0; i < rows; ++i) e.add(z0 + i, omega.A(i, j));
    lb.add_equality(e);
  }
  return z0;
}

SlemmaCounterpart certain_counterpart(const QuadraticRobustConstraint& qc) {
  require_dim(qc.nzeta() == 0, "constraint depends on uncertain parameters");
  SlemmaCounterpart s;
  s.ny = qc.ny();
  s.order = 1;
  conic::AffineExpr top(qc.d);
  top.add(s.gamma_var(), 1.0);
  for (int j = 0; j < s.ny; ++j) top.add(j, qc.c(j));
  s.lower.emplace_back(0, 0, top);
  return s;
}

SlemmaCounterpart slemma_counterpart(const QuadraticRobustConstraint& qc, const uncertainty::Ellipsoid& omega) {
  const int ny = qc.ny();
  const int nz = qc.nzeta();
  require_dim(omega.dim() == nz, "uncertainty set dimension differs from the constraint");
  SlemmaCounterpart s;
  s.ny = ny;
  s.order = 1 + nz;
  const Eigen::MatrixXd& S = omega.shape();
  const Eigen::VectorXd& zs = omega.center();
  const Eigen::VectorXd Sz = S * zs;

  conic::AffineExpr top(qc.d);
  top.add(s.gamma_var(), 1.0);
  for (int j = 0; j < ny; ++j) top.add(j, qc.c(j));
  if (nz > 0) top.add(s.lambda_var(), -(omega.radius() - zs.dot(Sz)));
  s.lower.emplace_back(0, 0, top);
  for (int k = 0; k < nz; ++k) {
    conic::AffineExpr e(0.5 * qc.b(k));
    for (int j = 0; j < ny; ++j) e.add(j, 0.5 * qc.B(j, k));
    e.add(s.lambda_var(), -Sz(k));
    s.lower.emplace_back(1 + k, 0, e);
  }
  for (int k = 0; k < nz; ++k)
    for (int l = 0; l <= k; ++l) {
      conic::AffineExpr e(qc.A(k, l));
      e.add(s.lambda_var(), S(k, l));
      if (e.constant != 0.0 || !e.terms.empty()) s.lower.emplace_back(1 + k, 1 + l, e);
    }
  return s;
}

Eigen::MatrixXd SlemmaCounterpart::eval(const Eigen::VectorXd& y, double gamma, double lambda) const {
  Eigen::VectorXd u(ny + 2);
  u << y, gamma, lambda;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(order, order);
  for (const auto& [i, j, e] : lower) {
    M(i, j) = e.eval(u);
    M(j, i) = M(i, j);
  }
  return M;
}

void emit(const SlemmaCounterpart& s, conic::LmiBuilder& lb, std::span<const int> y_vars, int gamma_var,
          int lambda_var, double gamma_value) {
  require_dim(static_cast<int>(y_vars.size()) == s.ny, "y variable map has the wrong size");
  auto map = [&](const conic::AffineExpr& e) {
    conic::AffineExpr out(e.constant);
    for (const auto& [v, c] : e.terms) {
      if (v < s.ny) {
        out.add(y_vars[v], c);
      } else if (v == s.gamma_var()) {
        if (gamma_var >= 0) out.add(gamma_var, c);
        else out.constant += c * gamma_value;
      } else {
        out.add(lambda_var, c);
      }
    }
    return out;
  };
  if (s.order == 1) {
    lb.add_nonneg(map(std::get<2>(s.lower.front())));
    return;
  }
  std::vector<std::tuple<int, int, conic::AffineExpr>> entries;
  entries.reserve(s.lower.size());
  for (const auto& [i, j, e] : s.lower) entries.emplace_back(i, j, map(e));
  lb.add_lmi(s.order, entries);
  lb.add_nonneg(conic::AffineExpr().add(lambda_var, 1.0));
}

double slemma_margin(const QuadraticRobustConstraint& qc, const uncertainty::Ellipsoid& omega, const Eigen::VectorXd& y) {
  require_dim(y.size() == qc.ny(), "y has the wrong dimension");
  const double gamma = y.dot(qc.C * y);
  if (qc.nzeta() == 0) return gamma + qc.c.dot(y) + qc.d;
  const SlemmaCounterpart s = slemma_counterpart(qc, omega);
  conic::LmiBuilder lb;
  const int lam = lb.add_variables(1);
  const int t = lb.add_variables(1);
  lb.add_objective(t, -1.0);
  std::vector<std::tuple<int, int, conic::AffineExpr>> entries;
  Eigen::VectorXd u0 = Eigen::VectorXd::Zero(s.ny + 2);
  u0.head(s.ny) = y;
  u0(s.gamma_var()) = gamma;
  for (const auto& [i, j, e] : s.lower) {
    conic::AffineExpr m(0.0);
    double lam_coef = 0.0;
    for (const auto& [v, c] : e.terms)
      if (v == s.lambda_var()) lam_coef += c;
    m.constant = e.eval(u0);
    m.add(lam, lam_coef);
    if (i == j) m.add(t, -1.0);
    entries.emplace_back(i, j, m);
  }
  for (int i = 0; i < s.order; ++i) {
    bool has = false;
    for (const auto& [a, b, e] : s.lower) has |= (a == i && b == i);
    if (!has) entries.emplace_back(i, i, conic::AffineExpr().add(t, -1.0));
  }
  lb.add_lmi(s.order, entries);
  lb.add_nonneg(conic::AffineExpr().add(lam, 1.0));
  // Keeps the program bounded when the block is PSD for every large lambda.
  lb.add_nonneg(conic::AffineExpr(1.0).add(t, -1.0));
  const conic::SolveResult res = conic::solve(lb.build());
  if (!res.optimal()) throw ModelError(std::string("S-lemma margin solve failed: ") + conic::status_name(res.status));
  return res.y(t);
}

QuadraticRobustConstraint to_unit_ball(const QuadraticRobustConstraint& qc, const uncertainty::Ellipsoid& omega) {
  require_dim(omega.dim() == qc.nzeta(), "uncertainty set dimension differs from the constraint");
  const Eigen::MatrixXd T = omega.unit_ball_map();
  const Eigen::VectorXd& z = omega.center();
  QuadraticRobustConstraint out = qc;
  out.A = T.transpose() * qc.A * T;
  out.A = 0.5 * (out.A + out.A.transpose()).eval();
  out.B = qc.B * T;
  out.b = T.transpose() * (qc.b + 2.0 * qc.A * z);
  out.c = qc.c + qc.B * z;
  out.d = qc.d + z.dot(qc.A * z) + qc.b.dot(z);
  return out;
}

}  // namespace aropt::aro
