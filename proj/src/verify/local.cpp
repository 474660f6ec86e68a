#include "local.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "aropt/error.hpp"
#include "aropt/poly/affine.hpp"

namespace aropt::verify::detail {

LocalSystem::LocalSystem(const aro::AroProblem& prob, const Eigen::VectorXd* fixed_y) : prob_(prob) {
  if (fixed_y) {
    require_dim(fixed_y->size() == prob.ny(), "control vector has the wrong size");
    y_ = *fixed_y;
  } else {
    for (int i = 0; i < prob.ny(); ++i) vars_.push_back(prob.y.index(i));
  }
  if (prob.nzeta() > 0) {
    if (!prob.omega) throw ModelError("the problem has uncertain parameters but no uncertainty set");
    center_ = prob.omega->center();
    T_ = prob.omega->unit_ball_map();
    const int first = prob.space.size();
    for (int j = 0; j < prob.nzeta(); ++j) {
      u_.push_back(first + j);
      vars_.push_back(first + j);
    }
  }
  for (int i = 0; i < prob.nx(); ++i) vars_.push_back(prob.x.index(i));
}

poly::Polynomial LocalSystem::map(const poly::Polynomial& p) const {
  poly::Polynomial q = y_ ? p.fix_variables(prob_.y.offset, std::span<const double>(y_->data(), y_->size())) : p;
  if (u_.empty()) return q;
  poly::AffineVectorMap m;
  m.matrix = T_;
  m.inputs = u_;
  for (int i = 0; i < prob_.nzeta(); ++i) m.offset.emplace_back(center_(i));
  return poly::substitute_affine(q, prob_.zeta, m);
}

poly::PolynomialVector LocalSystem::map(const poly::PolynomialVector& v) const {
  poly::PolynomialVector out;
  out.reserve(v.size());
  for (const auto& p : v) out.push_back(map(p));
  return out;
}

std::optional<poly::Polynomial> LocalSystem::ball() const {
  if (u_.empty()) return std::nullopt;
  poly::Polynomial b(1.0);
  for (int v : u_) b.add_term(poly::Monomial({v, v}), -1.0);
  return b;
}

Eigen::VectorXd LocalSystem::to_u(const Eigen::VectorXd& zeta) const {
  if (u_.empty()) return {};
  return T_.partialPivLu().solve(zeta - center_);
}

namespace {

// Hessian of a polynomial of degree <= 2 in vars; false if it has higher
// degree or mentions other variables.
bool quadratic_part(const poly::Polynomial& g, const std::vector<int>& vars, Eigen::MatrixXd& H) {
  const int n = static_cast<int>(vars.size());
  H = Eigen::MatrixXd::Zero(n, n);
  auto pos = [&](int v) {
    for (int i = 0; i < n; ++i)
      if (vars[i] == v) return i;
    return -1;
  };
  for (const auto& [m, c] : g.terms()) {
    if (m.degree() > 2) return false;
    for (int v : m.vars())
      if (pos(v) < 0) return false;
    if (m.degree() < 2) continue;
    const int a = pos(m.vars()[0]), b = pos(m.vars()[1]);
    if (a == b) {
      H(a, a) += 2.0 * c;
    } else {
      H(a, b) += c;
      H(b, a) += c;
    }
  }
  return true;
}

}  // namespace

void add_redundant_ball(uncertainty::SemialgebraicSet& set, const std::vector<int>& vars) {
  if (vars.empty() || set.has_ball_or_box(vars)) return;
  poly::Polynomial sum;
  for (const auto& g : set.inequalities) {
    Eigen::MatrixXd H;
    if (!quadratic_part(g, vars, H)) continue;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().maxCoeff() <= 0.0 && es.eigenvalues().minCoeff() < 0.0) sum += g;
  }
  if (!sum.is_zero()) set.inequalities.push_back(sum);
  if (!set.has_ball_or_box(vars))
    throw ModelError("the certificate set has no ball or box constraint on its indeterminates");
}

void normalize(poly::PolynomialVector& v) {
  for (auto& p : v) {
    double m = 0.0;
    for (const auto& [mono, c] : p.terms()) m = std::max(m, std::abs(c));
    if (m > 0.0) p *= 1.0 / m;
  }
}

void bound_multipliers(aro::SosProgram& sp, const aro::PutinarMultipliers& mult, double bound) {
  conic::ProgramBuilder& pb = sp.builder();
  const int row = pb.add_row(bound);
  pb.add_coefficient(row, pb.add_nonneg(1), 1.0);
  for (const auto& g : mult.sos)
    for (int i = 0; i < g.order(); ++i) pb.add_coefficient(row, g.start + conic::svec_index(g.order(), i, i), 1.0);
}

CertificateCheck check_certificate(const aro::SosProgram& sp, int id, const aro::PutinarMultipliers& mult,
                                   const Eigen::VectorXd& x) {
  CertificateCheck c;
  c.residual = sp.identity_residual(id, x);
  c.min_eigen = std::numeric_limits<double>::infinity();
  for (const auto& g : mult.sos) {
    const Eigen::MatrixXd S = aro::SosProgram::gram(g, x);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
    c.min_eigen = std::min(c.min_eigen, es.eigenvalues().minCoeff());
  }
  c.ok = c.residual <= kResidualTolerance && c.min_eigen >= -kResidualTolerance;
  return c;
}

}  // namespace aropt::verify::detail
