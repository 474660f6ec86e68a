#include "aropt/uncertainty/sets.hpp"

#include <Eigen/Eigenvalues>
#include <map>

#include "aropt/error.hpp"

namespace aropt::uncertainty {

Ellipsoid::Ellipsoid(Eigen::VectorXd center, Eigen::MatrixXd shape, double radius)
    : center_(std::move(center)), shape_(std::move(shape)), radius_(radius) {
  require_dim(shape_.rows() == center_.size() && shape_.cols() == center_.size(),
              "ellipsoid shape must be square and match the center");
  if (center_.size() == 0) throw std::invalid_argument("ellipsoid must have at least one coordinate");
  if (!(radius_ > 0.0)) throw std::invalid_argument("ellipsoid radius must be positive");
  if ((shape_ - shape_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, shape_.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("ellipsoid shape must be symmetric");
  shape_ = 0.5 * (shape_ + shape_.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(shape_, Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues().minCoeff() > 0.0)) throw std::invalid_argument("ellipsoid shape must be positive definite");
}

Ellipsoid Ellipsoid::unit_ball(int n) {
  return {Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Identity(n, n), 1.0};
}

double Ellipsoid::margin(const Eigen::VectorXd& z) const {
  require_dim(z.size() == center_.size(), "point dimension does not match the ellipsoid");
  const Eigen::VectorXd d = z - center_;
  return radius_ - d.dot(shape_ * d);
}

poly::Polynomial Ellipsoid::as_polynomial(int first) const {
  const int n = dim();
  poly::Polynomial g(radius_ - center_.dot(shape_ * center_));
  const Eigen::VectorXd lin = 2.0 * shape_ * center_;
  for (int i = 0; i < n; ++i) {
    g.add_term(poly::Monomial({first + i}), lin(i));
    g.add_term(poly::Monomial({first + i, first + i}), -shape_(i, i));
    for (int j = i + 1; j < n; ++j) g.add_term(poly::Monomial({first + i, first + j}), -2.0 * shape_(i, j));
  }
  return g;
}

Eigen::MatrixXd Ellipsoid::unit_ball_map() const {
  // shape = L L', T = sqrt(r) L^{-T} satisfies T' shape T = r I.
  Eigen::LLT<Eigen::MatrixXd> llt(shape_);
  Eigen::MatrixXd T = Eigen::MatrixXd::Identity(dim(), dim());
  llt.matrixU().solveInPlace(T);
  return std::sqrt(radius_) * T;
}

Polyhedron Polyhedron::box(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  require_dim(lower.size() == upper.size(), "box bounds differ in size");
  const int n = static_cast<int>(lower.size());
  Polyhedron p;
  p.A.resize(2 * n, n);
  p.A << Eigen::MatrixXd::Identity(n, n), -Eigen::MatrixXd::Identity(n, n);
  p.b.resize(2 * n);
  p.b << upper, -lower;
  return p;
}

namespace {

// Hessian of a degree-2 polynomial restricted to vars, or nullopt when g has
// higher degree.
bool quadratic_hessian(const poly::Polynomial& g, std::span<const int> vars, Eigen::MatrixXd& H) {
  if (g.degree() > 2) return false;
  const int n = static_cast<int>(vars.size());
  std::map<int, int> pos;
  for (int i = 0; i < n; ++i) pos[vars[i]] = i;
  H = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [m, c] : g.terms()) {
    if (m.degree() != 2) continue;
    auto a = pos.find(m.vars()[0]), b = pos.find(m.vars()[1]);
    if (a == pos.end() || b == pos.end()) continue;
    if (a->second == b->second) {
      H(a->second, a->second) += 2.0 * c;
    } else {
      H(a->second, b->second) += c;
      H(b->second, a->second) += c;
    }
  }
  return true;
}

}  // namespace

bool SemialgebraicSet::has_ball_or_box(std::span<const int> vars) const {
  if (vars.empty()) return true;
  std::vector<bool> bounded(vars.size(), false);
  for (const auto& g : inequalities) {
    Eigen::MatrixXd H;
    if (!quadratic_hessian(g, vars, H)) continue;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().maxCoeff() < 0.0) return true;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (H(i, i) >= 0.0) continue;
      bool only_this = true;
      for (const auto& [m, c] : g.terms())
        for (int v : m.vars()) only_this = only_this && v == vars[i];
      if (only_this) bounded[i] = true;
    }
  }
  for (bool b : bounded)
    if (!b) return false;
  return true;
}

bool contains(const Ellipsoid& set, const Eigen::VectorXd& z, double tol) { return set.margin(z) >= -tol; }

bool contains(const Polyhedron& set, const Eigen::VectorXd& z, double tol) {
  require_dim(z.size() == set.A.cols() && set.A.rows() == set.b.size(), "point dimension does not match the polyhedron");
  if (set.A.rows() == 0) return true;
  return (set.A * z - set.b).maxCoeff() <= tol;
}

bool contains(const SemialgebraicSet& set, std::span<const double> point, double tol) {
  for (const auto& g : set.inequalities)
    if (g.eval(point) < -tol) return false;
  return true;
}

}  // namespace aropt::uncertainty
