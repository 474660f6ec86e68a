#include "aropt/aro/problem.hpp"

#include <limits>

namespace aropt::aro {

AroProblem make_problem_space(int ny, int nzeta, int nx) {
  if (ny <= 0 || nx <= 0 || nzeta < 0) throw DimensionError("problem blocks need ny > 0, nx > 0, nzeta >= 0");
  AroProblem p;
  p.y = p.space.add_block(poly::BlockKind::Control, "y", ny);
  if (nzeta > 0) {
    p.zeta = p.space.add_block(poly::BlockKind::Uncertainty, "z", nzeta);
  } else {
    p.zeta = {poly::BlockKind::Uncertainty, "z", 0, ny};
  }
  p.x = p.space.add_block(poly::BlockKind::State, "x", nx);
  p.y_lower = Eigen::VectorXd::Constant(ny, -std::numeric_limits<double>::infinity());
  p.y_upper = Eigen::VectorXd::Constant(ny, std::numeric_limits<double>::infinity());
  return p;
}

Eigen::VectorXd AroProblem::point(const Eigen::VectorXd& yv, const Eigen::VectorXd& zv, const Eigen::VectorXd& xv) const {
  require_dim(yv.size() == y.dim, "y has the wrong dimension");
  require_dim(zv.size() == zeta.dim || (zv.size() == 0), "zeta has the wrong dimension");
  require_dim(xv.size() == x.dim, "x has the wrong dimension");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(space.size());
  v.segment(y.offset, y.dim) = yv;
  if (zv.size() > 0) v.segment(zeta.offset, zeta.dim) = zv;
  v.segment(x.offset, x.dim) = xv;
  return v;
}

void AroProblem::validate() const {
  if (static_cast<int>(equalities.size()) != nx())
    throw ModelError("equality count " + std::to_string(equalities.size()) + " differs from state dimension " +
                     std::to_string(nx()));
  for (const auto& L : equalities)
    for (const auto& [m, c] : L.terms())
      if (m.degree_in(x.offset, x.offset + x.dim) > 0 && m.degree_in(y.offset, y.offset + y.dim) > 0)
        throw ModelError("equality couples state and control variables");
  for (const auto& s : state_set)
    if (s.depends_on(y.offset, y.offset + y.dim) || (zeta.dim > 0 && s.depends_on(zeta.offset, zeta.offset + zeta.dim)))
      throw ModelError("state set must only depend on x");
  if (omega && omega->dim() != zeta.dim) throw ModelError("uncertainty set dimension differs from the zeta block");
  if (!omega && zeta.dim > 0) throw ModelError("zeta block without an uncertainty set");
  if (y_lower.size() != ny() || y_upper.size() != ny()) throw ModelError("control bounds have the wrong dimension");
  if (!inequality_labels.empty() && inequality_labels.size() != inequalities.size())
    throw ModelError("inequality labels do not match the inequalities");
}

}  // namespace aropt::aro
