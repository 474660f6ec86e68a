#include "aropt/aro/elimination.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "aropt/poly/affine.hpp"

namespace aropt::aro {

namespace {

std::vector<int> position_map(const std::vector<int>& vars, int max_var) {
  std::vector<int> pos(max_var + 1, -1);
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i] <= max_var) pos[vars[i]] = static_cast<int>(i);
  return pos;
}

int lookup(const std::vector<int>& pos, int var) {
  const int p = var < static_cast<int>(pos.size()) ? pos[var] : -1;
  if (p < 0) throw DegreeError("polynomial mentions a variable outside the quadratic form");
  return p;
}

}  // namespace

Eigen::SparseMatrix<double> homogeneous_form(const poly::Polynomial& p, const std::vector<int>& vars) {
  const int n = static_cast<int>(vars.size());
  const std::vector<int> pos = position_map(vars, std::max(p.max_variable(), 0));
  std::vector<Eigen::Triplet<double>> t;
  for (const auto& [m, coef] : p.terms()) {
    const auto& v = m.vars();
    switch (m.degree()) {
      case 0: t.emplace_back(0, 0, coef); break;
      case 1: {
        const int i = 1 + lookup(pos, v[0]);
        t.emplace_back(0, i, 0.5 * coef);
        t.emplace_back(i, 0, 0.5 * coef);
        break;
      }
      case 2: {
        const int i = 1 + lookup(pos, v[0]);
        const int j = 1 + lookup(pos, v[1]);
        if (i == j) {
          t.emplace_back(i, i, coef);
        } else {
          t.emplace_back(i, j, 0.5 * coef);
          t.emplace_back(j, i, 0.5 * coef);
        }
        break;
      }
      default: throw DegreeError("polynomial of degree " + std::to_string(m.degree()) + " is not quadratic");
    }
  }
  Eigen::SparseMatrix<double> Q(n + 1, n + 1);
  Q.setFromTriplets(t.begin(), t.end());
  return Q;
}

double QuadraticRobustConstraint::eval(const Eigen::VectorXd& y, const Eigen::VectorXd& zeta) const {
  double v = y.dot(C * y) + c.dot(y) + d;
  if (nzeta() > 0) v += zeta.dot(A * zeta) + (B.transpose() * y + b).dot(zeta);
  return v;
}

QuadraticRobustConstraint QuadraticRobustConstraint::from_form(const Eigen::MatrixXd& Q, int ny, int nz) {
  require_dim(Q.rows() == 1 + ny + nz && Q.cols() == Q.rows(), "form size must be 1 + ny + nzeta");
  QuadraticRobustConstraint q;
  q.d = Q(0, 0);
  q.c = 2.0 * Q.block(1, 0, ny, 1);
  q.C = Q.block(1, 1, ny, ny);
  q.b = 2.0 * Q.block(1 + ny, 0, nz, 1);
  q.A = Q.block(1 + ny, 1 + ny, nz, nz);
  q.B = 2.0 * Q.block(1, 1 + ny, ny, nz);
  q.C = 0.5 * (q.C + q.C.transpose()).eval();
  q.A = 0.5 * (q.A + q.A.transpose()).eval();
  if (q.C.isZero(0.0)) {
    q.psd = true;
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q.C, Eigen::EigenvaluesOnly);
    q.psd = es.eigenvalues().minCoeff() >= -kPsdFlagTolerance;
  }
  return q;
}

Eigen::VectorXd LinearizedStage::recover_at(const Eigen::VectorXd& y, const Eigen::VectorXd& zeta) const {
  Eigen::VectorXd w(offset.cols());
  w(0) = 1.0;
  w.segment(1, y.size()) = y;
  if (zeta.size() > 0) w.tail(zeta.size()) = zeta;
  require_dim(1 + y.size() + zeta.size() == w.size(), "recover_at: wrong argument sizes");
  return -A_inv * (offset * w);
}

LinearizedStage linearize_equalities(const AroProblem& prob, const Eigen::VectorXd& anchor,
                                     const Eigen::VectorXd& center, double epsilon) {
  require_dim(anchor.size() == prob.nx(), "anchor must have dim(x) entries");
  const poly::Taylor1 t = poly::taylor1(prob.equalities, prob.x, anchor);
  LinearizedStage st;
  st.anchor = anchor;
  st.center = center;
  st.epsilon = epsilon;
  st.A = t.jacobian;

  const int r = prob.reduced_dim();
  std::vector<int> reduced;
  for (int i = 0; i < prob.ny(); ++i) reduced.push_back(prob.y.index(i));
  for (int i = 0; i < prob.nzeta(); ++i) reduced.push_back(prob.zeta.index(i));
  const std::vector<int> pos = position_map(reduced, prob.space.size() - 1);
  st.offset = Eigen::MatrixXd::Zero(prob.nx(), r);
  for (int i = 0; i < prob.nx(); ++i) {
    for (const auto& [m, coef] : t.map.offset[i].terms()) {
      if (m.degree() == 0) {
        st.offset(i, 0) += coef;
      } else if (m.degree() == 1) {
        st.offset(i, 1 + lookup(pos, m.vars()[0])) += coef;
      } else {
        throw DegreeError("linearized equalities are not affine in (y, zeta)");
      }
    }
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(st.A);
  const auto& sv = svd.singularValues();
  st.condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
  if (!(st.condition <= kRankConditionLimit))
    throw RankDeficient("equality Jacobian is rank deficient (condition " + std::to_string(st.condition) + ")",
                        st.condition);
  st.A_inv = st.A.fullPivLu().inverse();
  return st;
}

LinearizedStage linearize_equalities(const AroProblem& prob, const Eigen::VectorXd& anchor) {
  return linearize_equalities(prob, anchor, anchor, 0.0);
}

EliminatedStage eliminate_state(const AroProblem& prob, const LinearizedStage& stage) {
  const int r = prob.reduced_dim();
  const int N = prob.space.size();
  std::vector<int> all(N);
  for (int i = 0; i < N; ++i) all[i] = i;

  EliminatedStage out;
  out.recover = stage.recover();
  // [1; y; zeta; x] = T [1; y; zeta]
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(1 + N, r);
  T.topRows(r).setIdentity();
  T.bottomRows(prob.nx()) = out.recover;

  auto add = [&](const poly::Polynomial& p, std::string label) {
    const Eigen::SparseMatrix<double> Q = homogeneous_form(p, all);
    const Eigen::MatrixXd QT = Q * T;
    const Eigen::MatrixXd R = T.transpose() * QT;
    QuadraticRobustConstraint q = QuadraticRobustConstraint::from_form(R, prob.ny(), prob.nzeta());
    q.label = std::move(label);
    out.constraints.push_back(std::move(q));
  };
  for (std::size_t i = 0; i < prob.inequalities.size(); ++i)
    add(prob.inequalities[i], i < prob.inequality_labels.size() ? prob.inequality_labels[i] : "G" + std::to_string(i + 1));
  for (std::size_t i = 0; i < prob.state_set.size(); ++i)
    add(prob.state_set[i], i < prob.state_labels.size() ? prob.state_labels[i] : "Sx" + std::to_string(i + 1));
  if (stage.epsilon > 0.0) {
    require_dim(stage.center.size() == prob.nx(), "trust-region center must have dim(x) entries");
    poly::Polynomial tr(stage.epsilon * stage.epsilon);
    for (int i = 0; i < prob.nx(); ++i) {
      const poly::Polynomial diff = poly::Polynomial::variable(prob.x.index(i)) - stage.center(i);
      tr -= diff * diff;
    }
    add(tr, "trust region");
  }
  return out;
}

}  // namespace aropt::aro
