#include "aropt/acopf/model.hpp"

#include "aropt/error.hpp"
#include "aropt/uncertainty/loads.hpp"

namespace aropt::acopf {

using poly::Monomial;
using poly::Polynomial;

Eigen::VectorXd participation_factors(const PowerNetwork& net) {
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(net.num_buses());
  double total = 0.0;
  for (const Generator& g : net.generators) {
    const double range = g.pmax - g.pmin;
    if (range < 0.0) throw ModelError("generator with Pmax < Pmin");
    alpha(g.bus) += range;
    total += range;
  }
  if (!(total > 0.0)) throw ModelError("participation factors need a generator with Pmax > Pmin");
  return alpha / total;
}

AcopfModel make_model(const PowerNetwork& net) {
  net.validate();
  AcopfModel m;
  m.net = net;
  m.n = net.num_buses();
  m.ref = net.reference;
  m.mats = build_injection_matrices(net);
  m.alpha = participation_factors(net);
  m.gamma = Eigen::VectorXd::Zero(m.n);
  m.zeta_of_bus.assign(m.n, -1);
  m.pg_index.assign(m.n, -1);
  m.vg_index.assign(m.n, -1);
  for (int k = 0; k < m.n; ++k) {
    const Bus& b = net.buses[k];
    if (b.type == BusType::PV) m.pv.push_back(k);
    if (b.type == BusType::PQ) m.pq.push_back(k);
    else m.gens.push_back(k);
    if (b.pd > 0.0) {
      m.zeta_of_bus[k] = static_cast<int>(m.loads.size());
      m.loads.push_back(k);
      m.gamma(k) = b.qd / b.pd;
    }
  }
  m.t_index = 0;
  int next = 1;
  for (int k : m.pv) m.pg_index[k] = next++;
  for (int k : m.gens) m.vg_index[k] = next++;
  m.ny = next;
  return m;
}

Eigen::VectorXd AcopfModel::active_injections(const Eigen::VectorXd& x) const {
  Eigen::VectorXd p(n);
  for (int k = 0; k < n; ++k) p(k) = quadratic_form(mats.P[k], x);
  return p;
}

Eigen::VectorXd AcopfModel::reactive_injections(const Eigen::VectorXd& x) const {
  Eigen::VectorXd q(n);
  for (int k = 0; k < n; ++k) q(k) = quadratic_form(mats.Q[k], x);
  return q;
}

Eigen::VectorXd AcopfModel::equality_residual(const Eigen::VectorXd& y, const Eigen::VectorXd& zeta,
                                              const Eigen::VectorXd& x) const {
  require_dim(y.size() == ny && x.size() == nx(), "equality_residual: wrong control or state size");
  require_dim(zeta.size() == 0 || zeta.size() == nzeta(), "equality_residual: wrong uncertainty size");
  auto z = [&](int k) { return zeta.size() == 0 || zeta_of_bus[k] < 0 ? 0.0 : zeta(zeta_of_bus[k]); };
  const double total = zeta.size() == 0 ? 0.0 : zeta.sum();
  Eigen::VectorXd r(nx());
  int row = 0;
  for (int k : pv) r(row++) = net.buses[k].pd + quadratic_form(mats.P[k], x) - z(k) - y(pg_index[k]) + alpha(k) * total;
  for (int k : pq) r(row++) = net.buses[k].pd + quadratic_form(mats.P[k], x) - z(k) + alpha(k) * total;
  for (int k : pq) r(row++) = net.buses[k].qd + quadratic_form(mats.Q[k], x) - gamma(k) * z(k);
  for (int k : gens) r(row++) = x(k) * x(k) + x(k + n) * x(k + n) - y(vg_index[k]);
  r(row++) = x(ref + n);
  return r;
}

Eigen::MatrixXd AcopfModel::equality_jacobian(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(nx(), nx());
  int row = 0;
  for (int k : pv) J.row(row++) = 2.0 * (mats.P[k] * x).transpose();
  for (int k : pq) J.row(row++) = 2.0 * (mats.P[k] * x).transpose();
  for (int k : pq) J.row(row++) = 2.0 * (mats.Q[k] * x).transpose();
  for (int k : gens) {
    J(row, k) = 2.0 * x(k);
    J(row, k + n) = 2.0 * x(k + n);
    ++row;
  }
  J(row, ref + n) = 1.0;
  return J;
}

double AcopfModel::cost(const Eigen::VectorXd& y) const {
  const double base = net.base_mva;
  double f = 0.0;
  for (const Generator& g : net.generators) {
    const double p = base * (g.bus == ref ? y(t_index) : y(pg_index[g.bus]));
    f += g.c2 * p * p + g.c1 * p + g.c0;
  }
  return f;
}

Eigen::VectorXd AcopfModel::control_from_state(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd p = active_injections(x);
  Eigen::VectorXd y(ny);
  y(t_index) = p(ref) + net.buses[ref].pd;
  for (int k : pv) y(pg_index[k]) = p(k) + net.buses[k].pd;
  for (int k : gens) y(vg_index[k]) = x(k) * x(k) + x(k + n) * x(k + n);
  return y;
}

namespace {

// x' Q x over the state block.
Polynomial quadratic_polynomial(const RealSparse& Q, const poly::VariableBlock& xb) {
  Polynomial p;
  for (int col = 0; col < Q.outerSize(); ++col)
    for (RealSparse::InnerIterator it(Q, col); it; ++it) {
      const int i = static_cast<int>(it.row());
      const int j = static_cast<int>(it.col());
      if (i < j) continue;
      const double coef = i == j ? it.value() : 2.0 * it.value();
      p.add_term(Monomial({xb.index(j), xb.index(i)}), coef);
    }
  return p;
}

Polynomial magnitude(int k, int n, const poly::VariableBlock& xb) {
  return Polynomial(Monomial({xb.index(k), xb.index(k)}), 1.0) + Polynomial(Monomial({xb.index(k + n), xb.index(k + n)}), 1.0);
}

}  // namespace

aro::AroProblem build_aro(const AcopfModel& m, const std::optional<uncertainty::Ellipsoid>& omega) {
  const int nz = omega ? m.nzeta() : 0;
  if (omega && omega->dim() != m.nzeta())
    throw DimensionError("uncertainty set has " + std::to_string(omega->dim()) + " coordinates, the network has " +
                         std::to_string(m.nzeta()) + " loads");
  aro::AroProblem p = aro::make_problem_space(m.ny, nz, m.nx());
  p.omega = omega;
  const PowerNetwork& net = m.net;
  const double base = net.base_mva;
  const int n = m.n;
  auto yv = [&](int i) { return Polynomial::variable(p.y.index(i)); };
  auto zv = [&](int k) {
    if (nz == 0 || m.zeta_of_bus[k] < 0) return Polynomial();
    return Polynomial::variable(p.zeta.index(m.zeta_of_bus[k]));
  };
  Polynomial total;
  for (int i = 0; i < nz; ++i) total += Polynomial::variable(p.zeta.index(i));

  // Objective and control box.
  for (const Generator& g : net.generators) {
    const Polynomial P = g.bus == m.ref ? yv(m.t_index) : yv(m.pg_index[g.bus]);
    p.objective += (g.c2 * base * base) * (P * P) + (g.c1 * base) * P + g.c0;
    const int idx = g.bus == m.ref ? m.t_index : m.pg_index[g.bus];
    p.y_lower(idx) = g.pmin;
    p.y_upper(idx) = g.pmax;
  }
  for (int k : m.gens) {
    p.y_lower(m.vg_index[k]) = net.buses[k].vmin * net.buses[k].vmin;
    p.y_upper(m.vg_index[k]) = net.buses[k].vmax * net.buses[k].vmax;
  }

  std::vector<Polynomial> Pk(n), Qk(n);
  for (int k = 0; k < n; ++k) {
    Pk[k] = quadratic_polynomial(m.mats.P[k], p.x);
    Qk[k] = quadratic_polynomial(m.mats.Q[k], p.x);
  }

  // Equalities.
  for (int k : m.pv) p.equalities.push_back(net.buses[k].pd + Pk[k] - zv(k) - yv(m.pg_index[k]) + m.alpha(k) * total);
  for (int k : m.pq) p.equalities.push_back(net.buses[k].pd + Pk[k] - zv(k) + m.alpha(k) * total);
  for (int k : m.pq) p.equalities.push_back(net.buses[k].qd + Qk[k] - m.gamma(k) * zv(k));
  for (int k : m.gens) p.equalities.push_back(magnitude(k, n, p.x) - yv(m.vg_index[k]));
  p.equalities.push_back(Polynomial::variable(p.x.index(m.ref + n)));

  // Inequalities.
  const int s = m.ref;
  const Generator& gs = net.generators[net.generator_at(s)];
  const Polynomial ref_gen = net.buses[s].pd + Pk[s] - zv(s) + m.alpha(s) * total;
  p.inequalities.push_back(ref_gen - gs.pmin);
  p.inequality_labels.push_back("Pmin bus " + std::to_string(net.buses[s].id));
  p.inequalities.push_back(yv(m.t_index) - ref_gen);
  p.inequality_labels.push_back("Pmax(t) bus " + std::to_string(net.buses[s].id));
  for (int k : m.gens) {
    const Generator& g = net.generators[net.generator_at(k)];
    const Polynomial q = net.buses[k].qd + Qk[k] - m.gamma(k) * zv(k);
    p.inequalities.push_back(q - g.qmin);
    p.inequality_labels.push_back("Qmin bus " + std::to_string(net.buses[k].id));
    p.inequalities.push_back(g.qmax - q);
    p.inequality_labels.push_back("Qmax bus " + std::to_string(net.buses[k].id));
  }
  for (std::size_t l = 0; l < net.branches.size(); ++l) {
    const Branch& br = net.branches[l];
    if (br.rate <= 0.0) continue;
    const double lim = br.rate * br.rate;
    const std::string name = std::to_string(net.buses[br.from].id) + "-" + std::to_string(net.buses[br.to].id);
    p.inequalities.push_back(lim - quadratic_polynomial(m.mats.flow_from[l], p.x));
    p.inequality_labels.push_back("Imax from " + name);
    p.inequalities.push_back(lim - quadratic_polynomial(m.mats.flow_to[l], p.x));
    p.inequality_labels.push_back("Imax to " + name);
  }

  // State sets.
  for (int k : m.pq) {
    const Bus& b = net.buses[k];
    const Polynomial v = magnitude(k, n, p.x);
    p.state_set.push_back(b.vmax * b.vmax - v);
    p.state_labels.push_back("Vmax bus " + std::to_string(b.id));
    p.state_set.push_back(v - b.vmin * b.vmin);
    p.state_labels.push_back("Vmin bus " + std::to_string(b.id));
  }
  for (int k = 0; k < n; ++k) {
    const Bus& b = net.buses[k];
    const Polynomial v = magnitude(k, n, p.x);
    p.relaxed_state_set.push_back(1.5 * b.vmax * b.vmax - v);
    p.relaxed_state_set.push_back(v - 0.5 * b.vmin * b.vmin);
  }
  p.validate();
  return p;
}

std::vector<int> certificate_order(const AcopfModel& m, const aro::AroProblem& prob) {
  const int m_in = static_cast<int>(prob.inequalities.size());
  const int generator_rows = 2 + 2 * static_cast<int>(m.gens.size());
  std::vector<int> order;
  for (int i = 0; i < generator_rows; ++i) order.push_back(i);
  for (int j = 0; j < static_cast<int>(prob.state_set.size()); ++j) order.push_back(m_in + j);
  for (int i = generator_rows; i < m_in; ++i) order.push_back(i);
  return order;
}

uncertainty::Ellipsoid load_uncertainty(const AcopfModel& m, double w, bool correlated) {
  return uncertainty::build_load_ellipsoid(m.net.active_loads(), w, correlated, m.n);
}

}  // namespace aropt::acopf
