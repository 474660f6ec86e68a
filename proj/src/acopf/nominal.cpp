#include "aropt/acopf/nominal.hpp"

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>

#include "aropt/acopf/powerflow.hpp"
#include "aropt/aro/elimination.hpp"

namespace aropt::acopf {

namespace {

// c + sum coef * var over program variables.
struct Lin {
  double c = 0.0;
  std::vector<std::pair<int, double>> t;
};

class NominalBuilder {
 public:
  explicit NominalBuilder(int order) : order_(order) { w_ = pb_.add_psd(order); }

  conic::ProgramBuilder& pb() { return pb_; }
  int w_start() const { return w_; }

  // Row <Q, W> + sum lin terms = rhs
  int row_with_form(const RealSparse& Q, double rhs) {
    const int r = pb_.add_row(rhs);
    for (int col = 0; col < Q.outerSize(); ++col)
      for (RealSparse::InnerIterator it(Q, col); it; ++it)
        if (it.row() >= it.col())
          pb_.add_psd_coefficient(r, w_, order_, static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    return r;
  }

  // Quantity in [lo, hi] expressed as lo + s1 with s1 + s2 = hi - lo, or the
  // constant lo when the window is closed.
  Lin window_variable(double lo, double hi) {
    Lin v;
    v.c = lo;
    if (hi - lo <= kClosed * std::max(1.0, std::abs(hi))) return v;
    const int s = pb_.add_nonneg(2);
    const int r = pb_.add_row(hi - lo);
    pb_.add_coefficient(r, s, 1.0);
    pb_.add_coefficient(r, s + 1, 1.0);
    v.t.emplace_back(s, 1.0);
    return v;
  }

  // lo <= <Q, W> <= hi
  void window_form(const RealSparse& Q, double lo, double hi) {
    if (hi - lo <= kClosed * std::max(1.0, std::abs(hi))) {
      row_with_form(Q, 0.5 * (lo + hi));
      return;
    }
    const Lin v = window_variable(lo, hi);
    const int r = row_with_form(Q, v.c);
    for (const auto& [var, coef] : v.t) pb_.add_coefficient(r, var, -coef);
  }

  // <Q, W> <= hi
  void upper_form(const RealSparse& Q, double hi) {
    const int s = pb_.add_nonneg(1);
    const int r = row_with_form(Q, hi);
    pb_.add_coefficient(r, s, 1.0);
  }

 private:
  static constexpr double kClosed = 1e-10;
  int order_;
  int w_;
  conic::ProgramBuilder pb_;
};

}  // namespace

NominalBound nominal_sdp_bound(const PowerNetwork& net, const conic::SolverOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  net.validate();
  const int n = net.num_buses();
  const InjectionMatrices mats = build_injection_matrices(net);
  const double base = net.base_mva;
  NominalBuilder nb(2 * n);
  conic::ProgramBuilder& pb = nb.pb();
  double offset = 0.0;

  for (int k = 0; k < n; ++k) {
    const Bus& b = net.buses[k];
    const int g = net.generator_at(k);
    if (g < 0) {
      nb.row_with_form(mats.P[k], -b.pd);
      nb.row_with_form(mats.Q[k], -b.qd);
    } else {
      const Generator& gen = net.generators[g];
      const Lin pg = nb.window_variable(gen.pmin, gen.pmax);
      const Lin qg = nb.window_variable(gen.qmin, gen.qmax);
      int r = nb.row_with_form(mats.P[k], pg.c - b.pd);
      for (const auto& [v, c] : pg.t) pb.add_coefficient(r, v, -c);
      r = nb.row_with_form(mats.Q[k], qg.c - b.qd);
      for (const auto& [v, c] : qg.t) pb.add_coefficient(r, v, -c);
      // cost C2 pg^2 + C1 pg + c0 with pg per unit
      const double C2 = gen.c2 * base * base;
      const double C1 = gen.c1 * base;
      offset += gen.c0 + C1 * pg.c;
      for (const auto& [v, c] : pg.t) pb.add_cost(v, C1 * c);
      if (C2 > 0.0) {
        // u0 - u1 = 1, u2 = sqrt(C2) pg, u0 >= ||(u1, u2)||  =>  u0 + u1 >= C2 pg^2
        const int u = pb.add_soc(3);
        const double sc = std::sqrt(C2);
        r = pb.add_row(1.0);
        pb.add_coefficient(r, u, 1.0);
        pb.add_coefficient(r, u + 1, -1.0);
        r = pb.add_row(sc * pg.c);
        pb.add_coefficient(r, u + 2, 1.0);
        for (const auto& [v, c] : pg.t) pb.add_coefficient(r, v, -sc * c);
        pb.add_cost(u, 1.0);
        pb.add_cost(u + 1, 1.0);
      } else if (C2 < 0.0) {
        throw ModelError("nonconvex generator cost");
      }
    }
    nb.window_form(mats.M[k], b.vmin * b.vmin, b.vmax * b.vmax);
  }
  for (std::size_t l = 0; l < net.branches.size(); ++l) {
    const double rate = net.branches[l].rate;
    if (rate <= 0.0) continue;
    nb.upper_form(mats.flow_from[l], rate * rate);
    nb.upper_form(mats.flow_to[l], rate * rate);
  }
  pb.set_objective_offset(offset);

  const conic::ConicProgram prog = pb.build();
  const conic::SolveResult res = conic::solve(prog, options);
  NominalBound out;
  out.status = res.status;
  out.iterations = res.iterations;
  out.message = res.message;
  out.objective = res.primal_objective;
  out.W = conic::smat(std::span<const double>(res.x.data() + nb.w_start(), conic::svec_size(2 * n)), 2 * n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.W);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double top = ev(2 * n - 1);
  // The relaxation is invariant under (Re V, Im V) rotations, so a rank-one
  // complex solution shows as a pair of equal eigenvalues; the ratio uses the
  // third largest. The pair shares |x|^2, so the top eigenvector is scaled by
  // the pair sum and rotated so the reference bus is real.
  out.rank_ratio = top > 0.0 ? std::max(ev(2 * n - 3), 0.0) / top : 1.0;
  Eigen::VectorXd x = std::sqrt(std::max(top + ev(2 * n - 2), 0.0)) * es.eigenvectors().col(2 * n - 1);
  Eigen::VectorXcd V = unstack_voltage(x);
  const std::complex<double> vs = V(net.reference);
  if (std::abs(vs) > 0.0) V *= std::conj(vs) / std::abs(vs);
  out.x = stack_voltage(V);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

PowerNetwork squeeze_bounds(const PowerNetwork& net, double shrink) {
  if (shrink < 0.0 || shrink >= 0.5) throw std::invalid_argument("shrink must lie in [0, 0.5)");
  PowerNetwork out = net;
  auto lo = [&](double v) { return v + shrink * std::abs(v); };
  auto hi = [&](double v) { return v - shrink * std::abs(v); };
  for (Bus& b : out.buses) {
    b.vmin = lo(b.vmin);
    b.vmax = hi(b.vmax);
    if (b.vmin > b.vmax) b.vmin = b.vmax = 0.5 * (b.vmin + b.vmax);
  }
  for (Generator& g : out.generators) {
    g.pmin = lo(g.pmin);
    g.pmax = hi(g.pmax);
    if (g.pmin > g.pmax) g.pmin = g.pmax = 0.5 * (g.pmin + g.pmax);
    g.qmin = lo(g.qmin);
    g.qmax = hi(g.qmax);
    if (g.qmin > g.qmax) g.qmin = g.qmax = 0.5 * (g.qmin + g.qmax);
  }
  for (Branch& br : out.branches) br.rate = hi(br.rate);
  return out;
}

WarmStart squeeze_warm_start(const AcopfModel& model, double shrink, const conic::SolverOptions& options) {
  const PowerNetwork squeezed = squeeze_bounds(model.net, shrink);
  const NominalBound nb = nominal_sdp_bound(squeezed, options);
  if (!nb.W.size() || (nb.status != conic::SolveStatus::Optimal && nb.status != conic::SolveStatus::AlmostOptimal))
    throw ModelError(std::string("squeezed nominal relaxation failed: ") + conic::status_name(nb.status));
  WarmStart ws;
  ws.sdp_objective = nb.objective;
  ws.rank_ratio = nb.rank_ratio;
  ws.y = model.control_from_state(nb.x);
  const PowerFlowResult pf = newton_power_flow(model, ws.y, Eigen::VectorXd(), nb.x);
  if (!pf.converged())
    throw ModelError(std::string("warm-start power flow failed: ") + power_flow_status_name(pf.status));
  ws.x = pf.x;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(model.equality_jacobian(ws.x));
  const auto& sv = svd.singularValues();
  ws.condition = sv(0) / sv(sv.size() - 1);
  if (!(ws.condition <= aro::kRankConditionLimit))
    throw aro::RankDeficient("warm-start anchor Jacobian is rank deficient", ws.condition);
  return ws;
}

}  // namespace aropt::acopf
