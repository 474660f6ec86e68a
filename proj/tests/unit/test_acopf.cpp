#include <algorithm>
#include <cmath>
#include <numeric>

#include "aropt/acopf/injection.hpp"
#include "aropt/acopf/model.hpp"
#include "aropt/acopf/network.hpp"
#include "aropt/acopf/nominal.hpp"
#include "aropt/acopf/powerflow.hpp"
#include "aropt/aro/elimination.hpp"
#include "aropt/error.hpp"
#include "doctest.h"

using namespace aropt;
using namespace aropt::acopf;

namespace {

std::string case_path(const std::string& name) { return std::string(AROPT_DATA_DIR) + "/" + name + ".m"; }

const PowerNetwork& case9() {
  static const PowerNetwork net = load_matpower(case_path("case9"));
  return net;
}

// Two buses joined by a line with admittance 1 - j.
PowerNetwork two_bus() {
  PowerNetwork net;
  net.name = "two";
  net.buses.resize(2);
  net.buses[0].id = 1;
  net.buses[0].type = BusType::Ref;
  net.buses[1].id = 2;
  net.buses[1].pd = 0.5;
  Generator g;
  g.bus = 0;
  g.pmax = 2.0;
  g.qmax = 1.0;
  g.qmin = -1.0;
  g.c1 = 10.0;
  net.generators.push_back(g);
  Branch br;
  br.from = 0;
  br.to = 1;
  br.r = 0.5;
  br.x = 0.5;
  net.branches.push_back(br);
  net.reference = 0;
  return net;
}

}  // namespace

TEST_CASE("parse: case9 sizes") {
  const PowerNetwork& net = case9();
  CHECK(net.num_buses() == 9);
  CHECK(net.generators.size() == 3);
  CHECK(net.branches.size() == 9);
  CHECK(net.base_mva == 100.0);
  CHECK(net.reference == 0);
  // per unit loads
  CHECK(net.buses[4].pd == doctest::Approx(0.9));
  // cost stays in currency units per MW
  CHECK(net.generators[0].c2 == doctest::Approx(0.11));
}

TEST_CASE("parse: case14 has eleven loaded buses") {
  const PowerNetwork net = load_matpower(case_path("case14"));
  CHECK(net.num_buses() == 14);
  const Eigen::VectorXd pd = net.active_loads();
  CHECK(std::count_if(pd.begin(), pd.end(), [](double v) { return v > 0.0; }) == 11);
  CHECK(make_model(net).nzeta() == 11);
}

TEST_CASE("parse: malformed input") {
  const std::string good = write_matpower(case9());
  SUBCASE("missing bus section") {
    std::string bad = good;
    bad.replace(bad.find("mpc.bus"), 7, "mpc.xyz");
    CHECK_THROWS_AS(parse_matpower(bad), ParseError);
  }
  SUBCASE("piecewise linear cost") {
    std::string bad = good;
    const auto at = bad.find("mpc.gencost");
    const auto row = bad.find_first_of("0123456789", bad.find('[', at));
    bad[row] = '1';
    CHECK_THROWS_AS(parse_matpower(bad), ParseError);
  }
  SUBCASE("empty text") { CHECK_THROWS_AS(parse_matpower(""), ParseError); }
  SUBCASE("missing file") { CHECK_THROWS(load_matpower(case_path("no_such_case"))); }
}

TEST_CASE("parse: write and parse round trip") {
  for (const char* name : {"case9", "case14", "case30"}) {
    const PowerNetwork a = load_matpower(case_path(name));
    const std::string text = write_matpower(a);
    const PowerNetwork b = parse_matpower(text);
    CHECK(write_matpower(b) == text);
    REQUIRE(a.num_buses() == b.num_buses());
    for (int k = 0; k < a.num_buses(); ++k) {
      CHECK(a.buses[k].pd == doctest::Approx(b.buses[k].pd).epsilon(1e-14));
      CHECK(a.buses[k].vmax == b.buses[k].vmax);
    }
    REQUIRE(a.branches.size() == b.branches.size());
    for (std::size_t l = 0; l < a.branches.size(); ++l) CHECK(a.branches[l].x == doctest::Approx(b.branches[l].x));
  }
}

TEST_CASE("network: validation") {
  PowerNetwork net = two_bus();
  CHECK_NOTHROW(net.validate());
  net.buses[1].type = BusType::Ref;
  CHECK_THROWS_AS(net.validate(), ModelError);
  net = two_bus();
  net.generators[0].bus = 1;  // generator on a PQ bus
  CHECK_THROWS_AS(net.validate(), ModelError);
}

TEST_CASE("injection: flat two-bus line carries nothing") {
  const PowerNetwork net = two_bus();
  const InjectionMatrices mats = build_injection_matrices(net);
  const Eigen::VectorXd x = stack_voltage(Eigen::VectorXcd::Ones(2));
  for (int k = 0; k < 2; ++k) {
    CHECK(std::abs(quadratic_form(mats.P[k], x)) < 1e-14);
    CHECK(std::abs(quadratic_form(mats.Q[k], x)) < 1e-14);
  }
  CHECK(std::abs(quadratic_form(mats.flow_from[0], x)) < 1e-14);
}

TEST_CASE("injection: matrices are symmetric") {
  const InjectionMatrices mats = build_injection_matrices(case9());
  auto sym = [](const RealSparse& A) { return (Eigen::MatrixXd(A) - Eigen::MatrixXd(A).transpose()).norm(); };
  for (int k = 0; k < mats.n; ++k) {
    CHECK(sym(mats.P[k]) <= 1e-12);
    CHECK(sym(mats.Q[k]) <= 1e-12);
    CHECK(sym(mats.M[k]) <= 1e-12);
  }
  for (std::size_t l = 0; l < mats.flow_from.size(); ++l) {
    CHECK(sym(mats.flow_from[l]) <= 1e-12);
    CHECK(sym(mats.flow_to[l]) <= 1e-12);
  }
}

TEST_CASE("participation factors") {
  SUBCASE("case9") {
    const Eigen::VectorXd a = participation_factors(case9());
    CHECK(a(0) == doctest::Approx(0.30380).epsilon(1e-4));
    CHECK(a(1) == doctest::Approx(0.36709).epsilon(1e-4));
    CHECK(a(2) == doctest::Approx(0.32911).epsilon(1e-4));
    for (int k = 3; k < 9; ++k) CHECK(a(k) == 0.0);
    CHECK(a.sum() == doctest::Approx(1.0));
  }
  SUBCASE("single generator") {
    const Eigen::VectorXd a = participation_factors(two_bus());
    CHECK(a(0) == 1.0);
    CHECK(a(1) == 0.0);
  }
  SUBCASE("no range") {
    PowerNetwork net = two_bus();
    net.generators[0].pmax = net.generators[0].pmin;
    CHECK_THROWS_AS(participation_factors(net), ModelError);
  }
}

TEST_CASE("model: case9 layout") {
  const AcopfModel m = make_model(case9());
  CHECK(m.nx() == 18);
  CHECK(m.pv.size() == 2);
  CHECK(m.pq.size() == 6);
  CHECK(m.gens.size() == 3);
  CHECK(m.nzeta() == 3);
  CHECK(m.ny == 1 + 2 + 3);
  // gamma vanishes where there is no load and equals Qd / Pd elsewhere
  CHECK(m.gamma(0) == 0.0);
  CHECK(m.gamma(4) == doctest::Approx(30.0 / 90.0));
  const aro::AroProblem prob = build_aro(m, load_uncertainty(m, 0.05, false));
  CHECK(prob.nx() == 18);
  CHECK(prob.equalities.size() == 18);
  CHECK(prob.nzeta() == 3);
  CHECK_NOTHROW(prob.validate());
  CHECK(prob.inequalities.size() == prob.inequality_labels.size());
  CHECK(prob.state_set.size() == 6 * 2);
}

TEST_CASE("model: zero uncertainty gives the nominal constraints") {
  const AcopfModel m = make_model(case9());
  const aro::AroProblem nominal = build_aro(m, std::nullopt);
  CHECK(nominal.nzeta() == 0);
  const aro::AroProblem robust = build_aro(m, load_uncertainty(m, 0.05, false));
  const Eigen::VectorXd y = case_dispatch(m);
  const PowerFlowResult pf = newton_power_flow(m, y, {});
  REQUIRE(pf.converged());
  const Eigen::VectorXd a = nominal.point(y, {}, pf.x);
  const Eigen::VectorXd b = robust.point(y, Eigen::VectorXd::Zero(3), pf.x);
  const std::span<const double> sa(a.data(), a.size()), sb(b.data(), b.size());
  for (std::size_t i = 0; i < nominal.equalities.size(); ++i)
    CHECK(nominal.equalities[i].eval(sa) == doctest::Approx(robust.equalities[i].eval(sb)).epsilon(1e-12));
  for (std::size_t i = 0; i < nominal.inequalities.size(); ++i)
    CHECK(nominal.inequalities[i].eval(sa) == doctest::Approx(robust.inequalities[i].eval(sb)).epsilon(1e-12));
}

TEST_CASE("model: certificate order covers every constraint once") {
  const AcopfModel m = make_model(case9());
  const aro::AroProblem prob = build_aro(m, load_uncertainty(m, 0.05, false));
  std::vector<int> order = certificate_order(m, prob);
  const int total = static_cast<int>(prob.inequalities.size() + prob.state_set.size());
  REQUIRE(static_cast<int>(order.size()) == total);
  CHECK(order[0] == 0);
  CHECK(order[2 + 2 * 3] == static_cast<int>(prob.inequalities.size()));
  std::sort(order.begin(), order.end());
  for (int i = 0; i < total; ++i) CHECK(order[i] == i);
}

TEST_CASE("power flow: case9 at the case dispatch") {
  const AcopfModel m = make_model(case9());
  const Eigen::VectorXd y = case_dispatch(m);
  const PowerFlowResult pf = newton_power_flow(m, y, {});
  REQUIRE(pf.converged());
  CHECK(m.equality_residual(y, Eigen::VectorXd::Zero(m.nzeta()), pf.x).lpNorm<Eigen::Infinity>() <= 1e-8);
  for (int k = 0; k < m.n; ++k) {
    const double v = std::hypot(pf.x(k), pf.x(m.n + k));
    CHECK(v > m.net.buses[k].vmin);
    CHECK(v < m.net.buses[k].vmax);
  }
  // V^g = |V|^2 at generator buses
  for (int k : m.gens) CHECK(pf.x(k) * pf.x(k) + pf.x(m.n + k) * pf.x(m.n + k) == doctest::Approx(y(m.vg_index[k])));
  // the linearized stage at the solution is well posed
  const aro::AroProblem prob = build_aro(m, load_uncertainty(m, 0.05, false));
  const aro::LinearizedStage st = aro::linearize_equalities(prob, pf.x);
  CHECK(st.A.rows() == 18);
  CHECK(st.condition < aro::kRankConditionLimit);
}

TEST_CASE("power flow: zero generator voltage is singular") {
  const AcopfModel m = make_model(case9());
  Eigen::VectorXd y = case_dispatch(m);
  for (int k : m.gens) y(m.vg_index[k]) = 0.0;
  const PowerFlowResult pf = newton_power_flow(m, y, {});
  CHECK_FALSE(pf.converged());
  CHECK(pf.status == PowerFlowStatus::SingularJacobian);
}

TEST_CASE("nominal bound: case9 and case14") {
  const NominalBound b9 = nominal_sdp_bound(case9());
  REQUIRE(b9.status == conic::SolveStatus::Optimal);
  CHECK(std::abs(b9.reported() - 52.97) / 52.97 <= 0.005);
  const NominalBound b14 = nominal_sdp_bound(load_matpower(case_path("case14")));
  REQUIRE(b14.status == conic::SolveStatus::Optimal);
  CHECK(std::abs(b14.reported() - 80.82) / 80.82 <= 0.005);
}

TEST_CASE("warm start: squeezed case9 is strictly inside the bounds") {
  const AcopfModel m = make_model(case9());
  const WarmStart ws = squeeze_warm_start(m);
  const aro::AroProblem prob = build_aro(m, std::nullopt);
  const Eigen::VectorXd pt = prob.point(ws.y, {}, ws.x);
  const std::span<const double> sp(pt.data(), pt.size());
  for (std::size_t i = 0; i < prob.inequalities.size(); ++i) CHECK(prob.inequalities[i].eval(sp) > 0.0);
  for (std::size_t i = 0; i < prob.state_set.size(); ++i) CHECK(prob.state_set[i].eval(sp) > 0.0);
  for (int i = 0; i < m.ny; ++i) {
    CHECK(ws.y(i) >= prob.y_lower(i));
    CHECK(ws.y(i) <= prob.y_upper(i));
  }
  CHECK(m.equality_residual(ws.y, Eigen::VectorXd::Zero(m.nzeta()), ws.x).lpNorm<Eigen::Infinity>() <= 1e-8);
}

TEST_CASE("warm start: no squeeze is the plain nominal relaxation") {
  const AcopfModel m = make_model(case9());
  const WarmStart ws = squeeze_warm_start(m, 0.0);
  const NominalBound b = nominal_sdp_bound(case9());
  CHECK(ws.sdp_objective == doctest::Approx(b.objective).epsilon(1e-5));
}

TEST_CASE("warm start: case14 anchor is well conditioned") {
  const AcopfModel m = make_model(load_matpower(case_path("case14")));
  const WarmStart ws = squeeze_warm_start(m);
  CHECK(ws.condition < 1e10);
}

TEST_CASE("squeeze: windows shrink by their magnitude") {
  const PowerNetwork s = squeeze_bounds(case9(), 0.01);
  CHECK(s.buses[0].vmax == doctest::Approx(1.1 * 0.99));
  CHECK(s.buses[0].vmin == doctest::Approx(0.9 * 1.01));
  CHECK(s.generators[0].pmax == doctest::Approx(case9().generators[0].pmax * 0.99));
}
