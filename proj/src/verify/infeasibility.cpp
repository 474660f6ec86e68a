#include <chrono>
#include <cmath>

#include "aropt/error.hpp"
#include "aropt/uncertainty/moments.hpp"
#include "aropt/verify/checks.hpp"
#include "local.hpp"

namespace aropt::verify {

namespace {

using Clock = std::chrono::steady_clock;

// Box bounds of S_y as products (y - l)(u - y) >= 0, one-sided bounds as
// linear constraints.
poly::PolynomialVector control_set(const aro::AroProblem& prob) {
  poly::PolynomialVector out;
  for (int i = 0; i < prob.ny(); ++i) {
    const poly::Polynomial v = poly::Polynomial::variable(prob.y.index(i));
    const double l = prob.y_lower.size() ? prob.y_lower(i) : -INFINITY;
    const double u = prob.y_upper.size() ? prob.y_upper(i) : INFINITY;
    if (std::isfinite(l) && std::isfinite(u))
      out.push_back((v - l) * (u - v));
    else if (std::isfinite(l))
      out.push_back(v - l);
    else if (std::isfinite(u))
      out.push_back(u - v);
  }
  for (const auto& g : prob.control_inequalities) out.push_back(g);
  return out;
}

InfeasibilityReport certify(const aro::AroProblem& prob, const Eigen::VectorXd* y, const DegreeConfig& config) {
  config.validate();
  const auto t0 = Clock::now();
  if (prob.nzeta() > 0 && !prob.omega) throw ModelError("the problem has uncertain parameters but no uncertainty set");
  InfeasibilityReport rep;
  const detail::LocalSystem ls(prob, y);
  rep.variables = static_cast<int>(ls.vars().size());
  if (rep.variables > config.max_variables) {
    rep.verdict = Verdict::Skipped;
    rep.message = std::to_string(rep.variables) + " variables exceed the cap of " + std::to_string(config.max_variables);
    return rep;
  }

  uncertainty::SemialgebraicSet set;
  if (auto ball = ls.ball()) set.inequalities.push_back(*ball);
  if (!y)
    for (const auto& g : control_set(prob)) set.inequalities.push_back(g);
  for (const auto* v : {&prob.state_set, &prob.inequalities, &prob.relaxed_state_set})
    for (const auto& g : ls.map(*v))
      if (!g.is_zero()) set.inequalities.push_back(g);
  detail::add_redundant_ball(set, ls.vars());
  poly::PolynomialVector equalities;
  for (const auto& h : ls.map(prob.equalities))
    if (!h.is_zero()) equalities.push_back(h);

  detail::normalize(set.inequalities);
  detail::normalize(equalities);

  rep.monomials = poly::monomials_up_to(ls.u(), config.degree);
  const int k = static_cast<int>(rep.monomials.size());
  std::vector<double> moments(k);
  std::vector<int> exps(ls.u().size());
  for (int a = 0; a < k; ++a) {
    for (std::size_t j = 0; j < exps.size(); ++j) exps[j] = rep.monomials[a].exponent(ls.u()[j]);
    // Without uncertainty p is a constant weighed at the single point.
    moments[a] = exps.empty() ? 1.0 : uncertainty::unit_ball_moment(exps);
  }
  for (const double bound : {0.0, detail::kMultiplierBound}) {
    aro::SosProgram sp;
    const int id = sp.add_identity();
    conic::ProgramBuilder& pb = sp.builder();
    const int s = pb.add_soc(k + 1);
    pb.add_coefficient(pb.add_row(1.0), s, 1.0);
    for (int a = 0; a < k; ++a) {
      pb.add_cost(s + 1 + a, moments[a]);
      sp.add_variable_term(id, rep.monomials[a], s + 1 + a, 1.0);
    }
    const aro::PutinarMultipliers mult =
        aro::putinar_counterpart(sp, id, set, ls.vars(), config.degree / 2, equalities, config.sigma0_degree);
    if (bound > 0.0) detail::bound_multipliers(sp, mult, bound);
    const conic::SolveResult res = conic::solve(sp.build(), config.solver);
    rep.status = res.status;
    rep.verdict = Verdict::Inconclusive;
    if (!res.optimal()) {
      rep.message = conic::status_name(res.status);
      continue;
    }
    rep.coefficients = res.x.segment(s + 1, k);
    rep.objective = res.primal_objective;
    const detail::CertificateCheck check = detail::check_certificate(sp, id, mult, res.x);
    rep.residual = check.residual;
    rep.bounded = bound > 0.0;
    rep.message.clear();
    if (!check.ok)
      rep.message = "certificate check failed";
    else if (rep.objective < -kVerdictTolerance)
      rep.verdict = Verdict::NotFeasible;
    break;
  }
  rep.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return rep;
}

}  // namespace

double InfeasibilityReport::eval(const aro::AroProblem& prob, const Eigen::VectorXd& zeta) const {
  require_dim(zeta.size() == prob.nzeta(), "uncertainty vector has the wrong size");
  const detail::LocalSystem ls(prob, nullptr);
  const Eigen::VectorXd u = ls.to_u(zeta);
  std::vector<double> point(prob.space.size() + u.size(), 0.0);
  for (int j = 0; j < u.size(); ++j) point[ls.u()[j]] = u(j);
  double v = 0.0;
  for (std::size_t a = 0; a < monomials.size(); ++a) v += coefficients(static_cast<Eigen::Index>(a)) * monomials[a].eval(point);
  return v;
}

InfeasibilityReport infeasibility_check(const aro::AroProblem& prob, const Eigen::VectorXd& y,
                                        const DegreeConfig& config) {
  return certify(prob, &y, config);
}

InfeasibilityReport global_infeasibility_check(const aro::AroProblem& prob, const DegreeConfig& config) {
  return certify(prob, nullptr, config);
}

}  // namespace aropt::verify
