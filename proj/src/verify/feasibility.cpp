#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "aropt/error.hpp"
#include "aropt/verify/checks.hpp"
#include "local.hpp"

namespace aropt::verify {

DegreeConfig DegreeConfig::for_buses(int buses) {
  DegreeConfig c;
  c.degree = buses <= 9 ? 4 : 2;
  return c;
}

void DegreeConfig::validate() const {
  if (degree < 2 || degree % 2 != 0) throw std::invalid_argument("certificate degree must be even and at least 2");
  if (sigma0_degree < 0 || sigma0_degree % 2 != 0 || sigma0_degree > degree)
    throw std::invalid_argument("sigma_0 degree must be even and at most the certificate degree");
  if (max_variables < 1) throw std::invalid_argument("variable cap must be positive");
}

const char* verdict_flag(Verdict v) {
  switch (v) {
    case Verdict::Feasible: return "F";
    case Verdict::NotFeasible: return "NF";
    case Verdict::Inconclusive: return "IC";
    case Verdict::Skipped: return "--";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Subproblem {
  int index = 0;
  poly::Polynomial target;
};

ConstraintBound solve_bound(const detail::LocalSystem& ls, const uncertainty::SemialgebraicSet& base,
                            const poly::PolynomialVector& equalities, const Subproblem& sub,
                            const poly::PolynomialVector& chained, const DegreeConfig& config) {
  const auto t0 = Clock::now();
  ConstraintBound b;
  b.index = sub.index;
  b.chained = static_cast<int>(chained.size());
  uncertainty::SemialgebraicSet set = base;
  set.inequalities.insert(set.inequalities.end(), chained.begin(), chained.end());
  detail::normalize(set.inequalities);
  // The identity is posed for G / scale so that residuals are relative.
  double scale = 0.0;
  for (const auto& [m, c] : sub.target.terms()) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) scale = 1.0;

  for (const double bound : {0.0, detail::kMultiplierBound}) {
    aro::SosProgram sp;
    const int id = sp.add_identity();
    const int t = sp.builder().add_free(1);
    sp.builder().add_cost(t, 1.0);
    sp.add_constant(id, sub.target * (1.0 / scale));
    sp.add_variable_term(id, poly::Monomial(), t, 1.0);
    const aro::PutinarMultipliers mult =
        aro::putinar_counterpart(sp, id, set, ls.vars(), config.degree / 2, equalities, config.sigma0_degree);
    if (bound > 0.0) detail::bound_multipliers(sp, mult, bound);
    const conic::SolveResult res = conic::solve(sp.build(), config.solver);
    b.status = res.status;
    b.t = kInf;
    b.bounded = bound > 0.0;
    if (res.optimal()) {
      const detail::CertificateCheck check = detail::check_certificate(sp, id, mult, res.x);
      b.residual = check.residual;
      b.min_eigen = check.min_eigen;
      b.certified = check.ok;
      if (check.ok) b.t = scale * res.x(t);
      break;
    }
    if (res.status == conic::SolveStatus::DualInfeasible) {
      // t is unbounded below: the set is empty.
      b.t = -kInf;
      b.certified = true;
      break;
    }
    if (res.status == conic::SolveStatus::PrimalInfeasible) break;
  }
  b.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return b;
}

bool passes(const ConstraintBound& b) { return b.certified && b.t <= kVerdictTolerance; }

}  // namespace

FeasibilityReport feasibility_check(const aro::AroProblem& prob, const Eigen::VectorXd& y, const DegreeConfig& config) {
  config.validate();
  const auto t0 = Clock::now();
  FeasibilityReport rep;
  const detail::LocalSystem ls(prob, &y);
  rep.variables = static_cast<int>(ls.vars().size());
  if (rep.variables > config.max_variables) {
    rep.verdict = Verdict::Skipped;
    rep.message = std::to_string(rep.variables) + " variables exceed the cap of " + std::to_string(config.max_variables);
    return rep;
  }

  uncertainty::SemialgebraicSet base;
  if (auto ball = ls.ball()) base.inequalities.push_back(*ball);
  for (const auto& g : ls.map(prob.relaxed_state_set)) base.inequalities.push_back(g);
  detail::add_redundant_ball(base, ls.vars());
  poly::PolynomialVector equalities;
  for (const auto& h : ls.map(prob.equalities))
    if (!h.is_zero()) equalities.push_back(h);
  detail::normalize(equalities);

  const int m_in = static_cast<int>(prob.inequalities.size());
  const int total = m_in + static_cast<int>(prob.state_set.size());
  std::vector<int> order = config.order;
  if (order.empty())
    for (int i = 0; i < total; ++i) order.push_back(i);
  std::vector<Subproblem> subs;
  for (int i : order) {
    if (i < 0 || i >= total) throw std::out_of_range("subproblem order refers to a missing constraint");
    subs.push_back({i, ls.map(i < m_in ? prob.inequalities[i] : prob.state_set[i - m_in])});
  }
  auto label = [&](int i) {
    const auto& labels = i < m_in ? prob.inequality_labels : prob.state_labels;
    const int k = i < m_in ? i : i - m_in;
    return k < static_cast<int>(labels.size()) ? labels[k] : "constraint " + std::to_string(i + 1);
  };

  const int n = static_cast<int>(subs.size());
  rep.bounds.resize(n);
  poly::PolynomialVector chained;
  auto chain = [&](int k) {
    const ConstraintBound& b = rep.bounds[k];
    if (config.chaining && b.certified && std::isfinite(b.t)) chained.push_back(subs[k].target + b.t);
  };
  bool stopped = false;
  if (config.parallel) {
    conic::SolverOptions inner = config.solver;
    inner.parallel = false;
    DegreeConfig unchained = config;
    unchained.solver = inner;
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < n; ++k) rep.bounds[k] = solve_bound(ls, base, equalities, subs[k], {}, unchained);
    for (int k = 0; k < n; ++k)
      if (passes(rep.bounds[k])) chain(k);
    if (config.chaining && !chained.empty())
      for (int k = 0; k < n; ++k) {
        if (passes(rep.bounds[k])) continue;
        const double first = rep.bounds[k].seconds;
        rep.bounds[k] = solve_bound(ls, base, equalities, subs[k], chained, config);
        rep.bounds[k].seconds += first;
        if (config.stop_early && !passes(rep.bounds[k])) {
          stopped = true;
          break;
        }
      }
  } else {
    for (int k = 0; k < n; ++k) {
      rep.bounds[k] = solve_bound(ls, base, equalities, subs[k], chained, config);
      chain(k);
      if (config.stop_early && !passes(rep.bounds[k])) {
        rep.bounds.resize(k + 1);
        stopped = true;
        break;
      }
    }
  }
  for (auto& b : rep.bounds) b.label = label(b.index);

  rep.verdict = Verdict::Feasible;
  for (const auto& b : rep.bounds)
    if (!passes(b)) {
      rep.verdict = Verdict::Inconclusive;
      if (rep.message.empty())
        rep.message = b.label + ": " +
                      (b.certified ? "positive bound"
                                   : b.status == conic::SolveStatus::Optimal || b.status == conic::SolveStatus::AlmostOptimal
                                         ? "certificate check failed"
                                         : conic::status_name(b.status));
    }
  if (stopped && rep.message.empty()) rep.message = "stopped at the first inconclusive constraint";
  rep.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return rep;
}

}  // namespace aropt::verify
