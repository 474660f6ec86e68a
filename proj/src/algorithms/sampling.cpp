#include "aropt/algorithms/sampling.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <span>

#include "aropt/algorithms/outer.hpp"
#include "aropt/error.hpp"

namespace aropt::algorithms {

SampleReport sample_robustness(const aro::AroProblem& prob, const Eigen::VectorXd& y, const Eigen::VectorXd& x0,
                               int samples, std::uint64_t seed) {
  require_dim(y.size() == prob.ny() && x0.size() == prob.nx(), "sampled point has the wrong size");
  SampleReport rep;
  rep.worst = std::numeric_limits<double>::infinity();
  const int d = prob.nzeta();
  Eigen::VectorXd center = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(d, d);
  if (d > 0) {
    if (!prob.omega) throw ModelError("the problem has uncertain parameters but no uncertainty set");
    center = prob.omega->center();
    T = prob.omega->unit_ball_map();
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  auto check = [&](const poly::PolynomialVector& v, const std::vector<std::string>& labels, std::span<const double> pt,
                   const Eigen::VectorXd& zeta) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double g = v[i].eval(pt);
      if (g < rep.worst) {
        rep.worst = g;
        rep.worst_label = i < labels.size() ? labels[i] : "constraint " + std::to_string(i + 1);
        rep.worst_zeta = zeta;
      }
    }
  };
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(d);
    if (d > 0) {
      for (int i = 0; i < d; ++i) u(i) = normal(rng);
      u /= u.norm();
      if (s % 2 == 1) u *= std::pow(uniform(rng), 1.0 / d);
    }
    const Eigen::VectorXd zeta = center + T * u;
    ++rep.samples;
    const StateSolve st = solve_state(prob, y, zeta, x0);
    if (!st.converged) continue;
    ++rep.recovered;
    const Eigen::VectorXd pt = prob.point(y, zeta, st.x);
    const std::span<const double> sp(pt.data(), static_cast<std::size_t>(pt.size()));
    check(prob.inequalities, prob.inequality_labels, sp, zeta);
    check(prob.state_set, prob.state_labels, sp, zeta);
  }
  return rep;
}

}  // namespace aropt::algorithms
