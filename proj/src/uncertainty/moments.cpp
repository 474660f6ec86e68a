#include "aropt/uncertainty/moments.hpp"

#include <cmath>

#include "aropt/error.hpp"
#include "aropt/poly/polynomial.hpp"

namespace aropt::uncertainty {

double unit_ball_moment(std::span<const int> beta) {
  const int n = static_cast<int>(beta.size());
  int total = 0;
  double log_num = 0.0;
  for (int b : beta) {
    if (b < 0) throw std::invalid_argument("negative exponent");
    if (b % 2 != 0) return 0.0;
    total += b;
    log_num += std::lgamma(0.5 * (b + 1));
  }
  // Sphere integral 2 prod Gamma(b_j) / Gamma(sum b_j) with b_j = (beta_j + 1) / 2,
  // times the radial factor 1 / (|beta| + n).
  const double log_den = std::lgamma(0.5 * (total + n));
  return 2.0 * std::exp(log_num - log_den) / (total + n);
}

namespace {

double moment_via_map(const poly::Monomial& m, int first, const Ellipsoid& E, const Eigen::MatrixXd& T,
                      double jac) {
  const int n = E.dim();
  // u variables are 0 .. n-1; z_k = center_k + sum_j T_kj u_j.
  poly::Polynomial prod(1.0);
  const auto& vars = m.vars();
  for (std::size_t i = 0; i < vars.size();) {
    std::size_t j = i;
    while (j < vars.size() && vars[j] == vars[i]) ++j;
    const int k = vars[i] - first;
    if (k < 0 || k >= n) throw DimensionError("monomial variable outside the ellipsoid coordinates");
    poly::Polynomial zk(E.center()(k));
    for (int c = 0; c < n; ++c) zk.add_term(poly::Monomial({c}), T(k, c));
    prod = prod * zk.pow(static_cast<int>(j - i));
    i = j;
  }
  double total = 0.0;
  std::vector<int> beta(n);
  for (const auto& [u, c] : prod.terms()) {
    std::fill(beta.begin(), beta.end(), 0);
    for (int v : u.vars()) ++beta[v];
    total += c * unit_ball_moment(beta);
  }
  return jac * total;
}

}  // namespace

double ellipsoid_volume(const Ellipsoid& E) {
  std::vector<int> zero(E.dim(), 0);
  return std::abs(E.unit_ball_map().determinant()) * unit_ball_moment(zero);
}

double ellipsoid_moment(std::span<const int> alpha, const Ellipsoid& E) {
  require_dim(static_cast<int>(alpha.size()) == E.dim(), "exponent vector does not match the ellipsoid dimension");
  const Eigen::MatrixXd T = E.unit_ball_map();
  return moment_via_map(poly::Monomial::from_exponents(alpha), 0, E, T, std::abs(T.determinant()));
}

std::vector<double> ellipsoid_moments(const std::vector<poly::Monomial>& monomials, int first, const Ellipsoid& E) {
  const Eigen::MatrixXd T = E.unit_ball_map();
  const double jac = std::abs(T.determinant());
  std::vector<double> out;
  out.reserve(monomials.size());
  for (const auto& m : monomials) out.push_back(moment_via_map(m, first, E, T, jac));
  return out;
}

}  // namespace aropt::uncertainty
