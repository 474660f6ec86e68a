#include "aropt/uncertainty/loads.hpp"

#include "aropt/error.hpp"

namespace aropt::uncertainty {

std::vector<int> uncertain_buses(const Eigen::VectorXd& loads) {
  std::vector<int> out;
  for (int k = 0; k < loads.size(); ++k)
    if (loads(k) > 0.0) out.push_back(k);
  return out;
}

Ellipsoid build_load_ellipsoid(const Eigen::VectorXd& loads, double w, bool correlated, int n_buses) {
  if (!(w > 0.0)) throw std::invalid_argument("uncertainty fraction w must be positive");
  const std::vector<int> buses = uncertain_buses(loads);
  if (buses.empty()) throw ModelError("no positive loads: the uncertainty set would be empty");
  const int n = static_cast<int>(buses.size());
  Eigen::VectorXd sigma(n);
  for (int i = 0; i < n; ++i) sigma(i) = 1.0 / std::pow(w * loads(buses[i]), 2);
  Eigen::MatrixXd shape;
  if (correlated) {
    if (n_buses < n) throw std::invalid_argument("bus count smaller than the number of uncertain loads");
    Eigen::MatrixXd R = Eigen::MatrixXd::Constant(n, n, 1.0 / n_buses);
    R.diagonal().setOnes();
    const Eigen::VectorXd s = sigma.cwiseSqrt();
    shape = s.asDiagonal() * R * s.asDiagonal();
  } else {
    shape = sigma.asDiagonal();
  }
  return {Eigen::VectorXd::Zero(n), shape, 1.0};
}

}  // namespace aropt::uncertainty
