#include "aropt/acopf/injection.hpp"

#include "aropt/error.hpp"

namespace aropt::acopf {

RealSparse hermitian_real_form(const ComplexSparse& H) {
  require_dim(H.rows() == H.cols(), "hermitian_real_form needs a square matrix");
  const int n = static_cast<int>(H.rows());
  // Re(V^H H V) only sees the Hermitian part (H + H^H) / 2 = Hr + j Hi, whose
  // real form is [[Hr, -Hi], [Hi, Hr]].
  std::vector<Eigen::Triplet<double>> t;
  for (int col = 0; col < H.outerSize(); ++col) {
    for (ComplexSparse::InnerIterator it(H, col); it; ++it) {
      const int i = static_cast<int>(it.row());
      const int j = static_cast<int>(it.col());
      const std::complex<double> h = 0.5 * it.value();
      // Contribution of h at (i, j) and conj(h) at (j, i).
      t.emplace_back(i, j, h.real());
      t.emplace_back(j, i, h.real());
      t.emplace_back(i + n, j + n, h.real());
      t.emplace_back(j + n, i + n, h.real());
      t.emplace_back(i, j + n, -h.imag());
      t.emplace_back(j + n, i, -h.imag());
      t.emplace_back(i + n, j, h.imag());
      t.emplace_back(j, i + n, h.imag());
    }
  }
  RealSparse R(2 * n, 2 * n);
  R.setFromTriplets(t.begin(), t.end());
  R.prune(0.0);
  return R;
}

InjectionMatrices build_injection_matrices(const PowerNetwork& net) {
  using C = std::complex<double>;
  const int n = net.num_buses();
  const ComplexSparse Y = admittance_matrix(net);
  const ComplexSparse Yr = Y.transpose();  // rows of Y as columns
  InjectionMatrices out;
  out.n = n;
  for (int k = 0; k < n; ++k) {
    // Phi_k = e_k e_k' Y
    std::vector<Eigen::Triplet<C>> row;
    for (ComplexSparse::InnerIterator it(Yr, k); it; ++it) row.emplace_back(k, static_cast<int>(it.row()), it.value());
    ComplexSparse phi(n, n);
    phi.setFromTriplets(row.begin(), row.end());
    out.P.push_back(hermitian_real_form(phi));
    out.Q.push_back(hermitian_real_form(C(0.0, 1.0) * phi));
    RealSparse M(2 * n, 2 * n);
    std::vector<Eigen::Triplet<double>> m = {{k, k, 1.0}, {k + n, k + n, 1.0}};
    M.setFromTriplets(m.begin(), m.end());
    out.M.push_back(M);
  }
  for (const Branch& br : net.branches) {
    const BranchAdmittance a = branch_admittance(br);
    auto current = [&](C ya, int ia, C yb, int ib) {
      // |ya V_a + yb V_b|^2 = V^H conj(a) a' V
      const C coef[2] = {ya, yb};
      const int idx[2] = {ia, ib};
      std::vector<Eigen::Triplet<C>> t;
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) t.emplace_back(idx[p], idx[q], std::conj(coef[p]) * coef[q]);
      ComplexSparse H(n, n);
      H.setFromTriplets(t.begin(), t.end());
      return hermitian_real_form(H);
    };
    out.flow_from.push_back(current(a.yff, br.from, a.yft, br.to));
    out.flow_to.push_back(current(a.ytf, br.from, a.ytt, br.to));
  }
  return out;
}

double quadratic_form(const RealSparse& Q, const Eigen::VectorXd& x) {
  return x.dot(Q * x);
}

Eigen::VectorXd stack_voltage(const Eigen::VectorXcd& V) {
  Eigen::VectorXd x(2 * V.size());
  x << V.real(), V.imag();
  return x;
}

Eigen::VectorXcd unstack_voltage(const Eigen::VectorXd& x) {
  require_dim(x.size() % 2 == 0, "stacked voltage must have even length");
  const Eigen::Index n = x.size() / 2;
  Eigen::VectorXcd V(n);
  for (Eigen::Index k = 0; k < n; ++k) V(k) = {x(k), x(k + n)};
  return V;
}

}  // namespace aropt::acopf
