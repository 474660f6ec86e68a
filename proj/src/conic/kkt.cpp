#include "kkt.hpp"

#include <algorithm>
#include <cmath>

namespace aropt::conic::detail {

namespace {

constexpr int kRestart = 40;
constexpr int kMaxIterations = 240;
constexpr double kTolerance = 1e-13;
constexpr double kFreeWeight = 1e0;  // scale of A_f A_f' / delta against M

}  // namespace

KktSolver::KktSolver(const SparseRowMatrix& A, const std::vector<ConeBlock>& cones, std::vector<int> free_vars,
                     bool force_dense, bool force_sparse, bool parallel)
    : A_(A),
      free_(std::move(free_vars)),
      m_(static_cast<int>(A.rows())),
      n_(static_cast<int>(A.cols())),
      assembler_(A, cones, free_, force_dense, force_sparse, parallel) {
  is_free_.assign(n_, 0);
  for (int v : free_) is_free_[v] = 1;
  Af_.resize(m_, static_cast<int>(free_.size()));
  if (!free_.empty()) {
    const Eigen::SparseMatrix<double> Ac(A);
    std::vector<Eigen::Triplet<double>> t;
    for (std::size_t k = 0; k < free_.size(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(Ac, free_[k]); it; ++it)
        t.emplace_back(static_cast<int>(it.row()), static_cast<int>(k), it.value());
    Af_.setFromTriplets(t.begin(), t.end());
  }
  if (assembler_.dense()) {
    M_.init_dense(m_);
  } else {
    M_.init_sparse(assembler_.pattern());
    sparse_ = std::make_unique<Eigen::CholmodSupernodalLLT<Eigen::SparseMatrix<double>, Eigen::Lower>>();
    sparse_->cholmod().print = 0;
  }
}

bool KktSolver::factor(const NtScaling& scaling) {
  double eps_scale = 1e-12;
  for (int attempt = 0; attempt < 8; ++attempt, eps_scale *= 100.0) {
    assembler_.assemble(scaling, M_);
    const double maxdiag = std::max(1.0, M_.max_diagonal());
    if (!free_.empty()) {
      double gram = 0.0;
      const auto& F = assembler_.free_gram();
      for (int k = 0; k < F.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(F, k); it; ++it)
          if (it.row() == it.col()) gram = std::max(gram, it.value());
      delta_ = std::max(gram, 1e-300) / (kFreeWeight * maxdiag);
      M_.add_scaled(F, 1.0 / delta_);
    }
    M_.add_diagonal(eps_scale * maxdiag);
    if (m_ == 0) return true;
    if (M_.dense()) {
      Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>, Eigen::Lower> llt(M_.dense_matrix());
      if (llt.info() == Eigen::Success) return true;
    } else {
      if (!analyzed_) {
        sparse_->analyzePattern(M_.sparse_matrix());
        analyzed_ = true;
      }
      sparse_->factorize(M_.sparse_matrix());
      if (sparse_->info() == Eigen::Success) return true;
    }
  }
  return false;
}

void KktSolver::apply_K(const NtScaling& scaling, const Eigen::VectorXd& v, Eigen::VectorXd& out) const {
  const int nf = static_cast<int>(free_.size());
  Eigen::VectorXd t = A_.transpose() * v.head(m_);
  Eigen::VectorXd tf(nf);
  for (int k = 0; k < nf; ++k) {
    tf(k) = t(free_[k]);
    t(free_[k]) = 0.0;
  }
  Eigen::VectorXd s;
  scaling.apply_H(t, s);
  for (int k = 0; k < nf; ++k) s(free_[k]) = v(m_ + k);
  out.resize(m_ + nf);
  out.head(m_) = A_ * s;
  out.tail(nf) = tf;
}

void KktSolver::apply_P(const Eigen::VectorXd& v, Eigen::VectorXd& out) const {
  const int nf = static_cast<int>(free_.size());
  Eigen::VectorXd rhs = v.head(m_);
  if (nf > 0) rhs += Af_ * v.tail(nf) / delta_;
  if (M_.dense()) {
    const auto& L = M_.dense_matrix();
    L.triangularView<Eigen::Lower>().solveInPlace(rhs);
    L.triangularView<Eigen::Lower>().transpose().solveInPlace(rhs);
  } else if (m_ > 0) {
    rhs = sparse_->solve(rhs);
  }
  out.resize(m_ + nf);
  out.head(m_) = rhs;
  if (nf > 0) out.tail(nf) = (Af_.transpose() * rhs - v.tail(nf)) / delta_;
}

double KktSolver::solve(const NtScaling& scaling, const Eigen::VectorXd& ry, const Eigen::VectorXd& rf,
                        Eigen::VectorXd& dy, Eigen::VectorXd& dxf) const {
  const int nf = static_cast<int>(free_.size());
  const int N = m_ + nf;
  Eigen::VectorXd r(N);
  r << ry, rf;
  const double bnorm = r.norm();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
  double rel = 0.0;
  if (bnorm > 0.0 && N > 0) {
    apply_P(r, x);
    Eigen::VectorXd Kx, w, z;
    Eigen::MatrixXd V(N, kRestart + 1), Hm = Eigen::MatrixXd::Zero(kRestart + 1, kRestart);
    Eigen::VectorXd cs(kRestart), sn(kRestart), g(kRestart + 1);
    int total = 0;
    double last = std::numeric_limits<double>::infinity();
    while (true) {
      apply_K(scaling, x, Kx);
      Eigen::VectorXd res = r - Kx;
      const double beta = res.norm();
      rel = beta / bnorm;
      if (rel <= kTolerance || total >= kMaxIterations || beta > 0.5 * last) break;
      last = beta;
      V.col(0) = res / beta;
      g.setZero();
      g(0) = beta;
      Hm.setZero();
      int k = 0;
      for (; k < kRestart && total < kMaxIterations; ++k, ++total) {
        apply_P(V.col(k), z);
        apply_K(scaling, z, w);
        for (int i = 0; i <= k; ++i) {
          Hm(i, k) = V.col(i).dot(w);
          w -= Hm(i, k) * V.col(i);
        }
        Hm(k + 1, k) = w.norm();
        if (Hm(k + 1, k) > 0.0) V.col(k + 1) = w / Hm(k + 1, k);
        for (int i = 0; i < k; ++i) {
          const double a = cs(i) * Hm(i, k) + sn(i) * Hm(i + 1, k);
          Hm(i + 1, k) = -sn(i) * Hm(i, k) + cs(i) * Hm(i + 1, k);
          Hm(i, k) = a;
        }
        const double d = std::hypot(Hm(k, k), Hm(k + 1, k));
        cs(k) = d > 0.0 ? Hm(k, k) / d : 1.0;
        sn(k) = d > 0.0 ? Hm(k + 1, k) / d : 0.0;
        Hm(k, k) = d;
        Hm(k + 1, k) = 0.0;
        g(k + 1) = -sn(k) * g(k);
        g(k) = cs(k) * g(k);
        if (std::abs(g(k + 1)) <= kTolerance * bnorm || Hm(k, k) == 0.0) {
          ++k;
          ++total;
          break;
        }
      }
      if (k == 0) break;
      Eigen::VectorXd c = Hm.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
      Eigen::VectorXd step;
      apply_P(V.leftCols(k) * c, step);
      x += step;
    }
  }
  dy = x.head(m_);
  dxf = x.tail(nf);
  return rel;
}

}  // namespace aropt::conic::detail
