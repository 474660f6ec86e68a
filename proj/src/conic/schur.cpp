#include "aropt/conic/schur.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace aropt::conic {

namespace {

// (i, j) of an svec position, i >= j.
std::pair<int, int> svec_pair(int order, int k) {
  int j = 0;
  while (k >= order - j) {
    k -= order - j;
    ++j;
  }
  return {j + k, j};
}

double svec_dot(const PsdRows::Row& row, const Eigen::MatrixXd& T, const std::vector<std::pair<int, int>>& pairs) {
  double s = 0.0;
  for (std::size_t e = 0; e < row.svec_index.size(); ++e) {
    const auto [i, j] = pairs[row.svec_index[e]];
    s += row.svec_value[e] * (i == j ? T(i, j) : M_SQRT2 * T(i, j));
  }
  return s;
}

std::vector<std::pair<int, int>> svec_pairs(int order) {
  std::vector<std::pair<int, int>> out;
  out.reserve(svec_size(order));
  for (int j = 0; j < order; ++j)
    for (int i = j; i < order; ++i) out.emplace_back(i, j);
  return out;
}

}  // namespace

void PsdRows::add_entry(int local_row, int svec_idx, double value) {
  local.at(local_row).svec_index.push_back(svec_idx);
  local.at(local_row).svec_value.push_back(value);
}

void PsdRows::finalize() {
  for (auto& row : local) {
    std::vector<int> support;
    for (int k : row.svec_index) {
      auto [i, j] = svec_pair(order, k);
      support.push_back(i);
      support.push_back(j);
    }
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    row.support = support;
    row.sub = Eigen::MatrixXd::Zero(support.size(), support.size());
    for (std::size_t e = 0; e < row.svec_index.size(); ++e) {
      auto [i, j] = svec_pair(order, row.svec_index[e]);
      const int a = static_cast<int>(std::lower_bound(support.begin(), support.end(), i) - support.begin());
      const int b = static_cast<int>(std::lower_bound(support.begin(), support.end(), j) - support.begin());
      const double v = i == j ? row.svec_value[e] : row.svec_value[e] * M_SQRT1_2;
      row.sub(a, b) += v;
      if (a != b) row.sub(b, a) += v;
    }
  }
}

void psd_schur_block(const PsdRows& rows, const Eigen::MatrixXd& R, Eigen::MatrixXd& out) {
  const int nr = static_cast<int>(rows.local.size());
  const int n = rows.order;
  out.setZero(nr, nr);
  const auto pairs = svec_pairs(n);
#pragma omp parallel
  {
    Eigen::MatrixXd P, T(n, n), Rs;
#pragma omp for schedule(dynamic, 4)
    for (int q = 0; q < nr; ++q) {
      const auto& row = rows.local[q];
      const int s = static_cast<int>(row.support.size());
      if (s == 0) continue;
      if (2 * s < n) {
        Rs.resize(n, s);
        for (int k = 0; k < s; ++k) Rs.col(k) = R.col(row.support[k]);
        P.noalias() = Rs * row.sub;
        T.noalias() = P * Rs.transpose();
      } else {
        Eigen::MatrixXd Aq = Eigen::MatrixXd::Zero(n, n);
        for (int a = 0; a < s; ++a)
          for (int b = 0; b < s; ++b) Aq(row.support[a], row.support[b]) = row.sub(a, b);
        P.noalias() = R * Aq;
        T.noalias() = P * R;
      }
      for (int p = q; p < nr; ++p) out(p, q) = svec_dot(rows.local[p], T, pairs);
    }
  }
}

void psd_schur_block_reference(const PsdRows& rows, const Eigen::MatrixXd& R, Eigen::MatrixXd& out) {
  const int nr = static_cast<int>(rows.local.size());
  const int n = rows.order;
  out.setZero(nr, nr);
  for (int q = 0; q < nr; ++q) {
    Eigen::VectorXd aq = Eigen::VectorXd::Zero(svec_size(n));
    for (std::size_t e = 0; e < rows.local[q].svec_index.size(); ++e)
      aq(rows.local[q].svec_index[e]) += rows.local[q].svec_value[e];
    const Eigen::MatrixXd T = R * smat(std::span<const double>(aq.data(), aq.size()), n) * R;
    const Eigen::VectorXd t = svec(T);
    for (int p = q; p < nr; ++p) {
      double v = 0.0;
      for (std::size_t e = 0; e < rows.local[p].svec_index.size(); ++e)
        v += rows.local[p].svec_value[e] * t(rows.local[p].svec_index[e]);
      out(p, q) = v;
    }
  }
}

void SchurMatrix::init_dense(int m) {
  dense_ = true;
  m_ = m;
  D_.setZero(m, m);
}

void SchurMatrix::init_sparse(Eigen::SparseMatrix<double> lower_pattern) {
  dense_ = false;
  m_ = static_cast<int>(lower_pattern.rows());
  S_ = std::move(lower_pattern);
  S_.makeCompressed();
}

void SchurMatrix::set_zero() {
  if (dense_)
    D_.setZero();
  else
    std::fill(S_.valuePtr(), S_.valuePtr() + S_.nonZeros(), 0.0);
}

void SchurMatrix::add(int i, int j, double v) {
  if (dense_) {
    D_(i, j) += v;
    return;
  }
  const int* idx = S_.innerIndexPtr();
  const int b = S_.outerIndexPtr()[j], e = S_.outerIndexPtr()[j + 1];
  const int* pos = std::lower_bound(idx + b, idx + e, i);
  S_.valuePtr()[pos - idx] += v;
}

void SchurMatrix::add_diagonal(double v) {
  for (int i = 0; i < m_; ++i) add(i, i, v);
}

void SchurMatrix::add_scaled(const Eigen::SparseMatrix<double>& lower, double s) {
  for (int k = 0; k < lower.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(lower, k); it; ++it)
      if (it.row() >= it.col()) add(static_cast<int>(it.row()), static_cast<int>(it.col()), s * it.value());
}

double SchurMatrix::max_diagonal() const {
  if (dense_) return m_ > 0 ? D_.diagonal().maxCoeff() : 0.0;
  double d = 0.0;
  for (int k = 0; k < S_.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(S_, k); it; ++it)
      if (it.row() == it.col()) d = std::max(d, it.value());
  return d;
}

Eigen::VectorXd SchurMatrix::multiply(const Eigen::VectorXd& v) const {
  if (dense_) return D_.selfadjointView<Eigen::Lower>() * v;
  return S_.selfadjointView<Eigen::Lower>() * v;
}

SchurAssembler::SchurAssembler(const SparseRowMatrix& A, const std::vector<ConeBlock>& cones,
                               const std::vector<int>& free_vars, bool force_dense, bool force_sparse, bool parallel)
    : m_(static_cast<int>(A.rows())), parallel_(parallel), cones_(cones) {
  const Eigen::SparseMatrix<double> Ac(A);  // column-major view
  for (const auto& c : cones) {
    switch (c.kind) {
      case ConeKind::NonNegative:
        for (int j = c.start; j < c.start + c.size; ++j) {
          NonnegColumn col;
          col.var = j;
          for (Eigen::SparseMatrix<double>::InnerIterator it(Ac, j); it; ++it) {
            col.rows.push_back(static_cast<int>(it.row()));
            col.values.push_back(it.value());
          }
          nonneg_.push_back(std::move(col));
        }
        break;
      case ConeKind::SecondOrder: {
        std::map<int, int> local;
        for (int j = c.start; j < c.start + c.size; ++j)
          for (Eigen::SparseMatrix<double>::InnerIterator it(Ac, j); it; ++it) local[static_cast<int>(it.row())] = 0;
        SocRows s;
        for (auto& [r, l] : local) {
          l = static_cast<int>(s.rows.size());
          s.rows.push_back(r);
        }
        std::vector<Eigen::Triplet<double>> t;
        for (int j = c.start; j < c.start + c.size; ++j)
          for (Eigen::SparseMatrix<double>::InnerIterator it(Ac, j); it; ++it)
            t.emplace_back(local[static_cast<int>(it.row())], j - c.start, it.value());
        s.local.resize(static_cast<int>(s.rows.size()), c.size);
        s.local.setFromTriplets(t.begin(), t.end());
        Eigen::SparseMatrix<double> Jl = s.local;
        for (int j = 1; j < c.size; ++j) Jl.col(j) *= -1.0;
        s.ajat = Eigen::MatrixXd(Jl * Eigen::SparseMatrix<double>(s.local.transpose()));
        soc_.push_back(std::move(s));
        break;
      }
      case ConeKind::Psd: {
        std::map<int, int> local;
        for (int j = c.start; j < c.start + c.size; ++j)
          for (Eigen::SparseMatrix<double>::InnerIterator it(Ac, j); it; ++it) local[static_cast<int>(it.row())] = 0;
        PsdRows p;
        p.order = c.order;
        for (auto& [r, l] : local) {
          l = static_cast<int>(p.rows.size());
          p.rows.push_back(r);
        }
        p.local.resize(p.rows.size());
        for (int j = c.start; j < c.start + c.size; ++j)
          for (Eigen::SparseMatrix<double>::InnerIterator it(Ac, j); it; ++it)
            p.add_entry(local[static_cast<int>(it.row())], j - c.start, it.value());
        p.finalize();
        psd_.push_back(std::move(p));
        break;
      }
    }
  }

  if (!free_vars.empty()) {
    Eigen::SparseMatrix<double> Af(m_, static_cast<int>(free_vars.size()));
    std::vector<Eigen::Triplet<double>> t;
    for (std::size_t k = 0; k < free_vars.size(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(Ac, free_vars[k]); it; ++it)
        t.emplace_back(static_cast<int>(it.row()), static_cast<int>(k), it.value());
    Af.setFromTriplets(t.begin(), t.end());
    free_gram_ = Eigen::SparseMatrix<double>(Af * Eigen::SparseMatrix<double>(Af.transpose())).triangularView<Eigen::Lower>();
  } else {
    free_gram_.resize(m_, m_);
  }

  // Lower pattern as a bitmap over columns.
  std::vector<std::vector<int>> cols(m_);
  for (int i = 0; i < m_; ++i) cols[i].push_back(i);
  auto clique = [&](const std::vector<int>& rows) {
    for (std::size_t q = 0; q < rows.size(); ++q)
      for (std::size_t p = q; p < rows.size(); ++p) cols[rows[q]].push_back(rows[p]);
  };
  for (const auto& c : nonneg_) {
    std::vector<int> r = c.rows;
    std::sort(r.begin(), r.end());
    clique(r);
  }
  for (const auto& s : soc_) clique(s.rows);
  for (const auto& p : psd_) clique(p.rows);
  for (int k = 0; k < free_gram_.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(free_gram_, k); it; ++it)
      cols[it.col()].push_back(static_cast<int>(it.row()));
  long long nnz = 0;
  for (auto& c : cols) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    nnz += static_cast<long long>(c.size());
  }
  const double full = 0.5 * static_cast<double>(m_) * (m_ + 1);
  density_ = m_ > 0 ? nnz / full : 1.0;
  dense_ = force_dense || (!force_sparse && (m_ <= 1500 || density_ > 0.35));
  if (!dense_) {
    pattern_.resize(m_, m_);
    pattern_.reserve(Eigen::VectorXi::Map(
        std::vector<int>([&] {
          std::vector<int> s;
          for (auto& c : cols) s.push_back(static_cast<int>(c.size()));
          return s;
        }()).data(),
        m_));
    for (int j = 0; j < m_; ++j)
      for (int i : cols[j]) pattern_.insert(i, j) = 0.0;
    pattern_.makeCompressed();
  }
}

void SchurAssembler::assemble(const NtScaling& scaling, SchurMatrix& M) const {
  M.set_zero();
  const Eigen::VectorXd& h = scaling.nonneg_h();
  for (const auto& c : nonneg_) {
    const double hv = h(c.var);
    for (std::size_t q = 0; q < c.rows.size(); ++q)
      for (std::size_t p = 0; p < c.rows.size(); ++p) {
        const int i = c.rows[p], j = c.rows[q];
        if (i >= j) M.add(i, j, hv * c.values[p] * c.values[q]);
      }
  }
  for (std::size_t k = 0; k < soc_.size(); ++k) {
    const auto& s = soc_[k];
    const auto& sc = scaling.soc(static_cast<int>(k));
    const Eigen::VectorXd u = s.local * sc.wbar;
    const double b2 = sc.beta * sc.beta;
    for (std::size_t q = 0; q < s.rows.size(); ++q)
      for (std::size_t p = q; p < s.rows.size(); ++p)
        M.add(s.rows[p], s.rows[q], b2 * (2.0 * u(p) * u(q) - s.ajat(p, q)));
  }
  Eigen::MatrixXd local;
  for (std::size_t k = 0; k < psd_.size(); ++k) {
    const auto& p = psd_[k];
    const Eigen::MatrixXd& R = scaling.psd(static_cast<int>(k)).R;
#ifdef _OPENMP
    const int threads = omp_get_max_threads();
    if (!parallel_) omp_set_num_threads(1);
#endif
    psd_schur_block(p, R, local);
#ifdef _OPENMP
    if (!parallel_) omp_set_num_threads(threads);
#endif
    const int nr = static_cast<int>(p.rows.size());
    for (int q = 0; q < nr; ++q)
      for (int r = q; r < nr; ++r) M.add(p.rows[r], p.rows[q], local(r, q));
  }
}

}  // namespace aropt::conic
