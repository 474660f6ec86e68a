#include "aropt/conic/program.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "aropt/error.hpp"

namespace aropt::conic {

const char* cone_kind_name(ConeKind kind) {
  switch (kind) {
    case ConeKind::NonNegative: return "nonneg";
    case ConeKind::SecondOrder: return "soc";
    case ConeKind::Psd: return "psd";
  }
  return "unknown";
}

int svec_index(int order, int i, int j) {
  if (i < j) std::swap(i, j);
  return j * order - j * (j - 1) / 2 + (i - j);
}

Eigen::VectorXd svec(const Eigen::MatrixXd& X) {
  const int n = static_cast<int>(X.rows());
  Eigen::VectorXd v(svec_size(n));
  int k = 0;
  for (int j = 0; j < n; ++j)
    for (int i = j; i < n; ++i) v(k++) = i == j ? X(i, j) : M_SQRT2 * 0.5 * (X(i, j) + X(j, i));
  return v;
}

Eigen::MatrixXd smat(std::span<const double> v, int order) {
  require_dim(static_cast<int>(v.size()) == svec_size(order), "svec length does not match the matrix order");
  Eigen::MatrixXd X(order, order);
  int k = 0;
  for (int j = 0; j < order; ++j)
    for (int i = j; i < order; ++i) {
      const double e = i == j ? v[k] : v[k] * M_SQRT1_2;
      X(i, j) = X(j, i) = e;
      ++k;
    }
  return X;
}

int psd_order(int svec_length) {
  const int n = static_cast<int>(std::lround((std::sqrt(8.0 * svec_length + 1.0) - 1.0) / 2.0));
  if (svec_size(n) != svec_length) throw DimensionError("PSD slice length is not triangular");
  return n;
}

std::vector<int> ConicProgram::free_variables() const {
  std::vector<char> covered(num_variables(), 0);
  for (const auto& c : cones) std::fill(covered.begin() + c.start, covered.begin() + c.start + c.size, 1);
  std::vector<int> out;
  for (int i = 0; i < num_variables(); ++i)
    if (!covered[i]) out.push_back(i);
  return out;
}

int ConicProgram::degree() const {
  int d = 0;
  for (const auto& c : cones) {
    switch (c.kind) {
      case ConeKind::NonNegative: d += c.size; break;
      case ConeKind::SecondOrder: d += 1; break;
      case ConeKind::Psd: d += c.order; break;
    }
  }
  return d;
}

void ConicProgram::validate() const {
  const int n = num_variables();
  if (n == 0) throw std::invalid_argument("conic program has no variables");
  require_dim(A.cols() == n, "constraint matrix column count differs from the variable count");
  require_dim(A.rows() == b.size(), "constraint matrix row count differs from the right-hand side");
  if (!b.allFinite() || !c.allFinite()) throw std::invalid_argument("non-finite program data");
  std::vector<char> covered(n, 0);
  for (const auto& cone : cones) {
    if (cone.size <= 0 || cone.start < 0 || cone.start + cone.size > n)
      throw std::invalid_argument("cone slice outside the variable range");
    if (cone.kind == ConeKind::SecondOrder && cone.size < 1) throw std::invalid_argument("empty second-order cone");
    if (cone.kind == ConeKind::Psd && svec_size(cone.order) != cone.size)
      throw std::invalid_argument("PSD slice length does not match its order");
    for (int i = cone.start; i < cone.start + cone.size; ++i) {
      if (covered[i]) throw std::invalid_argument("variable belongs to two cones");
      covered[i] = 1;
    }
  }
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseRowMatrix::InnerIterator it(A, k); it; ++it)
      if (!std::isfinite(it.value())) throw std::invalid_argument("non-finite constraint coefficient");
}

int ProgramBuilder::add_cone(ConeKind kind, int size, int order) {
  if (size <= 0) throw std::invalid_argument("cone size must be positive");
  const int start = n_;
  cones_.push_back({kind, start, size, order});
  n_ += size;
  return start;
}

int ProgramBuilder::add_free(int n) {
  if (n <= 0) throw std::invalid_argument("free block size must be positive");
  const int start = n_;
  n_ += n;
  return start;
}

int ProgramBuilder::add_nonneg(int n) { return add_cone(ConeKind::NonNegative, n, 0); }
int ProgramBuilder::add_soc(int n) { return add_cone(ConeKind::SecondOrder, n, 0); }
int ProgramBuilder::add_psd(int order) { return add_cone(ConeKind::Psd, svec_size(order), order); }

int ProgramBuilder::add_row(double rhs) {
  rhs_.push_back(rhs);
  return static_cast<int>(rhs_.size()) - 1;
}

void ProgramBuilder::add_coefficient(int row, int var, double coef) {
  if (row < 0 || row >= static_cast<int>(rhs_.size()) || var < 0 || var >= n_)
    throw std::out_of_range("coefficient outside the program");
  if (coef != 0.0) entries_.emplace_back(row, var, coef);
}

void ProgramBuilder::add_psd_coefficient(int row, int psd_start, int order, int i, int j, double coef) {
  add_coefficient(row, psd_start + svec_index(order, i, j), i == j ? coef : M_SQRT2 * coef);
}

void ProgramBuilder::add_cost(int var, double coef) {
  if (var < 0 || var >= n_) throw std::out_of_range("cost outside the program");
  cost_.emplace_back(var, coef);
}

void ProgramBuilder::add_psd_cost(int psd_start, int order, int i, int j, double coef) {
  add_cost(psd_start + svec_index(order, i, j), i == j ? coef : M_SQRT2 * coef);
}

ConicProgram ProgramBuilder::build() const {
  ConicProgram p;
  p.A.resize(static_cast<int>(rhs_.size()), n_);
  p.A.setFromTriplets(entries_.begin(), entries_.end());
  p.A.makeCompressed();
  p.b = Eigen::Map<const Eigen::VectorXd>(rhs_.data(), static_cast<Eigen::Index>(rhs_.size()));
  p.c = Eigen::VectorXd::Zero(n_);
  for (auto [v, w] : cost_) p.c(v) += w;
  p.objective_offset = offset_;
  p.cones = cones_;
  p.validate();
  return p;
}

double cone_margin(const std::vector<ConeBlock>& cones, const Eigen::VectorXd& x) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& c : cones) {
    const auto seg = x.segment(c.start, c.size);
    switch (c.kind) {
      case ConeKind::NonNegative: m = std::min(m, seg.minCoeff()); break;
      case ConeKind::SecondOrder:
        m = std::min(m, seg(0) - (c.size > 1 ? seg.tail(c.size - 1).norm() : 0.0));
        break;
      case ConeKind::Psd: {
        Eigen::MatrixXd X = smat(std::span<const double>(seg.data(), c.size), c.order);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(X, Eigen::EigenvaluesOnly);
        m = std::min(m, es.eigenvalues()(0));
        break;
      }
    }
  }
  return m;
}

Residuals residuals(const ConicProgram& p, const Eigen::VectorXd& x) {
  require_dim(x.size() == p.num_variables(), "candidate point dimension differs from the program");
  Residuals r;
  r.max_equality_violation = p.num_rows() > 0 ? (p.A * x - p.b).cwiseAbs().maxCoeff() : 0.0;
  r.min_cone_margin = p.cones.empty() ? 0.0 : cone_margin(p.cones, x);
  return r;
}

}  // namespace aropt::conic
