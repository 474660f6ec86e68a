#include "aropt/conic/lmi.hpp"

#include <cmath>

#include "aropt/error.hpp"

namespace aropt::conic {

double AffineExpr::eval(const Eigen::VectorXd& u) const {
  double v = constant;
  for (auto [k, c] : terms) v += c * u(k);
  return v;
}

int LmiBuilder::add_variables(int n) {
  if (n <= 0) throw std::invalid_argument("variable count must be positive");
  const int start = nvars_;
  nvars_ += n;
  f_.conservativeResize(nvars_);
  f_.tail(n).setZero();
  return start;
}

void LmiBuilder::add_objective(int var, double coef) {
  if (var < 0 || var >= nvars_) throw std::out_of_range("objective variable out of range");
  f_(var) += coef;
}

void LmiBuilder::add_nonneg(const AffineExpr& e) { slices_.push_back({ConeKind::NonNegative, 0, {e}}); }

void LmiBuilder::add_equality(const AffineExpr& e) { equalities_.push_back(e); }

void LmiBuilder::add_soc(const std::vector<AffineExpr>& e) {
  if (e.empty()) throw std::invalid_argument("empty second-order cone constraint");
  slices_.push_back({ConeKind::SecondOrder, 0, e});
}

void LmiBuilder::add_lmi(int order, const std::vector<std::tuple<int, int, AffineExpr>>& lower) {
  if (order <= 0) throw std::invalid_argument("LMI order must be positive");
  Slice s{ConeKind::Psd, order, std::vector<AffineExpr>(svec_size(order))};
  for (const auto& [i, j, e] : lower) {
    if (i < 0 || j < 0 || i >= order || j >= order) throw std::out_of_range("LMI entry outside the matrix");
    AffineExpr& dst = s.entries[svec_index(order, i, j)];
    const double scale = i == j ? 1.0 : M_SQRT2;
    dst.constant += scale * e.constant;
    for (auto [k, c] : e.terms) dst.add(k, scale * c);
  }
  slices_.push_back(std::move(s));
}

ConicProgram LmiBuilder::build() const {
  // Cone slack s(u) = g0 + G u equals z = c - A'y with y = u, so the column
  // of A for each slack entry is -G(entry, :) and c holds g0. Equalities
  // become free primal columns.
  ProgramBuilder pb;
  std::vector<Eigen::Triplet<double>> trips;
  std::vector<double> cost;
  auto add_column = [&](int col, const AffineExpr& e) {
    for (auto [k, c] : e.terms) {
      if (k < 0 || k >= nvars_) throw std::out_of_range("affine expression variable out of range");
      trips.emplace_back(k, col, -c);
    }
    cost.resize(std::max<std::size_t>(cost.size(), col + 1), 0.0);
    cost[col] = e.constant;
  };
  if (!equalities_.empty()) {
    const int start = pb.add_free(static_cast<int>(equalities_.size()));
    for (std::size_t i = 0; i < equalities_.size(); ++i) add_column(start + static_cast<int>(i), equalities_[i]);
  }
  for (const auto& s : slices_) {
    int start = 0;
    switch (s.kind) {
      case ConeKind::NonNegative: start = pb.add_nonneg(static_cast<int>(s.entries.size())); break;
      case ConeKind::SecondOrder: start = pb.add_soc(static_cast<int>(s.entries.size())); break;
      case ConeKind::Psd: start = pb.add_psd(s.order); break;
    }
    for (std::size_t i = 0; i < s.entries.size(); ++i) add_column(start + static_cast<int>(i), s.entries[i]);
  }
  ConicProgram p = pb.build();
  p.A.resize(nvars_, pb.num_variables());
  p.A.setFromTriplets(trips.begin(), trips.end());
  p.A.makeCompressed();
  p.b = -f_;
  p.c = Eigen::VectorXd::Zero(pb.num_variables());
  for (std::size_t i = 0; i < cost.size(); ++i) p.c(static_cast<Eigen::Index>(i)) = cost[i];
  p.objective_offset = -objective_constant_;
  p.validate();
  return p;
}

double LmiBuilder::objective(const Eigen::VectorXd& u) const { return f_.dot(u) + objective_constant_; }

}  // namespace aropt::conic
