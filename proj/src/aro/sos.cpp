#include "aropt/aro/sos.hpp"

#include <algorithm>
#include <cmath>

#include "aropt/aro/problem.hpp"

namespace aropt::aro {

int SosProgram::add_identity() {
  ids_.emplace_back();
  return static_cast<int>(ids_.size()) - 1;
}

void SosProgram::add_constant(int id, const poly::Polynomial& p) {
  Identity& I = ids_.at(id);
  for (const auto& [m, c] : p.terms()) I[m].constant += c;
}

void SosProgram::add_variable_term(int id, const poly::Monomial& m, int var, double coef) {
  if (coef != 0.0) ids_.at(id)[m].terms.emplace_back(var, coef);
}

GramBlock SosProgram::add_sos(int id, const poly::Polynomial& g, std::vector<poly::Monomial> basis) {
  Identity& I = ids_.at(id);
  GramBlock block;
  block.basis = std::move(basis);
  block.weight = g;
  const int k = block.order();
  if (k == 0) throw DimensionError("SOS multiplier with an empty basis");
  block.start = pb_.add_psd(k);
  const double r2 = std::sqrt(2.0);
  for (int j = 0; j < k; ++j)
    for (int i = j; i < k; ++i) {
      const poly::Monomial bij = block.basis[i] * block.basis[j];
      const int var = block.start + conic::svec_index(k, i, j);
      const double scale = i == j ? 1.0 : r2;
      for (const auto& [t, gt] : g.terms()) I[bij * t].terms.emplace_back(var, -scale * gt);
    }
  return block;
}

FreeMultiplier SosProgram::add_free_multiplier(int id, const poly::Polynomial& h, std::vector<poly::Monomial> monomials) {
  Identity& I = ids_.at(id);
  FreeMultiplier q;
  q.monomials = std::move(monomials);
  q.weight = h;
  const int n = static_cast<int>(q.monomials.size());
  if (n == 0) throw DimensionError("free multiplier with no monomials");
  q.start = pb_.add_free(n);
  for (int a = 0; a < n; ++a)
    for (const auto& [t, ht] : h.terms()) I[q.monomials[a] * t].terms.emplace_back(q.start + a, -ht);
  return q;
}

conic::ConicProgram SosProgram::build() const {
  conic::ProgramBuilder pb = pb_;
  for (const Identity& I : ids_)
    for (const auto& [m, row] : I) {
      const int r = pb.add_row(-row.constant);
      for (const auto& [v, c] : row.terms) pb.add_coefficient(r, v, c);
    }
  return pb.build();
}

double SosProgram::identity_residual(int id, const Eigen::VectorXd& x) const {
  double worst = 0.0;
  for (const auto& [m, row] : ids_.at(id)) {
    double v = row.constant;
    for (const auto& [var, c] : row.terms) v += c * x(var);
    worst = std::max(worst, std::abs(v));
  }
  return worst;
}

Eigen::MatrixXd SosProgram::gram(const GramBlock& g, const Eigen::VectorXd& x) {
  const int k = g.order();
  return conic::smat(std::span<const double>(x.data() + g.start, conic::svec_size(k)), k);
}

PutinarMultipliers putinar_counterpart(SosProgram& sp, int id, const uncertainty::SemialgebraicSet& set,
                                       std::span<const int> vars, int level, const poly::PolynomialVector& equalities,
                                       int sigma0_degree, bool require_compact) {
  if (level < 1) throw DimensionError("Putinar level must be at least 1");
  if (require_compact && !set.has_ball_or_box(vars))
    throw ModelError("Putinar certificate needs a ball or box constraint on the indeterminates");
  const int top = 2 * level;
  const int s0 = sigma0_degree < 0 ? top : std::min(sigma0_degree, top);
  PutinarMultipliers out;
  out.sos.push_back(sp.add_sos(id, poly::Polynomial(1.0), poly::monomials_up_to(vars, s0 / 2)));
  for (const auto& g : set.inequalities) {
    const int dk = (top - g.degree()) / 2;
    if (g.degree() > top || dk < 0) continue;
    out.sos.push_back(sp.add_sos(id, g, poly::monomials_up_to(vars, dk)));
  }
  for (const auto& h : equalities) {
    const int dk = top - h.degree();
    if (dk < 0) continue;
    out.free.push_back(sp.add_free_multiplier(id, h, poly::monomials_up_to(vars, dk)));
  }
  return out;
}

void add_parametric(SosProgram& sp, int id, const poly::Polynomial& h, std::span<const int> params,
                    std::span<const int> prog_vars) {
  require_dim(params.size() == prog_vars.size(), "parameter and program variable lists differ in length");
  for (const auto& [m, c] : h.terms()) {
    int found = -1, count = 0;
    for (int v : m.vars()) {
      const auto it = std::find(params.begin(), params.end(), v);
      if (it != params.end()) {
        found = static_cast<int>(it - params.begin());
        ++count;
      }
    }
    if (count == 0) {
      sp.add_constant(id, poly::Polynomial(m, c));
    } else if (count == 1) {
      sp.add_variable_term(id, m.without_one(params[found]), prog_vars[found], c);
    } else {
      throw DegreeError("polynomial is nonlinear in the certificate parameters");
    }
  }
}

}  // namespace aropt::aro
