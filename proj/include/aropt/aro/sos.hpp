#pragma once

#include <map>
#include <span>
#include <vector>

#include "aropt/conic/program.hpp"
#include "aropt/poly/polynomial.hpp"
#include "aropt/uncertainty/sets.hpp"

namespace aropt::aro {

struct GramBlock {
  int start = 0;  // svec slice in the program
  std::vector<poly::Monomial> basis;
  poly::Polynomial weight;  // generator multiplied by the SOS

  int order() const { return static_cast<int>(basis.size()); }
};

struct FreeMultiplier {
  int start = 0;  // first coefficient variable
  std::vector<poly::Monomial> monomials;
  poly::Polynomial weight;
};

// Polynomial identities "lhs == sum of multipliers" whose coefficients are
// affine in the variables of a standard-form conic program. Each identity
// becomes one equality row per monomial, in graded lexicographic order.
class SosProgram {
 public:
  conic::ProgramBuilder& builder() { return pb_; }

  int add_identity();
  int num_identities() const { return static_cast<int>(ids_.size()); }

  // lhs += p
  void add_constant(int id, const poly::Polynomial& p);
  // lhs += coef * var * m
  void add_variable_term(int id, const poly::Monomial& m, int var, double coef);
  // rhs += sigma * g, sigma = b' S b with S PSD over the basis b.
  GramBlock add_sos(int id, const poly::Polynomial& g, std::vector<poly::Monomial> basis);
  // rhs += q * h with q free over the given monomials.
  FreeMultiplier add_free_multiplier(int id, const poly::Polynomial& h, std::vector<poly::Monomial> monomials);

  conic::ConicProgram build() const;
  // Number of monomial rows of one identity.
  int rows_of(int id) const { return static_cast<int>(ids_.at(id).size()); }

  // Largest |lhs - rhs| coefficient at a primal point.
  double identity_residual(int id, const Eigen::VectorXd& x) const;

  static Eigen::MatrixXd gram(const GramBlock& g, const Eigen::VectorXd& x);

 private:
  struct Row {
    double constant = 0.0;
    std::vector<std::pair<int, double>> terms;
  };
  using Identity = std::map<poly::Monomial, Row>;
  conic::ProgramBuilder pb_;
  std::vector<Identity> ids_;
};

struct PutinarMultipliers {
  std::vector<GramBlock> sos;       // sigma_0 first, then one per inequality
  std::vector<FreeMultiplier> free;  // one per equality
};

// Adds sigma_0 + sum_k sigma_k g_k + sum_j q_j h_j to the right-hand side of
// the identity, truncated at degree 2 * level in the indeterminates vars.
// sigma0_degree < 0 means 2 * level. Throws ModelError unless the set holds a
// ball or box constraint on vars.
PutinarMultipliers putinar_counterpart(SosProgram& sp, int id, const uncertainty::SemialgebraicSet& set,
                                       std::span<const int> vars, int level,
                                       const poly::PolynomialVector& equalities = {}, int sigma0_degree = -1,
                                       bool require_compact = true);

// lhs += h where h is affine in the parameters params; the parameter
// params[i] is the program variable prog_vars[i]. Throws DegreeError when h
// is nonlinear in the parameters.
void add_parametric(SosProgram& sp, int id, const poly::Polynomial& h, std::span<const int> params,
                    std::span<const int> prog_vars);

}  // namespace aropt::aro
