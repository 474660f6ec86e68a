#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace aropt::poly {

// A monomial stored as the sorted multiset of its global variable indices,
// e.g. x1^2*x3 -> {1, 1, 3}. Ordering is graded lexicographic.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<int> vars);
  Monomial(std::initializer_list<int> vars);

  static Monomial variable(int var) { return Monomial({var}); }
  // Builds x^e from a dense exponent vector over variables base .. base+size-1.
  static Monomial from_exponents(std::span<const int> exponents, int base = 0);

  int degree() const { return static_cast<int>(vars_.size()); }
  bool is_constant() const { return vars_.empty(); }
  const std::vector<int>& vars() const { return vars_; }
  int exponent(int var) const;
  int max_variable() const { return vars_.empty() ? -1 : vars_.back(); }

  // Total degree restricted to variables in [begin, end).
  int degree_in(int begin, int end) const;

  double eval(std::span<const double> point) const;

  // Product of monomials.
  friend Monomial operator*(const Monomial& a, const Monomial& b);

  // Divides out one occurrence of var; the monomial must contain it.
  Monomial without_one(int var) const;

  friend bool operator==(const Monomial& a, const Monomial& b) { return a.vars_ == b.vars_; }
  friend bool operator<(const Monomial& a, const Monomial& b);

  std::size_t hash() const;

 private:
  std::vector<int> vars_;
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const { return m.hash(); }
};

// All monomials in the given variables with total degree <= max_degree, in
// graded lexicographic order.
std::vector<Monomial> monomials_up_to(std::span<const int> vars, int max_degree);

// Number of monomials in n variables of degree <= d.
std::int64_t monomial_count(int n, int d);

}  // namespace aropt::poly
