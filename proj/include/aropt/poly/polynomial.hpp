#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "aropt/poly/monomial.hpp"
#include "aropt/poly/variables.hpp"

namespace aropt::poly {

class Polynomial {
 public:
  using TermMap = std::map<Monomial, double>;

  static constexpr double kDropTolerance = 1e-14;

  Polynomial() = default;
  Polynomial(double constant);  // NOLINT(google-explicit-constructor)
  Polynomial(const Monomial& m, double coef);

  static Polynomial variable(int var, double coef = 1.0) { return {Monomial::variable(var), coef}; }

  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  int degree() const;
  int degree_in(int begin, int end) const;
  double coefficient(const Monomial& m) const;
  double constant_term() const { return coefficient(Monomial()); }
  int max_variable() const;
  bool depends_on(int begin, int end) const { return degree_in(begin, end) > 0; }

  void add_term(const Monomial& m, double coef);

  double eval(std::span<const double> point) const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(double s);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator-(Polynomial a) { return a *= -1.0; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

  Polynomial derivative(int var) const;
  Polynomial pow(int k) const;

  // Replaces every variable in [begin, end) by the matching entry of values.
  Polynomial fix_variables(int begin, std::span<const double> values) const;

  // Largest absolute coefficient difference against another polynomial.
  double max_abs_diff(const Polynomial& other) const;

  std::string to_string(const VariableSpace& space) const;
  static Polynomial parse(const std::string& text, const VariableSpace& space);

 private:
  void prune();
  TermMap terms_;
};

using PolynomialVector = std::vector<Polynomial>;

double eval(const Polynomial& p, std::span<const double> point);

// Maximum of degree over entries.
int degree(const PolynomialVector& v);

}  // namespace aropt::poly
