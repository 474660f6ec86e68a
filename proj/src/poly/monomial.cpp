#include "aropt/poly/monomial.hpp"

#include <algorithm>

#include "aropt/error.hpp"

namespace aropt::poly {

Monomial::Monomial(std::vector<int> vars) : vars_(std::move(vars)) {
  std::sort(vars_.begin(), vars_.end());
  if (!vars_.empty() && vars_.front() < 0) throw std::invalid_argument("negative variable index in monomial");
}

Monomial::Monomial(std::initializer_list<int> vars) : Monomial(std::vector<int>(vars)) {}

Monomial Monomial::from_exponents(std::span<const int> exponents, int base) {
  std::vector<int> vars;
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    if (exponents[i] < 0) throw std::invalid_argument("negative exponent");
    vars.insert(vars.end(), exponents[i], base + static_cast<int>(i));
  }
  Monomial m;
  m.vars_ = std::move(vars);
  return m;
}

int Monomial::exponent(int var) const {
  auto [lo, hi] = std::equal_range(vars_.begin(), vars_.end(), var);
  return static_cast<int>(hi - lo);
}

int Monomial::degree_in(int begin, int end) const {
  auto lo = std::lower_bound(vars_.begin(), vars_.end(), begin);
  auto hi = std::lower_bound(vars_.begin(), vars_.end(), end);
  return static_cast<int>(hi - lo);
}

double Monomial::eval(std::span<const double> point) const {
  if (!vars_.empty() && vars_.back() >= static_cast<int>(point.size()))
    throw DimensionError("evaluation point has " + std::to_string(point.size()) +
                         " entries but the monomial uses variable " + std::to_string(vars_.back()));
  double v = 1.0;
  for (int var : vars_) v *= point[var];
  return v;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.vars_.resize(a.vars_.size() + b.vars_.size());
  std::merge(a.vars_.begin(), a.vars_.end(), b.vars_.begin(), b.vars_.end(), out.vars_.begin());
  return out;
}

Monomial Monomial::without_one(int var) const {
  auto it = std::lower_bound(vars_.begin(), vars_.end(), var);
  if (it == vars_.end() || *it != var) throw std::invalid_argument("monomial does not contain the variable");
  Monomial out;
  out.vars_.reserve(vars_.size() - 1);
  out.vars_.insert(out.vars_.end(), vars_.begin(), it);
  out.vars_.insert(out.vars_.end(), it + 1, vars_.end());
  return out;
}

bool operator<(const Monomial& a, const Monomial& b) {
  if (a.vars_.size() != b.vars_.size()) return a.vars_.size() < b.vars_.size();
  return a.vars_ < b.vars_;
}

std::size_t Monomial::hash() const {
  std::size_t h = 1469598103934665603ULL;
  for (int v : vars_) {
    h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

namespace {

void extend(std::span<const int> vars, int start, int remaining, std::vector<int>& current,
            std::vector<Monomial>& out, int exact) {
  if (static_cast<int>(current.size()) == exact) {
    out.emplace_back(current);
    return;
  }
  for (int i = start; i < static_cast<int>(vars.size()); ++i) {
    current.push_back(vars[i]);
    extend(vars, i, remaining - 1, current, out, exact);
    current.pop_back();
  }
}

}  // namespace

std::vector<Monomial> monomials_up_to(std::span<const int> vars, int max_degree) {
  std::vector<int> sorted(vars.begin(), vars.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("duplicate variables in monomial basis");
  std::vector<Monomial> out;
  std::vector<int> current;
  for (int d = 0; d <= max_degree; ++d) extend(sorted, 0, d, current, out, d);
  return out;
}

std::int64_t monomial_count(int n, int d) {
  // binomial(n + d, d)
  std::int64_t c = 1;
  for (int i = 1; i <= d; ++i) c = c * (n + i) / i;
  return c;
}

}  // namespace aropt::poly
