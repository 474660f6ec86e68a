#include "aropt/poly/polynomial.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <unordered_map>

#include "aropt/error.hpp"

namespace aropt::poly {

Polynomial::Polynomial(double constant) {
  if (std::abs(constant) >= kDropTolerance) terms_.emplace(Monomial(), constant);
}

Polynomial::Polynomial(const Monomial& m, double coef) {
  if (std::abs(coef) >= kDropTolerance) terms_.emplace(m, coef);
}

int Polynomial::degree() const {
  // Graded order: the last term has the largest degree.
  return terms_.empty() ? 0 : terms_.rbegin()->first.degree();
}

int Polynomial::degree_in(int begin, int end) const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree_in(begin, end));
  return d;
}

double Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

int Polynomial::max_variable() const {
  int v = -1;
  for (const auto& [m, c] : terms_) v = std::max(v, m.max_variable());
  return v;
}

void Polynomial::add_term(const Monomial& m, double coef) {
  if (coef == 0.0) return;
  auto [it, inserted] = terms_.emplace(m, coef);
  if (!inserted) it->second += coef;
  if (std::abs(it->second) < kDropTolerance) terms_.erase(it);
}

double Polynomial::eval(std::span<const double> point) const {
  double v = 0.0;
  for (const auto& [m, c] : terms_) v += c * m.eval(point);
  return v;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  for (auto& [m, c] : terms_) c *= s;
  prune();
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  std::unordered_map<Monomial, double, MonomialHash> acc;
  acc.reserve(a.size() * b.size());
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) acc[ma * mb] += ca * cb;
  Polynomial out;
  for (auto& [m, c] : acc)
    if (std::abs(c) >= Polynomial::kDropTolerance) out.terms_.emplace(m, c);
  return out;
}

Polynomial Polynomial::derivative(int var) const {
  Polynomial out;
  for (const auto& [m, c] : terms_) {
    int e = m.exponent(var);
    if (e > 0) out.add_term(m.without_one(var), c * e);
  }
  return out;
}

Polynomial Polynomial::pow(int k) const {
  if (k < 0) throw std::invalid_argument("negative polynomial power");
  Polynomial result(1.0);
  Polynomial base = *this;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return result;
}

Polynomial Polynomial::fix_variables(int begin, std::span<const double> values) const {
  const int end = begin + static_cast<int>(values.size());
  Polynomial out;
  for (const auto& [m, c] : terms_) {
    double coef = c;
    std::vector<int> rest;
    for (int v : m.vars()) {
      if (v >= begin && v < end)
        coef *= values[v - begin];
      else
        rest.push_back(v);
    }
    out.add_term(Monomial(std::move(rest)), coef);
  }
  return out;
}

double Polynomial::max_abs_diff(const Polynomial& other) const {
  Polynomial d = *this - other;
  double m = 0.0;
  for (const auto& [mono, c] : d.terms_) m = std::max(m, std::abs(c));
  return m;
}

void Polynomial::prune() {
  std::erase_if(terms_, [](const auto& kv) { return std::abs(kv.second) < kDropTolerance; });
}

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string format_monomial(const Monomial& m, const VariableSpace& space) {
  std::string out;
  const auto& vars = m.vars();
  for (std::size_t i = 0; i < vars.size();) {
    std::size_t j = i;
    while (j < vars.size() && vars[j] == vars[i]) ++j;
    if (!out.empty()) out += '*';
    out += space.variable_name(vars[i]);
    if (j - i > 1) out += '^' + std::to_string(j - i);
    i = j;
  }
  return out;
}

class Scanner {
 public:
  Scanner(const std::string& text, const VariableSpace& space) : s_(text), space_(space) {}

  Polynomial parse() {
    Polynomial p;
    skip();
    if (pos_ == s_.size()) throw ParseError("empty polynomial text");
    bool first = true;
    while (true) {
      skip();
      if (pos_ == s_.size()) break;
      double sign = 1.0;
      if (s_[pos_] == '+' || s_[pos_] == '-') {
        sign = s_[pos_] == '-' ? -1.0 : 1.0;
        ++pos_;
        skip();
      } else if (!first) {
        fail("expected '+' or '-'");
      }
      first = false;
      double coef = number();
      std::vector<int> vars;
      skip();
      if (pos_ < s_.size() && s_[pos_] == '*') {
        ++pos_;
        do {
          skip();
          factor(vars);
          skip();
        } while (pos_ < s_.size() && s_[pos_] == '*' && ++pos_);
      }
      p.add_term(Monomial(std::move(vars)), sign * coef);
    }
    return p;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("polynomial parse error at offset " + std::to_string(pos_) + ": " + what);
  }
  double number() {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (ec != std::errc()) fail("expected a coefficient");
    pos_ = ptr - s_.data();
    return v;
  }
  void factor(std::vector<int>& vars) {
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    int var = space_.parse_variable(s_.substr(start, pos_ - start));
    if (var < 0) fail("unknown variable '" + s_.substr(start, pos_ - start) + "'");
    int power = 1;
    if (pos_ < s_.size() && s_[pos_] == '^') {
      ++pos_;
      auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), power);
      if (ec != std::errc() || power < 1) fail("bad exponent");
      pos_ = ptr - s_.data();
    }
    vars.insert(vars.end(), power, var);
  }

  const std::string& s_;
  const VariableSpace& space_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string Polynomial::to_string(const VariableSpace& space) const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (first) {
      out += format_double(c);
    } else {
      out += c < 0 ? " - " : " + ";
      out += format_double(std::abs(c));
    }
    if (!m.is_constant()) out += " * " + format_monomial(m, space);
    first = false;
  }
  return out;
}

Polynomial Polynomial::parse(const std::string& text, const VariableSpace& space) {
  return Scanner(text, space).parse();
}

double eval(const Polynomial& p, std::span<const double> point) { return p.eval(point); }

int degree(const PolynomialVector& v) {
  int d = 0;
  for (const auto& p : v) d = std::max(d, p.degree());
  return d;
}

}  // namespace aropt::poly
