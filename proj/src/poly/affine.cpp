#include "aropt/poly/affine.hpp"

#include <map>

#include "aropt/error.hpp"

namespace aropt::poly {

Polynomial AffineVectorMap::output(int i) const {
  Polynomial p = offset.at(i);
  for (int j = 0; j < static_cast<int>(inputs.size()); ++j)
    p.add_term(Monomial::variable(inputs[j]), matrix(i, j));
  return p;
}

AffineVectorMap AffineVectorMap::identity(const VariableBlock& block) {
  AffineVectorMap m;
  m.matrix = Eigen::MatrixXd::Identity(block.dim, block.dim);
  for (int i = 0; i < block.dim; ++i) m.inputs.push_back(block.index(i));
  m.offset.assign(block.dim, Polynomial());
  return m;
}

namespace {

void check_map(const VariableBlock& block, const AffineVectorMap& map, bool allow_block_inputs) {
  require_dim(map.rows() == block.dim, "affine map has " + std::to_string(map.rows()) +
                                           " outputs, block '" + block.name + "' has dimension " +
                                           std::to_string(block.dim));
  require_dim(map.matrix.rows() == block.dim && map.matrix.cols() == static_cast<Eigen::Index>(map.inputs.size()),
              "affine map matrix shape does not match its inputs");
  if (allow_block_inputs) return;
  for (int v : map.inputs)
    if (block.contains(v)) throw std::invalid_argument("affine map input refers to the eliminated block");
  for (const auto& p : map.offset)
    if (p.depends_on(block.offset, block.offset + block.dim))
      throw std::invalid_argument("affine map offset refers to the eliminated block");
}

}  // namespace

PolynomialVector substitute_affine(const PolynomialVector& v, const VariableBlock& block,
                                   const AffineVectorMap& map) {
  check_map(block, map, false);

  std::vector<Polynomial> outputs(block.dim);
  for (int i = 0; i < block.dim; ++i) outputs[i] = map.output(i);

  std::map<Monomial, Polynomial> cache;
  auto expand = [&](const Monomial& inner) -> const Polynomial& {
    auto it = cache.find(inner);
    if (it != cache.end()) return it->second;
    Polynomial prod(1.0);
    for (int var : inner.vars()) prod = prod * outputs[var - block.offset];
    return cache.emplace(inner, std::move(prod)).first->second;
  };

  PolynomialVector out;
  out.reserve(v.size());
  for (const auto& p : v) {
    Polynomial result;
    for (const auto& [m, c] : p.terms()) {
      std::vector<int> inside, outside;
      for (int var : m.vars()) (block.contains(var) ? inside : outside).push_back(var);
      if (inside.empty()) {
        result.add_term(m, c);
        continue;
      }
      const Polynomial& e = expand(Monomial(std::move(inside)));
      Monomial rest(std::move(outside));
      for (const auto& [me, ce] : e.terms()) result.add_term(me * rest, c * ce);
    }
    out.push_back(std::move(result));
  }
  return out;
}

Polynomial substitute_affine(const Polynomial& p, const VariableBlock& block, const AffineVectorMap& map) {
  // The identity map is the only allowed self-reference.
  bool self = false;
  for (int v : map.inputs) self = self || block.contains(v);
  if (self) {
    check_map(block, map, true);
    const AffineVectorMap id = AffineVectorMap::identity(block);
    if (map.matrix.isApprox(id.matrix, 0.0) && map.inputs == id.inputs) {
      bool zero = true;
      for (const auto& o : map.offset) zero = zero && o.is_zero();
      if (zero) return p;
    }
    throw std::invalid_argument("affine map input refers to the eliminated block");
  }
  return substitute_affine(PolynomialVector{p}, block, map).front();
}

Eigen::MatrixXd jacobian(const PolynomialVector& F, const VariableBlock& block, std::span<const double> point) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(F.size()), block.dim);
  for (std::size_t i = 0; i < F.size(); ++i) {
    for (const auto& [m, c] : F[i].terms()) {
      // d/dx_v of c * prod x: exponent * c * m / x_v
      const auto& vars = m.vars();
      for (std::size_t k = 0; k < vars.size(); ++k) {
        if (!block.contains(vars[k]) || (k > 0 && vars[k] == vars[k - 1])) continue;
        int e = m.exponent(vars[k]);
        double v = c * e;
        bool skipped = false;
        for (int var : vars) {
          if (var == vars[k] && !skipped) {
            skipped = true;
            continue;
          }
          v *= point[var];
        }
        J(static_cast<Eigen::Index>(i), vars[k] - block.offset) += v;
      }
    }
  }
  return J;
}

Taylor1 taylor1(const PolynomialVector& F, const VariableBlock& block, const Eigen::VectorXd& anchor) {
  require_dim(anchor.size() == block.dim, "anchor dimension " + std::to_string(anchor.size()) +
                                              " does not match block '" + block.name + "'");
  int nvars = block.offset + block.dim;
  for (const auto& p : F) nvars = std::max(nvars, p.max_variable() + 1);
  std::vector<double> point(nvars, 0.0);
  for (int i = 0; i < block.dim; ++i) point[block.index(i)] = anchor(i);

  Taylor1 t;
  t.jacobian = jacobian(F, block, point);
  t.map.matrix = t.jacobian;
  for (int i = 0; i < block.dim; ++i) t.map.inputs.push_back(block.index(i));
  const Eigen::VectorXd shift = t.jacobian * anchor;
  const std::span<const double> values(anchor.data(), static_cast<std::size_t>(anchor.size()));
  for (std::size_t i = 0; i < F.size(); ++i) {
    Polynomial off = F[i].fix_variables(block.offset, values);
    off.add_term(Monomial(), -shift(static_cast<Eigen::Index>(i)));
    t.map.offset.push_back(std::move(off));
  }
  return t;
}

}  // namespace aropt::poly
