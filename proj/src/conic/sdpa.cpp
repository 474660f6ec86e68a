#include "aropt/conic/sdpa.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <stdexcept>
#include <tuple>

namespace aropt::conic {

namespace {

struct Entry {
  int block, i, j;  // 1-based, i <= j
};

// Where each program variable lands in the block matrix of the slack
// c - A'y, with the weight applied to its value.
struct Target {
  Entry entry;
  double weight;
};

}  // namespace

void write_sdpa(const ConicProgram& program, std::ostream& out) {
  program.validate();
  const int n = program.num_variables();
  const auto free = program.free_variables();
  std::vector<std::vector<Target>> targets(n);
  std::vector<int> sizes;

  int diag = 0;
  for (const auto& c : program.cones)
    if (c.kind == ConeKind::NonNegative) diag += c.size;
  diag += 2 * static_cast<int>(free.size());
  int block = 0;
  if (diag > 0) {
    sizes.push_back(-diag);
    block = 1;
    int k = 1;
    for (const auto& c : program.cones)
      if (c.kind == ConeKind::NonNegative)
        for (int v = c.start; v < c.start + c.size; ++v, ++k) targets[v].push_back({{block, k, k}, 1.0});
    for (int v : free) {
      targets[v].push_back({{block, k, k}, 1.0});
      targets[v].push_back({{block, k + 1, k + 1}, -1.0});
      k += 2;
    }
  }
  for (const auto& c : program.cones) {
    if (c.kind == ConeKind::SecondOrder) {
      sizes.push_back(c.size);
      ++block;
      for (int d = 1; d <= c.size; ++d) targets[c.start].push_back({{block, d, d}, 1.0});
      for (int d = 1; d < c.size; ++d) targets[c.start + d].push_back({{block, 1, d + 1}, 1.0});
    } else if (c.kind == ConeKind::Psd) {
      sizes.push_back(c.order);
      ++block;
      for (int j = 0; j < c.order; ++j)
        for (int i = j; i < c.order; ++i)
          targets[c.start + svec_index(c.order, i, j)].push_back({{block, j + 1, i + 1}, i == j ? 1.0 : M_SQRT1_2});
    }
  }

  using Key = std::tuple<int, int, int, int>;
  std::map<Key, double> entries;
  auto emit = [&](int mat, int var, double value) {
    for (const auto& t : targets[var]) entries[{mat, t.entry.block, t.entry.i, t.entry.j}] += t.weight * value;
  };
  for (int v = 0; v < n; ++v)
    if (program.c(v) != 0.0) emit(0, v, -program.c(v));
  for (int r = 0; r < program.A.outerSize(); ++r)
    for (SparseRowMatrix::InnerIterator it(program.A, r); it; ++it) emit(r + 1, static_cast<int>(it.col()), -it.value());

  out << std::setprecision(17);
  out << program.num_rows() << "\n" << sizes.size() << "\n";
  for (std::size_t k = 0; k < sizes.size(); ++k) out << (k ? " " : "") << sizes[k];
  out << "\n";
  for (int r = 0; r < program.num_rows(); ++r) out << (r ? " " : "") << -program.b(r);
  out << "\n";
  for (const auto& [key, value] : entries) {
    if (value == 0.0) continue;
    const auto [mat, blk, i, j] = key;
    out << mat << " " << blk << " " << i << " " << j << " " << value << "\n";
  }
}

void write_sdpa(const ConicProgram& program, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  write_sdpa(program, out);
}

}  // namespace aropt::conic
