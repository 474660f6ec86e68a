#include <cmath>
#include <sstream>

#include "aropt/conic/lmi.hpp"
#include "aropt/conic/program.hpp"
#include "aropt/conic/sdpa.hpp"
#include "aropt/conic/solver.hpp"
#include "doctest.h"

using namespace aropt::conic;

namespace {

// max lambda s.t. [[1, lambda], [lambda, 1]] PSD, as minimize -lambda.
LmiBuilder eigen_lmi() {
  LmiBuilder lb;
  const int l = lb.add_variables(1);
  lb.add_objective(l, -1.0);
  lb.add_lmi(2, {{0, 0, AffineExpr(1.0)}, {1, 0, AffineExpr().add(l, 1.0)}, {1, 1, AffineExpr(1.0)}});
  return lb;
}

}  // namespace

TEST_CASE("svec layout") {
  CHECK(svec_size(3) == 6);
  CHECK(svec_index(3, 0, 0) == 0);
  CHECK(svec_index(3, 2, 0) == 2);
  CHECK(svec_index(3, 1, 1) == 3);
  CHECK(svec_index(3, 2, 2) == 5);
  Eigen::Matrix3d X{{4, 1, 2}, {1, 5, 3}, {2, 3, 6}};
  const Eigen::VectorXd v = svec(X);
  CHECK(v(1) == doctest::Approx(std::sqrt(2.0)));
  CHECK(v.squaredNorm() == doctest::Approx(X.squaredNorm()));
  CHECK(smat(std::span<const double>(v.data(), 6), 3).isApprox(X));
  CHECK(psd_order(10) == 4);
  CHECK_THROWS(psd_order(7));
}

TEST_CASE("1-D LP: min x, x >= 1") {
  ProgramBuilder pb;
  const int x = pb.add_free(1);
  const int s = pb.add_nonneg(1);
  const int r = pb.add_row(1.0);
  pb.add_coefficient(r, x, 1.0);
  pb.add_coefficient(r, s, -1.0);
  pb.add_cost(x, 1.0);
  const SolveResult res = solve(pb.build());
  REQUIRE(res.status == SolveStatus::Optimal);
  CHECK(res.primal_objective == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(res.x(x) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("trace with fixed entries") {
  ProgramBuilder pb;
  const int X = pb.add_psd(2);
  const double rhs[3] = {1.0, 1.0, 0.5};
  const int ij[3][2] = {{0, 0}, {1, 1}, {1, 0}};
  for (int k = 0; k < 3; ++k) {
    const int r = pb.add_row(rhs[k]);
    // <E, X> with E symmetric; off-diagonal rows count X_12 twice.
    pb.add_psd_coefficient(r, X, 2, ij[k][0], ij[k][1], ij[k][0] == ij[k][1] ? 1.0 : 0.5);
  }
  pb.add_psd_cost(X, 2, 0, 0, 1.0);
  pb.add_psd_cost(X, 2, 1, 1, 1.0);
  const SolveResult res = solve(pb.build());
  REQUIRE(res.status == SolveStatus::Optimal);
  CHECK(res.primal_objective == doctest::Approx(2.0).epsilon(1e-7));
  const Eigen::MatrixXd Xv = smat(std::span<const double>(res.x.data() + X, 3), 2);
  CHECK(Xv(1, 0) == doctest::Approx(0.5).epsilon(1e-7));
}

TEST_CASE("max lambda with [[1, lambda], [lambda, 1]] PSD") {
  // The eigenvalues are 1 +- lambda, so lambda* = 1.
  const LmiBuilder lb = eigen_lmi();
  const SolveResult res = solve(lb.build());
  REQUIRE(res.status == SolveStatus::Optimal);
  // The program optimum is the negated objective of the LMI form.
  CHECK(res.primal_objective == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(res.y(0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(lb.objective(res.y) == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("second-order cone: min t s.t. t >= |(3, 4)|") {
  LmiBuilder lb;
  const int t = lb.add_variables(1);
  lb.add_objective(t, 1.0);
  lb.add_soc({AffineExpr().add(t, 1.0), AffineExpr(3.0), AffineExpr(4.0)});
  const SolveResult res = solve(lb.build());
  REQUIRE(res.status == SolveStatus::Optimal);
  CHECK(lb.objective(res.y) == doctest::Approx(5.0).epsilon(1e-7));
}

TEST_CASE("mixed cones with equality") {
  // min u0 + u1 s.t. u0 + u1 >= 2 |(u0 - u1)|... written with an equality u0 = 2 u1.
  LmiBuilder lb;
  const int u = lb.add_variables(2);
  lb.add_objective(u, 1.0);
  lb.add_objective(u + 1, 1.0);
  lb.add_equality(AffineExpr().add(u, 1.0).add(u + 1, -2.0));
  lb.add_soc({AffineExpr().add(u, 1.0), AffineExpr(1.0)});
  lb.add_nonneg(AffineExpr(-0.25).add(u + 1, 1.0));
  const SolveResult res = solve(lb.build());
  REQUIRE(res.status == SolveStatus::Optimal);
  // u0 >= 1 and u1 = u0 / 2.
  CHECK(res.y(0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(res.y(1) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("primal infeasible LP") {
  ProgramBuilder pb;
  const int x = pb.add_nonneg(2);
  const int r0 = pb.add_row(1.0);
  pb.add_coefficient(r0, x, 1.0);
  pb.add_coefficient(r0, x + 1, 1.0);
  const int r1 = pb.add_row(3.0);
  pb.add_coefficient(r1, x, 1.0);
  pb.add_coefficient(r1, x + 1, 1.0);
  pb.add_cost(x, 1.0);
  const ConicProgram p = pb.build();
  const SolveResult res = solve(p);
  REQUIRE(res.status == SolveStatus::PrimalInfeasible);
  CHECK(p.b.dot(res.y) == doctest::Approx(1.0));
  const Eigen::VectorXd r = p.A.transpose() * res.y + res.z;
  CHECK(r.lpNorm<Eigen::Infinity>() <= 1e-7);
  CHECK(res.z.minCoeff() >= 0.0);
}

TEST_CASE("dual infeasible LP") {
  ProgramBuilder pb;
  const int x = pb.add_nonneg(2);
  const int r = pb.add_row(1.0);
  pb.add_coefficient(r, x, 1.0);
  pb.add_coefficient(r, x + 1, -1.0);
  pb.add_cost(x + 1, -1.0);
  const ConicProgram p = pb.build();
  const SolveResult res = solve(p);
  REQUIRE(res.status == SolveStatus::DualInfeasible);
  CHECK(p.c.dot(res.x) == doctest::Approx(-1.0));
  CHECK((p.A * res.x).lpNorm<Eigen::Infinity>() <= 1e-7);
}

TEST_CASE("iteration cap gives NumericalProblem") {
  SolverOptions opt;
  opt.max_iterations = 1;
  const SolveResult res = solve(eigen_lmi().build(), opt);
  CHECK(res.status == SolveStatus::NumericalProblem);
}

TEST_CASE("dense and sparse Schur paths agree") {
  // Random LMI with a few free variables.
  std::srand(3);
  LmiBuilder lb;
  const int nv = 12;
  const int u = lb.add_variables(nv);
  for (int i = 0; i < nv; ++i) lb.add_objective(u + i, (std::rand() % 7) - 3.0);
  std::vector<std::tuple<int, int, AffineExpr>> entries;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j <= i; ++j) {
      AffineExpr e(i == j ? 4.0 : 0.0);
      for (int k = 0; k < nv; ++k)
        if (std::rand() % 3 == 0) e.add(u + k, ((std::rand() % 11) - 5) / 5.0);
      entries.emplace_back(i, j, e);
    }
  lb.add_lmi(5, entries);
  for (int k = 0; k < nv; ++k) {
    lb.add_nonneg(AffineExpr(2.0).add(u + k, 1.0));
    lb.add_nonneg(AffineExpr(2.0).add(u + k, -1.0));
  }
  lb.add_equality(AffineExpr(0.5).add(u, 1.0).add(u + 1, 1.0));
  const ConicProgram p = lb.build();
  SolverOptions dense, sparse;
  dense.schur = SchurMode::Dense;
  sparse.schur = SchurMode::Sparse;
  const SolveResult a = solve(p, dense), b = solve(p, sparse);
  REQUIRE(a.status == SolveStatus::Optimal);
  REQUIRE(b.status == SolveStatus::Optimal);
  CHECK(a.primal_objective == doctest::Approx(b.primal_objective).epsilon(1e-7));
  CHECK(a.primal_objective >= a.dual_objective - 1e-7);
}

TEST_CASE("sdpa export") {
  std::ostringstream out;
  write_sdpa(eigen_lmi().build(), out);
  std::istringstream in(out.str());
  int m, blocks, size;
  double obj;
  in >> m >> blocks >> size >> obj;
  CHECK(m == 1);
  CHECK(blocks == 1);
  CHECK(size == 2);
  CHECK(obj == -1.0);
  // X = F1 y - F0 = [[1, y], [y, 1]].
  const double expected[3][5] = {{0, 1, 1, 1, -1}, {0, 1, 2, 2, -1}, {1, 1, 1, 2, 1}};
  for (const auto& row : expected)
    for (double v : row) {
      double got;
      in >> got;
      CHECK(got == doctest::Approx(v).epsilon(1e-15));
    }
}

TEST_CASE("solve rejects empty program") {
  CHECK_THROWS(solve(ConicProgram{}));
}
