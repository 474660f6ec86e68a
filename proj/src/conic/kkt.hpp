#pragma once

#include <Eigen/CholmodSupport>
#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>
#include <vector>

#include "aropt/conic/program.hpp"
#include "aropt/conic/scaling.hpp"
#include "aropt/conic/schur.hpp"

namespace aropt::conic::detail {

// Solves the reduced Newton system
//   [ A_K H A_K'  A_f ] [dy ]   [r_y]
//   [ A_f'        0   ] [dxf] = [r_f]
// by GMRES preconditioned with a Cholesky factor of
// A_K H A_K' + eps I + A_f A_f' / delta.
class KktSolver {
 public:
  KktSolver(const SparseRowMatrix& A, const std::vector<ConeBlock>& cones, std::vector<int> free_vars,
            bool force_dense, bool force_sparse, bool parallel);

  bool dense() const { return assembler_.dense(); }
  int rows() const { return m_; }

  // Returns false when no regularization makes the factorization succeed.
  bool factor(const NtScaling& scaling);
  // Returns the relative residual reached.
  double solve(const NtScaling& scaling, const Eigen::VectorXd& ry, const Eigen::VectorXd& rf, Eigen::VectorXd& dy,
               Eigen::VectorXd& dxf) const;

 private:
  void apply_K(const NtScaling& scaling, const Eigen::VectorXd& v, Eigen::VectorXd& out) const;
  void apply_P(const Eigen::VectorXd& v, Eigen::VectorXd& out) const;

  const SparseRowMatrix& A_;
  std::vector<int> free_;
  std::vector<char> is_free_;
  int m_ = 0;
  int n_ = 0;
  SchurAssembler assembler_;
  SchurMatrix M_;
  double delta_ = 1.0;
  bool analyzed_ = false;
  std::unique_ptr<Eigen::CholmodSupernodalLLT<Eigen::SparseMatrix<double>, Eigen::Lower>> sparse_;
  Eigen::SparseMatrix<double> Af_;
};

}  // namespace aropt::conic::detail
