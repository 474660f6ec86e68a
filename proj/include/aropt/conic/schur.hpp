#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "aropt/conic/program.hpp"
#include "aropt/conic/scaling.hpp"

namespace aropt::conic {

// Rows of A restricted to one PSD block. Each local row p carries its svec
// coefficients and the equivalent symmetric matrix A_p on its index support.
struct PsdRows {
  int order = 0;
  std::vector<int> rows;  // global row indices, ascending
  struct Row {
    std::vector<int> svec_index;
    std::vector<double> svec_value;
    std::vector<int> support;  // matrix indices touched by A_p
    Eigen::MatrixXd sub;       // A_p restricted to support x support
  };
  std::vector<Row> local;

  void add_entry(int local_row, int svec_idx, double value);
  void finalize();
};

// Lower triangle of M_pq = <A_p, R A_q R> for the rows of one block.
void psd_schur_block(const PsdRows& rows, const Eigen::MatrixXd& R, Eigen::MatrixXd& out);
// Same quantity with plain serial loops and full dense products; kept as the
// reference for tests and benchmarks.
void psd_schur_block_reference(const PsdRows& rows, const Eigen::MatrixXd& R, Eigen::MatrixXd& out);

// Sparse rows of A restricted to a second-order cone block.
struct SocRows {
  std::vector<int> rows;
  Eigen::SparseMatrix<double> local;  // |rows| x cone size
  Eigen::MatrixXd ajat;               // local J local', constant
};

struct NonnegColumn {
  std::vector<int> rows;
  std::vector<double> values;
  int var = 0;
};

// Symmetric m x m matrix held dense or as a fixed sparse lower pattern.
class SchurMatrix {
 public:
  void init_dense(int m);
  void init_sparse(Eigen::SparseMatrix<double> lower_pattern);
  bool dense() const { return dense_; }
  int size() const { return m_; }
  void set_zero();
  void add(int i, int j, double v);  // i >= j
  void add_diagonal(double v);
  void add_scaled(const Eigen::SparseMatrix<double>& lower, double s);  // pattern must be contained
  double max_diagonal() const;

  Eigen::MatrixXd& dense_matrix() { return D_; }
  const Eigen::MatrixXd& dense_matrix() const { return D_; }
  Eigen::SparseMatrix<double>& sparse_matrix() { return S_; }
  const Eigen::SparseMatrix<double>& sparse_matrix() const { return S_; }
  Eigen::VectorXd multiply(const Eigen::VectorXd& v) const;

 private:
  bool dense_ = true;
  int m_ = 0;
  Eigen::MatrixXd D_;
  Eigen::SparseMatrix<double> S_;
};

// Layout of A by cone block, built once per solve.
class SchurAssembler {
 public:
  SchurAssembler(const SparseRowMatrix& A, const std::vector<ConeBlock>& cones, const std::vector<int>& free_vars,
                 bool force_dense, bool force_sparse, bool parallel);

  int rows() const { return m_; }
  bool dense() const { return dense_; }
  double density() const { return density_; }
  // Lower pattern of M + A_f A_f' (used for the sparse path).
  const Eigen::SparseMatrix<double>& pattern() const { return pattern_; }
  const Eigen::SparseMatrix<double>& free_gram() const { return free_gram_; }

  // M = sum over cones of A_k H_k A_k'.
  void assemble(const NtScaling& scaling, SchurMatrix& M) const;

 private:
  int m_ = 0;
  bool dense_ = true;
  bool parallel_ = true;
  double density_ = 1.0;
  std::vector<ConeBlock> cones_;
  std::vector<NonnegColumn> nonneg_;
  std::vector<SocRows> soc_;
  std::vector<PsdRows> psd_;
  Eigen::SparseMatrix<double> free_gram_;
  Eigen::SparseMatrix<double> pattern_;
};

}  // namespace aropt::conic
