#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <span>
#include <string>
#include <vector>

namespace aropt::conic {

enum class ConeKind { NonNegative, SecondOrder, Psd };

const char* cone_kind_name(ConeKind kind);

// A slice [start, start + size) of the variable vector. PSD slices hold the
// scaled lower-triangular vectorization (svec) of an order x order matrix.
struct ConeBlock {
  ConeKind kind = ConeKind::NonNegative;
  int start = 0;
  int size = 0;
  int order = 0;  // matrix order for PSD, else 0
};

inline int svec_size(int order) { return order * (order + 1) / 2; }
// Position of entry (i, j) in svec, column-major over the lower triangle.
int svec_index(int order, int i, int j);
Eigen::VectorXd svec(const Eigen::MatrixXd& X);
Eigen::MatrixXd smat(std::span<const double> v, int order);
// Order of a PSD block from its svec length; throws when not triangular.
int psd_order(int svec_length);

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// min c'x + offset  s.t.  A x = b,  x in K (variables outside cones are free).
// Dual: max b'y + offset  s.t.  c - A'y = z in K*, z = 0 on free variables.
struct ConicProgram {
  SparseRowMatrix A;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  double objective_offset = 0.0;
  std::vector<ConeBlock> cones;

  int num_variables() const { return static_cast<int>(c.size()); }
  int num_rows() const { return static_cast<int>(b.size()); }
  std::vector<int> free_variables() const;
  // Barrier degree: entries of nonneg cones, one per SOC, order per PSD block.
  int degree() const;
  // Throws std::invalid_argument on inconsistent dimensions or overlapping cones.
  void validate() const;
};

// Assembles a ConicProgram in primal standard form.
class ProgramBuilder {
 public:
  int add_free(int n);
  int add_nonneg(int n);
  int add_soc(int n);
  // Returns the start of the svec slice of an order x order PSD matrix.
  int add_psd(int order);

  int num_variables() const { return n_; }

  int add_row(double rhs);
  void add_coefficient(int row, int var, double coef);
  // Adds coef * X_ij (and X_ji) of the PSD block starting at psd_start to the
  // row, i.e. the row gains <E, X> with E_ij = E_ji = coef (E_ii = coef).
  void add_psd_coefficient(int row, int psd_start, int order, int i, int j, double coef);
  void set_rhs(int row, double rhs) { rhs_.at(row) = rhs; }
  void add_cost(int var, double coef);
  void add_psd_cost(int psd_start, int order, int i, int j, double coef);
  void set_objective_offset(double v) { offset_ = v; }

  ConicProgram build() const;

 private:
  int add_cone(ConeKind kind, int size, int order);
  int n_ = 0;
  std::vector<ConeBlock> cones_;
  std::vector<Eigen::Triplet<double>> entries_;
  std::vector<double> rhs_;
  std::vector<std::pair<int, double>> cost_;
  double offset_ = 0.0;
};

struct Residuals {
  double max_equality_violation = 0.0;
  double min_cone_margin = 0.0;
};

// Constraint report at a candidate primal point. The cone margin is the
// smallest of: nonneg entries, x0 - |x1| for SOC, minimum eigenvalue for PSD.
Residuals residuals(const ConicProgram& p, const Eigen::VectorXd& x);

// Smallest cone margin of one vector against the cone list.
double cone_margin(const std::vector<ConeBlock>& cones, const Eigen::VectorXd& x);

}  // namespace aropt::conic
