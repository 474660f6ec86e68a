#pragma once

#include <Eigen/Dense>
#include <vector>

#include "aropt/conic/program.hpp"

namespace aropt::conic {

// Nesterov-Todd scaling W of a primal-dual pair (x, z) in the interior of a
// product of self-dual cones, with W z = W^{-T} x = lambda. Vectors passed to
// the operators span all variables; entries outside cones are left untouched
// by the scaled-space operations and copied by the linear maps.
class NtScaling {
 public:
  explicit NtScaling(std::vector<ConeBlock> cones);

  // Returns false when (x, z) is not strictly interior.
  bool update(const Eigen::VectorXd& x, const Eigen::VectorXd& z);

  const std::vector<ConeBlock>& cones() const { return cones_; }
  const Eigen::VectorXd& lambda() const { return lambda_; }

  void apply_W(const Eigen::VectorXd& in, Eigen::VectorXd& out) const;
  void apply_Wt(const Eigen::VectorXd& in, Eigen::VectorXd& out) const;
  void apply_Winv(const Eigen::VectorXd& in, Eigen::VectorXd& out) const;
  void apply_Winvt(const Eigen::VectorXd& in, Eigen::VectorXd& out) const;
  void apply_H(const Eigen::VectorXd& in, Eigen::VectorXd& out) const;  // W'W

  // Jordan algebra in the scaled space (cone entries only).
  void jordan(const Eigen::VectorXd& u, const Eigen::VectorXd& v, Eigen::VectorXd& out) const;
  // out = L(lambda)^{-1} v, i.e. solves lambda o out = v.
  void lambda_solve(const Eigen::VectorXd& v, Eigen::VectorXd& out) const;
  void add_identity(double s, Eigen::VectorXd& v) const;
  // Largest a with lambda + a d in the cone (infinity when unbounded).
  double max_step(const Eigen::VectorXd& d) const;

  // Per-block data used by the Schur complement kernels.
  struct Soc {
    double beta = 1.0;
    Eigen::VectorXd v, wbar;
  };
  struct Psd {
    Eigen::MatrixXd G, Ginv, R;  // R = G G'
  };
  const Eigen::VectorXd& nonneg_h() const { return h_; }  // x / z on nonneg entries
  const Soc& soc(int block) const { return soc_.at(block); }
  const Psd& psd(int block) const { return psd_.at(block); }

 private:
  std::vector<ConeBlock> cones_;
  Eigen::VectorXd lambda_, w_, h_;
  std::vector<Soc> soc_;
  std::vector<Psd> psd_;
};

// Largest a with x + a d in the cone for a single block starting at offset 0
// in both vectors; used for interior checks and tests.
double max_step_direct(const ConeBlock& cone, const Eigen::VectorXd& x, const Eigen::VectorXd& d);

}  // namespace aropt::conic
