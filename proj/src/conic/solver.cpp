#include "aropt/conic/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "aropt/conic/scaling.hpp"
#include "kkt.hpp"

namespace aropt::conic {

const char* status_name(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::PrimalInfeasible: return "PrimalInfeasible";
    case SolveStatus::DualInfeasible: return "DualInfeasible";
    case SolveStatus::AlmostOptimal: return "AlmostOptimal";
    case SolveStatus::NumericalProblem: return "NumericalProblem";
  }
  return "?";
}

namespace {

constexpr double kTinyStep = 1e-8;
constexpr int kMaxTinySteps = 5;
constexpr int kRefinements = 3;
constexpr int kMaxIdleIterations = 40;  // without a new best iterate
constexpr double kMaxCorrection = 0.1;
constexpr double kRayBackwardError = 1e-7;

struct Direction {
  Eigen::VectorXd dx, dy, dz;
  double dtau = 0.0, dkappa = 0.0;
};

void zero_free(const std::vector<int>& free, Eigen::VectorXd& v) {
  for (int i : free) v(i) = 0.0;
}

class Ipm {
 public:
  Ipm(const ConicProgram& p, const SolverOptions& opt)
      : p_(p),
        opt_(opt),
        n_(p.num_variables()),
        m_(p.num_rows()),
        free_(p.free_variables()),
        nu_(p.degree()),
        scaling_(p.cones) {
    // Row equilibration: A_s = D A, b_s = D b, y = D y_s.
    d_ = Eigen::VectorXd::Ones(m_);
    for (int r = 0; r < m_; ++r) {
      const double nr = p.A.row(r).norm();
      if (nr > 0.0) d_(r) = 1.0 / nr;
    }
    A_ = d_.asDiagonal() * p.A;
    A_.makeCompressed();
    b_ = d_.cwiseProduct(p.b);
    c_ = p.c;
    kkt_ = std::make_unique<detail::KktSolver>(A_, p.cones, free_, opt.schur == SchurMode::Dense,
                                               opt.schur == SchurMode::Sparse, opt.parallel);
  }

  SolveResult run() {
    const auto t0 = std::chrono::steady_clock::now();
    SolveResult res = iterate();
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
  }

 private:
  SolveResult iterate() {
    x_ = Eigen::VectorXd::Zero(n_);
    z_ = Eigen::VectorXd::Zero(n_);
    y_ = Eigen::VectorXd::Zero(m_);
    scaling_.add_identity(1.0, x_);
    scaling_.add_identity(1.0, z_);
    tau_ = kappa_ = 1.0;
    const double bnorm = p_.b.norm(), cnorm = p_.c.norm();
    int tiny = 0;
    SolveResult res;
    best_ = SolveResult();
    best_score_ = std::numeric_limits<double>::infinity();
    best_iteration_ = 0;

    for (int it = 0;; ++it) {
      residuals();
      const double mu = (x_.dot(z_) + tau_ * kappa_) / (nu_ + 1);
      // Metrics in original units.
      const double pobj = c_.dot(x_) / tau_, dobj = b_.dot(y_) / tau_;
      const Eigen::VectorXd rp_orig = rp_.cwiseQuotient(d_);
      const double pres = rp_orig.norm() / tau_ / (1.0 + bnorm);
      const double dres = rd_.norm() / tau_ / (1.0 + cnorm);
      const double gap = std::max(std::abs(pobj - dobj), x_.dot(z_) / (tau_ * tau_));
      const double relgap = gap / (1.0 + std::abs(pobj) + std::abs(dobj));
      fill(res, it, pobj, dobj, pres, dres, relgap);
      if (const double score = std::max({pres, dres, relgap}); score < best_score_) {
        best_score_ = score;
        best_ = res;
        best_iteration_ = it;
      }
      if (opt_.verbosity > 0)
        std::fprintf(stderr, "%3d  %+.8e  %+.8e  pres %.2e  dres %.2e  gap %.2e  tau %.2e  kap %.2e  mu %.2e\n", it,
                     pobj + p_.objective_offset, dobj + p_.objective_offset, pres, dres, relgap, tau_, kappa_, mu);

      if (pres <= opt_.feasibility_tolerance && dres <= opt_.feasibility_tolerance && relgap <= opt_.gap_tolerance) {
        res.status = SolveStatus::Optimal;
        return res;
      }
      if (primal_infeasible(res) || dual_infeasible(res)) return res;
      if (it >= opt_.max_iterations) {
        return stop(res, "iteration limit");
      }
      if (it - best_iteration_ >= kMaxIdleIterations) {
        return stop(res, "no progress");
      }
      if (!scaling_.update(x_, z_)) {
        return stop(res, "iterate left the cone");
      }
      if (!kkt_->factor(scaling_)) {
        return stop(res, "Schur complement factorization failed");
      }
      prepare();

      // Predictor.
      const Eigen::VectorXd& lam = scaling_.lambda();
      Eigen::VectorXd ll;
      scaling_.jordan(lam, lam, ll);
      Direction aff = direction(1.0, -ll, -tau_ * kappa_);
      Eigen::VectorXd dxs, dzs;
      scaling_.apply_Winvt(aff.dx, dxs);
      scaling_.apply_W(aff.dz, dzs);
      const double a_aff = std::min(1.0, step(dxs, dzs, aff));
      const double sigma = std::pow(1.0 - a_aff, 3);

      // Corrector.
      Eigen::VectorXd cross, rhs = -ll;
      scaling_.jordan(dxs, dzs, cross);
      rhs -= cross;
      scaling_.add_identity(sigma * mu, rhs);
      Direction dir = direction(1.0 - sigma, rhs, sigma * mu - tau_ * kappa_ - aff.dtau * aff.dkappa);
      scaling_.apply_Winvt(dir.dx, dxs);
      scaling_.apply_W(dir.dz, dzs);
      const double alpha = std::min(1.0, opt_.step_factor * step(dxs, dzs, dir));

      x_ += alpha * dir.dx;
      y_ += alpha * dir.dy;
      z_ += alpha * dir.dz;
      tau_ += alpha * dir.dtau;
      kappa_ += alpha * dir.dkappa;
      tiny = alpha < kTinyStep ? tiny + 1 : 0;
      if (tiny >= kMaxTinySteps || !std::isfinite(alpha)) {
        return stop(res, "step length stalled");
      }
    }
  }

  // Early exit: the best iterate seen if it meets the reduced tolerances,
  // otherwise the last one flagged as a numerical problem.
  SolveResult stop(const SolveResult& last, const char* why) const {
    const double tol = opt_.reduced_tolerance;
    const bool ok = best_.primal_residual <= tol && best_.dual_residual <= tol && best_.relative_gap <= tol;
    SolveResult out = ok ? best_ : last;
    out.status = ok ? SolveStatus::AlmostOptimal : SolveStatus::NumericalProblem;
    out.iterations = last.iterations;
    out.message = why;
    return out;
  }

  void residuals() {
    rp_ = A_ * x_ - b_ * tau_;
    rd_ = c_ * tau_ - A_.transpose() * y_ - z_;
    rg_ = b_.dot(y_) - c_.dot(x_) - kappa_;
  }

  // Per-iteration quantities shared by predictor and corrector.
  void prepare() {
    Eigen::VectorXd cK = c_;
    zero_free(free_, cK);
    scaling_.apply_H(cK, Hc_);
    zero_free(free_, Hc_);
    Eigen::VectorXd r2y = A_ * Hc_ + b_;
    Eigen::VectorXd r2f(free_.size());
    for (std::size_t k = 0; k < free_.size(); ++k) r2f(k) = c_(free_[k]);
    kkt_->solve(scaling_, r2y, r2f, u2y_, u2f_);
    Eigen::VectorXd t = A_.transpose() * u2y_;
    zero_free(free_, t);
    scaling_.apply_H(t, p2_);
    zero_free(free_, p2_);
    p2_ -= Hc_;
  }

  // Newton direction for the residual targets (Rp, Rd, Rg) = eta (rp, rd, rg),
  // with iterative refinement on the unreduced system.
  Direction direction(double eta, const Eigen::VectorXd& rhs_comp, double rhs_tau) {
    const Eigen::VectorXd Rp = eta * rp_, Rd = eta * rd_;
    const double Rg = eta * rg_;
    Direction d = newton(Rp, Rd, Rg, rhs_comp, rhs_tau);
    Eigen::VectorXd e1, e2, e4;
    double e3 = 0.0, e5 = 0.0;
    double err = newton_residual(d, Rp, Rd, Rg, rhs_comp, rhs_tau, e1, e2, e3, e4, e5);
    for (int k = 0; k < kRefinements; ++k) {
      const Direction c = newton(e1, e2, e3, -e4, -e5);
      // A large correction means the system is inconsistent, not inexact.
      if (!(magnitude(c) <= kMaxCorrection * magnitude(d))) break;
      Direction r{d.dx + c.dx, d.dy + c.dy, d.dz + c.dz, d.dtau + c.dtau, d.dkappa + c.dkappa};
      Eigen::VectorXd f1, f2, f4;
      double f3 = 0.0, f5 = 0.0;
      const double rerr = newton_residual(r, Rp, Rd, Rg, rhs_comp, rhs_tau, f1, f2, f3, f4, f5);
      if (!(rerr < 0.5 * err)) break;
      d = std::move(r);
      err = rerr;
      e1.swap(f1), e2.swap(f2), e4.swap(f4);
      e3 = f3, e5 = f5;
    }
    if (opt_.verbosity > 1) std::fprintf(stderr, "     newton residual %.2e, direction %.2e\n", err, magnitude(d));
    return d;
  }

  static double magnitude(const Direction& d) {
    return std::max({d.dx.norm(), d.dy.norm(), d.dz.norm(), std::abs(d.dtau), std::abs(d.dkappa)});
  }

  // Residuals of A dx - b dtau = -Rp, c dtau - A'dy - dz = -Rd,
  // b'dy - c'dx - dkappa = -Rg, lambda o (W^{-T} dx + W dz) = comp and
  // kappa dtau + tau dkappa = rhs_tau. Returns the largest residual norm.
  double newton_residual(const Direction& d, const Eigen::VectorXd& Rp, const Eigen::VectorXd& Rd, double Rg,
                       const Eigen::VectorXd& comp, double rhs_tau, Eigen::VectorXd& e1, Eigen::VectorXd& e2,
                       double& e3, Eigen::VectorXd& e4, double& e5) const {
    e1 = A_ * d.dx - b_ * d.dtau + Rp;
    e2 = c_ * d.dtau - A_.transpose() * d.dy - d.dz + Rd;
    e3 = b_.dot(d.dy) - c_.dot(d.dx) - d.dkappa + Rg;
    Eigen::VectorXd u, v;
    scaling_.apply_Winvt(d.dx, u);
    scaling_.apply_W(d.dz, v);
    u += v;
    zero_free(free_, u);
    scaling_.jordan(scaling_.lambda(), u, e4);
    e4 -= comp;
    zero_free(free_, e4);
    e5 = kappa_ * d.dtau + tau_ * d.dkappa - rhs_tau;
    return std::max({e1.norm(), e2.norm(), e4.norm(), std::abs(e3), std::abs(e5)});
  }

  Direction newton(const Eigen::VectorXd& Rp, const Eigen::VectorXd& Rd, double Rg, const Eigen::VectorXd& rhs_comp,
                   double rhs_tau) {
    Eigen::VectorXd dK, Wtd, Hrd, rdK = Rd;
    zero_free(free_, rdK);
    scaling_.lambda_solve(rhs_comp, dK);
    zero_free(free_, dK);
    scaling_.apply_Wt(dK, Wtd);
    scaling_.apply_H(rdK, Hrd);
    Eigen::VectorXd q = Wtd - Hrd;
    zero_free(free_, q);

    Eigen::VectorXd r1y = -Rp - A_ * q;
    Eigen::VectorXd r1f(free_.size());
    for (std::size_t k = 0; k < free_.size(); ++k) r1f(k) = Rd(free_[k]);
    Eigen::VectorXd u1y, u1f;
    kkt_->solve(scaling_, r1y, r1f, u1y, u1f);
    Eigen::VectorXd t = A_.transpose() * u1y, p1;
    zero_free(free_, t);
    scaling_.apply_H(t, p1);
    zero_free(free_, p1);
    p1 += q;

    double cf1 = 0.0, cf2 = 0.0;
    for (std::size_t k = 0; k < free_.size(); ++k) {
      cf1 += c_(free_[k]) * u1f(k);
      cf2 += c_(free_[k]) * u2f_(k);
    }
    const double num = -Rg - b_.dot(u1y) + c_.dot(p1) + cf1 + rhs_tau / tau_;
    const double den = b_.dot(u2y_) - c_.dot(p2_) - cf2 + kappa_ / tau_;

    Direction d;
    d.dtau = num / den;
    d.dy = u1y + d.dtau * u2y_;
    d.dx = p1 + d.dtau * p2_;
    for (std::size_t k = 0; k < free_.size(); ++k) d.dx(free_[k]) = u1f(k) + d.dtau * u2f_(k);
    d.dz = c_ * d.dtau - A_.transpose() * d.dy + Rd;
    zero_free(free_, d.dz);
    d.dkappa = (rhs_tau - kappa_ * d.dtau) / tau_;
    return d;
  }

  double step(const Eigen::VectorXd& dxs, const Eigen::VectorXd& dzs, const Direction& d) const {
    double a = std::min(scaling_.max_step(dxs), scaling_.max_step(dzs));
    if (d.dtau < 0.0) a = std::min(a, -tau_ / d.dtau);
    if (d.dkappa < 0.0) a = std::min(a, -kappa_ / d.dkappa);
    return a;
  }

  void fill(SolveResult& res, int it, double pobj, double dobj, double pres, double dres, double relgap) const {
    res.x = x_ / tau_;
    res.y = d_.cwiseProduct(y_) / tau_;
    res.z = z_ / tau_;
    res.primal_objective = pobj + p_.objective_offset;
    res.dual_objective = dobj + p_.objective_offset;
    res.primal_residual = pres;
    res.dual_residual = dres;
    res.relative_gap = relgap;
    res.iterations = it;
  }

  // Farkas ray: b'y = 1, A'y + z = 0, z in K*.
  bool primal_infeasible(SolveResult& res) const {
    const double by = b_.dot(y_);
    if (!(by > 0.0)) return false;
    const Eigen::VectorXd z = z_ / by;
    const Eigen::VectorXd r = A_.transpose() * y_ / by + z;
    if (r.lpNorm<Eigen::Infinity>() > opt_.infeasibility_tolerance) return false;
    res.status = SolveStatus::PrimalInfeasible;
    res.y = d_.cwiseProduct(y_) / by;
    res.z = z;
    res.x.setZero();
    return true;
  }

  // Improving ray: c'x = -1, A x = 0, x in K.
  bool dual_infeasible(SolveResult& res) const {
    const double cx = c_.dot(x_);
    if (!(cx < 0.0)) return false;
    const Eigen::VectorXd x = x_ / -cx;
    const Eigen::VectorXd r = (A_ * x).cwiseQuotient(d_);
    if (r.lpNorm<Eigen::Infinity>() > opt_.infeasibility_tolerance) return false;
    res.status = SolveStatus::DualInfeasible;
    res.x = x;
    res.y.setZero();
    res.z.setZero();
    return true;
  }

  const ConicProgram& p_;
  SolverOptions opt_;
  int n_, m_;
  std::vector<int> free_;
  int nu_;
  NtScaling scaling_;
  Eigen::VectorXd d_;
  SparseRowMatrix A_;
  Eigen::VectorXd b_, c_;
  std::unique_ptr<detail::KktSolver> kkt_;

  Eigen::VectorXd x_, y_, z_, rp_, rd_;
  double tau_ = 1.0, kappa_ = 1.0, rg_ = 0.0;
  SolveResult best_;  // lowest max(pres, dres, gap) so far
  double best_score_ = 0.0;
  int best_iteration_ = 0;
  Eigen::VectorXd Hc_, u2y_, u2f_, p2_;
};

}  // namespace

namespace {

// Phase 1 for the dual: max s s.t. c - A'y - s e in K*, s <= 1, with e the
// identity element of K. Its primal is
//   min c'x + t  s.t.  A x = 0,  <e, x> + t = 1,  x in K,  t >= 0,
// so a negative optimum yields a trace-normalized improving ray.
ConicProgram dual_phase1(const ConicProgram& p) {
  const int n = p.num_variables(), m = p.num_rows();
  ConicProgram q;
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(p.A.nonZeros()) + n + 1);
  for (int r = 0; r < m; ++r)
    for (SparseRowMatrix::InnerIterator it(p.A, r); it; ++it) t.emplace_back(r, static_cast<int>(it.col()), it.value());
  for (const ConeBlock& k : p.cones) {
    if (k.kind == ConeKind::NonNegative) {
      for (int i = 0; i < k.size; ++i) t.emplace_back(m, k.start + i, 1.0);
    } else if (k.kind == ConeKind::SecondOrder) {
      t.emplace_back(m, k.start, 1.0);
    } else {
      for (int i = 0; i < k.order; ++i) t.emplace_back(m, k.start + svec_index(k.order, i, i), 1.0);
    }
  }
  t.emplace_back(m, n, 1.0);
  q.A.resize(m + 1, n + 1);
  q.A.setFromTriplets(t.begin(), t.end());
  q.b = Eigen::VectorXd::Zero(m + 1);
  q.b(m) = 1.0;
  q.c.resize(n + 1);
  q.c << p.c, 1.0;
  q.cones = p.cones;
  q.cones.push_back({ConeKind::NonNegative, n, 1, 0});
  return q;
}

// Accepts the phase 1 point as an improving ray when the uniform slack s is
// below -reduced_tolerance and each row of A x = 0 holds to
// kRayBackwardError relative to |A_r| |x|.
bool improving_ray(const ConicProgram& p, const SolverOptions& opt, SolveResult& res) {
  const ConicProgram q = dual_phase1(p);
  SolverOptions o = opt;
  o.verbosity = 0;
  const SolveResult r = Ipm(q, o).run();
  if (!r.optimal() || !(r.primal_objective < -opt.reduced_tolerance)) return false;
  const Eigen::VectorXd x = r.x.head(p.num_variables());
  const double cx = p.c.dot(x);
  if (!(cx < 0.0)) return false;
  const Eigen::VectorXd ax = p.A * x;
  const double xn = x.norm();
  for (int row = 0; row < p.num_rows(); ++row)
    if (std::abs(ax(row)) > kRayBackwardError * p.A.row(row).norm() * xn) return false;
  res.status = SolveStatus::DualInfeasible;
  res.x = x / -cx;
  res.y.setZero();
  res.z.setZero();
  res.message = "improving ray from phase 1";
  return true;
}

}  // namespace

SolveResult solve(const ConicProgram& program, const SolverOptions& options) {
  program.validate();
  if (program.num_variables() == 0) throw std::invalid_argument("solve: program has no variables");
  SolveResult res = Ipm(program, options).run();
  if (res.status == SolveStatus::NumericalProblem && options.phase1) {
    const double seconds = res.seconds;
    const auto t0 = std::chrono::steady_clock::now();
    improving_ray(program, options, res);
    res.seconds = seconds + std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return res;
}

}  // namespace aropt::conic
