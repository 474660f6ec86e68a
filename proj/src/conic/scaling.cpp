#include "aropt/conic/scaling.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <limits>

namespace aropt::conic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double jdot(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b) {
  return a(0) * b(0) - a.tail(a.size() - 1).dot(b.tail(b.size() - 1));
}

Eigen::MatrixXd to_mat(const Eigen::Ref<const Eigen::VectorXd>& v, int order) {
  return smat(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())), order);
}

void from_mat(const Eigen::MatrixXd& X, Eigen::Ref<Eigen::VectorXd> out) {
  const int n = static_cast<int>(X.rows());
  int k = 0;
  for (int j = 0; j < n; ++j)
    for (int i = j; i < n; ++i) out(k++) = i == j ? X(i, j) : M_SQRT1_2 * (X(i, j) + X(j, i));
}

// Lower factor L with X = L L'; falls back to the symmetric square root.
bool factor(const Eigen::MatrixXd& X, Eigen::MatrixXd& L) {
  Eigen::LLT<Eigen::MatrixXd> llt(X);
  if (llt.info() == Eigen::Success) {
    L = llt.matrixL();
    if (L.diagonal().minCoeff() > 0.0) return true;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(X);
  if (es.info() != Eigen::Success || !(es.eigenvalues()(0) > 0.0)) return false;
  L = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  return true;
}

double soc_step(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& d) {
  const int n = static_cast<int>(x.size());
  if (n == 1) return d(0) < 0.0 ? -x(0) / d(0) : kInf;
  const double xjx = jdot(x, x);
  if (!(xjx > 0.0) || x(0) <= 0.0) return 0.0;
  const double nx = std::sqrt(xjx);
  const Eigen::VectorXd xb = x / nx;
  const double rho0 = jdot(xb, d);
  const Eigen::VectorXd rho1 = d.tail(n - 1) - ((rho0 + d(0)) / (xb(0) + 1.0)) * xb.tail(n - 1);
  const double denom = rho1.norm() - rho0;
  return denom > 0.0 ? nx / denom : kInf;
}

}  // namespace

NtScaling::NtScaling(std::vector<ConeBlock> cones) : cones_(std::move(cones)) {
  int n = 0;
  for (const auto& c : cones_) {
    n = std::max(n, c.start + c.size);
    if (c.kind == ConeKind::SecondOrder) soc_.emplace_back();
    if (c.kind == ConeKind::Psd) psd_.emplace_back();
  }
  lambda_ = Eigen::VectorXd::Zero(n);
  w_ = Eigen::VectorXd::Zero(n);
  h_ = Eigen::VectorXd::Zero(n);
}

bool NtScaling::update(const Eigen::VectorXd& x, const Eigen::VectorXd& z) {
  if (lambda_.size() < x.size()) {
    lambda_.conservativeResize(x.size());
    w_.conservativeResize(x.size());
    h_.conservativeResize(x.size());
  }
  int is = 0, ip = 0;
  for (const auto& c : cones_) {
    const auto xs = x.segment(c.start, c.size);
    const auto zs = z.segment(c.start, c.size);
    switch (c.kind) {
      case ConeKind::NonNegative:
        if (xs.minCoeff() <= 0.0 || zs.minCoeff() <= 0.0) return false;
        w_.segment(c.start, c.size) = (xs.array() / zs.array()).sqrt();
        h_.segment(c.start, c.size) = xs.array() / zs.array();
        lambda_.segment(c.start, c.size) = (xs.array() * zs.array()).sqrt();
        break;
      case ConeKind::SecondOrder: {
        Soc& s = soc_[is++];
        const double xjx = jdot(xs, xs), zjz = jdot(zs, zs);
        if (!(xjx > 0.0) || !(zjz > 0.0) || xs(0) <= 0.0 || zs(0) <= 0.0) return false;
        s.beta = std::pow(xjx / zjz, 0.25);
        const Eigen::VectorXd xb = xs / std::sqrt(xjx);
        const Eigen::VectorXd zb = zs / std::sqrt(zjz);
        const double gamma = std::sqrt(0.5 * (1.0 + xb.dot(zb)));
        Eigen::VectorXd jz = zb;
        jz.tail(c.size - 1) *= -1.0;
        s.wbar = (xb + jz) / (2.0 * gamma);
        s.v = s.wbar;
        s.v(0) += 1.0;
        s.v /= std::sqrt(2.0 * (s.wbar(0) + 1.0));
        // lambda = W z
        const double vz = s.v.dot(zs);
        Eigen::VectorXd lam = 2.0 * vz * s.v;
        lam(0) -= zs(0);
        lam.tail(c.size - 1) += zs.tail(c.size - 1);
        lambda_.segment(c.start, c.size) = s.beta * lam;
        break;
      }
      case ConeKind::Psd: {
        Psd& s = psd_[ip++];
        Eigen::MatrixXd Lx, Lz;
        if (!factor(to_mat(xs, c.order), Lx) || !factor(to_mat(zs, c.order), Lz)) return false;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(Lz.transpose() * Lx, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Eigen::VectorXd sv = svd.singularValues();
        if (!(sv.minCoeff() > 0.0)) return false;
        s.G = Lx * svd.matrixV() * sv.cwiseSqrt().cwiseInverse().asDiagonal();
        const Eigen::MatrixXd Lx_inv =
            Lx.isLowerTriangular()
                ? Eigen::MatrixXd(Lx.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(c.order, c.order)))
                : Eigen::MatrixXd(Lx.inverse());
        s.Ginv = sv.cwiseSqrt().asDiagonal() * svd.matrixV().transpose() * Lx_inv;
        s.R = s.G * s.G.transpose();
        Eigen::MatrixXd Lam = Eigen::MatrixXd::Zero(c.order, c.order);
        Lam.diagonal() = sv;
        from_mat(Lam, lambda_.segment(c.start, c.size));
        break;
      }
    }
  }
  return true;
}

void NtScaling::apply_W(const Eigen::VectorXd& in, Eigen::VectorXd& out) const {
  out = in;
  int is = 0, ip = 0;
  for (const auto& c : cones_) {
    const auto u = in.segment(c.start, c.size);
    auto o = out.segment(c.start, c.size);
    switch (c.kind) {
      case ConeKind::NonNegative: o = w_.segment(c.start, c.size).cwiseProduct(u); break;
      case ConeKind::SecondOrder: {
        const Soc& s = soc_[is++];
        o = 2.0 * s.v.dot(u) * s.v;
        o(0) -= u(0);
        o.tail(c.size - 1) += u.tail(c.size - 1);
        o *= s.beta;
        break;
      }
      case ConeKind::Psd: {
        const Psd& s = psd_[ip++];
        from_mat(s.G.transpose() * to_mat(u, c.order) * s.G, o);
        break;
      }
    }
  }
}

void NtScaling::apply_Wt(const Eigen::VectorXd& in, Eigen::VectorXd& out) const {
  out = in;
  int is = 0, ip = 0;
  for (const auto& c : cones_) {
    const auto u = in.segment(c.start, c.size);
    auto o = out.segment(c.start, c.size);
    switch (c.kind) {
      case ConeKind::NonNegative: o = w_.segment(c.start, c.size).cwiseProduct(u); break;
      case ConeKind::SecondOrder: {
        const Soc& s = soc_[is++];
        o = 2.0 * s.v.dot(u) * s.v;
        o(0) -= u(0);
        o.tail(c.size - 1) += u.tail(c.size - 1);
        o *= s.beta;
        break;
      }
      case ConeKind::Psd: {
        const Psd& s = psd_[ip++];
        from_mat(s.G * to_mat(u, c.order) * s.G.transpose(), o);
        break;
      }
    }
  }
}

void NtScaling::apply_Winv(const Eigen::VectorXd& in, Eigen::VectorXd& out) const {
  out = in;
  int is = 0, ip = 0;
  for (const auto& c : cones_) {
    const auto u = in.segment(c.start, c.size);
    auto o = out.segment(c.start, c.size);
    switch (c.kind) {
      case ConeKind::NonNegative: o = u.cwiseQuotient(w_.segment(c.start, c.size)); break;
      case ConeKind::SecondOrder: {
        // W^{-1} = (2 J v v' J - J) / beta
        const Soc& s = soc_[is++];
        Eigen::VectorXd jv = s.v;
        jv.tail(c.size - 1) *= -1.0;
        o = 2.0 * jv.dot(u) * jv;
        o(0) -= u(0);
        o.tail(c.size - 1) += u.tail(c.size - 1);
        o /= s.beta;
        break;
      }
      case ConeKind::Psd: {
        const Psd& s = psd_[ip++];
        from_mat(s.Ginv.transpose() * to_mat(u, c.order) * s.Ginv, o);
        break;
      }
    }
  }
}

void NtScaling::apply_Winvt(const Eigen::VectorXd& in, Eigen::VectorXd& out) const {
  out = in;
  int is = 0, ip = 0;
  for (const auto& c : cones_) {
    const auto u = in.segment(c.start, c.size);
    auto o = out.segment(c.start, c.size);
    switch (c.kind) {
      case ConeKind::NonNegative: o = u.cwiseQuotient(w_.segment(c.start, c.size)); break;
      case ConeKind::SecondOrder: {
        const Soc& s = soc_[is++];
        Eigen::VectorXd jv = s.v;
        jv.tail(c.size - 1) *= -1.0;
        o = 2.0 * jv.dot(u) * jv;
        o(0) -= u(0);
        o.tail(c.size - 1) += u.tail(c.size - 1);
        o /= s.beta;
        break;
      }
      case ConeKind::Psd: {
        const Psd& s = psd_[ip++];
        from_mat(s.Ginv * to_mat(u, c.order) * s.Ginv.transpose(), o);
        break;
      }
    }
  }
}

void NtScaling::apply_H(const Eigen::VectorXd& in, Eigen::VectorXd& out) const {
  out = in;
  int is = 0, ip = 0;
  for (const auto& c : cones_) {
    const auto u = in.segment(c.start, c.size);
    auto o = out.segment(c.start, c.size);
    switch (c.kind) {
      case ConeKind::NonNegative: o = h_.segment(c.start, c.size).cwiseProduct(u); break;
      case ConeKind::SecondOrder: {
        // H = beta^2 (2 wbar wbar' - J)
        const Soc& s = soc_[is++];
        o = 2.0 * s.wbar.dot(u) * s.wbar;
        o(0) -= u(0);
        o.tail(c.size - 1) += u.tail(c.size - 1);
        o *= s.beta * s.beta;
        break;
      }
      case ConeKind::Psd: {
        const Psd& s = psd_[ip++];
        from_mat(s.R * to_mat(u, c.order) * s.R, o);
        break;
      }
    }
  }
}

void NtScaling::jordan(const Eigen::VectorXd& u, const Eigen::VectorXd& v, Eigen::VectorXd& out) const {
  out = Eigen::VectorXd::Zero(u.size());
  for (const auto& c : cones_) {
    const auto a = u.segment(c.start, c.size), b = v.segment(c.start, c.size);
    auto o = out.segment(c.start, c.size);
    switch (c.kind) {
      case ConeKind::NonNegative: o = a.cwiseProduct(b); break;
      case ConeKind::SecondOrder:
        o(0) = a.dot(b);
        o.tail(c.size - 1) = a(0) * b.tail(c.size - 1) + b(0) * a.tail(c.size - 1);
        break;
      case ConeKind::Psd: {
        const Eigen::MatrixXd A = to_mat(a, c.order), B = to_mat(b, c.order);
        from_mat(0.5 * (A * B + B * A), o);
        break;
      }
    }
  }
}

void NtScaling::lambda_solve(const Eigen::VectorXd& v, Eigen::VectorXd& out) const {
  out = v;
  for (const auto& c : cones_) {
    const auto l = lambda_.segment(c.start, c.size);
    const auto b = v.segment(c.start, c.size);
    auto o = out.segment(c.start, c.size);
    switch (c.kind) {
      case ConeKind::NonNegative: o = b.cwiseQuotient(l); break;
      case ConeKind::SecondOrder: {
        const double l0 = l(0);
        const auto l1 = l.tail(c.size - 1);
        const double u0 = (l0 * b(0) - l1.dot(b.tail(c.size - 1))) / (l0 * l0 - l1.squaredNorm());
        o(0) = u0;
        o.tail(c.size - 1) = (b.tail(c.size - 1) - u0 * l1) / l0;
        break;
      }
      case ConeKind::Psd: {
        // lambda is diagonal: u_ij = 2 v_ij / (l_i + l_j)
        int k = 0;
        const int n = c.order;
        Eigen::VectorXd d(n);
        for (int j = 0; j < n; ++j) d(j) = l(svec_index(n, j, j));
        for (int j = 0; j < n; ++j)
          for (int i = j; i < n; ++i, ++k) o(k) = 2.0 * b(k) / (d(i) + d(j));
        break;
      }
    }
  }
}

void NtScaling::add_identity(double s, Eigen::VectorXd& v) const {
  for (const auto& c : cones_) {
    switch (c.kind) {
      case ConeKind::NonNegative: v.segment(c.start, c.size).array() += s; break;
      case ConeKind::SecondOrder: v(c.start) += s; break;
      case ConeKind::Psd:
        for (int j = 0; j < c.order; ++j) v(c.start + svec_index(c.order, j, j)) += s;
        break;
    }
  }
}

double NtScaling::max_step(const Eigen::VectorXd& d) const {
  double a = kInf;
  for (const auto& c : cones_) {
    const auto l = lambda_.segment(c.start, c.size);
    const auto dd = d.segment(c.start, c.size);
    switch (c.kind) {
      case ConeKind::NonNegative:
        for (int i = 0; i < c.size; ++i)
          if (dd(i) < 0.0) a = std::min(a, -l(i) / dd(i));
        break;
      case ConeKind::SecondOrder: a = std::min(a, soc_step(l, dd)); break;
      case ConeKind::Psd: {
        const int n = c.order;
        Eigen::VectorXd isq(n);
        for (int j = 0; j < n; ++j) isq(j) = 1.0 / std::sqrt(l(svec_index(n, j, j)));
        const Eigen::MatrixXd B = isq.asDiagonal() * to_mat(dd, n) * isq.asDiagonal();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B, Eigen::EigenvaluesOnly);
        const double emin = es.eigenvalues()(0);
        if (emin < 0.0) a = std::min(a, -1.0 / emin);
        break;
      }
    }
  }
  return a;
}

double max_step_direct(const ConeBlock& cone, const Eigen::VectorXd& x, const Eigen::VectorXd& d) {
  switch (cone.kind) {
    case ConeKind::NonNegative: {
      double a = kInf;
      for (int i = 0; i < x.size(); ++i)
        if (d(i) < 0.0) a = std::min(a, -x(i) / d(i));
      return a;
    }
    case ConeKind::SecondOrder: return soc_step(x, d);
    case ConeKind::Psd: {
      Eigen::MatrixXd L;
      if (!factor(to_mat(x, cone.order), L)) return 0.0;
      const Eigen::MatrixXd Li = L.inverse();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Li * to_mat(d, cone.order) * Li.transpose(),
                                                       Eigen::EigenvaluesOnly);
      const double emin = es.eigenvalues()(0);
      return emin < 0.0 ? -1.0 / emin : kInf;
    }
  }
  return 0.0;
}

}  // namespace aropt::conic
