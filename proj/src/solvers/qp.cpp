#include "boundplan/solvers/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace boundplan {

QpResult solve_qp(const MatX& H, const VecX& g, const MatX& G, const VecX& h,
                  int max_iter, double tol) {
  const int n = static_cast<int>(g.size());
  const int m = static_cast<int>(G.rows());

  QpResult res;
  if (m == 0) {
    MatX Hr = H + 1e-12 * MatX::Identity(n, n);
    res.x = Hr.ldlt().solve(-g);
    res.lambda = VecX::Zero(0);
    res.objective = 0.5 * res.x.dot(H * res.x) + g.dot(res.x);
    res.status = QpStatus::Optimal;
    return res;
  }

  const double reg = 1e-10 * std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
  MatX Hr = H + reg * MatX::Identity(n, n);

  VecX x = VecX::Zero(n);
  VecX s = (h - G * x).cwiseMax(1.0);
  VecX lam = VecX::Ones(m);

  const double scale =
      1.0 + std::max({g.lpNorm<Eigen::Infinity>(), h.lpNorm<Eigen::Infinity>(),
                      Hr.lpNorm<Eigen::Infinity>()});

  double best_pinf = std::numeric_limits<double>::infinity();
  int stalled = 0;

  for (int iter = 0; iter < max_iter; ++iter) {
    VecX rd = Hr * x + g + G.transpose() * lam;  // dual residual
    VecX rp = G * x + s - h;                     // primal residual
    double mu = s.dot(lam) / m;
    double pinf = rp.lpNorm<Eigen::Infinity>();
    double dinf = rd.lpNorm<Eigen::Infinity>();

    if (pinf < tol * scale && dinf < tol * scale && mu < tol * scale) {
      res.status = QpStatus::Optimal;
      break;
    }

    // Infeasibility heuristic: primal residual stops improving while the
    // multipliers blow up.
    if (pinf < best_pinf * 0.999) {
      best_pinf = pinf;
      stalled = 0;
    } else {
      ++stalled;
    }
    if (stalled > 12 && pinf > 1e-7 * scale &&
        lam.lpNorm<Eigen::Infinity>() > 1e7) {
      res.status = QpStatus::Infeasible;
      break;
    }

    VecX w = lam.cwiseQuotient(s);  // diag weights
    MatX K = Hr;
    K.noalias() += G.transpose() * w.asDiagonal() * G;
    Eigen::LDLT<MatX> ldlt(K);

    // Affine (predictor) step.
    // rc = S lam - sigma*mu -> affine: rc = S lam
    VecX rhs = -rd + G.transpose() * (lam - w.cwiseProduct(rp));
    VecX dx_aff = ldlt.solve(rhs);
    VecX ds_aff = -rp - G * dx_aff;
    VecX dlam_aff = -lam - w.cwiseProduct(ds_aff);

    auto max_step = [](const VecX& v, const VecX& dv) {
      double a = 1.0;
      for (int i = 0; i < v.size(); ++i)
        if (dv[i] < 0.0) a = std::min(a, -v[i] / dv[i]);
      return a;
    };
    double ap = max_step(s, ds_aff);
    double ad = max_step(lam, dlam_aff);
    double a_aff = std::min(ap, ad);
    double mu_aff = (s + a_aff * ds_aff).dot(lam + a_aff * dlam_aff) / m;
    double sigma = std::pow(mu_aff / std::max(mu, 1e-300), 3.0);

    // Corrector step with centering.
    VecX rc = s.cwiseProduct(lam) + ds_aff.cwiseProduct(dlam_aff) -
              VecX::Constant(m, sigma * mu);
    // Eliminate ds = -rp - G dx and dlam = (-rc - L ds)/S.
    VecX t = (-rc + lam.cwiseProduct(rp)).cwiseQuotient(s);
    rhs = -rd - G.transpose() * t;
    VecX dx = ldlt.solve(rhs);
    VecX ds = -rp - G * dx;
    VecX dlam = (-rc - lam.cwiseProduct(ds)).cwiseQuotient(s);

    double alpha = 0.99 * std::min(max_step(s, ds), max_step(lam, dlam));
    x += alpha * dx;
    s += alpha * ds;
    lam += alpha * dlam;
  }

  if (res.status == QpStatus::MaxIter) {
    VecX rp = G * x + s - h;
    if (rp.lpNorm<Eigen::Infinity>() < 1e-6 * scale &&
        (h - G * x).minCoeff() > -1e-6 * scale) {
      res.status = QpStatus::Optimal;  // good enough in practice
    }
  }

  res.x = x;
  res.lambda = lam;
  res.objective = 0.5 * x.dot(H * x) + g.dot(x);
  return res;
}

}  // namespace boundplan
