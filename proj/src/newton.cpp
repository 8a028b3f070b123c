#include "tlab/newton.hpp"

#include <cmath>

#include "tlab/error.hpp"

namespace tlab {

MatC fd_jacobian(const ResidualFn& F, const VecC& x, double rel_step) {
  const Eigen::Index n = x.size();
  MatC jac;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double h = rel_step * (1.0 + std::abs(x(i)));
    VecC xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    const VecC col = (F(xp) - F(xm)) / (2.0 * h);
    if (i == 0) jac.resize(col.size(), n);
    jac.col(i) = col;
  }
  return jac;
}

namespace {

bool finite(const VecC& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!std::isfinite(v(i).real()) || !std::isfinite(v(i).imag())) return false;
  return true;
}

VecC newton_step(const MatC& jac, const VecC& r) {
  Eigen::FullPivLU<MatC> lu(jac);
  lu.setThreshold(1e-13);
  if (lu.rank() < jac.cols()) fail(ErrorKind::SingularJacobian, "Newton step: Jacobian is rank-deficient");
  return lu.solve(r);
}

}  // namespace

NewtonResult newton_solve(const ResidualFn& F, const JacobianFn& J, const VecC& x0,
                          const NewtonOptions& opts) {
  require(opts.tol > 0.0, "newton_solve tolerance must be positive");
  NewtonResult out;
  out.tol_used = opts.tol;
  out.analytic_jacobian = static_cast<bool>(J);
  VecC x = x0;
  VecC r = F(x);
  double norm = r.norm();
  out.residual_history.push_back(norm);
  int polished = 0;
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    if (!std::isfinite(norm)) break;
    const bool converged = norm <= opts.tol;
    if (converged && polished >= opts.polish_steps) break;
    const MatC jac = J ? J(x) : fd_jacobian(F, x, opts.fd_rel_step);
    const VecC dx = newton_step(jac, r);
    double lambda = 1.0;
    VecC trial;
    VecC rt;
    double nt = 0.0;
    bool accepted = false;
    for (int halving = 0; halving < 12; ++halving) {
      trial = x - lambda * dx;
      rt = F(trial);
      nt = rt.norm();
      if (finite(rt) && nt < norm) {
        accepted = true;
        break;
      }
      if (converged) break;  // polishing never takes damped steps
      lambda *= 0.5;
    }
    if (!accepted) {
      if (converged) break;
      fail(ErrorKind::NonConvergence, "Newton iteration stalled at residual " + std::to_string(norm));
    }
    x = trial;
    r = rt;
    norm = nt;
    out.residual_history.push_back(norm);
    ++out.iterations;
    if (converged) ++polished;
  }
  if (!(norm <= opts.tol))
    fail(ErrorKind::NonConvergence, "Newton iteration exhausted its budget at residual " + std::to_string(norm));
  out.x = x;
  out.residual_norm = norm;
  return out;
}

cd newton_solve_scalar(const std::function<cd(cd)>& F, const std::function<cd(cd)>& dF, cd x0,
                       const NewtonOptions& opts) {
  ResidualFn Fv = [&](const VecC& x) {
    VecC r(1);
    r(0) = F(x(0));
    return r;
  };
  JacobianFn Jv;
  if (dF) {
    Jv = [&](const VecC& x) {
      MatC j(1, 1);
      j(0, 0) = dF(x(0));
      return j;
    };
  }
  VecC start(1);
  start(0) = x0;
  return newton_solve(Fv, Jv, start, opts).x(0);
}

}  // namespace tlab
