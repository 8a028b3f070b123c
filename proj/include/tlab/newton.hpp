#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "tlab/complex_poly.hpp"

namespace tlab {

using VecC = Eigen::VectorXcd;
using MatC = Eigen::MatrixXcd;

using ResidualFn = std::function<VecC(const VecC&)>;
using JacobianFn = std::function<MatC(const VecC&)>;

struct NewtonOptions {
  double tol = 1e-12;
  int max_iterations = 60;
  double fd_rel_step = 1e-7;  // central-difference step, times (1 + |x_i|)
  int polish_steps = 2;       // extra steps after reaching tol, kept only if they help
};

struct NewtonResult {
  VecC x;
  double residual_norm = 0.0;
  int iterations = 0;
  std::vector<double> residual_history;
  double tol_used = 0.0;
  bool analytic_jacobian = false;
};

// Central-difference Jacobian of a holomorphic residual map.
MatC fd_jacobian(const ResidualFn& F, const VecC& x, double rel_step = 1e-7);

// Damped Newton iteration. `J` may be empty, in which case the Jacobian is
// formed by central differences. Throws NonConvergence or SingularJacobian.
NewtonResult newton_solve(const ResidualFn& F, const JacobianFn& J, const VecC& x0,
                          const NewtonOptions& opts = {});

// Scalar convenience wrapper.
cd newton_solve_scalar(const std::function<cd(cd)>& F, const std::function<cd(cd)>& dF, cd x0,
                       const NewtonOptions& opts = {});

}  // namespace tlab
