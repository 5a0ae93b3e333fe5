#pragma once

#include <Eigen/Dense>

#include "noir/errors.hpp"

namespace noir {

// Uniform grid over a fixed horizon: points t0 + k * dt for k = 0..steps.
struct TimeGrid {
  double t0 = 0.0;
  double tf = 0.0;
  int steps = 0;

  TimeGrid() = default;
  TimeGrid(double t0_in, double tf_in, int steps_in);

  double dt() const { return (tf - t0) / steps; }
  double time(int k) const { return t0 + k * dt(); }
  int points() const { return steps + 1; }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

// Matrix exponential by scaling and squaring with diagonal Pade
// approximants, degree chosen from the 1-norm (degrees 3/5/7/9/13 with the
// standard theta thresholds, squaring past theta_13 = 5.3719). Accurate to
// ~1e-13 relative for well-conditioned inputs. Throws Error(non_finite) on
// non-finite entries.
Eigen::MatrixXd expm(const Eigen::MatrixXd& m);

// Stacked density/co-state dynamics
//   d/dt [x; lambda] = [[A, 0], [-R, -A^T]] [x; lambda] + [B; 0] u.
struct AugmentedSystem {
  Eigen::MatrixXd a_sys;
  Eigen::MatrixXd b_sys;
  int state_dim = 0;  // half of a_sys' side

  static AugmentedSystem build(const Eigen::MatrixXd& a,
                               const Eigen::MatrixXd& r,
                               const Eigen::MatrixXd& b);
};

// The four state-dimension blocks of exp(a_sys * delta). The augmented matrix
// is block lower triangular, so phi12 vanishes identically.
struct TransitionBlocks {
  Eigen::MatrixXd phi11;
  Eigen::MatrixXd phi12;
  Eigen::MatrixXd phi21;
  Eigen::MatrixXd phi22;
};

TransitionBlocks transition_blocks(const AugmentedSystem& sys, double delta);

// Forced response integral(t0..t_k) Phi(t_k, e) B_sys u(e) de on the grid,
// composite trapezoid with the control held at grid values. `u` has one row
// per grid point and one column per inlet. Throws Error(index_out_of_grid)
// for t_index outside 0..steps.
Eigen::VectorXd forced_response(const AugmentedSystem& sys, const Eigen::MatrixXd& u,
                                const TimeGrid& grid, int t_index);

// Propagates the stacked vector across the whole grid; row k is the state at
// grid point k. One matrix exponential for the step, then O(steps)
// matrix-vector work.
Eigen::MatrixXd propagate(const AugmentedSystem& sys, const Eigen::VectorXd& s0,
                          const Eigen::MatrixXd& u, const TimeGrid& grid);

}  // namespace noir
