#include "noir/transition.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace noir {

TimeGrid::TimeGrid(double t0_in, double tf_in, int steps_in)
    : t0(t0_in), tf(tf_in), steps(steps_in) {
  std::vector<Issue> issues;
  if (!(tf > t0)) {
    issues.push_back({Errc::validation_error, 0, tf, "final time must exceed initial time"});
  }
  if (steps < 2) {
    issues.push_back({Errc::validation_error, 0, static_cast<double>(steps),
                      "grid needs at least 2 steps"});
  }
  if (!issues.empty()) throw ValidationError("time grid", issues);
}

namespace {

// Diagonal Pade numerator coefficients, constant term last.
constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                          25200.0, 1512.0, 56.0, 1.0};
constexpr std::array<double, 10> kPade9 = {17643225600.0, 8821612800.0, 2075673600.0,
                                           302702400.0, 30270240.0, 2162160.0,
                                           110880.0, 3960.0, 90.0, 1.0};
constexpr std::array<double, 14> kPade13 = {64764752532480000.0, 32382376266240000.0,
                                            7771770303897600.0, 1187353796428800.0,
                                            129060195264000.0, 10559470521600.0,
                                            670442572800.0, 33522128640.0,
                                            1323241920.0, 40840800.0, 960960.0,
                                            16380.0, 182.0, 1.0};

// 1-norm bounds below which the Pade approximant of each degree meets unit
// roundoff; past the last one the argument is halved until it fits.
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068;
constexpr double kTheta13 = 5.371920351148152;

template <std::size_t N>
Eigen::MatrixXd pade_low_degree(const Eigen::MatrixXd& m, const std::array<double, N>& b) {
  const Eigen::Index dim = m.rows();
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(dim, dim);
  const Eigen::MatrixXd m2 = m * m;

  // even = b0 I + b2 M^2 + ..., odd = b1 I + b3 M^2 + ... (times M below)
  Eigen::MatrixXd even = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd odd = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd power = identity;
  for (std::size_t k = 0; k + 1 < N; k += 2) {
    even += b[k] * power;
    odd += b[k + 1] * power;
    power = power * m2;
  }
  if (N % 2 == 1) even += b[N - 1] * power;

  const Eigen::MatrixXd u = m * odd;
  return (even - u).partialPivLu().solve(even + u);
}

Eigen::MatrixXd pade13(const Eigen::MatrixXd& m) {
  const auto& b = kPade13;
  const Eigen::Index dim = m.rows();
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(dim, dim);
  const Eigen::MatrixXd m2 = m * m;
  const Eigen::MatrixXd m4 = m2 * m2;
  const Eigen::MatrixXd m6 = m4 * m2;

  const Eigen::MatrixXd u =
      m * (m6 * (b[13] * m6 + b[11] * m4 + b[9] * m2) +
           b[7] * m6 + b[5] * m4 + b[3] * m2 + b[1] * identity);
  const Eigen::MatrixXd v = m6 * (b[12] * m6 + b[10] * m4 + b[8] * m2) +
                            b[6] * m6 + b[4] * m4 + b[2] * m2 + b[0] * identity;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

Eigen::MatrixXd expm(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) {
    throw Error(Errc::dimension_mismatch, "matrix exponential needs a square matrix");
  }
  if (!m.allFinite()) {
    throw Error(Errc::non_finite, "matrix exponential input has non-finite entries");
  }
  if (m.rows() == 0) return m;

  const double norm = m.cwiseAbs().colwise().sum().maxCoeff();  // 1-norm
  if (norm <= kTheta3) return pade_low_degree(m, kPade3);
  if (norm <= kTheta5) return pade_low_degree(m, kPade5);
  if (norm <= kTheta7) return pade_low_degree(m, kPade7);
  if (norm <= kTheta9) return pade_low_degree(m, kPade9);

  int squarings = 0;
  double scaled = norm;
  while (scaled > kTheta13) {
    scaled *= 0.5;
    ++squarings;
  }
  Eigen::MatrixXd result = pade13(m / std::exp2(squarings));
  for (int k = 0; k < squarings; ++k) result = result * result;
  return result;
}

AugmentedSystem AugmentedSystem::build(const Eigen::MatrixXd& a,
                                       const Eigen::MatrixXd& r,
                                       const Eigen::MatrixXd& b) {
  const Eigen::Index dim = a.rows();
  if (a.cols() != dim || r.rows() != dim || r.cols() != dim || b.rows() != dim) {
    throw Error(Errc::dimension_mismatch,
                "augmented system blocks must share the interior dimension");
  }

  AugmentedSystem sys;
  sys.state_dim = static_cast<int>(dim);
  sys.a_sys = Eigen::MatrixXd::Zero(2 * dim, 2 * dim);
  sys.a_sys.topLeftCorner(dim, dim) = a;
  sys.a_sys.bottomLeftCorner(dim, dim) = -r;
  sys.a_sys.bottomRightCorner(dim, dim) = -a.transpose();

  sys.b_sys = Eigen::MatrixXd::Zero(2 * dim, b.cols());
  sys.b_sys.topRows(dim) = b;
  return sys;
}

TransitionBlocks transition_blocks(const AugmentedSystem& sys, double delta) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw Error(Errc::validation_error, "transition interval must be finite and nonnegative");
  }
  const int dim = sys.state_dim;
  const Eigen::MatrixXd phi = expm(sys.a_sys * delta);
  return TransitionBlocks{phi.topLeftCorner(dim, dim), phi.topRightCorner(dim, dim),
                          phi.bottomLeftCorner(dim, dim), phi.bottomRightCorner(dim, dim)};
}

namespace {

void check_control(const AugmentedSystem& sys, const Eigen::MatrixXd& u,
                   const TimeGrid& grid) {
  if (u.rows() != grid.points() || u.cols() != sys.b_sys.cols()) {
    std::ostringstream msg;
    msg << "control trajectory is " << u.rows() << "x" << u.cols() << ", expected "
        << grid.points() << "x" << sys.b_sys.cols();
    throw Error(Errc::dimension_mismatch, msg.str());
  }
}

}  // namespace

Eigen::VectorXd forced_response(const AugmentedSystem& sys, const Eigen::MatrixXd& u,
                                const TimeGrid& grid, int t_index) {
  if (t_index < 0 || t_index > grid.steps) {
    std::ostringstream msg;
    msg << "grid index " << t_index << " outside 0.." << grid.steps;
    throw Error(Errc::index_out_of_grid, msg.str());
  }
  check_control(sys, u, grid);

  const double dt = grid.dt();
  const Eigen::MatrixXd phi_step = expm(sys.a_sys * dt);
  const Eigen::MatrixXd forced_old = 0.5 * dt * (phi_step * sys.b_sys);
  const Eigen::MatrixXd forced_new = 0.5 * dt * sys.b_sys;

  // One trapezoid panel per step; the semigroup property turns the full
  // integral into a running recursion.
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(sys.a_sys.rows());
  for (int k = 0; k < t_index; ++k) {
    psi = phi_step * psi + forced_old * u.row(k).transpose() +
          forced_new * u.row(k + 1).transpose();
  }
  return psi;
}

Eigen::MatrixXd propagate(const AugmentedSystem& sys, const Eigen::VectorXd& s0,
                          const Eigen::MatrixXd& u, const TimeGrid& grid) {
  if (s0.size() != sys.a_sys.rows()) {
    std::ostringstream msg;
    msg << "stacked state has size " << s0.size() << ", expected " << sys.a_sys.rows();
    throw Error(Errc::dimension_mismatch, msg.str());
  }
  check_control(sys, u, grid);

  const double dt = grid.dt();
  const Eigen::MatrixXd phi_step = expm(sys.a_sys * dt);
  const Eigen::MatrixXd forced_old = 0.5 * dt * (phi_step * sys.b_sys);
  const Eigen::MatrixXd forced_new = 0.5 * dt * sys.b_sys;

  Eigen::MatrixXd trajectory(grid.points(), s0.size());
  trajectory.row(0) = s0.transpose();
  Eigen::VectorXd state = s0;
  for (int k = 0; k < grid.steps; ++k) {
    state = phi_step * state + forced_old * u.row(k).transpose() +
            forced_new * u.row(k + 1).transpose();
    trajectory.row(k + 1) = state.transpose();
  }
  return trajectory;
}

}  // namespace noir
