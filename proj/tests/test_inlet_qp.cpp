#include <doctest.h>

#include <cmath>

#include "noir/inlet_qp.hpp"
#include "oracles.hpp"

using noir::InletQp;

namespace {

InletQp make_qp(std::initializer_list<double> w, std::initializer_list<double> f,
                double budget) {
  InletQp qp;
  qp.w = Eigen::Map<const Eigen::VectorXd>(std::data(w), std::ssize(w));
  qp.f = Eigen::Map<const Eigen::VectorXd>(std::data(f), std::ssize(f));
  qp.budget = budget;
  return qp;
}

InletQp random_qp(oracles::Rng& rng, int n) {
  InletQp qp;
  qp.w.resize(n);
  qp.f.resize(n);
  for (int i = 0; i < n; ++i) {
    qp.w(i) = rng.uniform(0.2, 3.0);
    qp.f(i) = rng.uniform(-2.0, 2.0);
  }
  qp.budget = rng.uniform(0.5, 2.0);
  return qp;
}

}  // namespace

TEST_CASE("symmetry forces the uniform split") {
  const Eigen::VectorXd u = solve_inlet_qp(make_qp({1, 1, 1, 1}, {3, 3, 3, 3}, 20.0));
  for (int i = 0; i < 4; ++i) CHECK(u(i) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(u.sum() == 20.0);
}

TEST_CASE("a strongly penalized inlet is shut off") {
  const Eigen::VectorXd u = solve_inlet_qp(make_qp({1, 1}, {0, 10}, 4.0));
  CHECK(u(0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(u(1) == 0.0);
}

TEST_CASE("weights tilt the interior split") {
  const Eigen::VectorXd u = solve_inlet_qp(make_qp({1, 2}, {0, 0}, 3.0));
  CHECK(u(0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(u(1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("single inlet always takes the whole budget") {
  const Eigen::VectorXd u = solve_inlet_qp(make_qp({2.5}, {7.0}, 1.25));
  CHECK(std::abs(u(0) - 1.25) <= 1e-12);
}

TEST_CASE("solver output is exact against the residual on random instances") {
  oracles::Rng rng(123);
  for (int trial = 0; trial < 1000; ++trial) {
    const InletQp qp = random_qp(rng, rng.uniform_int(1, 6));
    const Eigen::VectorXd u = solve_inlet_qp(qp);
    CHECK(u.minCoeff() >= 0.0);
    CHECK(std::abs(u.sum() - qp.budget) <= 1e-12);
    CHECK(kkt_residual(u, qp) <= 1e-10);
  }
}

TEST_CASE("residual exposes suboptimal and infeasible points") {
  const InletQp qp = make_qp({1, 1}, {0, 1}, 2.0);
  const Eigen::VectorXd best = solve_inlet_qp(qp);
  CHECK(kkt_residual(best, qp) <= 1e-10);

  Eigen::VectorXd uniform(2);
  uniform << 1.0, 1.0;
  CHECK(kkt_residual(uniform, qp) > 0.1);

  // budget-preserving nudge of the optimum
  Eigen::VectorXd nudged = best;
  nudged(0) += 1e-3;
  nudged(1) -= 1e-3;
  CHECK(kkt_residual(nudged, qp) >= 1e-4);
}

TEST_CASE("agrees with the dense grid search") {
  oracles::Rng rng(987);
  for (int trial = 0; trial < 100; ++trial) {
    const InletQp qp = random_qp(rng, rng.uniform_int(1, 3));
    const Eigen::VectorXd u = solve_inlet_qp(qp);
    const Eigen::VectorXd reference = oracles::qp_grid_oracle(qp, 1e-3);
    CHECK((u - reference).cwiseAbs().maxCoeff() <= 2e-3);
    CHECK(oracles::qp_objective(qp, u) <=
          oracles::qp_objective(qp, reference) + 1e-12);
  }
}

TEST_CASE("scaling both the weights and the pull leaves the split unchanged") {
  oracles::Rng rng(246);
  for (int trial = 0; trial < 50; ++trial) {
    const InletQp qp = random_qp(rng, 4);
    InletQp scaled = qp;
    const double c = rng.uniform(0.1, 10.0);
    scaled.w *= c;
    scaled.f *= c;
    const Eigen::VectorXd u = solve_inlet_qp(qp);
    const Eigen::VectorXd v = solve_inlet_qp(scaled);
    CHECK((u - v).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(solve_inlet_qp(make_qp({1, -1}, {0, 0}, 1.0)), noir::ValidationError);
  CHECK_THROWS_AS(solve_inlet_qp(make_qp({1, 1}, {0, 0}, 0.0)), noir::ValidationError);
  CHECK_THROWS_AS(solve_inlet_qp(make_qp({1, 1}, {0, std::nan("")}, 1.0)), noir::Error);
  InletQp mismatched;
  mismatched.w = Eigen::VectorXd::Ones(2);
  mismatched.f = Eigen::VectorXd::Zero(3);
  mismatched.budget = 1.0;
  CHECK_THROWS_AS(solve_inlet_qp(mismatched), noir::Error);
}
