#include "noir/inlet_qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace noir {

namespace {

void check_inputs(const InletQp& qp) {
  if (qp.w.size() != qp.f.size() || qp.w.size() == 0) {
    throw Error(Errc::dimension_mismatch, "weight and linear-term sizes differ");
  }
  if (!qp.w.allFinite() || !qp.f.allFinite() || !std::isfinite(qp.budget)) {
    throw Error(Errc::non_finite, "inflow allocation inputs must be finite");
  }
  std::vector<Issue> issues;
  if ((qp.w.array() <= 0.0).any()) {
    issues.push_back({Errc::validation_error, 0, qp.w.minCoeff(),
                      "control weights must be strictly positive"});
  }
  if (!(qp.budget > 0.0)) {
    issues.push_back({Errc::validation_error, 0, qp.budget,
                      "inflow budget must be strictly positive"});
  }
  if (!issues.empty()) throw ValidationError("inflow allocation", issues);
}

}  // namespace

Eigen::VectorXd solve_inlet_qp(const InletQp& qp) {
  check_inputs(qp);
  const Eigen::Index n = qp.f.size();

  // sum_i max(0, (nu - f_i) / w_i) is piecewise linear and increasing in nu
  // with breakpoints at the f_i; grow the active set in breakpoint order
  // until the level that exhausts the budget falls inside the segment.
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return qp.f(a) < qp.f(b); });

  double inv_w_sum = 0.0;
  double ratio_sum = 0.0;  // sum of f_i / w_i over the active set
  double level = 0.0;
  Eigen::Index active = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index i = order[k];
    inv_w_sum += 1.0 / qp.w(i);
    ratio_sum += qp.f(i) / qp.w(i);
    level = (qp.budget + ratio_sum) / inv_w_sum;
    active = k + 1;
    const bool last = k + 1 == n;
    if (last || level <= qp.f(order[k + 1])) break;
  }

  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  for (Eigen::Index k = 0; k < active; ++k) {
    const Eigen::Index i = order[k];
    u(i) = std::max(0.0, (level - qp.f(i)) / qp.w(i));
  }
  return u;
}

double kkt_residual(const Eigen::VectorXd& u, const InletQp& qp) {
  check_inputs(qp);
  if (u.size() != qp.f.size()) {
    throw Error(Errc::dimension_mismatch, "candidate point has the wrong size");
  }

  double residual = std::abs(u.sum() - qp.budget);
  residual = std::max(residual, -std::min(0.0, u.minCoeff()));

  // Best-fit level: midpoint of the gradient range on the active set.
  const Eigen::VectorXd gradient = qp.w.cwiseProduct(u) + qp.f;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (u(i) > 0.0) {
      lo = std::min(lo, gradient(i));
      hi = std::max(hi, gradient(i));
    }
  }
  if (lo > hi) return residual;  // nothing active: budget violation dominates
  const double level = 0.5 * (lo + hi);

  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (u(i) > 0.0) {
      residual = std::max(residual, std::abs(gradient(i) - level));
    } else {
      residual = std::max(residual, std::max(0.0, level - qp.f(i)));
    }
  }
  return residual;
}

}  // namespace noir
