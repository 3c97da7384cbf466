#ifndef OPTOQNG_NELDER_MEAD_HPP
#define OPTOQNG_NELDER_MEAD_HPP

#include "optoqng/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>
#include <vector>

namespace optoqng {

struct NelderMeadOptions {
  double initial_step = 0.05;
  double x_tolerance = 1e-9;
  double f_tolerance = 1e-13;
  int max_evaluations = 2000;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value;
  int evaluations;
  bool converged;
};

/**
 * Minimizes f inside the box [lower, upper] with the Nelder-Mead simplex.
 * Trial points are clamped to the box.
 */
template <typename F>
NelderMeadResult nelder_mead(F&& f, Eigen::VectorXd start, const Eigen::VectorXd& lower,
                             const Eigen::VectorXd& upper, const NelderMeadOptions& opt = {}) {
  const auto n = start.size();
  detail::require(lower.size() == n && upper.size() == n, "nelder_mead: bound size mismatch");
  detail::require((lower.array() <= upper.array()).all(), "nelder_mead: empty box");
  auto clamp = [&](Eigen::VectorXd x) {
    return Eigen::VectorXd(x.cwiseMax(lower).cwiseMin(upper));
  };
  int evals = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++evals;
    return static_cast<double>(f(x));
  };

  std::vector<Eigen::VectorXd> pts;
  pts.push_back(clamp(start));
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd p = pts[0];
    p(i) += (p(i) + opt.initial_step <= upper(i)) ? opt.initial_step : -opt.initial_step;
    pts.push_back(clamp(p));
  }
  std::vector<double> vals;
  for (const auto& p : pts) vals.push_back(eval(p));

  std::vector<std::size_t> order(pts.size());
  bool converged = false;
  while (evals < opt.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return vals[a] < vals[b]; });
    const auto best = order.front();
    const auto worst = order.back();
    const auto second = order[order.size() - 2];

    double spread = 0.0;
    for (const auto& p : pts) spread = std::max(spread, (p - pts[best]).cwiseAbs().maxCoeff());
    if (spread <= opt.x_tolerance && std::abs(vals[worst] - vals[best]) <= opt.f_tolerance) {
      converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (i != worst) centroid += pts[i];
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd reflected = clamp(centroid + (centroid - pts[worst]));
    const double fr = eval(reflected);
    if (fr < vals[best]) {
      const Eigen::VectorXd expanded = clamp(centroid + 2.0 * (centroid - pts[worst]));
      const double fe = eval(expanded);
      if (fe < fr) {
        pts[worst] = expanded;
        vals[worst] = fe;
      } else {
        pts[worst] = reflected;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = reflected;
      vals[worst] = fr;
      continue;
    }
    const bool outside = fr < vals[worst];
    const Eigen::VectorXd contracted =
        outside ? clamp(centroid + 0.5 * (reflected - centroid))
                : clamp(centroid + 0.5 * (pts[worst] - centroid));
    const double fc = eval(contracted);
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = contracted;
      vals[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i == best) continue;
      pts[i] = clamp(pts[best] + 0.5 * (pts[i] - pts[best]));
      vals[i] = eval(pts[i]);
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  return {pts[best], vals[best], evals, converged};
}

}  // namespace optoqng

#endif  // OPTOQNG_NELDER_MEAD_HPP
