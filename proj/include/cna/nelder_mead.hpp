#pragma once

// Derivative-free simplex minimizer with dimension-adaptive coefficients.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

namespace cna {

struct NelderMeadOptions {
  int max_iterations = 20000;
  double f_tolerance = 1e-13;  // spread of simplex values
  double x_tolerance = 1e-10;  // max vertex distance from the best vertex
  double initial_step = 0.1;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Minimizes f starting from a simplex around x0.
///
/// Reflection/expansion/contraction/shrink coefficients follow the adaptive
/// choice 1, 1 + 2/n, 0.75 - 1/(2n), 1 - 1/n, which keeps the method usable
/// for the 16- to 72-dimensional problems the optimizer hands it.
template <class F>
NelderMeadResult nelder_mead(F&& f, const Eigen::VectorXd& x0, const NelderMeadOptions& opt) {
  const Eigen::Index n = x0.size();
  const double nd = static_cast<double>(n);
  const double alpha = 1.0;
  const double gamma = 1.0 + 2.0 / nd;
  const double rho = 0.75 - 1.0 / (2.0 * nd);
  const double sigma = 1.0 - 1.0 / nd;

  NelderMeadResult out;
  std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(n + 1), x0);
  std::vector<double> vals(static_cast<std::size_t>(n + 1));
  auto eval = [&](const Eigen::VectorXd& x) {
    ++out.evaluations;
    return f(x);
  };

  for (Eigen::Index i = 0; i < n; ++i) {
    auto& p = pts[static_cast<std::size_t>(i + 1)];
    p(i) += (p(i) != 0.0 ? opt.initial_step * std::max(1.0, std::abs(p(i))) : opt.initial_step);
  }
  for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = eval(pts[i]);

  std::vector<std::size_t> order(pts.size());
  Eigen::VectorXd centroid(n);
  for (; out.iterations < opt.max_iterations; ++out.iterations) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[order.size() - 2];

    double spread = std::abs(vals[worst] - vals[best]);
    double reach = 0.0;
    for (const auto& p : pts) reach = std::max(reach, (p - pts[best]).cwiseAbs().maxCoeff());
    if (spread <= opt.f_tolerance && reach <= opt.x_tolerance) {
      out.converged = true;
      break;
    }

    centroid.setZero();
    for (std::size_t i = 0; i + 1 < order.size(); ++i) centroid += pts[order[i]];
    centroid /= nd;

    const Eigen::VectorXd xr = centroid + alpha * (centroid - pts[worst]);
    const double fr = eval(xr);
    if (fr < vals[best]) {
      const Eigen::VectorXd xe = centroid + gamma * (xr - centroid);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }

    const bool outside = fr < vals[worst];
    const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + rho * (xr - centroid))
                                       : Eigen::VectorXd(centroid + rho * (pts[worst] - centroid));
    const double fc = eval(xc);
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = xc;
      vals[worst] = fc;
      continue;
    }

    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i == best) continue;
      pts[i] = pts[best] + sigma * (pts[i] - pts[best]);
      vals[i] = eval(pts[i]);
    }
  }

  const auto it = std::min_element(vals.begin(), vals.end());
  const auto idx = static_cast<std::size_t>(it - vals.begin());
  out.x = pts[idx];
  out.f = vals[idx];
  return out;
}

}  // namespace cna
