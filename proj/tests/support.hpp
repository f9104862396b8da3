#pragma once

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "monocluster/bounds.hpp"
#include "monocluster/error.hpp"
#include "monocluster/gaussian_engine.hpp"

namespace test_support {

using namespace monocluster;

// C(x) = int_0^inf e^{-t} (4 pi (1 + t))^{-d/2} exp(-|x|^2 / (4 (1 + t))) dt.
inline double kernel_oracle(const std::vector<double>& sep) {
  double r2 = 0.0;
  for (double x : sep) r2 += x * x;
  const double d = static_cast<double>(sep.size());
  auto f = [&](double t) {
    return std::exp(-t) * std::pow(4.0 * std::numbers::pi * (1.0 + t), -d / 2.0) *
           std::exp(-r2 / (4.0 * (1.0 + t)));
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate(f);
}

// Sum over perfect matchings of the listed variables, without memoization.
inline double matching_sum(const std::vector<int>& vars, const Eigen::MatrixXd& k) {
  if (vars.empty()) return 1.0;
  if (vars.size() % 2) return 0.0;
  double total = 0.0;
  for (std::size_t j = 1; j < vars.size(); ++j) {
    std::vector<int> rest;
    for (std::size_t i = 1; i < vars.size(); ++i)
      if (i != j) rest.push_back(vars[i]);
    total += k(vars[0], vars[j]) * matching_sum(rest, k);
  }
  return total;
}

inline Eigen::MatrixXd random_psd(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  return a * a.transpose() / n;
}

inline std::vector<double> random_h(int count, std::mt19937_64& rng, double floor = 1e-3) {
  std::uniform_real_distribution<double> u(floor, 1.0);
  std::vector<double> h(count);
  for (double& x : h) x = u(rng);
  std::sort(h.begin(), h.end(), std::greater<>());
  return h;
}

inline DiscretizedModel model_1d(int side, int copies, std::vector<Point> sources,
                                 std::vector<double> poly = {0, 0, 0, 0, 1}, double lambda = 0.0,
                                 int nodes_per_cell = 1) {
  return DiscretizedModel{Window::hypercube(1, side, copies), make_slice_kernel(1),
                          nodes_per_cell, Polynomial{std::move(poly)}, lambda,
                          std::move(sources)};
}

inline MayerBox box(int cell, int copy) { return MayerBox{Cell{{cell}}, copy}; }

inline Polymer polymer(std::initializer_list<MayerBox> boxes) {
  std::vector<MayerBox> v(boxes);
  return Polymer::from_boxes(v);
}

// Random graphs with every link weight nonvanishing, p <= p_max.
inline std::vector<ClusterGraph> contributing_samples(const Window& w, const Polymer& sources,
                                                      int p_max, int count,
                                                      std::mt19937_64& rng) {
  std::vector<ClusterGraph> out;
  std::uniform_int_distribution<int> pick(0, p_max);
  int attempts = 0;
  while (static_cast<int>(out.size()) < count && attempts++ < 200 * count) {
    ClusterGraph g = random_graph(w, sources, pick(rng), rng);
    if (is_contributing(g)) out.push_back(std::move(g));
  }
  return out;
}

// Exact integral of a polynomial given by values on [0, 1], fitted through
// degree + 1 Chebyshev points and integrated monomial by monomial.
inline double polynomial_integral(const std::function<double(double)>& f, int degree) {
  const int n = degree + 1;
  Eigen::MatrixXd v(n, n);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    const double x = 0.5 - 0.5 * std::cos(std::numbers::pi * (i + 0.5) / n);
    for (int j = 0; j < n; ++j) v(i, j) = std::pow(x, j);
    y(i) = f(x);
  }
  const Eigen::VectorXd c = v.colPivHouseholderQr().solve(y);
  double total = 0.0;
  for (int j = 0; j < n; ++j) total += c(j) / (j + 1);
  return total;
}

}  // namespace test_support
