#include "monocluster/kernel.hpp"

#include <Eigen/Dense>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <mutex>
#include <numbers>
#include <shared_mutex>

#include "monocluster/error.hpp"
#include "monocluster/quadrature.hpp"

namespace monocluster {

namespace {

constexpr double kMomentumCutoff = 8.0;
constexpr int kPanelsPerHalfAxis = 32;
constexpr double kQuadratureTolerance = 1e-12;
constexpr double kSeparationQuantum = 1e-9;

using Key = std::vector<long long>;

Key quantize(std::span<const double> sep) {
  Key key(sep.size()), negated(sep.size());
  for (std::size_t i = 0; i < sep.size(); ++i) {
    key[i] = std::llround(sep[i] / kSeparationQuantum);
    negated[i] = -key[i];
  }
  // C(s) = C(-s): one cache entry per pair.
  return std::max(key, negated);
}

// (1/pi) int_0^8 cos(p s) e^{-p^2} / (p^2 + 1) dp on a composite rule.
double slice_1d(const QuadratureRule& rule, double s) {
  double total = 0.0;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const double p = rule.nodes[j];
    total += rule.weights[j] * std::cos(p * s) * std::exp(-p * p) / (p * p + 1.0);
  }
  return total / std::numbers::pi;
}

}  // namespace

struct Kernel::State {
  Evaluator evaluator;
  mutable std::shared_mutex mutex;
  std::map<Key, double> cache;
  std::map<int, double> decay;
};

Kernel::Kernel(int dim, Evaluator evaluator) : dim_(dim), state_(std::make_shared<State>()) {
  if (dim < 1) throw ConfigError("kernel dimension must be positive");
  state_->evaluator = std::move(evaluator);
}

double Kernel::operator()(std::span<const double> x, std::span<const double> y) const {
  if (x.size() != static_cast<std::size_t>(dim_) || y.size() != x.size())
    throw ConfigError("kernel argument dimension mismatch");
  std::vector<double> sep(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) sep[i] = x[i] - y[i];
  return at(sep);
}

double Kernel::at(std::span<const double> separation) const {
  if (separation.size() != static_cast<std::size_t>(dim_))
    throw ConfigError("kernel separation dimension mismatch");
  const Key key = quantize(separation);
  {
    std::shared_lock lock(state_->mutex);
    if (auto it = state_->cache.find(key); it != state_->cache.end()) return it->second;
  }
  std::vector<double> canonical(key.size());
  for (std::size_t i = 0; i < key.size(); ++i) canonical[i] = key[i] * kSeparationQuantum;
  const double value = state_->evaluator(canonical);
  std::unique_lock lock(state_->mutex);
  state_->cache.emplace(key, value);
  return value;
}

double Kernel::at_origin() const { return at(std::vector<double>(dim_, 0.0)); }

std::map<int, double> Kernel::decay_constants() const {
  std::shared_lock lock(state_->mutex);
  return state_->decay;
}

std::size_t Kernel::cache_size() const {
  std::shared_lock lock(state_->mutex);
  return state_->cache.size();
}

Kernel make_slice_kernel(int dim, int quad_order) {
  if (dim < 1) throw ConfigError("make_slice_kernel: dimension must be positive");
  if (quad_order < 1) throw ConfigError("make_slice_kernel: quad_order must be positive");

  // Truncation tail: the integrand is bounded by e^{-p^2}, so the mass
  // outside the cube is at most d * erfc(8) * (sqrt(pi)/2)^d / pi^d.
  const double axis_mass = 0.5 * std::sqrt(std::numbers::pi) / std::numbers::pi;
  const double tail = dim * boost::math::erfc(kMomentumCutoff) * std::pow(axis_mass, dim);
  const QuadratureRule coarse =
      composite_gauss_legendre(quad_order, kPanelsPerHalfAxis, 0.0, kMomentumCutoff);
  const QuadratureRule fine =
      composite_gauss_legendre(2 * quad_order, kPanelsPerHalfAxis, 0.0, kMomentumCutoff);
  const double discretization = std::abs(slice_1d(coarse, 0.0) - slice_1d(fine, 0.0));
  if (tail + discretization > kQuadratureTolerance)
    throw ConfigError("make_slice_kernel: quadrature error estimate " +
                      std::to_string(tail + discretization) + " exceeds tolerance");

  auto rule = std::make_shared<const QuadratureRule>(coarse);
  if (dim == 1) {
    return Kernel(1, [rule](std::span<const double> s) { return slice_1d(*rule, s[0]); });
  }
  return Kernel(dim, [rule, dim](std::span<const double> s) {
    // Fold to the positive orthant: the odd parts of e^{i p.s} cancel.
    const std::size_t n = rule->nodes.size();
    std::vector<std::vector<double>> axis(dim, std::vector<double>(n));
    std::vector<double> p2(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double p = rule->nodes[j];
      p2[j] = p * p;
      for (int i = 0; i < dim; ++i)
        axis[i][j] = rule->weights[j] * std::cos(p * s[i]) * std::exp(-p * p);
    }
    std::vector<std::size_t> index(dim, 0);
    double total = 0.0;
    while (true) {
      double prod = 1.0, norm2 = 0.0;
      for (int i = 0; i < dim; ++i) {
        prod *= axis[i][index[i]];
        norm2 += p2[index[i]];
      }
      total += prod / (norm2 + 1.0);
      int i = 0;
      while (i < dim && ++index[i] == n) index[i++] = 0;
      if (i == dim) break;
    }
    return total / std::pow(std::numbers::pi, dim);
  });
}

double fit_decay_constant(const Kernel& kernel, int r, double radius) {
  if (radius < 1.0) throw ConfigError("fit_decay_constant: radius must be >= 1");
  if (r < 0) throw ConfigError("fit_decay_constant: exponent must be nonnegative");
  const int d = kernel.dim();
  std::vector<std::vector<double>> directions;
  directions.emplace_back(d, 0.0);
  directions.back()[0] = 1.0;
  if (d > 1) directions.emplace_back(d, 1.0 / std::sqrt(static_cast<double>(d)));

  constexpr double kStep = 0.5;
  double best = 0.0;
  std::vector<double> sep(d);
  for (const auto& u : directions) {
    for (int k = 0; k * kStep <= radius + 1e-12; ++k) {
      const double t = k * kStep;
      for (int i = 0; i < d; ++i) sep[i] = t * u[i];
      best = std::max(best, std::abs(kernel.at(sep)) * std::pow(1.0 + t, r));
    }
  }
  std::unique_lock lock(kernel.state_->mutex);
  kernel.state_->decay[r] = best;
  return best;
}

double gram_min_eigenvalue(const Kernel& kernel, const std::vector<Point>& nodes) {
  const auto n = static_cast<Eigen::Index>(nodes.size());
  if (n == 0) return 0.0;
  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) gram(i, j) = gram(j, i) = kernel(nodes[i], nodes[j]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

}  // namespace monocluster
