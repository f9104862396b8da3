#pragma once

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <vector>

namespace monocluster {

using Point = std::vector<double>;

/// Translation-invariant covariance kernel C(x, y) = c(x - y) on R^d.
///
/// Values are cached by quantized separation; copies share the cache, so a
/// Kernel is cheap to pass around by value. Reads are thread-safe.
class Kernel {
 public:
  using Evaluator = std::function<double(std::span<const double>)>;

  Kernel(int dim, Evaluator evaluator);

  int dim() const { return dim_; }

  double operator()(std::span<const double> x, std::span<const double> y) const;
  double at(std::span<const double> separation) const;
  double at_origin() const;

  /// Fitted K_1(r) values recorded so far, keyed by exponent r.
  std::map<int, double> decay_constants() const;

  /// Number of distinct separations evaluated so far.
  std::size_t cache_size() const;

 private:
  friend double fit_decay_constant(const Kernel& kernel, int r, double radius);

  struct State;
  int dim_;
  std::shared_ptr<State> state_;
};

/// Smooth-cutoff slice propagator
///   C(x) = (2 pi)^-d  int d^dp  e^{i p.x} e^{-p^2} / (p^2 + 1),
/// evaluated by product Gauss-Legendre quadrature on the cube |p_i| <= 8.
/// `quad_order` is the number of nodes per panel (32 panels per half-axis).
Kernel make_slice_kernel(int dim, int quad_order = 16);

/// K_1(r) = max |C(s)| (1 + |s|)^r over sampled separations |s| <= radius.
/// Samples lie on rays along the first axis and the main diagonal at step
/// 0.5, so the sample set grows with the radius.
double fit_decay_constant(const Kernel& kernel, int r, double radius);

/// Minimum eigenvalue of the Gram matrix [C(x_i, x_j)].
double gram_min_eigenvalue(const Kernel& kernel, const std::vector<Point>& nodes);

inline constexpr double kTolPsd = 1e-10;

}  // namespace monocluster
