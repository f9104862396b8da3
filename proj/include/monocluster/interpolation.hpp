#pragma once

#include <Eigen/Dense>
#include <map>
#include <span>
#include <vector>

#include "monocluster/cluster_graph.hpp"

namespace monocluster {

/// Decreasing interpolation parameters (h_1, ..., h_{p+1}) with the
/// conventions h_0 = 1 and 1/h_{-1} = 0.
///
/// Internally the vector is also kept in the multiplicative coordinates
/// s_q = h_q / h_{q-1}, so ratios h_a / h_b are products of s's and stay
/// finite even on the boundary of the simplex.
class HVector {
 public:
  HVector() = default;

  /// Requires 1 >= h_1 >= ... >= h_{p+1} >= 0 with every entry but the last > 0.
  static HVector from_h(std::vector<double> h);
  /// Any s in [0,1]^{p+1}; h_q = s_1 ... s_q.
  static HVector from_s(std::vector<double> s);

  int size() const { return static_cast<int>(s_.size()); }
  /// h_i for 0 <= i <= size().
  double h(int i) const;
  /// h_a / h_b for -1 <= b <= a <= size(): 1 if a == b, 0 if b == -1.
  double ratio(int a, int b) const;

  const std::vector<double>& values() const { return h_; }
  const std::vector<double>& multipliers() const { return s_; }

  HVector appended(double h_next) const;

 private:
  std::vector<double> h_;
  std::vector<double> s_;
};

/// Symmetric matrix on an ordered finite set of boxes.
struct InterpolationMatrix {
  std::vector<MayerBox> support;
  Eigen::MatrixXd entries;

  double operator()(const MayerBox& a, const MayerBox& b) const;
  std::ptrdiff_t index_of(const MayerBox& b) const;  // -1 if absent
};

/// The window cells x copies 0..(highest final altitude + 1 + margin).
std::vector<MayerBox> matrix_support(const ClusterGraph& g, const Window& w, int sky_margin = 1);

double m_empty(const MayerBox& a, const MayerBox& b);
InterpolationMatrix m_empty_matrix(std::span<const MayerBox> support);

/// T_Gamma[M]: M on Gamma x Gamma, 1 on roof x roof, identity on sky, 0 across.
InterpolationMatrix truncate(const InterpolationMatrix& m, const Polymer& gamma);

/// Closed-form entry M_{G,h}(a, b); requires h.size() == p + 1.
double covint(const ClusterGraph& g, const HVector& h, const MayerBox& a, const MayerBox& b);

/// Closed-form matrix with the graph's indices precomputed once, for
/// repeated evaluation at many parameter vectors.
class CovintEvaluator {
 public:
  CovintEvaluator(const ClusterGraph& g, std::vector<MayerBox> support);

  InterpolationMatrix operator()(const HVector& h) const;
  /// Restriction to Gamma_p x Gamma_p of M_{G,(h,0)}; h has p entries.
  InterpolationMatrix restricted(const HVector& h) const;

  const std::vector<MayerBox>& support() const { return support_; }

 private:
  struct Indices {
    int mu, nu;
  };
  int p_;
  std::vector<MayerBox> support_;
  std::vector<Indices> indices_;
  std::vector<bool> in_final_stage_;
};

InterpolationMatrix build_covint(const ClusterGraph& g, const HVector& h,
                                 std::vector<MayerBox> support);

/// Builds M_{G,h} from M_empty by applying
///   M <- (h_{j+1}/h_j) M + (1 - h_{j+1}/h_j) T_{Gamma_j}[M],  j = 0..p.
InterpolationMatrix build_recursive(const ClusterGraph& g, const HVector& h,
                                    std::vector<MayerBox> support);

/// Max entrywise deviation between the closed form and (a) one recursion
/// step from the closed form of the truncated graph, (b) the full
/// recursive construction from M_empty.
double recursion_check(const ClusterGraph& g, const HVector& h, std::vector<MayerBox> support);

/// Minimum eigenvalue (symmetric tridiagonal QR via Eigen).
double positivity_check(const InterpolationMatrix& m);

/// omega(G, h, q) for 1 <= q <= p; requires h.size() == p + 1.
double omega(const ClusterGraph& g, const HVector& h, int q);
/// h_{q-1} * omega(G, h, q): polynomial in the s coordinates.
double omega_scaled(const ClusterGraph& g, const HVector& h, int q);

/// M-bar_{G,(h_1..h_p)}: M_{G,(h,0)} on Gamma_p x Gamma_p and 0 elsewhere in
/// the support (default support: the boxes of Gamma_p).
InterpolationMatrix restrict(const ClusterGraph& g, const HVector& h);
InterpolationMatrix restrict(const ClusterGraph& g, const HVector& h, std::vector<MayerBox> support);

}  // namespace monocluster
