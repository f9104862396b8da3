#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "monocluster/cluster_graph.hpp"
#include "monocluster/interpolation.hpp"
#include "monocluster/kernel.hpp"
#include "monocluster/series.hpp"
#include "monocluster/wick.hpp"

namespace monocluster {

/// Real polynomial a_0 + a_1 x + ... + a_{2m} x^{2m}.
struct Polynomial {
  std::vector<double> coefficients;

  int degree() const;
  int half_degree() const { return degree() / 2; }
  double operator()(double x) const;
  /// Largest absolute coefficient.
  double norm() const;
  /// Global minimum over the real line.
  double minimum() const;
  /// Even degree >= 2 with positive leading coefficient.
  void validate() const;
};

/// Finite Gaussian surrogate: window cells x copies 0..N, nodes_per_cell
/// midpoint nodes per cell (weight 1 / nodes_per_cell each), and the source
/// points, all living at copy 0.
struct DiscretizedModel {
  Window window;
  Kernel kernel;
  int nodes_per_cell = 1;
  Polynomial interaction;
  double coupling = 0.0;
  std::vector<Point> sources;
  /// Upper limit on the estimated number of Wick pairings one series
  /// evaluation may touch.
  double budget = 1e9;

  void validate() const;
  Polymer source_polymer() const { return make_source_polymer(sources); }
};

/// Gaussian variables of a surrogate: one per (node, box) plus one per source.
struct VariableSet {
  struct Variable {
    Point x;
    MayerBox box;
    bool source = false;
  };
  std::vector<Variable> variables;
  std::vector<int> source_variables;
  /// Interaction vertices (variable index), each with weight 1 / nodes_per_cell.
  std::vector<int> vertices;
  double vertex_weight = 1.0;
  /// Variables living in each box, sources included.
  std::map<MayerBox, std::vector<int>> by_box;

  int size() const { return static_cast<int>(variables.size()); }
};

/// Variables for the given boxes; vertices sit on the boxes listed in
/// `interacting` (every node of those boxes).
VariableSet make_variables(const DiscretizedModel& model, std::span<const MayerBox> boxes,
                           std::span<const MayerBox> interacting, bool with_sources = true);

/// K(u, u') = C(x_u, x_u') * factor(box_u, box_u').
Eigen::MatrixXd variable_covariance(
    const VariableSet& vars, const Kernel& kernel,
    const std::function<double(const MayerBox&, const MayerBox&)>& box_factor);
Eigen::MatrixXd variable_covariance(const VariableSet& vars, const Kernel& kernel,
                                    const InterpolationMatrix& m);

/// E[prod sources * exp(-lambda sum_v w P(phi_v))] as a series, by direct
/// enumeration of vertex multisets and Wick moments.
LambdaSeries vertex_expansion(const VariableSet& vars, const Eigen::MatrixXd& covariance,
                              const Polynomial& p, int order, double budget);

/// Partition function over a set of cells with free covariance C.
LambdaSeries z_series(const DiscretizedModel& model, std::span<const Cell> cells, int order);
/// Normalization of one isolated cell.
LambdaSeries z0_series(const DiscretizedModel& model, int order);
/// H_{Lambda,N}(x_1..x_n) with covariance C[M_empty] on every window box.
LambdaSeries h_series(const DiscretizedModel& model, int order);
/// Unnormalized Schwinger function S_{Lambda,u} (copy-0 layer only).
LambdaSeries s_unnormalized_series(const DiscretizedModel& model, int order);

/// R(G, h) for one graph at fixed order, with the derivation operators
/// applied once to the polynomial integrand so that evaluation at many h
/// only costs one covariance build and a set of Wick moments.
class GraphSeries {
 public:
  enum class Mode {
    /// Vertices on every window box, covariance C[M_{G,h}], h of length p+1.
    Window,
    /// Vertices on Gamma_p only, covariance C[M-bar_{G,h}], h of length p.
    Restricted,
  };

  GraphSeries(const DiscretizedModel& model, ClusterGraph g, int order, Mode mode);

  /// prod_q omega(G, h, q) times the Gaussian expectation.
  LambdaSeries operator()(const HVector& h) const;
  /// Same with prod_q h_{q-1} omega(G, h, q): the simplex integrand in s
  /// coordinates (Jacobian included).
  LambdaSeries scaled(const HVector& h) const;
  /// Gaussian expectation of the differentiated integrand alone.
  LambdaSeries expectation(const HVector& h) const;

  /// Integral over 1 > h_1 > ... > h_p > 0 of R(G, (h, 0)) (Window mode) or
  /// of the A_0 integrand (Restricted mode), via h_q = s_1...s_q and a tensor
  /// Gauss-Legendre rule. points_per_axis = 0 picks the exact order.
  LambdaSeries simplex_integral(int points_per_axis = 0) const;
  /// Gauss-Legendre points per axis that integrate the s-polynomial exactly.
  int exact_points() const;

  const ClusterGraph& graph() const { return g_; }
  Mode mode() const { return mode_; }
  int max_degree() const { return max_degree_; }

 private:
  using Polynomial_ = std::map<Monomial, double>;
  HVector full_parameters(const HVector& h) const;

  DiscretizedModel model_;
  ClusterGraph g_;
  int order_;
  Mode mode_;
  VariableSet vars_;
  std::unique_ptr<CovintEvaluator> covint_;
  std::vector<Polynomial_> differentiated_;  // per order r
  int max_degree_ = 0;
};

LambdaSeries r_series(const DiscretizedModel& model, const ClusterGraph& g, const HVector& h,
                      int order);

/// A_0(G): integral over the simplex with the restricted covariance and
/// vertices on Gamma_p. Throws ContractViolation on a nonfinite integrand.
LambdaSeries a0_series(const DiscretizedModel& model, const ClusterGraph& g, int order,
                       int points_per_axis = 0);

struct StepCheck {
  LambdaSeries lhs;
  LambdaSeries rhs;
  double deviation = 0.0;
  int extensions = 0;
};

/// R(G,(h,h_m)) against R(G,(h,0)) + sum_l int_0^{h_m} R((G,l),(h,t,t)) dt
/// with adaptive Gauss-Kronrod in t. h_prefix holds h_1..h_m.
StepCheck fundamental_step_check(const DiscretizedModel& model, const ClusterGraph& g,
                                 const std::vector<double>& h_prefix, int order);

struct IdentityCheck {
  LambdaSeries lhs;
  LambdaSeries rhs;
  double deviation = 0.0;  // relative
  std::size_t graphs = 0;
  std::size_t contributing = 0;
};

/// (n + deg P * order) / 2: every link differentiates twice, so longer graphs
/// contribute nothing at this order.
int graph_length_bound(const DiscretizedModel& model, int order);

/// H_{Lambda,N} by direct enumeration against the sum over cluster-graphs
/// (p <= p_max, Gamma_p in the window) of the simplex integral of R(G,(h,0)).
/// p_max must reach graph_length_bound.
IdentityCheck expansion_identity_check(const DiscretizedModel& model, int order, int p_max);

/// Cells whose roof still lies inside the window: altitude < N.
std::vector<Cell> coupled_cells(const Polymer& gamma, const Window& w);

struct SchwingerResult {
  LambdaSeries series;       // sum over graphs of A(G, Lambda, N)
  LambdaSeries direct;       // H / (Z(Lambda) Z_0^{N |Lambda|})
  double deviation = 0.0;    // relative
  std::size_t graphs = 0;
};

SchwingerResult schwinger(const DiscretizedModel& model, int order, int p_max);

/// Work estimate (vertex multisets times pairings) for h_series.
double h_series_work(const DiscretizedModel& model, int order);

}  // namespace monocluster
