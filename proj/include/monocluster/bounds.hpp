#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "monocluster/gaussian_engine.hpp"

namespace monocluster {

using Rational = boost::multiprecision::cpp_rational;

struct CheckReport {
  std::string name;
  bool pass = true;
  double worst = 0.0;  // worst observed value / bound
  std::string witness;
  std::size_t cases = 0;
};

/// Graphs and parameters over which the symbolic constants are calibrated.
struct CalibrationFamily {
  Window window = Window::hypercube(1, 3, 3);
  Polymer sources;
  int p_max = 4;
  int h_samples = 8;
  std::uint64_t seed = 7;
};

struct BoundConstants {
  int d = 1;
  int m = 1;
  int r1 = 0;  // 4 d (m + 2)
  int r = 0;   // r1 + d + 1
  double c00 = 0.0;
  double K1_near = 0.0;  // K_1(d + 1)
  double K1_r = 0.0;     // K_1(r)
  double K2 = 0.0;
  double K3 = 0.0;
  double lattice_sum = 0.0;  // sum over cells of (1 + d(0, cell))^{-(d+1)}
  double K4 = 0.0;
  double K5 = 0.0;
  double K6 = 0.0;
  double K_prime = 1.0;           // calibrated sup of xi(b)
  double K_prime_envelope = 0.0;  // analytic sup of xi(b)
  double K7 = 1.0;
  double norm_P = 0.0;
  double K9 = 0.0;
  double K10 = 0.0;
  double K10_calibrated = 0.0;

  double K8(int n) const;
  /// Coupling with 2 e K_9 K_10 lambda = ratio.
  double coupling_for_ratio(double ratio) const;
};

/// Sampling radius used for K_1(r): wide enough to pass the peak of
/// |C(s)| (1 + s)^r while staying above the quadrature noise floor.
double decay_radius(int r);

/// Upper bound on sum over cells of (1 + d(0, cell))^{-(d+1)}; exact for d = 1.
double decay_lattice_sum(int d);

/// sup_n (n!)^{m+1} prod_{i<=n} (1 + d_i)^{-r1/2}, with at most two links
/// per cell and cells taken in order of increasing distance.
double volume_envelope(int d, int m);

/// xi(b) = (n_G(b)!)^{m+1} prod over links {b, b'} of (1 + d)^{-r1/2}.
std::vector<std::pair<MayerBox, double>> xi_values(const ClusterGraph& g, int m, int r1);

BoundConstants compute_constants(const Kernel& kernel, const Polynomial& p,
                                 const CalibrationFamily& family);

/// Gauss-Hermite estimate of Z over cells with free covariance (Cholesky
/// factor of the node Gram matrix, tensor rule with `points` per axis).
double z_quadrature(const DiscretizedModel& model, std::span<const Cell> cells, double lambda,
                    int points = 16);

/// 1/Z_0^{#Gamma_p} * Z(Y_G) Z_0^{#Lambda - #Y_G} / Z(Lambda) at the model coupling.
double parasite_ratio(const DiscretizedModel& model, const ClusterGraph& g, int points = 16);
/// 0 < ratio <= exp(2 K_3 lambda #Gamma_p); requires N >= |Lambda|.
CheckReport parasite_bound_check(const DiscretizedModel& model, const ClusterGraph& g, double K3);

/// max over b in Gamma_p and cells of sum_k' M-bar(b, (cell, k')); h has p entries.
double row_sum_check(const ClusterGraph& g, const HVector& h);

/// Random Wick moments with covariance C[M-bar] against K_5^r prod sqrt(n(b)!).
CheckReport local_factorial_check(const DiscretizedModel& model, const BoundConstants& k,
                                  int p_max, int trials, std::uint64_t seed);

/// No box joined by three links to boxes of one cell, over contributing graphs.
CheckReport link_triple_check(const Window& w, const Polymer& sources, int p_max);
/// Three links from one box to one cell, or an empty vector if there is none.
std::vector<int> link_triple_witness(const ClusterGraph& g);

/// prod (n_G(b)!)^{m+1} prod_q (1 + d_q)^{-r1} / K_7^p over enumerated graphs.
CheckReport volume_argument_check(const Window& w, const Polymer& sources, int p_max,
                                  const BoundConstants& k);

struct SimplexIntegral {
  Rational value;
  double bound = 0.0;  // e^p / alpha!
};
/// sum over sigma|J of the simplex integral of prod_q 1/h_{sigma(q)}, exactly.
SimplexIntegral simplex_integral_check(int p, const std::vector<int>& J);

/// Number of derivation procedures for n derivatives in one box holding s
/// sources, by explicit enumeration of every choice sequence.
std::uint64_t derivation_procedure_count(int s, int n, const Polynomial& p);
/// (s + 4 m^2 n)^n.
double derivation_count_bound(int s, int n, int m);

/// B(G): K_8(n) (K_9 lambda)^p times the simplex integral of
/// prod_q |omega(G,(h,0),q)| (1 + d_q)^{-(d+1)}.
double majorant(const ClusterGraph& g, int n_sources, double lambda, const BoundConstants& k);

struct MajorantSums {
  std::vector<double> terms;      // sum of B(G) over graphs of length p
  std::vector<double> geometric;  // K_8(n) e^n (2 e K_9 K_10 lambda)^p
  std::vector<double> partial;
  std::vector<double> ratios;     // terms[p+1] / terms[p]
  double geometric_ratio = 0.0;
  bool dominated = true;
};
MajorantSums majorant_sum(const Window& w, const Polymer& sources, int n_sources, int p_max,
                          double lambda, const BoundConstants& k);

}  // namespace monocluster
