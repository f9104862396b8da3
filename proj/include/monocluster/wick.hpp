#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace monocluster {

/// Exponent vector over a fixed list of Gaussian variables.
using Monomial = std::vector<std::uint8_t>;

/// Field insertions (indices into the covariance, repeats allowed).
struct WickProblem {
  std::vector<int> points;
  Eigen::MatrixXd covariance;
};

/// Sum over perfect matchings of the points of the product of covariance
/// entries; 0 for an odd number of points.
double wick_moment(const WickProblem& w);

/// Gaussian moments E[prod_i phi_i^{n_i}] for one covariance, memoized on
/// the exponent vector. Uses E(n) = sum_j K_ij n'_j E(n' - e_j) with
/// n' = n - e_i for the first occupied i.
class WickEvaluator {
 public:
  explicit WickEvaluator(Eigen::MatrixXd covariance);

  double moment(const Monomial& n);
  std::size_t memo_size() const { return memo_.size(); }
  const Eigen::MatrixXd& covariance() const { return k_; }

 private:
  double recurse(std::string& key, int remaining);

  Eigen::MatrixXd k_;
  std::unordered_map<std::string, double> memo_;
};

/// (2k - 1)!! for an even count 2k, 0 for odd counts.
double pairing_count(int points);

}  // namespace monocluster
