#pragma once

#include <vector>

namespace monocluster {

/// Power series in the coupling truncated at a fixed order R.
class LambdaSeries {
 public:
  LambdaSeries() = default;
  explicit LambdaSeries(int order) : c_(static_cast<std::size_t>(order) + 1, 0.0) {}
  explicit LambdaSeries(std::vector<double> coefficients);
  static LambdaSeries one(int order);

  int order() const { return static_cast<int>(c_.size()) - 1; }
  double operator[](int r) const { return c_.at(static_cast<std::size_t>(r)); }
  double& operator[](int r) { return c_.at(static_cast<std::size_t>(r)); }
  const std::vector<double>& coefficients() const { return c_; }

  LambdaSeries& operator+=(const LambdaSeries& o);
  LambdaSeries& operator-=(const LambdaSeries& o);
  LambdaSeries& operator*=(double s);

  LambdaSeries truncated(int order) const;
  LambdaSeries pow(int k) const;
  double evaluate(double lambda) const;

 private:
  std::vector<double> c_;
};

LambdaSeries operator+(LambdaSeries a, const LambdaSeries& b);
LambdaSeries operator-(LambdaSeries a, const LambdaSeries& b);
LambdaSeries operator*(LambdaSeries a, double s);
LambdaSeries operator*(double s, LambdaSeries a);
/// Cauchy product truncated at the smaller order.
LambdaSeries operator*(const LambdaSeries& a, const LambdaSeries& b);
/// Throws ContractViolation unless the divisor's constant term is 1.
LambdaSeries operator/(const LambdaSeries& a, const LambdaSeries& b);

/// max_r |a_r - b_r| / max(|a_r|, |b_r|, floor).
double relative_deviation(const LambdaSeries& a, const LambdaSeries& b, double floor = 1e-14);
double absolute_deviation(const LambdaSeries& a, const LambdaSeries& b);

}  // namespace monocluster
