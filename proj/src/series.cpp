#include "monocluster/series.hpp"

#include <algorithm>
#include <cmath>

#include "monocluster/error.hpp"

namespace monocluster {

LambdaSeries::LambdaSeries(std::vector<double> coefficients) : c_(std::move(coefficients)) {
  if (c_.empty()) throw ConfigError("series needs at least one coefficient");
}

LambdaSeries LambdaSeries::one(int order) {
  LambdaSeries s(order);
  s.c_[0] = 1.0;
  return s;
}

LambdaSeries& LambdaSeries::operator+=(const LambdaSeries& o) {
  if (o.order() < order()) c_.resize(o.c_.size());
  for (std::size_t r = 0; r < c_.size(); ++r) c_[r] += o.c_[r];
  return *this;
}

LambdaSeries& LambdaSeries::operator-=(const LambdaSeries& o) {
  if (o.order() < order()) c_.resize(o.c_.size());
  for (std::size_t r = 0; r < c_.size(); ++r) c_[r] -= o.c_[r];
  return *this;
}

LambdaSeries& LambdaSeries::operator*=(double s) {
  for (double& c : c_) c *= s;
  return *this;
}

LambdaSeries LambdaSeries::truncated(int order) const {
  if (order > this->order()) throw ConfigError("cannot extend a truncated series");
  return LambdaSeries(std::vector<double>(c_.begin(), c_.begin() + order + 1));
}

LambdaSeries LambdaSeries::pow(int k) const {
  if (k < 0) throw ConfigError("negative series power");
  LambdaSeries result = one(order());
  LambdaSeries base = *this;
  while (k) {
    if (k & 1) result = result * base;
    base = base * base;
    k >>= 1;
  }
  return result;
}

double LambdaSeries::evaluate(double lambda) const {
  double v = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * lambda + *it;
  return v;
}

LambdaSeries operator+(LambdaSeries a, const LambdaSeries& b) { return a += b; }
LambdaSeries operator-(LambdaSeries a, const LambdaSeries& b) { return a -= b; }
LambdaSeries operator*(LambdaSeries a, double s) { return a *= s; }
LambdaSeries operator*(double s, LambdaSeries a) { return a *= s; }

LambdaSeries operator*(const LambdaSeries& a, const LambdaSeries& b) {
  const int order = std::min(a.order(), b.order());
  LambdaSeries out(order);
  for (int i = 0; i <= order; ++i)
    for (int j = 0; i + j <= order; ++j) out[i + j] += a[i] * b[j];
  return out;
}

LambdaSeries operator/(const LambdaSeries& a, const LambdaSeries& b) {
  if (std::abs(b[0] - 1.0) > 1e-12)
    throw ContractViolation("series division requires a unit constant term");
  const int order = std::min(a.order(), b.order());
  LambdaSeries q(order);
  for (int r = 0; r <= order; ++r) {
    double v = a[r];
    for (int j = 1; j <= r; ++j) v -= b[j] * q[r - j];
    q[r] = v;
  }
  return q;
}

double relative_deviation(const LambdaSeries& a, const LambdaSeries& b, double floor) {
  const int order = std::min(a.order(), b.order());
  double worst = 0.0;
  for (int r = 0; r <= order; ++r) {
    const double scale = std::max({std::abs(a[r]), std::abs(b[r]), floor});
    worst = std::max(worst, std::abs(a[r] - b[r]) / scale);
  }
  return worst;
}

double absolute_deviation(const LambdaSeries& a, const LambdaSeries& b) {
  const int order = std::min(a.order(), b.order());
  double worst = 0.0;
  for (int r = 0; r <= order; ++r) worst = std::max(worst, std::abs(a[r] - b[r]));
  return worst;
}

}  // namespace monocluster
