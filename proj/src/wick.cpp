#include "monocluster/wick.hpp"

#include "monocluster/error.hpp"

namespace monocluster {

WickEvaluator::WickEvaluator(Eigen::MatrixXd covariance) : k_(std::move(covariance)) {
  if (k_.rows() != k_.cols()) throw ConfigError("covariance must be square");
  if (k_.rows() > 255) throw ConfigError("too many Gaussian variables");
}

double WickEvaluator::moment(const Monomial& n) {
  if (static_cast<Eigen::Index>(n.size()) != k_.rows())
    throw ConfigError("monomial length does not match covariance");
  int total = 0;
  for (auto e : n) total += e;
  if (total % 2) return 0.0;
  std::string key(n.begin(), n.end());
  return recurse(key, total);
}

double WickEvaluator::recurse(std::string& key, int remaining) {
  if (remaining == 0) return 1.0;
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  const std::string saved = key;
  std::size_t i = 0;
  while (key[i] == 0) ++i;
  --key[i];
  double sum = 0.0;
  for (std::size_t j = 0; j < key.size(); ++j) {
    const int nj = static_cast<unsigned char>(key[j]);
    if (nj == 0) continue;
    const double kij = k_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    if (kij == 0.0) continue;
    --key[j];
    sum += kij * nj * recurse(key, remaining - 2);
    ++key[j];
  }
  ++key[i];
  memo_.emplace(saved, sum);
  return sum;
}

double wick_moment(const WickProblem& w) {
  if (w.points.size() % 2) return 0.0;
  Monomial n(static_cast<std::size_t>(w.covariance.rows()), 0);
  for (int p : w.points) {
    if (p < 0 || p >= w.covariance.rows()) throw ConfigError("Wick point index out of range");
    ++n[static_cast<std::size_t>(p)];
  }
  WickEvaluator eval(w.covariance);
  return eval.moment(n);
}

double pairing_count(int points) {
  if (points < 0 || points % 2) return 0.0;
  double c = 1.0;
  for (int k = points - 1; k > 1; k -= 2) c *= k;
  return c;
}

}  // namespace monocluster
