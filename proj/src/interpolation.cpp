#include "monocluster/interpolation.hpp"

#include <algorithm>
#include <cmath>

#include "monocluster/error.hpp"

namespace monocluster {

HVector HVector::from_h(std::vector<double> h) {
  HVector v;
  double prev = 1.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const bool last = i + 1 == h.size();
    if (!std::isfinite(h[i]) || h[i] > prev || h[i] < 0.0 || (!last && h[i] <= 0.0))
      throw ConfigError("h must satisfy 1 >= h_1 >= ... >= h_{p+1} >= 0 with h_q > 0 for q <= p");
    v.s_.push_back(h[i] / prev);
    prev = h[i];
  }
  v.h_ = std::move(h);
  return v;
}

HVector HVector::from_s(std::vector<double> s) {
  HVector v;
  double prod = 1.0;
  for (double si : s) {
    if (!(si >= 0.0 && si <= 1.0)) throw ConfigError("s coordinates must lie in [0, 1]");
    prod *= si;
    v.h_.push_back(prod);
  }
  v.s_ = std::move(s);
  return v;
}

double HVector::h(int i) const {
  if (i == 0) return 1.0;
  if (i < 0 || i > size()) throw ConfigError("h index out of range");
  return h_[i - 1];
}

double HVector::ratio(int a, int b) const {
  if (b < -1 || b > a || a > size()) throw ConfigError("h ratio indices out of range");
  if (a == b) return 1.0;
  if (b == -1) return 0.0;
  double r = 1.0;
  for (int j = b + 1; j <= a; ++j) r *= s_[j - 1];
  return r;
}

HVector HVector::appended(double h_next) const {
  const double last = h(size());
  if (!(h_next >= 0.0 && h_next <= last)) throw ConfigError("appended h must lie in [0, h_p]");
  HVector v = *this;
  v.h_.push_back(h_next);
  v.s_.push_back(last > 0.0 ? h_next / last : 0.0);
  return v;
}

std::ptrdiff_t InterpolationMatrix::index_of(const MayerBox& b) const {
  auto it = std::lower_bound(support.begin(), support.end(), b);
  if (it != support.end() && *it == b) return it - support.begin();
  // Support may be unsorted when given explicitly.
  auto lin = std::find(support.begin(), support.end(), b);
  return lin == support.end() ? -1 : lin - support.begin();
}

double InterpolationMatrix::operator()(const MayerBox& a, const MayerBox& b) const {
  const auto i = index_of(a), j = index_of(b);
  if (i < 0 || j < 0) throw ConfigError("box outside matrix support");
  return entries(i, j);
}

std::vector<MayerBox> matrix_support(const ClusterGraph& g, const Window& w, int sky_margin) {
  int top = w.copy_ceiling();
  for (const Cell& c : w.cells()) top = std::max(top, g.final_stage().altitude(c) + 1);
  std::vector<MayerBox> support;
  for (const Cell& c : w.cells())
    for (int k = 0; k <= top + sky_margin; ++k) support.push_back(MayerBox{c, k});
  return support;
}

double m_empty(const MayerBox& a, const MayerBox& b) {
  if (a.copy == 0 && b.copy == 0) return 1.0;
  if (a.copy == b.copy && a.copy >= 1) return a.cell == b.cell ? 1.0 : 0.0;
  return 0.0;
}

InterpolationMatrix m_empty_matrix(std::span<const MayerBox> support) {
  InterpolationMatrix m{{support.begin(), support.end()}, {}};
  const auto n = static_cast<Eigen::Index>(support.size());
  m.entries.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m.entries(i, j) = m_empty(support[i], support[j]);
  return m;
}

InterpolationMatrix truncate(const InterpolationMatrix& m, const Polymer& gamma) {
  InterpolationMatrix t{m.support, m.entries};
  const auto n = static_cast<Eigen::Index>(m.support.size());
  std::vector<Region> region(n);
  for (Eigen::Index i = 0; i < n; ++i) region[i] = gamma.region_of(m.support[i]);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (region[i] != region[j]) {
        t.entries(i, j) = 0.0;
      } else if (region[i] == Region::Roof) {
        t.entries(i, j) = 1.0;
      } else if (region[i] == Region::Sky) {
        t.entries(i, j) = (i == j) ? 1.0 : 0.0;
      }
    }
  }
  return t;
}

namespace {

void require_length(const ClusterGraph& g, const HVector& h) {
  if (h.size() != g.length() + 1)
    throw ConfigError("h must have p + 1 = " + std::to_string(g.length() + 1) + " entries");
}

double entry_from_indices(const HVector& h, int mu_a, int nu_a, int mu_b, int nu_b) {
  const int smu = std::max(mu_a, mu_b);
  const int snu = std::max(nu_a, nu_b);
  const int inu = std::min(nu_a, nu_b);
  if (smu >= inu) return 0.0;
  return h.ratio(snu, inu) - h.ratio(snu, smu);
}

}  // namespace

double covint(const ClusterGraph& g, const HVector& h, const MayerBox& a, const MayerBox& b) {
  require_length(g, h);
  if (a == b) return 1.0;
  return entry_from_indices(h, g.conception_index(a), g.creation_index(a), g.conception_index(b),
                            g.creation_index(b));
}

CovintEvaluator::CovintEvaluator(const ClusterGraph& g, std::vector<MayerBox> support)
    : p_(g.length()), support_(std::move(support)) {
  indices_.reserve(support_.size());
  for (const MayerBox& b : support_) {
    indices_.push_back({g.conception_index(b), g.creation_index(b)});
    in_final_stage_.push_back(g.final_stage().contains(b));
  }
}

InterpolationMatrix CovintEvaluator::operator()(const HVector& h) const {
  if (h.size() != p_ + 1) throw ConfigError("h must have p + 1 entries");
  const auto n = static_cast<Eigen::Index>(support_.size());
  InterpolationMatrix m{support_, Eigen::MatrixXd(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    m.entries(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v =
          entry_from_indices(h, indices_[i].mu, indices_[i].nu, indices_[j].mu, indices_[j].nu);
      m.entries(i, j) = m.entries(j, i) = v;
    }
  }
  return m;
}

InterpolationMatrix CovintEvaluator::restricted(const HVector& h) const {
  if (h.size() != p_) throw ConfigError("restriction takes p parameters");
  InterpolationMatrix m = (*this)(h.appended(0.0));
  const auto n = static_cast<Eigen::Index>(support_.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (in_final_stage_[i]) continue;
    m.entries.row(i).setZero();
    m.entries.col(i).setZero();
  }
  return m;
}

InterpolationMatrix build_covint(const ClusterGraph& g, const HVector& h,
                                 std::vector<MayerBox> support) {
  require_length(g, h);
  return CovintEvaluator(g, std::move(support))(h);
}

InterpolationMatrix build_recursive(const ClusterGraph& g, const HVector& h,
                                    std::vector<MayerBox> support) {
  require_length(g, h);
  InterpolationMatrix m = m_empty_matrix(support);
  for (int j = 0; j <= g.length(); ++j) {
    const double t = h.ratio(j + 1, j);
    const InterpolationMatrix trunc = truncate(m, g.stage(j));
    m.entries = t * m.entries + (1.0 - t) * trunc.entries;
  }
  return m;
}

double recursion_check(const ClusterGraph& g, const HVector& h, std::vector<MayerBox> support) {
  require_length(g, h);
  const InterpolationMatrix closed = build_covint(g, h, support);
  const int p = g.length();
  const double t = h.ratio(p + 1, p);
  InterpolationMatrix previous;
  if (p == 0) {
    previous = m_empty_matrix(support);
  } else {
    std::vector<double> prefix(h.values().begin(), h.values().end() - 1);
    previous = build_covint(g.truncated(p - 1), HVector::from_h(prefix), support);
  }
  const Eigen::MatrixXd one_step =
      t * previous.entries + (1.0 - t) * truncate(previous, g.final_stage()).entries;
  const InterpolationMatrix full = build_recursive(g, h, std::move(support));
  return std::max((closed.entries - one_step).cwiseAbs().maxCoeff(),
                  (closed.entries - full.entries).cwiseAbs().maxCoeff());
}

double positivity_check(const InterpolationMatrix& m) {
  if (m.entries.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.entries, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double omega_scaled(const ClusterGraph& g, const HVector& h, int q) {
  require_length(g, h);
  if (q < 1 || q > g.length()) throw ConfigError("omega: link index out of range");
  const Link& l = g.link(q);
  const int alpha = q - 1;
  const int smu = std::max(g.conception_index(l.first, alpha), g.conception_index(l.second, alpha));
  if (g.kind(q) == LinkKind::RoofRoof) return -h.ratio(q - 1, smu);
  const int inu = std::min(g.creation_index(l.first, alpha), g.creation_index(l.second, alpha));
  if (smu >= inu) return 0.0;
  return h.ratio(q - 1, inu) - h.ratio(q - 1, smu);
}

double omega(const ClusterGraph& g, const HVector& h, int q) {
  const double scaled = omega_scaled(g, h, q);
  return scaled == 0.0 ? 0.0 : scaled / h.h(q - 1);
}

InterpolationMatrix restrict(const ClusterGraph& g, const HVector& h) {
  return restrict(g, h, g.final_stage().boxes());
}

InterpolationMatrix restrict(const ClusterGraph& g, const HVector& h, std::vector<MayerBox> support) {
  if (h.size() != g.length()) throw ConfigError("restrict takes p parameters");
  return CovintEvaluator(g, std::move(support)).restricted(h);
}

}  // namespace monocluster
