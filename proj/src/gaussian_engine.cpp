#include "monocluster/gaussian_engine.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <ranges>

#include "monocluster/error.hpp"
#include "monocluster/parallel.hpp"
#include "monocluster/quadrature.hpp"

namespace monocluster {

int Polynomial::degree() const {
  for (int j = static_cast<int>(coefficients.size()) - 1; j >= 0; --j)
    if (coefficients[j] != 0.0) return j;
  return -1;
}

double Polynomial::operator()(double x) const {
  double v = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) v = v * x + *it;
  return v;
}

double Polynomial::norm() const {
  double n = 0.0;
  for (double a : coefficients) n = std::max(n, std::abs(a));
  return n;
}

double Polynomial::minimum() const {
  validate();
  const int deg = degree();
  // Critical points are the real eigenvalues of the companion matrix of P'.
  const int n = deg - 1;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  const double lead = deg * coefficients[deg];
  for (int i = 0; i < n; ++i) companion(0, i) = -((n - i) * coefficients[n - i]) / lead;
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  double best = (*this)(0.0);
  for (const std::complex<double>& z : solver.eigenvalues()) {
    if (std::abs(z.imag()) > 1e-7 * (1.0 + std::abs(z))) continue;
    // One Newton polish on P' for accuracy.
    double x = z.real();
    double d1 = 0.0, d2 = 0.0;
    for (int j = deg; j >= 1; --j) d1 = d1 * x + j * coefficients[j];
    for (int j = deg; j >= 2; --j) d2 = d2 * x + j * (j - 1) * coefficients[j];
    if (d2 != 0.0) x -= d1 / d2;
    best = std::min({best, (*this)(x), (*this)(z.real())});
  }
  return best;
}

void Polynomial::validate() const {
  const int deg = degree();
  if (deg < 2 || deg % 2) throw ConfigError("interaction must have even degree >= 2");
  if (coefficients[deg] <= 0.0) throw ConfigError("interaction needs a positive leading coefficient");
  for (double a : coefficients)
    if (!std::isfinite(a)) throw ConfigError("interaction coefficients must be finite");
}

void DiscretizedModel::validate() const {
  interaction.validate();
  if (kernel.dim() != window.dim()) throw ConfigError("kernel and window dimensions differ");
  if (!(coupling >= 0.0) || !std::isfinite(coupling)) throw ConfigError("coupling must be >= 0");
  if (!(budget > 0.0)) throw ConfigError("work budget must be positive");
  (void)cell_nodes(window.cells().front(), nodes_per_cell);
  for (const Point& x : sources) {
    if (static_cast<int>(x.size()) != window.dim())
      throw ConfigError("source point dimension differs from the window");
    if (!window.contains(cell_of_point(x))) throw ConfigError("source point outside the window");
  }
}

VariableSet make_variables(const DiscretizedModel& model, std::span<const MayerBox> boxes,
                           std::span<const MayerBox> interacting, bool with_sources) {
  VariableSet vars;
  vars.vertex_weight = 1.0 / model.nodes_per_cell;
  for (const MayerBox& b : boxes) {
    if (vars.by_box.contains(b)) continue;
    auto& slot = vars.by_box[b];
    for (Point& x : cell_nodes(b.cell, model.nodes_per_cell)) {
      slot.push_back(vars.size());
      vars.variables.push_back({std::move(x), b, false});
    }
  }
  for (const MayerBox& b : interacting) {
    auto it = vars.by_box.find(b);
    if (it == vars.by_box.end()) throw ConfigError("interacting box without variables");
    for (int u : it->second)
      if (!vars.variables[u].source) vars.vertices.push_back(u);
  }
  if (with_sources) {
    for (const Point& x : model.sources) {
      const MayerBox b{cell_of_point(x), 0};
      const int u = vars.size();
      vars.variables.push_back({x, b, true});
      vars.source_variables.push_back(u);
      vars.by_box[b].push_back(u);
    }
  }
  if (vars.size() > 255) throw BudgetExceeded("more than 255 Gaussian variables");
  return vars;
}

Eigen::MatrixXd variable_covariance(
    const VariableSet& vars, const Kernel& kernel,
    const std::function<double(const MayerBox&, const MayerBox&)>& box_factor) {
  const int n = vars.size();
  Eigen::MatrixXd k(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const auto& a = vars.variables[i];
      const auto& b = vars.variables[j];
      const double f = box_factor(a.box, b.box);
      k(i, j) = k(j, i) = f == 0.0 ? 0.0 : f * kernel(a.x, b.x);
    }
  }
  return k;
}

Eigen::MatrixXd variable_covariance(const VariableSet& vars, const Kernel& kernel,
                                    const InterpolationMatrix& m) {
  const int n = vars.size();
  std::vector<Eigen::Index> idx(n);
  for (int i = 0; i < n; ++i) {
    idx[i] = m.index_of(vars.variables[i].box);
    if (idx[i] < 0) throw ConfigError("variable box outside the matrix support");
  }
  Eigen::MatrixXd k(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double f = m.entries(idx[i], idx[j]);
      k(i, j) = k(j, i) =
          f == 0.0 ? 0.0 : f * kernel(vars.variables[i].x, vars.variables[j].x);
    }
  }
  return k;
}

namespace {

double binomial(double n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

std::vector<std::pair<int, double>> nonzero_terms(const Polynomial& p) {
  std::vector<std::pair<int, double>> t;
  for (int j = 0; j < static_cast<int>(p.coefficients.size()); ++j)
    if (p.coefficients[j] != 0.0) t.emplace_back(j, p.coefficients[j]);
  return t;
}

double expansion_work(std::size_t vertices, std::size_t terms, int sources, int degree, int order) {
  double work = 0.0;
  for (int r = 0; r <= order; ++r)
    work += binomial(static_cast<double>(vertices + r) - 1.0, r) *
            std::pow(static_cast<double>(terms), r) * pairing_count(sources + degree * r + (sources + degree * r) % 2);
  return work;
}

Monomial base_monomial(const VariableSet& vars) {
  Monomial base(static_cast<std::size_t>(vars.size()), 0);
  for (int u : vars.source_variables) ++base[u];
  return base;
}

}  // namespace

LambdaSeries vertex_expansion(const VariableSet& vars, const Eigen::MatrixXd& covariance,
                              const Polynomial& p, int order, double budget) {
  if (order < 0) throw ConfigError("series order must be >= 0");
  const auto terms = nonzero_terms(p);
  const double work = expansion_work(vars.vertices.size(), terms.size(),
                                     static_cast<int>(vars.source_variables.size()),
                                     p.degree(), order);
  if (work > budget)
    throw BudgetExceeded("direct expansion needs ~" + std::to_string(work) +
                         " pairings, budget " + std::to_string(budget));

  WickEvaluator eval(covariance);
  const Monomial base = base_monomial(vars);
  const int nv = static_cast<int>(vars.vertices.size());
  LambdaSeries out(order);
  out[0] = eval.moment(base);

  for (int r = 1; r <= order; ++r) {
    double total = 0.0;
    std::vector<int> tuple(r, 0);
    // Nondecreasing vertex tuples, each standing for r! / prod(m_k!) orderings.
    std::function<void(int, int)> pick = [&](int pos, int from) {
      if (pos == r) {
        double inv_mult = 1.0;
        for (int i = 0, run = 1; i < r; ++i) {
          run = (i > 0 && tuple[i] == tuple[i - 1]) ? run + 1 : 1;
          inv_mult /= run;
        }
        Monomial mono = base;
        std::function<void(int, double)> expand = [&](int i, double coef) {
          if (i == r) {
            total += inv_mult * coef * eval.moment(mono);
            return;
          }
          const int u = vars.vertices[tuple[i]];
          for (const auto& [j, a] : terms) {
            mono[u] += j;
            expand(i + 1, coef * a);
            mono[u] -= j;
          }
        };
        expand(0, 1.0);
        return;
      }
      for (int v = from; v < nv; ++v) {
        tuple[pos] = v;
        pick(pos + 1, v);
      }
    };
    pick(0, 0);
    out[r] = ((r % 2) ? -1.0 : 1.0) * std::pow(vars.vertex_weight, r) * total;
  }
  return out;
}

LambdaSeries z_series(const DiscretizedModel& model, std::span<const Cell> cells, int order) {
  std::vector<MayerBox> boxes;
  for (const Cell& c : cells) boxes.push_back({c, 0});
  const VariableSet vars = make_variables(model, boxes, boxes, false);
  const auto k = variable_covariance(vars, model.kernel,
                                     [](const MayerBox&, const MayerBox&) { return 1.0; });
  return vertex_expansion(vars, k, model.interaction, order, model.budget);
}

LambdaSeries z0_series(const DiscretizedModel& model, int order) {
  const Cell origin{std::vector<int>(static_cast<std::size_t>(model.window.dim()), 0)};
  return z_series(model, std::span<const Cell>(&origin, 1), order);
}

LambdaSeries h_series(const DiscretizedModel& model, int order) {
  model.validate();
  const std::vector<MayerBox> boxes = boxes_in_window(model.window);
  const VariableSet vars = make_variables(model, boxes, boxes);
  const auto k = variable_covariance(vars, model.kernel, m_empty);
  return vertex_expansion(vars, k, model.interaction, order, model.budget);
}

LambdaSeries s_unnormalized_series(const DiscretizedModel& model, int order) {
  DiscretizedModel layer = model;
  layer.window = model.window.with_copy_ceiling(0);
  return h_series(layer, order);
}

double h_series_work(const DiscretizedModel& model, int order) {
  const std::size_t vertices = model.window.volume() *
                               static_cast<std::size_t>(model.window.copy_ceiling() + 1) *
                               static_cast<std::size_t>(model.nodes_per_cell);
  return expansion_work(vertices, nonzero_terms(model.interaction).size(),
                        static_cast<int>(model.sources.size()), model.interaction.degree(), order);
}

GraphSeries::GraphSeries(const DiscretizedModel& model, ClusterGraph g, int order, Mode mode)
    : model_(model), g_(std::move(g)), order_(order), mode_(mode) {
  if (order < 0) throw ConfigError("series order must be >= 0");
  model_.validate();
  const std::vector<MayerBox> boxes = boxes_in_window(model_.window);
  std::vector<MayerBox> interacting = boxes;
  if (mode_ == Mode::Restricted) {
    interacting = g_.final_stage().boxes();
    for (const MayerBox& b : interacting)
      if (!model_.window.contains(b)) throw ConfigError("Gamma_p leaves the window");
  }
  for (const Cell& c : g_.sources().altitudes() | std::views::keys)
    if (!model_.window.contains(c)) throw ConfigError("source cell outside the window");
  vars_ = make_variables(model_, boxes, interacting);
  covint_ = std::make_unique<CovintEvaluator>(g_, boxes);

  // Polynomial integrand prod(sources) (-1)^r / r! (sum_v w P(phi_v))^r.
  const auto terms = nonzero_terms(model_.interaction);
  Polynomial_ vertex_sum;
  for (int u : vars_.vertices) {
    for (const auto& [j, a] : terms) {
      Monomial m(static_cast<std::size_t>(vars_.size()), 0);
      m[u] = static_cast<std::uint8_t>(j);
      vertex_sum[m] += vars_.vertex_weight * a;
    }
  }
  Polynomial_ power{{base_monomial(vars_), 1.0}};
  double work = 0.0;
  for (int r = 0; r <= order_; ++r) {
    if (r > 0) {
      Polynomial_ next;
      for (const auto& [m1, c1] : power)
        for (const auto& [m2, c2] : vertex_sum) {
          Monomial m = m1;
          for (std::size_t i = 0; i < m.size(); ++i) m[i] += m2[i];
          next[m] += c1 * c2 / r;
        }
      power = std::move(next);
    }
    Polynomial_ f = power;
    if (r % 2)
      for (auto& [m, c] : f) c = -c;
    for (int q = 1; q <= g_.length(); ++q) {
      const Link& l = g_.link(q);
      const auto a = vars_.by_box.find(l.first);
      const auto b = vars_.by_box.find(l.second);
      if (a == vars_.by_box.end() || b == vars_.by_box.end()) {
        f.clear();
        break;
      }
      Polynomial_ d;
      for (const auto& [m, c] : f) {
        for (int u : a->second) {
          if (m[u] == 0) continue;
          for (int v : b->second) {
            if (m[v] == 0) continue;
            Monomial n = m;
            const double coef = c * m[u] * m[v] *
                                model_.kernel(vars_.variables[u].x, vars_.variables[v].x);
            --n[u];
            --n[v];
            d[n] += coef;
          }
        }
      }
      f = std::move(d);
    }
    for (auto it = f.begin(); it != f.end();) {
      if (it->second == 0.0) {
        it = f.erase(it);
        continue;
      }
      int deg = 0;
      for (auto e : it->first) deg += e;
      max_degree_ = std::max(max_degree_, deg);
      work += pairing_count(deg + deg % 2);
      ++it;
    }
    differentiated_.push_back(std::move(f));
  }
  if (work > model_.budget)
    throw BudgetExceeded("graph series needs ~" + std::to_string(work) + " pairings per h");
}

HVector GraphSeries::full_parameters(const HVector& h) const {
  if (mode_ == Mode::Window) {
    if (h.size() != g_.length() + 1) throw ConfigError("h must have p + 1 entries");
    return h;
  }
  if (h.size() != g_.length()) throw ConfigError("restricted evaluation takes p parameters");
  return h.appended(0.0);
}

LambdaSeries GraphSeries::expectation(const HVector& h) const {
  const HVector full = full_parameters(h);
  const InterpolationMatrix m = mode_ == Mode::Window ? (*covint_)(full) : covint_->restricted(h);
  WickEvaluator eval(variable_covariance(vars_, model_.kernel, m));
  LambdaSeries out(order_);
  for (int r = 0; r <= order_; ++r) {
    double sum = 0.0;
    for (const auto& [mono, c] : differentiated_[r]) sum += c * eval.moment(mono);
    out[r] = sum;
  }
  return out;
}

LambdaSeries GraphSeries::operator()(const HVector& h) const {
  const HVector full = full_parameters(h);
  double weight = 1.0;
  for (int q = 1; q <= g_.length() && weight != 0.0; ++q) weight *= omega(g_, full, q);
  if (weight == 0.0) return LambdaSeries(order_);
  return expectation(h) * weight;
}

LambdaSeries GraphSeries::scaled(const HVector& h) const {
  const HVector full = full_parameters(h);
  double weight = 1.0;
  for (int q = 1; q <= g_.length() && weight != 0.0; ++q) weight *= omega_scaled(g_, full, q);
  if (weight == 0.0) return LambdaSeries(order_);
  return expectation(h) * weight;
}

int GraphSeries::exact_points() const {
  const int degree = g_.length() + max_degree_ / 2;
  return std::max(1, degree / 2 + 1);
}

LambdaSeries GraphSeries::simplex_integral(int points_per_axis) const {
  const int p = g_.length();
  auto parameters = [&](std::vector<double> s) {
    if (mode_ == Mode::Window) s.push_back(0.0);
    return HVector::from_s(std::move(s));
  };
  if (p == 0) return scaled(parameters({}));
  const int k = points_per_axis > 0 ? points_per_axis : exact_points();
  const QuadratureRule rule = gauss_legendre(k, 0.0, 1.0);
  LambdaSeries total(order_);
  std::vector<int> index(p, 0);
  std::vector<double> s(p);
  while (true) {
    double w = 1.0;
    for (int i = 0; i < p; ++i) {
      s[i] = rule.nodes[index[i]];
      w *= rule.weights[index[i]];
    }
    const LambdaSeries v = scaled(parameters(s));
    for (int r = 0; r <= order_; ++r)
      if (!std::isfinite(v[r])) throw ContractViolation("nonfinite simplex integrand");
    total += v * w;
    int i = 0;
    while (i < p && ++index[i] == k) index[i++] = 0;
    if (i == p) break;
  }
  return total;
}

LambdaSeries r_series(const DiscretizedModel& model, const ClusterGraph& g, const HVector& h,
                      int order) {
  if (h.size() != g.length() + 1) throw ConfigError("h must have p + 1 entries");
  return GraphSeries(model, g, order, GraphSeries::Mode::Window)(h);
}

LambdaSeries a0_series(const DiscretizedModel& model, const ClusterGraph& g, int order,
                       int points_per_axis) {
  if (!is_contributing(g)) return LambdaSeries(order);
  return GraphSeries(model, g, order, GraphSeries::Mode::Restricted)
      .simplex_integral(points_per_axis);
}

StepCheck fundamental_step_check(const DiscretizedModel& model, const ClusterGraph& g,
                                 const std::vector<double>& h_prefix, int order) {
  const int m = g.length();
  if (static_cast<int>(h_prefix.size()) != m) throw ConfigError("h prefix must have p entries");
  const double hm = m == 0 ? 1.0 : h_prefix.back();
  if (!(hm > 0.0)) throw ConfigError("h prefix entries must be positive");
  auto with = [&](std::initializer_list<double> tail) {
    std::vector<double> h = h_prefix;
    h.insert(h.end(), tail);
    return HVector::from_h(std::move(h));
  };

  const GraphSeries base(model, g, order, GraphSeries::Mode::Window);
  StepCheck out;
  out.lhs = base(with({hm}));
  out.rhs = base(with({0.0}));

  std::vector<GraphSeries> extensions;
  for (const Link& l : candidate_links(g, model.window)) {
    extensions.emplace_back(model, g.extended(l), order, GraphSeries::Mode::Window);
    ++out.extensions;
  }
  std::map<double, LambdaSeries> cache;
  auto integrand = [&](double t) -> const LambdaSeries& {
    auto it = cache.find(t);
    if (it != cache.end()) return it->second;
    LambdaSeries sum(order);
    const HVector h = with({t, t});
    for (const GraphSeries& e : extensions) sum += e(h);
    return cache.emplace(t, std::move(sum)).first->second;
  };
  if (!extensions.empty()) {
    for (int r = 0; r <= order; ++r) {
      using boost::math::quadrature::gauss_kronrod;
      const double value = gauss_kronrod<double, 31>::integrate(
          [&](double t) { return integrand(t)[r]; }, 0.0, hm, 10, 1e-14);
      out.rhs[r] += value;
    }
  }
  out.deviation = absolute_deviation(out.lhs, out.rhs);
  return out;
}

namespace {

double deviation_floor(const LambdaSeries& s) {
  double m = 0.0;
  for (double c : s.coefficients()) m = std::max(m, std::abs(c));
  return std::max(1e-14, 1e-10 * m);
}

}  // namespace

int graph_length_bound(const DiscretizedModel& model, int order) {
  return (static_cast<int>(model.sources.size()) + model.interaction.degree() * order) / 2;
}

namespace {

std::vector<ClusterGraph> contributing_graphs(const DiscretizedModel& model, int order, int p_max,
                                              std::size_t& visited) {
  if (p_max < graph_length_bound(model, order))
    throw ConfigError("p_max must be at least " + std::to_string(graph_length_bound(model, order)) +
                      " for a complete sum at this order");
  std::vector<ClusterGraph> active;
  visited = 0;
  enumerate(model.window, model.source_polymer(), p_max, [&](const ClusterGraph& g) {
    ++visited;
    if (is_contributing(g)) active.push_back(g);
  });
  return active;
}

}  // namespace

IdentityCheck expansion_identity_check(const DiscretizedModel& model, int order, int p_max) {
  IdentityCheck out;
  out.lhs = h_series(model, order);
  const auto active = contributing_graphs(model, order, p_max, out.graphs);
  out.contributing = active.size();
  const auto terms = parallel_map<LambdaSeries>(active.size(), [&](std::size_t i) {
    return GraphSeries(model, active[i], order, GraphSeries::Mode::Window).simplex_integral();
  });
  out.rhs = LambdaSeries(order);
  for (const LambdaSeries& t : terms) out.rhs += t;
  out.deviation = relative_deviation(out.lhs, out.rhs, deviation_floor(out.lhs));
  return out;
}

std::vector<Cell> coupled_cells(const Polymer& gamma, const Window& w) {
  std::vector<Cell> y;
  for (const Cell& c : w.cells())
    if (gamma.altitude(c) < w.copy_ceiling()) y.push_back(c);
  return y;
}

SchwingerResult schwinger(const DiscretizedModel& model, int order, int p_max) {
  model.validate();
  const Window& w = model.window;
  const LambdaSeries z_lambda = z_series(model, w.cells(), order);
  const LambdaSeries z0 = z0_series(model, order);

  std::size_t visited = 0;
  const auto active = contributing_graphs(model, order, p_max, visited);
  const auto a0 = parallel_map<LambdaSeries>(
      active.size(), [&](std::size_t i) { return a0_series(model, active[i], order); });

  std::map<std::vector<Cell>, LambdaSeries> z_cache;
  SchwingerResult out;
  out.series = LambdaSeries(order);
  out.graphs = active.size();
  const int volume = static_cast<int>(w.volume());
  for (std::size_t i = 0; i < active.size(); ++i) {
    const Polymer& gamma = active[i].final_stage();
    const std::vector<Cell> y = coupled_cells(gamma, w);
    auto it = z_cache.find(y);
    if (it == z_cache.end()) it = z_cache.emplace(y, z_series(model, y, order)).first;
    const LambdaSeries parasite = it->second * z0.pow(volume - static_cast<int>(y.size())) / z_lambda;
    out.series += a0[i] / z0.pow(static_cast<int>(gamma.size())) * parasite;
  }
  out.direct = h_series(model, order) / (z_lambda * z0.pow(w.copy_ceiling() * volume));
  out.deviation = relative_deviation(out.series, out.direct, deviation_floor(out.direct));
  return out;
}

}  // namespace monocluster
