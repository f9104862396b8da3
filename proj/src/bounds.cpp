#include "monocluster/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "monocluster/error.hpp"
#include "monocluster/quadrature.hpp"

namespace monocluster {

double BoundConstants::K8(int n) const {
  return std::pow(1.0 + K5, n) * std::sqrt(std::tgamma(n + 1.0)) * std::exp((3.0 * m + 1.0) * n) *
         std::exp((2.0 * K3 + K6) * n);
}

double BoundConstants::coupling_for_ratio(double ratio) const {
  return ratio / (2.0 * std::numbers::e * K9 * K10);
}

double decay_radius(int r) { return std::max(20.0, 2.0 * r + 4.0); }

double decay_lattice_sum(int d) {
  if (d < 1) throw ConfigError("dimension must be >= 1");
  if (d == 1) return 1.0 + std::numbers::pi * std::numbers::pi / 3.0;
  const int radius = d == 2 ? 400 : (d == 3 ? 60 : 16);
  double sum = 0.0;
  std::vector<int> k(d, -radius);
  while (true) {
    Cell c{k};
    const double dist = cell_distance(Cell{std::vector<int>(d, 0)}, c);
    sum += std::pow(1.0 + dist, -(d + 1.0));
    int i = 0;
    while (i < d && ++k[i] > radius) k[i++] = -radius;
    if (i == d) break;
  }
  // Shell |k|_inf = s > radius has at most 2d (2s+1)^{d-1} cells, each at
  // distance >= s - 1, so the tail is below 2 d 3^{d-1} / radius.
  return sum + 2.0 * d * std::pow(3.0, d - 1) / radius;
}

double volume_envelope(int d, int m) {
  const int r1 = 4 * d * (m + 2);
  const int radius = d == 1 ? 200 : (d == 2 ? 40 : 12);
  std::vector<double> dist;
  std::vector<int> k(d, -radius);
  const Cell origin{std::vector<int>(d, 0)};
  while (true) {
    const double dd = cell_distance(origin, Cell{k});
    dist.push_back(dd);
    dist.push_back(dd);
    int i = 0;
    while (i < d && ++k[i] > radius) k[i++] = -radius;
    if (i == d) break;
  }
  std::sort(dist.begin(), dist.end());
  double best = 0.0;  // log of the running sup, n = 0 gives 1
  double log_decay = 0.0;
  std::size_t argmax = 0;
  for (std::size_t n = 1; n <= dist.size(); ++n) {
    log_decay += 0.5 * r1 * std::log1p(dist[n - 1]);
    const double v = (m + 1.0) * std::lgamma(n + 1.0) - log_decay;
    if (v > best) {
      best = v;
      argmax = n;
    }
  }
  if (argmax * 2 > dist.size()) throw ContractViolation("volume envelope search radius too small");
  return std::exp(best);
}

namespace {

// Links at each endpoint: box -> list of (link index, other endpoint).
std::map<MayerBox, std::vector<std::pair<int, MayerBox>>> incidence(const ClusterGraph& g) {
  std::map<MayerBox, std::vector<std::pair<int, MayerBox>>> inc;
  for (int q = 1; q <= g.length(); ++q) {
    const Link& l = g.link(q);
    inc[l.first].emplace_back(q, l.second);
    inc[l.second].emplace_back(q, l.first);
  }
  return inc;
}

std::string describe(const ClusterGraph& g) {
  std::ostringstream os;
  os << "G=(";
  for (int q = 1; q <= g.length(); ++q) {
    if (q > 1) os << ",";
    os << "{" << to_string(g.link(q).first) << "," << to_string(g.link(q).second) << "}";
  }
  os << ")";
  return os.str();
}

std::vector<double> random_h(int p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> h(p);
  for (double& x : h) x = u(rng);
  std::sort(h.begin(), h.end(), std::greater<>());
  for (double& x : h) x = std::max(x, 1e-6);
  return h;
}

}  // namespace

std::vector<std::pair<MayerBox, double>> xi_values(const ClusterGraph& g, int m, int r1) {
  std::vector<std::pair<MayerBox, double>> out;
  for (const auto& [b, links] : incidence(g)) {
    double xi = std::pow(std::tgamma(links.size() + 1.0), m + 1.0);
    for (const auto& [q, other] : links) xi *= std::pow(1.0 + cell_distance(b.cell, other.cell), -0.5 * r1);
    out.emplace_back(b, xi);
  }
  return out;
}

BoundConstants compute_constants(const Kernel& kernel, const Polynomial& p,
                                 const CalibrationFamily& family) {
  p.validate();
  BoundConstants k;
  k.d = kernel.dim();
  k.m = p.half_degree();
  k.r1 = 4 * k.d * (k.m + 2);
  k.r = k.r1 + k.d + 1;
  k.c00 = kernel.at_origin();
  k.K1_near = fit_decay_constant(kernel, k.d + 1, decay_radius(k.d + 1));
  k.K1_r = fit_decay_constant(kernel, k.r, decay_radius(k.r));
  k.K2 = 0.0;
  for (double a : p.coefficients) k.K2 += std::abs(a);
  const double pairings = pairing_count(2 * k.m);
  k.K3 = k.K2 * (1.0 + pairings * std::max(k.c00, std::pow(k.c00, k.m)));
  k.lattice_sum = decay_lattice_sum(k.d);
  k.K4 = k.K1_near * k.lattice_sum;
  k.K5 = std::sqrt(std::numbers::e * k.K4);
  k.K6 = std::max(0.0, -p.minimum());
  k.norm_P = p.norm();
  k.K10 = 6.0 * k.lattice_sum;
  k.K_prime_envelope = volume_envelope(k.d, k.m);

  const int n_sources = std::max<int>(1, static_cast<int>(family.sources.size()));
  std::mt19937_64 rng(family.seed);
  // Group extensions by (prefix, sigma(p)) for the K_10 calibration.
  std::map<std::pair<std::vector<Link>, int>, std::vector<ClusterGraph>> groups;
  enumerate(family.window, family.sources, family.p_max, [&](const ClusterGraph& g) {
    if (!is_contributing(g)) return;
    for (const auto& [b, xi] : xi_values(g, k.m, k.r1)) k.K_prime = std::max(k.K_prime, xi);
    if (g.length() == 0) return;
    const int sigma = sigma_map(g).back();
    std::vector<Link> prefix(g.links().begin(), g.links().end() - 1);
    groups[{prefix, sigma}].push_back(g);
  });
  for (const auto& [key, members] : groups) {
    const int p = members.front().length();
    for (int t = 0; t < family.h_samples; ++t) {
      std::vector<double> hv = random_h(p, rng);
      hv.push_back(0.0);
      const HVector h = HVector::from_h(hv);
      double sum = 0.0;
      for (const ClusterGraph& g : members) {
        const Link& l = g.link(p);
        sum += std::abs(omega(g, h, p)) *
               std::pow(1.0 + cell_distance(l.first.cell, l.second.cell), -(k.d + 1.0));
      }
      const double scaled = sum * h.h(key.second) / (key.second > 0 ? 1.0 : n_sources);
      k.K10_calibrated = std::max(k.K10_calibrated, scaled);
    }
  }
  k.K7 = k.K_prime * k.K_prime;
  k.K9 = k.K1_r * std::pow(1.0 + k.norm_P, 2) * std::pow(1.0 + k.K5, 4 * k.m) *
         std::exp(20.0 * k.m * k.m) * k.K7 * std::exp(2.0 * (2.0 * k.K3 + k.K6));
  return k;
}

double z_quadrature(const DiscretizedModel& model, std::span<const Cell> cells, double lambda,
                    int points) {
  std::vector<Point> nodes;
  for (const Cell& c : cells)
    for (Point& x : cell_nodes(c, model.nodes_per_cell)) nodes.push_back(std::move(x));
  const int dim = static_cast<int>(nodes.size());
  if (dim == 0) return 1.0;
  if (std::pow(points, dim) > 2e7) throw BudgetExceeded("Gauss-Hermite grid too large");
  Eigen::MatrixXd gram(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) gram(i, j) = model.kernel(nodes[i], nodes[j]);
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) throw ContractViolation("Gram matrix is not positive definite");
  const Eigen::MatrixXd l = llt.matrixL();

  // Golub-Welsch for the standard normal weight.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(points, points);
  for (int i = 1; i < points; ++i) jacobi(i, i - 1) = jacobi(i - 1, i) = std::sqrt(double(i));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  const Eigen::VectorXd gh_nodes = es.eigenvalues();
  Eigen::VectorXd gh_weights(points);
  for (int i = 0; i < points; ++i) gh_weights(i) = es.eigenvectors()(0, i) * es.eigenvectors()(0, i);

  const double w = 1.0 / model.nodes_per_cell;
  std::vector<int> index(dim, 0);
  Eigen::VectorXd z(dim);
  double total = 0.0;
  while (true) {
    double weight = 1.0;
    for (int i = 0; i < dim; ++i) {
      z(i) = gh_nodes(index[i]);
      weight *= gh_weights(index[i]);
    }
    const Eigen::VectorXd phi = l * z;
    double action = 0.0;
    for (int i = 0; i < dim; ++i) action += w * model.interaction(phi(i));
    total += weight * std::exp(-lambda * action);
    int i = 0;
    while (i < dim && ++index[i] == points) index[i++] = 0;
    if (i == dim) break;
  }
  return total;
}

double parasite_ratio(const DiscretizedModel& model, const ClusterGraph& g, int points) {
  const Window& w = model.window;
  const double lambda = model.coupling;
  const Cell origin{std::vector<int>(static_cast<std::size_t>(w.dim()), 0)};
  const double z0 = z_quadrature(model, std::span<const Cell>(&origin, 1), lambda, points);
  const double z_lambda = z_quadrature(model, w.cells(), lambda, points);
  const std::vector<Cell> y = coupled_cells(g.final_stage(), w);
  const double z_y = z_quadrature(model, y, lambda, points);
  const double gamma = static_cast<double>(g.final_stage().size());
  return z_y * std::pow(z0, static_cast<double>(w.volume() - y.size()) - gamma) / z_lambda;
}

CheckReport parasite_bound_check(const DiscretizedModel& model, const ClusterGraph& g, double K3) {
  if (model.window.copy_ceiling() < static_cast<int>(model.window.volume()))
    throw ConfigError("the parasite bound needs N >= |Lambda|");
  CheckReport rep{"parasite", true, 0.0, "", 1};
  const double ratio = parasite_ratio(model, g);
  const double bound = std::exp(2.0 * K3 * model.coupling * g.final_stage().size());
  rep.worst = ratio / bound;
  rep.pass = ratio > 0.0 && ratio <= bound * (1.0 + 1e-12);
  if (!rep.pass) rep.witness = describe(g);
  return rep;
}

double row_sum_check(const ClusterGraph& g, const HVector& h) {
  const InterpolationMatrix m = restrict(g, h);
  double worst = 0.0;
  for (std::size_t i = 0; i < m.support.size(); ++i) {
    std::map<Cell, double> per_cell;
    for (std::size_t j = 0; j < m.support.size(); ++j)
      per_cell[m.support[j].cell] += m.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    for (const auto& [c, s] : per_cell) worst = std::max(worst, s);
  }
  return worst;
}

CheckReport local_factorial_check(const DiscretizedModel& model, const BoundConstants& k,
                                  int p_max, int trials, std::uint64_t seed) {
  CheckReport rep{"local_factorials", true, 0.0, "", 0};
  std::mt19937_64 rng(seed);
  const Polymer sources = model.source_polymer();
  std::uniform_int_distribution<int> pick_p(0, p_max);
  std::uniform_int_distribution<int> pick_r(1, 6);
  const std::vector<MayerBox> boxes = boxes_in_window(model.window);
  for (int t = 0; t < trials; ++t) {
    ClusterGraph g = random_graph(model.window, sources, pick_p(rng), rng);
    if (!is_contributing(g)) continue;
    const HVector h = HVector::from_h(random_h(g.length(), rng));
    const InterpolationMatrix mbar = restrict(g, h, boxes);
    const VariableSet vars = make_variables(model, g.final_stage().boxes(), {}, false);
    const Eigen::MatrixXd cov = variable_covariance(vars, model.kernel, mbar);
    // Covariance majorant G(b, b') = M-bar K_1(d+1) (1 + d)^{-(d+1)}.
    for (int i = 0; i < vars.size(); ++i) {
      for (int j = 0; j < vars.size(); ++j) {
        const auto& a = vars.variables[i];
        const auto& b = vars.variables[j];
        const double major = std::abs(mbar(a.box, b.box)) * k.K1_near *
                             std::pow(1.0 + cell_distance(a.box.cell, b.box.cell), -(k.d + 1.0));
        if (std::abs(cov(i, j)) > major * (1.0 + 1e-9) + 1e-15) {
          rep.pass = false;
          rep.witness = "covariance exceeds majorant in " + describe(g);
        }
      }
    }
    const int r = 2 * pick_r(rng);
    std::uniform_int_distribution<int> pick_var(0, vars.size() - 1);
    WickProblem w{{}, cov};
    std::map<MayerBox, int> counts;
    for (int i = 0; i < r; ++i) {
      const int u = pick_var(rng);
      w.points.push_back(u);
      ++counts[vars.variables[u].box];
    }
    double bound = std::pow(k.K5, r);
    for (const auto& [b, c] : counts) bound *= std::sqrt(std::tgamma(c + 1.0));
    const double ratio = std::abs(wick_moment(w)) / bound;
    ++rep.cases;
    if (ratio > rep.worst) {
      rep.worst = ratio;
      if (ratio > 1.0) {
        rep.pass = false;
        rep.witness = describe(g) + " r=" + std::to_string(r);
      }
    }
  }
  return rep;
}

std::vector<int> link_triple_witness(const ClusterGraph& g) {
  for (const auto& [b, links] : incidence(g)) {
    std::map<Cell, std::vector<int>> by_cell;
    for (const auto& [q, other] : links) by_cell[other.cell].push_back(q);
    for (const auto& [c, qs] : by_cell)
      if (qs.size() >= 3) return {qs[0], qs[1], qs[2]};
  }
  return {};
}

CheckReport link_triple_check(const Window& w, const Polymer& sources, int p_max) {
  CheckReport rep{"link_triples", true, 0.0, "", 0};
  enumerate(w, sources, p_max, [&](const ClusterGraph& g) {
    if (!is_contributing(g)) return;
    ++rep.cases;
    if (!rep.pass) return;
    const auto witness = link_triple_witness(g);
    if (!witness.empty()) {
      rep.pass = false;
      rep.worst = 1.0;
      rep.witness = describe(g) + " links " + std::to_string(witness[0]) + "," +
                    std::to_string(witness[1]) + "," + std::to_string(witness[2]);
    }
  });
  return rep;
}

CheckReport volume_argument_check(const Window& w, const Polymer& sources, int p_max,
                                  const BoundConstants& k) {
  CheckReport rep{"volume_argument", true, 0.0, "", 0};
  enumerate(w, sources, p_max, [&](const ClusterGraph& g) {
    if (!is_contributing(g) || g.length() == 0) return;
    ++rep.cases;
    double lhs = 1.0;
    for (const auto& [b, links] : incidence(g)) lhs *= std::pow(std::tgamma(links.size() + 1.0), k.m + 1.0);
    for (int q = 1; q <= g.length(); ++q)
      lhs *= std::pow(1.0 + cell_distance(g.link(q).first.cell, g.link(q).second.cell), -k.r1);
    double xi_product = 1.0;
    for (const auto& [b, xi] : xi_values(g, k.m, k.r1)) xi_product *= xi;
    const double ratio = lhs / std::pow(k.K7, g.length());
    const bool consistent = std::abs(lhs - xi_product) <= 1e-12 * lhs;
    if (ratio > rep.worst) rep.worst = ratio;
    if ((ratio > 1.0 + 1e-12 || !consistent) && rep.pass) {
      rep.pass = false;
      rep.witness = describe(g);
    }
  });
  return rep;
}

SimplexIntegral simplex_integral_check(int p, const std::vector<int>& J) {
  if (p < 1) throw ConfigError("p must be >= 1");
  std::set<int> in_j;
  for (int j : J) {
    if (j < 1 || j > p || !in_j.insert(j).second) throw ConfigError("J must be a subset of {1..p}");
  }
  using Exponents = std::vector<int>;
  std::map<Exponents, Rational> poly{{Exponents(p, 0), Rational(1)}};
  for (int q = 1; q <= p; ++q) {
    std::vector<Exponents> factor;  // sum of monomials with unit coefficients
    if (in_j.contains(q)) {
      Exponents e(p, 0);
      for (int j = 1; j < q; ++j) e[j - 1] = 1;
      factor.push_back(e);
    } else {
      for (int sigma = 1; sigma < q; ++sigma) {
        Exponents e(p, 0);
        for (int j = sigma + 1; j < q; ++j) e[j - 1] = 1;
        factor.push_back(e);
      }
    }
    std::map<Exponents, Rational> next;
    for (const auto& [e, c] : poly)
      for (const Exponents& f : factor) {
        Exponents g = e;
        for (int i = 0; i < p; ++i) g[i] += f[i];
        next[g] += c;
      }
    poly = std::move(next);
  }
  SimplexIntegral out;
  out.value = 0;
  for (const auto& [e, c] : poly) {
    Rational term = c;
    for (int x : e) term /= (x + 1);
    out.value += term;
  }
  out.bound = std::exp(static_cast<double>(p)) / std::tgamma(in_j.size() + 1.0);
  return out;
}

std::uint64_t derivation_procedure_count(int s, int n, const Polynomial& p) {
  if (s < 0 || n < 0) throw ConfigError("counts must be nonnegative");
  std::vector<int> degrees;
  for (int j = 1; j < static_cast<int>(p.coefficients.size()); ++j)
    if (p.coefficients[j] != 0.0) degrees.push_back(j);
  std::vector<bool> source_used(static_cast<std::size_t>(s), false);
  std::vector<int> vertex_fields;  // remaining underived fields per derived vertex
  std::uint64_t leaves = 0;
  std::function<void(int)> step = [&](int left) {
    if (left == 0) {
      ++leaves;
      return;
    }
    for (int i = 0; i < s; ++i) {
      if (source_used[i]) continue;
      source_used[i] = true;
      step(left - 1);
      source_used[i] = false;
    }
    for (int j : degrees) {
      for (int field = 0; field < j; ++field) {
        vertex_fields.push_back(j - 1);
        step(left - 1);
        vertex_fields.pop_back();
      }
    }
    for (std::size_t v = 0; v < vertex_fields.size(); ++v) {
      const int fields = vertex_fields[v];
      for (int field = 0; field < fields; ++field) {
        --vertex_fields[v];
        step(left - 1);
        ++vertex_fields[v];
      }
    }
  };
  step(n);
  return leaves;
}

double derivation_count_bound(int s, int n, int m) {
  return std::pow(static_cast<double>(s) + 4.0 * m * m * n, n);
}

double majorant(const ClusterGraph& g, int n_sources, double lambda, const BoundConstants& k) {
  const int p = g.length();
  double distance = 1.0;
  for (int q = 1; q <= p; ++q)
    distance *= std::pow(1.0 + cell_distance(g.link(q).first.cell, g.link(q).second.cell),
                         -(k.d + 1.0));
  double integral = 1.0;
  if (p > 0) {
    // prod |h_{q-1} omega| is a polynomial of degree <= p per s coordinate.
    integral = integrate_unit_cube(p, p / 2 + 1, [&](const std::vector<double>& s) {
      std::vector<double> sv = s;
      sv.push_back(0.0);
      const HVector h = HVector::from_s(sv);
      double v = 1.0;
      for (int q = 1; q <= p; ++q) v *= std::abs(omega_scaled(g, h, q));
      return v;
    });
  }
  return k.K8(n_sources) * std::pow(k.K9 * lambda, p) * integral * distance;
}

MajorantSums majorant_sum(const Window& w, const Polymer& sources, int n_sources, int p_max,
                          double lambda, const BoundConstants& k) {
  MajorantSums out;
  out.terms.assign(static_cast<std::size_t>(p_max) + 1, 0.0);
  enumerate(w, sources, p_max, [&](const ClusterGraph& g) {
    if (!is_contributing(g)) return;
    out.terms[g.length()] += majorant(g, n_sources, lambda, k);
  });
  out.geometric_ratio = 2.0 * std::numbers::e * k.K9 * k.K10 * lambda;
  double partial = 0.0;
  for (int p = 0; p <= p_max; ++p) {
    const double geo = k.K8(n_sources) * std::exp(static_cast<double>(n_sources)) *
                       std::pow(out.geometric_ratio, p);
    out.geometric.push_back(geo);
    partial += out.terms[p];
    out.partial.push_back(partial);
    if (out.terms[p] > geo * (1.0 + 1e-12)) out.dominated = false;
    if (p > 0 && out.terms[p - 1] > 0.0) out.ratios.push_back(out.terms[p] / out.terms[p - 1]);
  }
  return out;
}

}  // namespace monocluster
