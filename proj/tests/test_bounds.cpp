#include <doctest.h>

#include "support.hpp"

using namespace monocluster;
using namespace test_support;

namespace {

// Sum over maps sigma with sigma(q) = 0 on J and 1 <= sigma(q) < q off J of
// the iterated integral of prod_q 1/h_{sigma(q)} over 1 > h_1 > ... > h_p > 0,
// done with Laurent monomials in the h variables.
Rational laurent_simplex_sum(int p, const std::vector<int>& J) {
  std::vector<bool> in_j(p + 1, false);
  for (int j : J) in_j[j] = true;
  std::vector<int> sigma(p + 1, 0);
  Rational total = 0;
  std::function<void(int)> pick = [&](int q) {
    if (q > p) {
      std::vector<Rational> a(p + 1, Rational(0));
      for (int k = 1; k <= p; ++k)
        if (sigma[k] > 0) a[sigma[k]] -= 1;
      Rational coef = 1;
      for (int k = p; k >= 1; --k) {
        const Rational e = a[k] + 1;
        REQUIRE(e > 0);
        coef /= e;
        a[k - 1] += e;
      }
      total += coef;
      return;
    }
    if (in_j[q]) {
      sigma[q] = 0;
      pick(q + 1);
      return;
    }
    for (int s = 1; s < q; ++s) {
      sigma[q] = s;
      pick(q + 1);
    }
  };
  pick(1);
  return total;
}

const BoundConstants& constants() {
  static const BoundConstants k = [] {
    const DiscretizedModel m = model_1d(3, 3, {{0.5}, {2.5}});
    CalibrationFamily f;
    f.sources = m.source_polymer();
    return compute_constants(m.kernel, m.interaction, f);
  }();
  return k;
}

}  // namespace

TEST_SUITE("bounds_suite") {
  TEST_CASE("constants") {
    const BoundConstants& k = constants();
    CHECK(k.r1 == 16);
    CHECK(k.r == 18);
    CHECK(k.K6 == 0.0);
    CHECK(k.K2 == 1.0);
    CHECK(k.K3 > 0.0);
    CHECK(k.lattice_sum == doctest::Approx(1.0 + std::numbers::pi * std::numbers::pi / 3.0));
    CHECK(k.K_prime <= k.K_prime_envelope);
    CHECK(k.K7 == doctest::Approx(k.K_prime * k.K_prime));
    CHECK(k.K10_calibrated <= k.K10);
    CHECK(2.0 * std::exp(1.0) * k.K9 * k.K10 * k.coupling_for_ratio(0.5) == doctest::Approx(0.5));

    const DiscretizedModel m = model_1d(3, 3, {{0.5}, {2.5}});
    CalibrationFamily f;
    f.sources = m.source_polymer();
    const BoundConstants again = compute_constants(m.kernel, m.interaction, f);
    CHECK(again.K4 == k.K4);
    CHECK(again.K7 == k.K7);
    CHECK(again.K9 == k.K9);
    CHECK(again.K10_calibrated == k.K10_calibrated);
  }

  TEST_CASE("parasite ratio") {
    DiscretizedModel m = model_1d(2, 2, {{0.5}, {1.5}});
    const ClusterGraph e(m.source_polymer());
    CHECK(parasite_ratio(m, e) == doctest::Approx(1.0).epsilon(1e-14));

    m.coupling = 0.01;
    const std::vector<Cell> one{Cell{{0}}};
    const double z0 = z_quadrature(m, one, m.coupling);
    CHECK(coupled_cells(e.final_stage(), m.window).size() == m.window.volume());
    CHECK(parasite_ratio(m, e) == doctest::Approx(std::pow(z0, -2.0)).epsilon(1e-10));
    CHECK(parasite_ratio(m, e) <= std::exp(constants().K3 * m.coupling * 2));

    std::mt19937_64 rng(2);
    for (int t = 0; t < 20; ++t) {
      const ClusterGraph g = random_graph(m.window, m.source_polymer(), 3, rng);
      CHECK(parasite_bound_check(m, g, constants().K3).pass);
    }
    const DiscretizedModel shallow = model_1d(3, 1, {{0.5}});
    CHECK_THROWS_AS(parasite_bound_check(shallow, ClusterGraph(shallow.source_polymer()), 1.0),
                    ConfigError);
  }

  TEST_CASE("copy sums of the restricted matrix") {
    const std::vector<Link> l{Link::make(box(0, 0), box(1, 0))};
    const ClusterGraph g = ClusterGraph::from_links(polymer({box(0, 0)}), l);
    const HVector h = HVector::from_h({0.37});
    const InterpolationMatrix r = restrict(g, h);
    double other = 0.0, same = 0.0;
    for (const MayerBox& b : r.support) {
      if (b.cell.coords[0] == 1) other += r(box(0, 0), b);
      if (b.cell.coords[0] == 0) same += r(box(0, 0), b);
    }
    CHECK(other == doctest::Approx(0.37));
    CHECK(same == 1.0);
    CHECK(row_sum_check(g, h) == doctest::Approx(1.0));

    std::mt19937_64 rng(4);
    const Window w = Window::hypercube(1, 3, 3);
    for (const ClusterGraph& c : enumerate_all(w, polymer({box(0, 0), box(2, 0)}), 3)) {
      if (!is_contributing(c)) continue;
      for (int s = 0; s < 3; ++s)
        CHECK(row_sum_check(c, HVector::from_h(random_h(c.length(), rng, 1e-6))) <= 1.0 + 1e-12);
    }
  }

  TEST_CASE("majorant row sums stay below K_4") {
    const BoundConstants& k = constants();
    std::mt19937_64 rng(6);
    const Window w = Window::hypercube(1, 4, 3);
    for (int t = 0; t < 40; ++t) {
      const ClusterGraph g = random_graph(w, polymer({box(0, 0), box(3, 0)}), 5, rng);
      const InterpolationMatrix r = restrict(g, HVector::from_h(random_h(g.length(), rng)));
      for (const MayerBox& a : r.support) {
        double row = 0.0;
        for (const MayerBox& b : r.support)
          row += std::abs(r(a, b)) * k.K1_near * std::pow(1.0 + cell_distance(a.cell, b.cell), -2.0);
        CHECK(row <= k.K4 * (1.0 + 1e-12));
      }
    }
  }

  TEST_CASE("local factorials") {
    const BoundConstants& k = constants();
    const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(1, 1);
    CHECK(wick_moment({{0, 0, 0, 0}, ones}) == 3.0);
    CHECK(3.0 <= std::pow(k.K5, 4) * std::sqrt(24.0));
    CHECK(1.0 <= std::pow(k.K5, 2) * std::sqrt(2.0));
    const DiscretizedModel m = model_1d(3, 2, {{0.5}, {2.5}});
    const CheckReport r = local_factorial_check(m, k, 3, 30, 5);
    CHECK(r.pass);
    CHECK(r.worst <= 1.0);
  }

  TEST_CASE("no triple links from one box into one cell") {
    const Window w = Window::hypercube(1, 3, 3);
    CHECK(link_triple_check(w, polymer({box(0, 0), box(2, 0)}), 3).pass);

    const Polymer src = polymer({box(0, 0)});
    const std::vector<Link> triple{Link::make(box(0, 0), box(1, 0)), Link::make(box(0, 0), box(1, 1)),
                                   Link::make(box(0, 0), box(1, 2))};
    const ValidationResult v = validate(src, triple);
    if (v.valid) {
      const ClusterGraph g = ClusterGraph::from_links(src, triple);
      CHECK_FALSE(link_triple_witness(g).empty());
      CHECK_FALSE(is_contributing(g));
    } else {
      CHECK(v.failed_link > 0);
    }

    bool double_link = false;
    for (const ClusterGraph& g : enumerate_all(w, src, 3)) {
      if (!is_contributing(g)) continue;
      for (int a = 1; a <= g.length(); ++a)
        for (int b = a + 1; b <= g.length(); ++b) {
          const Link& x = g.link(a);
          const Link& y = g.link(b);
          for (const MayerBox& shared : {x.first, x.second}) {
            if (!y.touches(shared)) continue;
            const MayerBox& ox = x.first == shared ? x.second : x.first;
            const MayerBox& oy = y.first == shared ? y.second : y.first;
            double_link = double_link || ox.cell == oy.cell;
          }
        }
    }
    CHECK(double_link);
  }

  TEST_CASE("volume argument") {
    const BoundConstants& k = constants();
    const std::vector<Link> l{Link::make(box(0, 0), box(2, 0))};
    const ClusterGraph g = ClusterGraph::from_links(polymer({box(0, 0)}), l);
    for (const auto& [b, xi] : xi_values(g, k.m, k.r1)) CHECK(xi <= 1.0);
    const Window w = Window::hypercube(1, 3, 3);
    CHECK(volume_argument_check(w, polymer({box(1, 0)}), 3, k).pass);
  }

  TEST_CASE("simplex integrals") {
    const SimplexIntegral a = simplex_integral_check(1, {1});
    CHECK(a.value == Rational(1));
    CHECK(a.bound == doctest::Approx(std::exp(1.0)));
    CHECK(simplex_integral_check(2, {1, 2}).value == Rational(1, 2));
    CHECK(simplex_integral_check(2, {1}).value == Rational(1));
    for (int p = 1; p <= 4; ++p)
      for (unsigned mask = 0; mask < (1u << p); ++mask) {
        std::vector<int> J;
        for (int q = 1; q <= p; ++q)
          if (mask & (1u << (q - 1))) J.push_back(q);
        const SimplexIntegral s = simplex_integral_check(p, J);
        CHECK(s.value == laurent_simplex_sum(p, J));
        CHECK(static_cast<double>(s.value) <= s.bound);
      }
  }

  TEST_CASE("derivation procedure counts") {
    const Polynomial p{{0.0, 0.0, 0.0, 0.0, 1.0}};
    for (int s = 0; s <= 2; ++s)
      for (int n = 1; n <= 3; ++n)
        CHECK(static_cast<double>(derivation_procedure_count(s, n, p)) <= derivation_count_bound(s, n, 2));
    CHECK(derivation_procedure_count(2, 0, p) == 1);
  }

  TEST_CASE("majorant series") {
    const BoundConstants& k = constants();
    const Window w = Window::hypercube(1, 3, 2);
    const Polymer src = polymer({box(0, 0), box(2, 0)});
    const MajorantSums zero = majorant_sum(w, src, 2, 3, 0.0, k);
    CHECK(zero.partial.back() == doctest::Approx(k.K8(2)).epsilon(1e-14));

    const double lambda = k.coupling_for_ratio(0.5);
    const MajorantSums s = majorant_sum(w, src, 2, 3, lambda, k);
    CHECK(s.dominated);
    CHECK(s.geometric_ratio == doctest::Approx(0.5));
    for (double r : s.ratios) CHECK(r <= s.geometric_ratio + 0.05);
  }
}
