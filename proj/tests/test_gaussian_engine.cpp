#include <doctest.h>

#include "support.hpp"

using namespace monocluster;
using namespace test_support;

TEST_SUITE("wick") {
  TEST_CASE("small moments") {
    Eigen::MatrixXd k(2, 2);
    k << 2.0, 0.7, 0.7, 1.0;
    CHECK(wick_moment({{0, 1}, k}) == doctest::Approx(0.7));
    CHECK(wick_moment({{0, 1, 1}, k}) == 0.0);
    const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(4, 4);
    CHECK(wick_moment({{0, 1, 2, 3}, ones}) == doctest::Approx(3.0));
    CHECK(pairing_count(4) == 3.0);
    CHECK(pairing_count(6) == 15.0);
    CHECK(pairing_count(5) == 0.0);
  }

  TEST_CASE("memoized moments match brute-force matchings") {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> exp(0, 3);
    for (int t = 0; t < 40; ++t) {
      const Eigen::MatrixXd k = random_psd(4, rng);
      WickEvaluator eval(k);
      Monomial n(4);
      std::vector<int> points;
      for (int i = 0; i < 4; ++i) {
        n[i] = static_cast<std::uint8_t>(exp(rng));
        for (int j = 0; j < n[i]; ++j) points.push_back(i);
      }
      const double oracle = matching_sum(points, k);
      CHECK(eval.moment(n) == doctest::Approx(oracle).epsilon(1e-12));
      CHECK(wick_moment({points, k}) == doctest::Approx(oracle).epsilon(1e-12));
    }
  }
}

TEST_SUITE("series") {
  TEST_CASE("arithmetic") {
    const LambdaSeries a({1.0, 2.0, 3.0});
    const LambdaSeries b({1.0, -1.0, 0.5});
    const LambdaSeries p = a * b;
    CHECK(p[0] == 1.0);
    CHECK(p[1] == 1.0);
    CHECK(p[2] == doctest::Approx(1.5));
    const LambdaSeries q = p / b;
    CHECK(absolute_deviation(q, a) < 1e-14);
    CHECK(a.pow(2)[2] == doctest::Approx(10.0));
    CHECK_THROWS_AS(a / LambdaSeries({2.0, 0.0, 0.0}), ContractViolation);
  }
}

TEST_SUITE("gaussian_engine") {
  TEST_CASE("polynomial") {
    const Polynomial p{{0.0, 0.0, -1.0, 0.0, 1.0}};
    CHECK(p.degree() == 4);
    CHECK(p.half_degree() == 2);
    CHECK(p.minimum() == doctest::Approx(-0.25).epsilon(1e-12));
    CHECK(p.norm() == 1.0);
    CHECK_THROWS_AS((Polynomial{{0.0, 0.0, 0.0, 1.0}}.validate()), ConfigError);
    CHECK_THROWS_AS((Polynomial{{0.0, 0.0, -1.0}}.validate()), ConfigError);
  }

  TEST_CASE("single cell normalization") {
    const DiscretizedModel m = model_1d(1, 0, {});
    const LambdaSeries z = z0_series(m, 2);
    CHECK(z[0] == 1.0);
    const double c00 = m.kernel.at_origin();
    auto density = [&](double x) {
      return x * x * x * x * std::exp(-x * x / (2.0 * c00)) / std::sqrt(2.0 * std::numbers::pi * c00);
    };
    const double fourth = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        density, -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), 15,
        1e-14);
    CHECK(z[1] == doctest::Approx(-fourth).epsilon(1e-10));
    CHECK(z[1] == doctest::Approx(-3.0 * c00 * c00).epsilon(1e-14));
  }

  TEST_CASE("single cell normalization is bounded below") {
    DiscretizedModel m = model_1d(1, 0, {});
    const BoundConstants k = compute_constants(m.kernel, m.interaction, CalibrationFamily{});
    const std::vector<Cell> cell{Cell{{0}}};
    for (double lambda : {1e-3, 1e-2, 0.05}) {
      const double z = z_quadrature(m, cell, lambda);
      CHECK(z <= 1.0);
      CHECK(z > std::exp(-k.K3 * lambda));
    }
  }

  TEST_CASE("free two-point function at order zero") {
    const DiscretizedModel m = model_1d(2, 1, {{0.5}, {1.5}});
    const double c = m.kernel.at(std::vector<double>{1.0});
    CHECK(h_series(m, 0)[0] == doctest::Approx(c).epsilon(1e-15));
  }

  TEST_CASE("factorization into the copy-0 layer and free copies") {
    for (auto [side, copies] : {std::pair{2, 1}, std::pair{3, 1}, std::pair{2, 2}}) {
      const DiscretizedModel m = model_1d(side, copies, {{0.5}, {side - 0.5}});
      const LambdaSeries lhs = h_series(m, 2);
      const LambdaSeries rhs = s_unnormalized_series(m, 2) * z0_series(m, 2).pow(copies * side);
      CHECK(relative_deviation(lhs, rhs) <= 1e-10);
    }
  }

  TEST_CASE("two decoupled interacting boxes") {
    const DiscretizedModel m = model_1d(1, 1, {});
    CHECK(h_series(m, 1)[1] == doctest::Approx(2.0 * z0_series(m, 1)[1]).epsilon(1e-14));
  }

  TEST_CASE("the empty graph at full coupling reproduces H") {
    const DiscretizedModel m = model_1d(2, 1, {{0.5}, {1.5}});
    const ClusterGraph e(m.source_polymer());
    CHECK(relative_deviation(r_series(m, e, HVector::from_h({1.0}), 2), h_series(m, 2)) <= 1e-13);
  }

  TEST_CASE("the empty graph at zero coupling") {
    const DiscretizedModel m = model_1d(2, 1, {{0.25}, {0.75}});
    const ClusterGraph e(m.source_polymer());
    const double c = m.kernel.at(std::vector<double>{0.5});
    CHECK(r_series(m, e, HVector::from_h({0.0}), 0)[0] == doctest::Approx(c).epsilon(1e-15));
  }

  TEST_CASE("vanishing link weight gives a zero series") {
    const DiscretizedModel m = model_1d(2, 1, {{0.5}});
    const std::vector<Link> l{Link::make(box(0, 0), box(0, 1))};
    const ClusterGraph g = ClusterGraph::from_links(m.source_polymer(), l);
    const LambdaSeries r = r_series(m, g, HVector::from_h({0.5, 0.2}), 1);
    for (double c : r.coefficients()) CHECK(c == 0.0);
    const LambdaSeries a0 = a0_series(m, g, 1);
    for (double c : a0.coefficients()) CHECK(c == 0.0);
  }

  TEST_CASE("fundamental step") {
    const DiscretizedModel m = model_1d(2, 1, {{0.5}, {1.5}});
    const ClusterGraph e(m.source_polymer());
    CHECK(fundamental_step_check(m, e, {}, 1).deviation <= 1e-8);

    std::mt19937_64 rng(3);
    const DiscretizedModel m3 = model_1d(3, 2, {{0.5}, {2.5}});
    for (int t = 0; t < 5; ++t) {
      const ClusterGraph g = random_graph(m3.window, m3.source_polymer(), 2, rng);
      const StepCheck s = fundamental_step_check(m3, g, random_h(g.length(), rng, 0.05), 2);
      CHECK(s.deviation <= 1e-8);
    }
  }

  TEST_CASE("fundamental step without extensions") {
    const DiscretizedModel m = model_1d(1, 0, {{0.2}, {0.6}});
    const ClusterGraph e(m.source_polymer());
    const StepCheck s = fundamental_step_check(m, e, {}, 1);
    CHECK(s.extensions == 0);
    CHECK(relative_deviation(s.lhs, s.rhs) <= 1e-14);
    CHECK(relative_deviation(s.lhs, r_series(m, e, HVector::from_h({0.0}), 1)) <= 1e-14);
  }

  TEST_CASE("A_0 of the empty graph") {
    const DiscretizedModel m = model_1d(2, 1, {{0.25}, {0.75}});
    const ClusterGraph e(m.source_polymer());
    CHECK(a0_series(m, e, 0)[0] == doctest::Approx(m.kernel.at(std::vector<double>{0.5})).epsilon(1e-15));
  }

  TEST_CASE("A_0 of a single cluster-roof link") {
    const DiscretizedModel m = model_1d(2, 1, {{0.25}, {0.75}});
    const std::vector<Link> l{Link::make(box(0, 0), box(1, 0))};
    const ClusterGraph g = ClusterGraph::from_links(m.source_polymer(), l);
    CHECK(omega(g, HVector::from_h({0.3, 0.1}), 1) == 1.0);
    const GraphSeries gs(m, g, 2, GraphSeries::Mode::Restricted);
    const LambdaSeries a0 = a0_series(m, g, 2);
    for (int r = 0; r <= 2; ++r) {
      const double oracle = polynomial_integral(
          [&](double s) { return gs.scaled(HVector::from_s({s}))[r]; }, gs.max_degree());
      CHECK(a0[r] == doctest::Approx(oracle).epsilon(1e-10));
    }
  }

  TEST_CASE("A_0 integrand extends to the closed cube") {
    const DiscretizedModel m = model_1d(3, 2, {{0.5}, {2.5}});
    std::mt19937_64 rng(17);
    for (const ClusterGraph& g : contributing_samples(m.window, m.source_polymer(), 3, 10, rng)) {
      if (g.length() == 0) continue;
      const GraphSeries gs(m, g, 1, GraphSeries::Mode::Restricted);
      for (double edge : {0.0, 1.0}) {
        std::vector<double> a(g.length(), 0.5), b(g.length(), 0.5);
        a[0] = edge == 0.0 ? 1e-7 : 1.0 - 1e-7;
        b[0] = edge == 0.0 ? 2e-7 : 1.0 - 2e-7;
        const LambdaSeries fa = gs.scaled(HVector::from_s(a));
        const LambdaSeries fb = gs.scaled(HVector::from_s(b));
        for (int r = 0; r <= 1; ++r) {
          CHECK(std::isfinite(fa[r]));
          CHECK(std::abs(fa[r] - fb[r]) <= 1e-5 * (1.0 + std::abs(fa[r])));
        }
      }
    }
  }

  TEST_CASE("A_0 does not depend on the window") {
    const DiscretizedModel small = model_1d(3, 2, {{0.5}, {1.5}});
    const DiscretizedModel large = model_1d(5, 3, {{0.5}, {1.5}});
    for (const ClusterGraph& g : enumerate_all(small.window, small.source_polymer(), 2)) {
      if (!is_contributing(g)) continue;
      CHECK(relative_deviation(a0_series(small, g, 1), a0_series(large, g, 1)) <= 1e-10);
    }
  }

  TEST_CASE("expansion identity") {
    const DiscretizedModel m = model_1d(2, 1, {{0.5}, {1.5}});
    for (int order = 0; order <= 2; ++order) {
      const IdentityCheck r = expansion_identity_check(m, order, graph_length_bound(m, order));
      CHECK(r.deviation <= 1e-6);
    }
    const DiscretizedModel q = model_1d(2, 1, {{0.5}, {1.5}}, {0.0, 0.0, -1.0, 0.0, 1.0});
    CHECK(expansion_identity_check(q, 1, graph_length_bound(q, 1)).deviation <= 1e-6);
    CHECK_THROWS_AS(expansion_identity_check(m, 1, 2), ConfigError);
  }

  TEST_CASE("normalized Schwinger function") {
    const DiscretizedModel m = model_1d(2, 1, {{0.5}, {1.5}});
    const SchwingerResult r0 = schwinger(m, 0, graph_length_bound(m, 0));
    CHECK(r0.series[0] == doctest::Approx(m.kernel.at(std::vector<double>{1.0})).epsilon(1e-14));
    const SchwingerResult r1 = schwinger(m, 1, graph_length_bound(m, 1));
    CHECK(r1.deviation <= 1e-6);
  }

  TEST_CASE("fully coupled roofs reduce to A_0 over Z_0 powers") {
    const DiscretizedModel m = model_1d(2, 4, {{0.5}, {1.5}});
    LambdaSeries sum(1);
    const LambdaSeries z0 = z0_series(m, 1);
    for (const ClusterGraph& g : enumerate_all(m.window, m.source_polymer(), graph_length_bound(m, 1))) {
      CHECK(coupled_cells(g.final_stage(), m.window).size() == m.window.volume());
      if (!is_contributing(g)) continue;
      sum += a0_series(m, g, 1) / z0.pow(static_cast<int>(g.final_stage().size()));
    }
    CHECK(relative_deviation(schwinger(m, 1, graph_length_bound(m, 1)).series, sum) <= 1e-12);
  }

  TEST_CASE("graphs beyond the length bound vanish") {
    const DiscretizedModel m = model_1d(4, 4, {{0.5}, {2.5}});
    CHECK(graph_length_bound(m, 1) == 3);
    std::mt19937_64 rng(23);
    int checked = 0;
    for (const ClusterGraph& g : contributing_samples(m.window, m.source_polymer(), 5, 400, rng)) {
      if (g.length() <= graph_length_bound(m, 1)) continue;
      const LambdaSeries r = r_series(m, g, HVector::from_h(random_h(g.length() + 1, rng)), 1);
      for (double c : r.coefficients()) CHECK(c == 0.0);
      ++checked;
    }
    CHECK(checked > 10);
  }

  TEST_CASE("work budget") {
    DiscretizedModel m = model_1d(2, 1, {{0.5}, {1.5}});
    m.budget = 10.0;
    CHECK_THROWS_AS(h_series(m, 2), BudgetExceeded);
  }

  TEST_CASE("model validation") {
    DiscretizedModel m = model_1d(2, 1, {{0.5}, {1.5}});
    m.coupling = -1.0;
    CHECK_THROWS_AS(m.validate(), ConfigError);
    DiscretizedModel outside = model_1d(2, 1, {{7.5}});
    CHECK_THROWS_AS(outside.validate(), ConfigError);
  }
}
