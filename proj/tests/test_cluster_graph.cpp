#include <doctest.h>

#include <set>

#include "support.hpp"

using namespace monocluster;
using namespace test_support;

TEST_SUITE("cluster_graph") {
  TEST_CASE("link validity") {
    const Polymer g0 = polymer({box(0, 0)});
    const std::vector<Link> a{Link::make(box(0, 0), box(1, 0))};
    const ValidationResult ra = validate(g0, a);
    CHECK(ra.valid);
    CHECK(ra.kinds == std::vector<LinkKind>{LinkKind::ClusterRoof});

    const std::vector<Link> b{Link::make(box(1, 0), box(2, 0))};
    const ValidationResult rb = validate(g0, b);
    CHECK_FALSE(rb.valid);
    CHECK(rb.failed_link == 1);

    const std::vector<Link> c{Link::make(box(0, 1), box(1, 0))};
    const ValidationResult rc = validate(g0, c);
    CHECK(rc.valid);
    CHECK(rc.kinds == std::vector<LinkKind>{LinkKind::RoofRoof});

    CHECK_THROWS_AS(ClusterGraph::from_links(g0, b), ConfigError);
  }

  TEST_CASE("conception and creation indices of the empty graph") {
    const ClusterGraph g(polymer({box(0, 0)}));
    CHECK(g.conception_index(box(1, 0), 1) == -1);
    CHECK(g.conception_index(box(0, 1), 1) == 0);
    CHECK(g.conception_index(box(1, 1), 1) == 1);
    CHECK(g.conception_index(box(0, 4), 1) == 1);
    CHECK(g.creation_index(box(0, 0), 1) == 0);
    CHECK(g.creation_index(box(0, 1), 1) == 1);
    CHECK(g.creation_index(box(1, 0), 1) == 1);
    CHECK(g.creation_index(box(1, 3), 1) == 1);
  }

  TEST_CASE("conception precedes creation") {
    std::mt19937_64 rng(5);
    const Window w = Window::hypercube(1, 4, 3);
    for (int t = 0; t < 100; ++t) {
      const ClusterGraph g = random_graph(w, polymer({box(1, 0)}), 5, rng);
      const Polymer& gp = g.final_stage();
      for (const MayerBox& b : boxes_in_window(w)) {
        if (gp.region_of(b) == Region::Sky) continue;
        CHECK(g.conception_index(b) < g.creation_index(b));
      }
    }
  }

  TEST_CASE("vertical links carry a vanishing weight") {
    const std::vector<Link> l{Link::make(box(0, 0), box(0, 1))};
    const ClusterGraph g = ClusterGraph::from_links(polymer({box(0, 0)}), l);
    CHECK(link_weight_vanishes(g, 1));
    CHECK_FALSE(is_contributing(g));
    CHECK_THROWS_AS(sigma_map(g), NonContributingGraph);
  }

  TEST_CASE("contributing graphs have no vertical link") {
    const Window w = Window::hypercube(1, 3, 3);
    std::size_t contributing = 0;
    for (const ClusterGraph& g : enumerate_all(w, polymer({box(0, 0), box(2, 0)}), 4)) {
      if (!is_contributing(g)) continue;
      ++contributing;
      for (const Link& l : g.links()) CHECK_FALSE(l.vertical());
    }
    CHECK(contributing > 100);
  }

  TEST_CASE("sigma map") {
    const std::vector<Link> l{Link::make(box(0, 1), box(1, 0))};
    const ClusterGraph g = ClusterGraph::from_links(polymer({box(0, 0)}), l);
    REQUIRE(is_contributing(g));
    CHECK(sigma_map(g) == std::vector<int>{0});

    std::mt19937_64 rng(9);
    const Window w = Window::hypercube(1, 4, 3);
    for (const ClusterGraph& h : contributing_samples(w, polymer({box(0, 0), box(3, 0)}), 5, 60, rng)) {
      const std::vector<int> s = sigma_map(h);
      for (int q = 1; q <= h.length(); ++q) {
        CHECK(s[q - 1] < q);
        CHECK(s[q - 1] >= 0);
      }
    }
  }

  TEST_CASE("enumeration") {
    const Window w = Window::hypercube(1, 2, 1);
    const Polymer src = polymer({box(0, 0)});
    CHECK(enumerate_all(w, src, 0).size() == 1);

    // Length-one graphs by brute force over unordered box pairs.
    const auto boxes = boxes_in_window(w);
    std::size_t brute = 0;
    for (std::size_t i = 0; i < boxes.size(); ++i)
      for (std::size_t j = i + 1; j < boxes.size(); ++j) {
        const std::vector<Link> l{Link::make(boxes[i], boxes[j])};
        if (!validate(src, l).valid) continue;
        const ClusterGraph g = ClusterGraph::from_links(src, l);
        bool inside = true;
        for (const MayerBox& b : g.final_stage().boxes()) inside = inside && w.contains(b);
        brute += inside;
      }
    const auto all = enumerate_all(w, src, 1);
    CHECK(all.size() == 1 + brute);

    const Window w3 = Window::hypercube(1, 3, 2);
    const Polymer src3 = polymer({box(0, 0), box(2, 0)});
    const auto graphs = enumerate_all(w3, src3, 3);
    std::set<std::vector<Link>> seen;
    for (const ClusterGraph& g : graphs) {
      CHECK(validate(g).valid);
      CHECK(seen.insert(g.links()).second);
      for (const MayerBox& b : g.final_stage().boxes()) CHECK(w3.contains(b));
    }
    CHECK(graphs == enumerate_all(w3, src3, 3));
  }

  TEST_CASE("stages grow by the new boxes of each link") {
    std::mt19937_64 rng(21);
    const Window w = Window::hypercube(1, 4, 3);
    for (int t = 0; t < 50; ++t) {
      const ClusterGraph g = random_graph(w, polymer({box(2, 0)}), 5, rng);
      CHECK(g.stage(-1).empty());
      for (int q = 1; q <= g.length(); ++q) {
        CHECK(g.stage(q).size() > g.stage(q - 1).size());
        for (const MayerBox& b : g.stage(q - 1).boxes()) CHECK(g.stage(q).contains(b));
      }
      CHECK(g.truncated(g.length()) == g);
    }
  }
}
