#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "monocluster/gaussian_engine.hpp"

namespace monocluster::cli {

struct RunConfig {
  int dim = 1;
  int side = 2;
  int copies = 1;
  std::vector<std::vector<int>> cells;  // explicit cell list, overrides side
  std::vector<double> poly = {0, 0, 0, 0, 1};
  double lambda = 0.0;
  std::vector<Point> sources = {{0.5}, {1.5}};
  int order = 1;
  std::optional<int> p_max;
  int nodes_per_cell = 1;
  int quad_order = 16;
  double tolerance = 1e-6;
  double budget = 1e9;
  std::string format = "json";
  std::string output;  // empty: standard output
  std::uint64_t seed = 1;
  // Subcommand specific.
  double radius = 10.0;
  double step = 0.5;
  std::string graph_file;
  std::vector<double> h;
  std::string lemma = "prop";
  int trials = 200;
  int samples = 20;

  /// Defaults to the longest graph that can contribute at the series order.
  int resolved_p_max() const;
  Window window() const;
  DiscretizedModel model() const;
  void validate() const;
};

/// "x4", "x^4 - 0.5x2 + 1", "2*x^4": coefficient vector a_0..a_deg.
std::vector<double> parse_polynomial(const std::string& text);
/// "0.5,1.5" (d = 1) or "0.5:0.5,1.5:0.5": one point per comma-separated item.
std::vector<Point> parse_points(const std::string& text);

/// Runs one invocation; returns the process exit status
/// (0 ok, 1 contract violation, 2 configuration error).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace monocluster::cli
