#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "monocluster/kernel.hpp"

namespace monocluster {

/// Unit box prod_i [k_i, k_i + 1) identified by its lower corner.
struct Cell {
  std::vector<int> coords;

  int dim() const { return static_cast<int>(coords.size()); }
  auto operator<=>(const Cell&) const = default;
};

/// Element (cell, copy) of the Mayer lattice.
struct MayerBox {
  Cell cell;
  int copy = 0;

  auto operator<=>(const MayerBox&) const = default;
};

std::string to_string(const Cell& c);
std::string to_string(const MayerBox& b);

Cell cell_of_point(std::span<const double> x);

/// Euclidean distance between the closed unit boxes; 0 for equal or adjacent cells.
double cell_distance(const Cell& a, const Cell& b);

/// Midpoint-rule nodes of a cell. `nodes_per_cell` must be k^d; the nodes
/// form a k x ... x k grid at the sub-box centres.
std::vector<Point> cell_nodes(const Cell& c, int nodes_per_cell);

/// Finite window Lambda (a set of cells) together with the copy ceiling N.
/// Cells are kept in lexicographic order.
class Window {
 public:
  Window(std::vector<Cell> cells, int copy_ceiling);

  /// The cells [0, side)^dim.
  static Window hypercube(int dim, int side, int copy_ceiling);

  const std::vector<Cell>& cells() const { return cells_; }
  int copy_ceiling() const { return copy_ceiling_; }
  std::size_t volume() const { return cells_.size(); }
  int dim() const { return dim_; }

  bool contains(const Cell& c) const { return index_.contains(c); }
  bool contains(const MayerBox& b) const {
    return b.copy >= 0 && b.copy <= copy_ceiling_ && contains(b.cell);
  }
  std::optional<std::size_t> index_of(const Cell& c) const;

  Window with_copy_ceiling(int copy_ceiling) const { return Window(cells_, copy_ceiling); }

 private:
  std::vector<Cell> cells_;
  std::map<Cell, std::size_t> index_;
  int copy_ceiling_;
  int dim_;
};

/// All |Lambda| (N + 1) boxes of the window, ordered by (cell, copy).
std::vector<MayerBox> boxes_in_window(const Window& w);

}  // namespace monocluster
