#include "monocluster/lattice.hpp"

#include <algorithm>
#include <cmath>

#include "monocluster/error.hpp"

namespace monocluster {

std::string to_string(const Cell& c) {
  std::string s = "(";
  for (std::size_t i = 0; i < c.coords.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(c.coords[i]);
  }
  return s + ")";
}

std::string to_string(const MayerBox& b) {
  return "[" + to_string(b.cell) + "," + std::to_string(b.copy) + "]";
}

Cell cell_of_point(std::span<const double> x) {
  Cell c;
  c.coords.reserve(x.size());
  for (double xi : x) c.coords.push_back(static_cast<int>(std::floor(xi)));
  return c;
}

double cell_distance(const Cell& a, const Cell& b) {
  if (a.dim() != b.dim()) throw ConfigError("cell_distance: dimension mismatch");
  double sum = 0.0;
  for (int i = 0; i < a.dim(); ++i) {
    const int gap = std::abs(a.coords[i] - b.coords[i]) - 1;
    if (gap > 0) sum += static_cast<double>(gap) * gap;
  }
  return std::sqrt(sum);
}

std::vector<Point> cell_nodes(const Cell& c, int nodes_per_cell) {
  const int d = c.dim();
  const int per_axis = static_cast<int>(std::lround(std::pow(nodes_per_cell, 1.0 / d)));
  int total = 1;
  for (int i = 0; i < d; ++i) total *= per_axis;
  if (nodes_per_cell < 1 || total != nodes_per_cell)
    throw ConfigError("nodes_per_cell must be a positive perfect d-th power");
  std::vector<Point> nodes;
  nodes.reserve(total);
  std::vector<int> index(d, 0);
  while (true) {
    Point x(d);
    for (int i = 0; i < d; ++i) x[i] = c.coords[i] + (index[i] + 0.5) / per_axis;
    nodes.push_back(std::move(x));
    int i = 0;
    while (i < d && ++index[i] == per_axis) index[i++] = 0;
    if (i == d) break;
  }
  return nodes;
}

Window::Window(std::vector<Cell> cells, int copy_ceiling)
    : cells_(std::move(cells)), copy_ceiling_(copy_ceiling) {
  if (copy_ceiling < 0) throw ConfigError("window copy ceiling must be nonnegative");
  if (cells_.empty()) throw ConfigError("window must contain at least one cell");
  dim_ = cells_.front().dim();
  if (dim_ < 1) throw ConfigError("window cells must have positive dimension");
  std::sort(cells_.begin(), cells_.end());
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (cells_[i].dim() != dim_) throw ConfigError("window cells differ in dimension");
    if (!index_.emplace(cells_[i], i).second)
      throw ConfigError("window cells must be distinct: " + to_string(cells_[i]));
  }
}

Window Window::hypercube(int dim, int side, int copy_ceiling) {
  if (dim < 1 || side < 1) throw ConfigError("hypercube window needs dim, side >= 1");
  std::vector<Cell> cells;
  std::vector<int> index(dim, 0);
  while (true) {
    cells.push_back(Cell{index});
    int i = 0;
    while (i < dim && ++index[i] == side) index[i++] = 0;
    if (i == dim) break;
  }
  return Window(std::move(cells), copy_ceiling);
}

std::optional<std::size_t> Window::index_of(const Cell& c) const {
  if (auto it = index_.find(c); it != index_.end()) return it->second;
  return std::nullopt;
}

std::vector<MayerBox> boxes_in_window(const Window& w) {
  std::vector<MayerBox> boxes;
  boxes.reserve(w.volume() * (w.copy_ceiling() + 1));
  for (const Cell& c : w.cells())
    for (int k = 0; k <= w.copy_ceiling(); ++k) boxes.push_back(MayerBox{c, k});
  return boxes;
}

}  // namespace monocluster
