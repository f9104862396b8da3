#pragma once

#include <map>
#include <span>
#include <vector>

#include "monocluster/lattice.hpp"

namespace monocluster {

enum class Region { Cluster, Roof, Sky };

const char* to_string(Region r);

/// Finite downward-closed set of Mayer boxes, stored as its altitude map
/// (cell -> highest copy present). Cells absent from the map have altitude -1.
class Polymer {
 public:
  Polymer() = default;

  /// Throws ConfigError if the set has a hole (a box without all boxes below it).
  static Polymer from_boxes(std::span<const MayerBox> boxes);

  int altitude(const Cell& c) const;
  bool contains(const MayerBox& b) const { return b.copy >= 0 && b.copy <= altitude(b.cell); }
  bool in_roof(const MayerBox& b) const { return b.copy == altitude(b.cell) + 1; }
  Region region_of(const MayerBox& b) const;

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  std::vector<MayerBox> boxes() const;
  const std::map<Cell, int>& altitudes() const { return altitude_; }

  /// Union with one box. The box must already belong to the polymer or sit
  /// on its roof; anything else would open a hole and throws ConfigError.
  Polymer with_box(const MayerBox& b) const;

  bool operator==(const Polymer& other) const { return altitude_ == other.altitude_; }

 private:
  std::map<Cell, int> altitude_;
  std::size_t size_ = 0;
};

inline int altitude(const Polymer& p, const Cell& c) { return p.altitude(c); }
inline Region region_of(const Polymer& p, const MayerBox& b) { return p.region_of(b); }

/// Roof boxes (c, h(c) + 1) over the given cells, one per cell, in support order.
std::vector<MayerBox> roof(const Polymer& p, std::span<const Cell> support);

/// Copy-0 boxes over the cells holding at least one source point.
Polymer make_source_polymer(std::span<const Point> sources);

}  // namespace monocluster
