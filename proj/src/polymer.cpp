#include "monocluster/polymer.hpp"

#include <set>

#include "monocluster/error.hpp"

namespace monocluster {

const char* to_string(Region r) {
  switch (r) {
    case Region::Cluster: return "CLUSTER";
    case Region::Roof: return "ROOF";
    case Region::Sky: return "SKY";
  }
  return "?";
}

Polymer Polymer::from_boxes(std::span<const MayerBox> boxes) {
  std::set<MayerBox> unique(boxes.begin(), boxes.end());
  Polymer p;
  std::map<Cell, int> count;
  for (const MayerBox& b : unique) {
    if (b.copy < 0) throw ConfigError("polymer box with negative copy: " + to_string(b));
    int& alt = p.altitude_.try_emplace(b.cell, -1).first->second;
    alt = std::max(alt, b.copy);
    ++count[b.cell];
  }
  for (const auto& [cell, alt] : p.altitude_) {
    if (count[cell] != alt + 1)
      throw ConfigError("not a polymer: column over " + to_string(cell) + " has a hole");
    p.size_ += static_cast<std::size_t>(alt + 1);
  }
  return p;
}

int Polymer::altitude(const Cell& c) const {
  if (auto it = altitude_.find(c); it != altitude_.end()) return it->second;
  return -1;
}

Region Polymer::region_of(const MayerBox& b) const {
  const int alt = altitude(b.cell);
  if (b.copy <= alt) return Region::Cluster;
  if (b.copy == alt + 1) return Region::Roof;
  return Region::Sky;
}

std::vector<MayerBox> Polymer::boxes() const {
  std::vector<MayerBox> out;
  out.reserve(size_);
  for (const auto& [cell, alt] : altitude_)
    for (int k = 0; k <= alt; ++k) out.push_back(MayerBox{cell, k});
  return out;
}

Polymer Polymer::with_box(const MayerBox& b) const {
  if (contains(b)) return *this;
  if (!in_roof(b)) throw ConfigError("adding " + to_string(b) + " would leave a hole");
  Polymer next = *this;
  next.altitude_[b.cell] = b.copy;
  ++next.size_;
  return next;
}

std::vector<MayerBox> roof(const Polymer& p, std::span<const Cell> support) {
  std::vector<MayerBox> out;
  out.reserve(support.size());
  for (const Cell& c : support) out.push_back(MayerBox{c, p.altitude(c) + 1});
  return out;
}

Polymer make_source_polymer(std::span<const Point> sources) {
  std::vector<MayerBox> boxes;
  for (const Point& x : sources) boxes.push_back(MayerBox{cell_of_point(x), 0});
  return Polymer::from_boxes(boxes);
}

}  // namespace monocluster
