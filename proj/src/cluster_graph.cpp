#include "monocluster/cluster_graph.hpp"

#include <algorithm>

#include "monocluster/error.hpp"

namespace monocluster {

namespace {

const Polymer kEmptyPolymer{};

// Classifies link against the current polymer; nullopt plus reason if invalid.
std::optional<LinkKind> classify(const Polymer& gamma, const Link& l, std::string* reason) {
  const Region ra = gamma.region_of(l.first);
  const Region rb = gamma.region_of(l.second);
  if ((ra == Region::Cluster && rb == Region::Roof) ||
      (ra == Region::Roof && rb == Region::Cluster))
    return LinkKind::ClusterRoof;
  if (ra == Region::Roof && rb == Region::Roof) {
    if (l.first.copy == 0 && l.second.copy == 0) {
      if (reason) *reason = "condition (ii) fails: both roof endpoints lie in the copy-0 layer";
      return std::nullopt;
    }
    return LinkKind::RoofRoof;
  }
  if (reason) {
    if (ra == Region::Cluster && rb == Region::Cluster)
      *reason = "condition (i) fails: both endpoints already in the cluster";
    else
      *reason = "conditions (i)/(ii) fail: an endpoint lies in the sky";
  }
  return std::nullopt;
}

}  // namespace

const char* to_string(LinkKind k) {
  return k == LinkKind::ClusterRoof ? "CLUSTER_ROOF" : "ROOF_ROOF";
}

Link Link::make(const MayerBox& a, const MayerBox& b) {
  if (a == b) throw ConfigError("link endpoints must be distinct: " + to_string(a));
  return a < b ? Link{a, b} : Link{b, a};
}

ValidationResult validate(const Polymer& sources, std::span<const Link> links) {
  ValidationResult result;
  Polymer gamma = sources;
  for (std::size_t i = 0; i < links.size(); ++i) {
    const Link& l = links[i];
    std::string reason;
    if (l.first == l.second) reason = "link endpoints coincide";
    const auto kind = reason.empty() ? classify(gamma, l, &reason) : std::nullopt;
    if (!kind) {
      result.valid = false;
      result.failed_link = static_cast<int>(i) + 1;
      result.reason = reason;
      return result;
    }
    result.kinds.push_back(*kind);
    gamma = gamma.with_box(l.first).with_box(l.second);
  }
  return result;
}

ClusterGraph::ClusterGraph(Polymer sources) { stages_.push_back(std::move(sources)); }

ClusterGraph ClusterGraph::from_links(Polymer sources, std::span<const Link> links) {
  ClusterGraph g(std::move(sources));
  for (std::size_t i = 0; i < links.size(); ++i) {
    auto next = g.try_extend(links[i]);
    if (!next) {
      std::string reason;
      classify(g.final_stage(), links[i], &reason);
      throw ConfigError("link " + std::to_string(i + 1) + " invalid: " + reason);
    }
    g = std::move(*next);
  }
  return g;
}

std::optional<ClusterGraph> ClusterGraph::try_extend(const Link& link) const {
  const auto kind = classify(final_stage(), link, nullptr);
  if (!kind) return std::nullopt;
  ClusterGraph next = *this;
  next.links_.push_back(link);
  next.kinds_.push_back(*kind);
  next.stages_.push_back(final_stage().with_box(link.first).with_box(link.second));
  return next;
}

ClusterGraph ClusterGraph::extended(const Link& link) const {
  auto next = try_extend(link);
  if (!next) throw ConfigError("invalid extension " + to_string(link.first) + "-" + to_string(link.second));
  return *std::move(next);
}

ClusterGraph ClusterGraph::truncated(int length) const {
  if (length < 0 || length > this->length()) throw ConfigError("truncation length out of range");
  ClusterGraph g = *this;
  g.links_.resize(length);
  g.kinds_.resize(length);
  g.stages_.resize(length + 1);
  return g;
}

const Polymer& ClusterGraph::stage(int i) const {
  if (i == -1) return kEmptyPolymer;
  return stages_.at(i);
}

int ClusterGraph::conception_index(const MayerBox& b, int cutoff) const {
  if (cutoff < 0 || cutoff > length() + 1) throw ConfigError("conception cutoff out of range");
  for (int i = -1; i <= cutoff - 1; ++i)
    if (stage(i).in_roof(b)) return i;
  return cutoff;
}

int ClusterGraph::creation_index(const MayerBox& b, int cutoff) const {
  if (cutoff < 0 || cutoff > length() + 1) throw ConfigError("creation cutoff out of range");
  for (int i = 0; i <= cutoff - 1; ++i)
    if (stage(i).contains(b)) return i;
  return cutoff;
}

ValidationResult validate(const ClusterGraph& g) {
  ValidationResult result = validate(g.sources(), g.links());
  if (!result.valid) return result;
  for (int i = 1; i <= g.length(); ++i) {
    const Polymer& prev = g.stage(i - 1);
    const Polymer& cur = g.stage(i);
    const Link& l = g.link(i);
    auto fail = [&](std::string why) {
      result.valid = false;
      result.failed_link = i;
      result.reason = std::move(why);
      return result;
    };
    if (cur.size() <= prev.size()) return fail("stage does not grow");
    if (result.kinds[i - 1] != g.kind(i)) return fail("cached link kind disagrees");
    std::size_t added = 0;
    for (const MayerBox& b : {l.first, l.second}) {
      if (!cur.contains(b)) return fail("link endpoint missing from stage");
      if (!prev.contains(b)) {
        if (!prev.in_roof(b)) return fail("new box not on previous roof");
        ++added;
      }
    }
    if (cur.size() != prev.size() + added) return fail("stage adds boxes outside the link");
  }
  return result;
}

bool link_weight_vanishes(const ClusterGraph& g, int q) {
  if (g.kind(q) != LinkKind::ClusterRoof) return false;
  const Link& l = g.link(q);
  const int alpha = q - 1;
  const int smu = std::max(g.conception_index(l.first, alpha), g.conception_index(l.second, alpha));
  const int inu = std::min(g.creation_index(l.first, alpha), g.creation_index(l.second, alpha));
  return smu >= inu;
}

bool is_contributing(const ClusterGraph& g) {
  for (int q = 1; q <= g.length(); ++q)
    if (link_weight_vanishes(g, q)) return false;
  return true;
}

std::vector<int> sigma_map(const ClusterGraph& g) {
  if (!is_contributing(g)) throw NonContributingGraph("sigma map requested for a non-contributing graph");
  std::vector<int> sigma(g.length());
  for (int q = 1; q <= g.length(); ++q) {
    const Polymer& prev = g.stage(q - 1);
    const Link& l = g.link(q);
    const MayerBox bar_a{l.first.cell, prev.altitude(l.first.cell) + 1};
    const MayerBox bar_b{l.second.cell, prev.altitude(l.second.cell) + 1};
    const int s = std::max(g.conception_index(bar_a), g.conception_index(bar_b));
    if (s < 0) throw NonContributingGraph("sigma_G(" + std::to_string(q) + ") = -1");
    if (s >= q) throw ContractViolation("sigma_G(q) >= q for q = " + std::to_string(q));
    sigma[q - 1] = s;
  }
  return sigma;
}

IndexTable::IndexTable(const ClusterGraph& g, std::span<const Cell> support) : graph_(&g) {
  const Polymer& top = g.final_stage();
  for (const Cell& c : support) {
    for (int k = 0; k <= top.altitude(c) + 1; ++k) {
      const MayerBox b{c, k};
      conception_.emplace(b, g.conception_index(b));
      creation_.emplace(b, g.creation_index(b));
    }
  }
}

int IndexTable::conception(const MayerBox& b) const {
  if (auto it = conception_.find(b); it != conception_.end()) return it->second;
  return graph_->conception_index(b);
}

int IndexTable::creation(const MayerBox& b) const {
  if (auto it = creation_.find(b); it != creation_.end()) return it->second;
  return graph_->creation_index(b);
}

std::vector<Link> candidate_links(const ClusterGraph& g, const Window& w) {
  const Polymer& gamma = g.final_stage();
  std::vector<MayerBox> cluster = gamma.boxes();
  std::vector<MayerBox> roof_boxes;
  for (const Cell& c : w.cells()) {
    const MayerBox r{c, gamma.altitude(c) + 1};
    if (w.contains(r)) roof_boxes.push_back(r);
  }
  std::vector<Link> links;
  for (const MayerBox& c : cluster)
    for (const MayerBox& r : roof_boxes) links.push_back(Link::make(c, r));
  for (std::size_t i = 0; i < roof_boxes.size(); ++i)
    for (std::size_t j = i + 1; j < roof_boxes.size(); ++j)
      if (roof_boxes[i].copy != 0 || roof_boxes[j].copy != 0)
        links.push_back(Link::make(roof_boxes[i], roof_boxes[j]));
  std::sort(links.begin(), links.end());
  return links;
}

namespace {

void enumerate_from(const ClusterGraph& g, const Window& w, int p_max,
                    const std::function<void(const ClusterGraph&)>& visit) {
  visit(g);
  if (g.length() == p_max) return;
  for (const Link& l : candidate_links(g, w)) enumerate_from(g.extended(l), w, p_max, visit);
}

}  // namespace

void enumerate(const Window& w, const Polymer& sources, int p_max,
               const std::function<void(const ClusterGraph&)>& visit) {
  for (const MayerBox& b : sources.boxes())
    if (b.copy != 0 || !w.contains(b))
      throw ConfigError("source box " + to_string(b) + " outside the window's copy-0 layer");
  if (p_max < 0) return;
  enumerate_from(ClusterGraph(sources), w, p_max, visit);
}

std::vector<ClusterGraph> enumerate_all(const Window& w, const Polymer& sources, int p_max) {
  std::vector<ClusterGraph> out;
  enumerate(w, sources, p_max, [&](const ClusterGraph& g) { out.push_back(g); });
  return out;
}

}  // namespace monocluster
