#pragma once

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "monocluster/polymer.hpp"

namespace monocluster {

enum class LinkKind { ClusterRoof, RoofRoof };

const char* to_string(LinkKind k);

/// Unordered pair of distinct boxes, stored with first < second.
struct Link {
  MayerBox first;
  MayerBox second;

  static Link make(const MayerBox& a, const MayerBox& b);

  bool vertical() const { return first.cell == second.cell; }
  bool touches(const MayerBox& b) const { return first == b || second == b; }
  auto operator<=>(const Link&) const = default;
};

struct ValidationResult {
  bool valid = true;
  int failed_link = 0;  // 1-based index of the first offending link, 0 if valid
  std::string reason;
  std::vector<LinkKind> kinds;  // kinds of the links accepted before any failure
};

/// Checks conditions (i)/(ii) link by link against the growing stage polymers.
ValidationResult validate(const Polymer& sources, std::span<const Link> links);

/// Ordered link sequence (l_1, ..., l_p) growing the source polymer one link
/// at a time. Only valid sequences can be constructed; stages
/// Gamma_0 c Gamma_1 c ... c Gamma_p are cached.
class ClusterGraph {
 public:
  explicit ClusterGraph(Polymer sources);

  /// Throws ConfigError naming the first link that fails validation.
  static ClusterGraph from_links(Polymer sources, std::span<const Link> links);

  /// Appends a link; nullopt if it satisfies neither (i) nor (ii).
  std::optional<ClusterGraph> try_extend(const Link& link) const;
  ClusterGraph extended(const Link& link) const;
  ClusterGraph truncated(int length) const;

  int length() const { return static_cast<int>(links_.size()); }
  const Polymer& sources() const { return stages_.front(); }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<LinkKind>& kinds() const { return kinds_; }
  const Link& link(int q) const { return links_.at(q - 1); }  // 1-based
  LinkKind kind(int q) const { return kinds_.at(q - 1); }

  /// Gamma_{i,G} for -1 <= i <= p; stage(-1) is empty.
  const Polymer& stage(int i) const;
  const Polymer& final_stage() const { return stages_.back(); }

  /// Truncated conception / creation indices (cutoff alpha, 0 <= alpha <= p+1).
  int conception_index(const MayerBox& b, int cutoff) const;
  int creation_index(const MayerBox& b, int cutoff) const;
  int conception_index(const MayerBox& b) const { return conception_index(b, length() + 1); }
  int creation_index(const MayerBox& b) const { return creation_index(b, length() + 1); }

  bool operator==(const ClusterGraph& other) const {
    return links_ == other.links_ && sources() == other.sources();
  }

 private:
  std::vector<Link> links_;
  std::vector<LinkKind> kinds_;
  std::vector<Polymer> stages_;  // stages_[i] = Gamma_i, i = 0..p
};

/// Re-checks every structural invariant of a constructed graph: link
/// conditions, polymer stages, strict growth, new boxes on the previous roof.
ValidationResult validate(const ClusterGraph& g);

/// True when link q carries an identically vanishing omega weight: a
/// cluster-roof link whose truncated indices satisfy s_mu >= i_nu.
bool link_weight_vanishes(const ClusterGraph& g, int q);

/// True unless some link weight vanishes identically in h.
bool is_contributing(const ClusterGraph& g);

/// sigma_G(q) = max(mu_G(bar b_q), mu_G(bar b'_q)), q = 1..p (index q-1 in
/// the result), where bar b are the roof boxes of Gamma_{q-1} over the
/// cells of l_q. Throws NonContributingGraph for non-contributing graphs.
std::vector<int> sigma_map(const ClusterGraph& g);

/// Conception/creation indices over Gamma_p u W(Gamma_p) restricted to a
/// set of cells; sky boxes are answered on demand with p + 1.
class IndexTable {
 public:
  IndexTable(const ClusterGraph& g, std::span<const Cell> support);

  int conception(const MayerBox& b) const;
  int creation(const MayerBox& b) const;

 private:
  const ClusterGraph* graph_;
  std::map<MayerBox, int> conception_;
  std::map<MayerBox, int> creation_;
};

/// Valid single-link extensions of g whose new boxes stay inside the
/// window, in lexicographic link order.
std::vector<Link> candidate_links(const ClusterGraph& g, const Window& w);

/// Visits every cluster-graph with 0 <= p <= p_max and Gamma_p inside the
/// window's boxes, once each, in depth-first lexicographic order (a graph
/// precedes its extensions). Non-contributing graphs are visited too.
void enumerate(const Window& w, const Polymer& sources, int p_max,
               const std::function<void(const ClusterGraph&)>& visit);

std::vector<ClusterGraph> enumerate_all(const Window& w, const Polymer& sources, int p_max);

/// Uniformly chosen valid extension at each step until length p or no
/// extension remains inside the window.
template <class Rng>
ClusterGraph random_graph(const Window& w, const Polymer& sources, int p, Rng& rng) {
  ClusterGraph g(sources);
  for (int q = 0; q < p; ++q) {
    const std::vector<Link> options = candidate_links(g, w);
    if (options.empty()) break;
    std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
    g = g.extended(options[pick(rng)]);
  }
  return g;
}

}  // namespace monocluster
