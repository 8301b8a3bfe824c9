#pragma once

// Hypergraphs, their energy, hyperpath distances and the two graph
// expansions (clique / star) together with the back-map to hyperedges.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hypersparse/error.hpp"

namespace hypersparse {

using VertexId = std::uint32_t;
using EdgeId = std::uint64_t;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Hyperedge {
  std::vector<VertexId> vertices;  // sorted, distinct
  double weight = 1.0;
};

class Hypergraph {
 public:
  Hypergraph() = default;
  /// `max_rank` of 0 means unbounded.
  explicit Hypergraph(std::size_t num_vertices, std::size_t max_rank = 0)
      : num_vertices_(num_vertices), max_rank_(max_rank) {}

  EdgeId insert(std::vector<VertexId> vertices, double weight) {
    const EdgeId id = next_id_;
    insert_with_id(id, std::move(vertices), weight);
    return id;
  }

  /// Inserts under a caller-chosen id. Used for sub-hypergraphs that share
  /// ids with their parent; ids are never reused, so `id` must be fresh here.
  void insert_with_id(EdgeId id, std::vector<VertexId> vertices, double weight) {
    validate(vertices, weight);
    if (edges_.count(id) != 0 || erased_.count(id) != 0) {
      throw Error(ErrorCode::invalid_parameter, "edge id " + std::to_string(id) + " already used");
    }
    std::sort(vertices.begin(), vertices.end());
    edges_.emplace(id, Hyperedge{std::move(vertices), weight});
    next_id_ = std::max(next_id_, id + 1);
  }

  void erase(EdgeId id) {
    auto it = edges_.find(id);
    if (it == edges_.end()) {
      throw Error(ErrorCode::unknown_edge, "edge " + std::to_string(id) + " is not live");
    }
    edges_.erase(it);
    erased_.insert(id);
  }

  void set_weight(EdgeId id, double weight) {
    if (!(weight > 0.0)) throw Error(ErrorCode::non_positive_weight, "weight must be positive");
    at(id).weight = weight;
  }

  bool contains(EdgeId id) const { return edges_.count(id) != 0; }

  const Hyperedge& edge(EdgeId id) const {
    auto it = edges_.find(id);
    if (it == edges_.end()) {
      throw Error(ErrorCode::unknown_edge, "edge " + std::to_string(id) + " is not live");
    }
    return it->second;
  }

  const std::map<EdgeId, Hyperedge>& edges() const { return edges_; }
  std::size_t num_vertices() const { return num_vertices_; }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t max_rank() const { return max_rank_; }
  EdgeId next_id() const { return next_id_; }

  /// Largest cardinality among present hyperedges (0 when empty).
  std::size_t rank() const {
    std::size_t r = 0;
    for (const auto& [id, e] : edges_) r = std::max(r, e.vertices.size());
    return r;
  }

  /// max w / min w over present hyperedges; 1 when empty.
  double weight_ratio() const {
    if (edges_.empty()) return 1.0;
    double lo = kInfinity, hi = 0.0;
    for (const auto& [id, e] : edges_) {
      lo = std::min(lo, e.weight);
      hi = std::max(hi, e.weight);
    }
    return hi / lo;
  }

  friend bool operator==(const Hypergraph& a, const Hypergraph& b) {
    if (a.num_vertices_ != b.num_vertices_ || a.edges_.size() != b.edges_.size()) return false;
    auto it = b.edges_.begin();
    for (const auto& [id, e] : a.edges_) {
      if (id != it->first || e.vertices != it->second.vertices || e.weight != it->second.weight) {
        return false;
      }
      ++it;
    }
    return true;
  }

 private:
  Hyperedge& at(EdgeId id) {
    auto it = edges_.find(id);
    if (it == edges_.end()) {
      throw Error(ErrorCode::unknown_edge, "edge " + std::to_string(id) + " is not live");
    }
    return it->second;
  }

  void validate(const std::vector<VertexId>& vertices, double weight) const {
    if (vertices.size() < 2) throw Error(ErrorCode::edge_too_small, "a hyperedge needs at least 2 vertices");
    if (max_rank_ != 0 && vertices.size() > max_rank_) {
      throw Error(ErrorCode::edge_too_large,
                  "hyperedge of size " + std::to_string(vertices.size()) + " exceeds rank " + std::to_string(max_rank_));
    }
    for (VertexId v : vertices) {
      if (v >= num_vertices_) {
        throw Error(ErrorCode::vertex_out_of_range,
                    "vertex " + std::to_string(v) + " not in [0, " + std::to_string(num_vertices_) + ")");
      }
    }
    std::vector<VertexId> sorted = vertices;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw Error(ErrorCode::duplicate_vertex, "hyperedge lists a vertex twice");
    }
    if (!(weight > 0.0) || !std::isfinite(weight)) {
      throw Error(ErrorCode::non_positive_weight, "weight must be positive and finite");
    }
  }

  std::size_t num_vertices_ = 0;
  std::size_t max_rank_ = 0;
  EdgeId next_id_ = 0;
  std::map<EdgeId, Hyperedge> edges_;
  std::set<EdgeId> erased_;
};

using PotentialVector = std::vector<double>;

/// Q_H(x) = sum_e w_e * max_{u,v in e} (x_u - x_v)^2.
inline double energy(const Hypergraph& h, std::span<const double> x) {
  if (x.size() != h.num_vertices()) {
    throw Error(ErrorCode::length_mismatch, "potential vector length " + std::to_string(x.size()) +
                                                " != vertex count " + std::to_string(h.num_vertices()));
  }
  double total = 0.0;
  for (const auto& [id, e] : h.edges()) {
    double lo = kInfinity, hi = -kInfinity;
    for (VertexId v : e.vertices) {
      lo = std::min(lo, x[v]);
      hi = std::max(hi, x[v]);
    }
    total += e.weight * (hi - lo) * (hi - lo);
  }
  return total;
}

struct SparsifierCheck {
  bool ok = true;
  double worst_ratio = 0.0;  // max |Q_H / Q_sparse - 1| over probes with Q_sparse > 0
  std::size_t probes_checked = 0;
  std::size_t first_failure = 0;  // probe index, meaningful only when !ok
};

/// Tests (1 - eps) Q_sparse(x) <= Q_H(x) <= (1 + eps) Q_sparse(x) on every probe.
inline SparsifierCheck is_spectral_sparsifier(const Hypergraph& h, const Hypergraph& sparse, double eps,
                                              std::span<const PotentialVector> probes) {
  constexpr double kRoundoff = 1e-12;
  SparsifierCheck report;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const double q = energy(h, probes[i]);
    const double qs = energy(sparse, probes[i]);
    ++report.probes_checked;
    bool pass;
    if (qs > 0.0) {
      report.worst_ratio = std::max(report.worst_ratio, std::abs(q / qs - 1.0));
      const double slack = kRoundoff * std::max(q, qs);
      pass = (1.0 - eps) * qs <= q + slack && q <= (1.0 + eps) * qs + slack;
    } else {
      pass = q <= kRoundoff;
    }
    if (!pass && report.ok) {
      report.ok = false;
      report.first_failure = i;
    }
  }
  return report;
}

/// Single-source shortest hyperpath lengths where crossing hyperedge e costs 1/w_e.
inline std::vector<double> hyperpath_distances(const Hypergraph& h, VertexId source) {
  const std::size_t n = h.num_vertices();
  if (source >= n) throw Error(ErrorCode::vertex_out_of_range, "source vertex out of range");
  std::vector<std::vector<const Hyperedge*>> incident(n);
  for (const auto& [id, e] : h.edges()) {
    for (VertexId v : e.vertices) incident[v].push_back(&e);
  }
  std::vector<double> dist(n, kInfinity);
  using Item = std::pair<double, VertexId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[source] = 0.0;
  queue.emplace(0.0, source);
  while (!queue.empty()) {
    auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[u]) continue;
    for (const Hyperedge* e : incident[u]) {
      const double nd = d + 1.0 / e->weight;
      for (VertexId v : e->vertices) {
        if (nd < dist[v]) {
          dist[v] = nd;
          queue.emplace(nd, v);
        }
      }
    }
  }
  return dist;
}

inline double hyperpath_distance(const Hypergraph& h, VertexId u, VertexId v) {
  if (v >= h.num_vertices()) throw Error(ErrorCode::vertex_out_of_range, "target vertex out of range");
  if (u == v) return 0.0;
  return hyperpath_distances(h, u)[v];
}

struct GraphEdge {
  VertexId u = 0;
  VertexId v = 0;
  double weight = 1.0;
  EdgeId origin = 0;  // the hyperedge this edge was expanded from
};

/// Weighted multigraph; parallel edges allowed, each edge remembers its origin.
class MultiGraph {
 public:
  MultiGraph() = default;
  explicit MultiGraph(std::size_t num_vertices) : num_vertices_(num_vertices) {}

  void add_edge(VertexId u, VertexId v, double weight, EdgeId origin) {
    edges_.push_back(GraphEdge{u, v, weight, origin});
  }

  /// Removes every edge expanded from `origin`; returns how many went away.
  std::size_t erase_origin(EdgeId origin) {
    const auto before = edges_.size();
    std::erase_if(edges_, [origin](const GraphEdge& e) { return e.origin == origin; });
    return before - edges_.size();
  }

  std::size_t num_vertices() const { return num_vertices_; }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<GraphEdge>& edges() const { return edges_; }

 private:
  std::size_t num_vertices_ = 0;
  std::vector<GraphEdge> edges_;
};

/// Clique expansion G_H: every hyperedge becomes a clique of its weight.
inline MultiGraph build_associated_graph(const Hypergraph& h) {
  MultiGraph g(h.num_vertices());
  for (const auto& [id, e] : h.edges()) {
    for (std::size_t a = 0; a < e.vertices.size(); ++a) {
      for (std::size_t b = a + 1; b < e.vertices.size(); ++b) {
        g.add_edge(e.vertices[a], e.vertices[b], e.weight, id);
      }
    }
  }
  return g;
}

enum class StarCenter { min_vertex };

/// Star expansion centered at the minimum vertex id of each hyperedge.
inline MultiGraph build_star_graph(const Hypergraph& h, StarCenter rule = StarCenter::min_vertex) {
  (void)rule;
  MultiGraph g(h.num_vertices());
  for (const auto& [id, e] : h.edges()) {
    const VertexId center = e.vertices.front();  // vertices are kept sorted
    for (std::size_t a = 1; a < e.vertices.size(); ++a) g.add_edge(center, e.vertices[a], e.weight, id);
  }
  return g;
}

}  // namespace hypersparse
