#pragma once

// Brute-force reference computations used to check everything else. Nothing
// here is fast; all routines are dense and capped at small vertex counts.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "hypersparse/bundle.hpp"
#include "hypersparse/core.hpp"
#include "hypersparse/dynspanner.hpp"
#include "hypersparse/error.hpp"
#include "hypersparse/rng.hpp"

namespace hypersparse::oracle {

inline constexpr std::size_t kCapacity = 50;

inline void require_capacity(std::size_t n) {
  if (n > kCapacity) {
    throw Error(ErrorCode::oracle_capacity,
                "oracle limited to " + std::to_string(kCapacity) + " vertices, got " + std::to_string(n));
  }
}

class DenseLaplacian {
 public:
  explicit DenseLaplacian(const MultiGraph& g) : l_(Eigen::MatrixXd::Zero(g.num_vertices(), g.num_vertices())) {
    for (const auto& e : g.edges()) {
      l_(e.u, e.u) += e.weight;
      l_(e.v, e.v) += e.weight;
      l_(e.u, e.v) -= e.weight;
      l_(e.v, e.u) -= e.weight;
    }
  }

  const Eigen::MatrixXd& matrix() const { return l_; }
  std::size_t size() const { return static_cast<std::size_t>(l_.rows()); }

  double quadratic_form(std::span<const double> x) const {
    if (x.size() != size()) throw Error(ErrorCode::length_mismatch, "potential vector length mismatch");
    const Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
    return v.dot(l_ * v);
  }

  bool symmetric(double tol = 1e-12) const { return (l_ - l_.transpose()).cwiseAbs().maxCoeff() <= tol; }
  double max_row_sum() const { return size() == 0 ? 0.0 : l_.rowwise().sum().cwiseAbs().maxCoeff(); }
  double min_eigenvalue() const {
    if (size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  /// Moore-Penrose pseudoinverse by eigendecomposition, dropping eigenvalues below 1e-10 * lambda_max.
  Eigen::MatrixXd pseudoinverse() const {
    const auto n = l_.rows();
    if (n == 0) return Eigen::MatrixXd(0, 0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l_);
    const auto& lam = es.eigenvalues();
    const double cutoff = 1e-10 * std::max(lam.cwiseAbs().maxCoeff(), 0.0);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (lam(i) > cutoff) inv(i) = 1.0 / lam(i);
    }
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
  }

 private:
  Eigen::MatrixXd l_;
};

/// Connected components by union of edges (labels are component representatives).
inline std::vector<VertexId> components(const MultiGraph& g) {
  std::vector<VertexId> parent(g.num_vertices());
  std::iota(parent.begin(), parent.end(), VertexId{0});
  auto find = [&](VertexId x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : g.edges()) parent[find(e.u)] = find(e.v);
  for (VertexId v = 0; v < parent.size(); ++v) parent[v] = find(v);
  return parent;
}

/// (e_u - e_v)^T L^+ (e_u - e_v); infinity when u and v are disconnected.
inline double effective_resistance(const MultiGraph& g, VertexId u, VertexId v) {
  require_capacity(g.num_vertices());
  if (u >= g.num_vertices() || v >= g.num_vertices()) throw Error(ErrorCode::vertex_out_of_range, "vertex out of range");
  if (u == v) return 0.0;
  const auto comp = components(g);
  if (comp[u] != comp[v]) return kInfinity;
  const Eigen::MatrixXd p = DenseLaplacian(g).pseudoinverse();
  return p(u, u) + p(v, v) - 2.0 * p(u, v);
}

/// All-pairs effective resistances from one pseudoinverse.
inline Eigen::MatrixXd resistance_matrix(const MultiGraph& g) {
  require_capacity(g.num_vertices());
  const auto n = static_cast<Eigen::Index>(g.num_vertices());
  const Eigen::MatrixXd p = DenseLaplacian(g).pseudoinverse();
  const auto comp = components(g);
  Eigen::MatrixXd r(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      r(a, b) = a == b ? 0.0 : comp[a] != comp[b] ? kInfinity : p(a, a) + p(b, b) - 2.0 * p(a, b);
    }
  }
  return r;
}

/// Second route: ground v, inject a unit current at u, solve by Gaussian
/// elimination with partial pivoting restricted to u's component.
inline double effective_resistance_by_solve(const MultiGraph& g, VertexId u, VertexId v) {
  require_capacity(g.num_vertices());
  if (u == v) return 0.0;
  const auto comp = components(g);
  if (comp[u] != comp[v]) return kInfinity;
  std::vector<VertexId> index(g.num_vertices(), std::numeric_limits<VertexId>::max());
  std::vector<VertexId> kept;
  for (VertexId x = 0; x < g.num_vertices(); ++x) {
    if (comp[x] == comp[u] && x != v) {
      index[x] = static_cast<VertexId>(kept.size());
      kept.push_back(x);
    }
  }
  const std::size_t m = kept.size();
  std::vector<std::vector<double>> a(m, std::vector<double>(m + 1, 0.0));
  for (const auto& e : g.edges()) {
    const auto iu = index[e.u], iv = index[e.v];
    const bool hu = iu != std::numeric_limits<VertexId>::max(), hv = iv != std::numeric_limits<VertexId>::max();
    if (hu) a[iu][iu] += e.weight;
    if (hv) a[iv][iv] += e.weight;
    if (hu && hv) {
      a[iu][iv] -= e.weight;
      a[iv][iu] -= e.weight;
    }
  }
  a[index[u]][m] = 1.0;
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < m; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    std::swap(a[col], a[pivot]);
    for (std::size_t r = 0; r < m; ++r) {
      if (r == col || a[r][col] == 0.0) continue;
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= m; ++c) a[r][c] -= f * a[col][c];
    }
  }
  const std::size_t iu = index[u];
  return a[iu][m] / a[iu][iu];
}

inline double series(const std::vector<double>& r) {
  if (r.empty()) throw Error(ErrorCode::invalid_parameter, "series of nothing");
  double total = 0.0;
  for (double x : r) {
    if (!(x > 0.0)) throw Error(ErrorCode::invalid_parameter, "resistances must be positive");
    total += x;
  }
  return total;
}

inline double parallel(const std::vector<double>& r) {
  if (r.empty()) throw Error(ErrorCode::invalid_parameter, "parallel of nothing");
  double total = 0.0;
  for (double x : r) {
    if (!(x > 0.0)) throw Error(ErrorCode::invalid_parameter, "resistances must be positive");
    total += 1.0 / x;
  }
  return 1.0 / total;
}

/// exp(-delta^2 mu / (2 + delta)).
inline double chernoff_bound(double mu, double delta) {
  if (mu < 0.0 || delta < 0.0) throw Error(ErrorCode::invalid_parameter, "mu and delta must be non-negative");
  return std::exp(-delta * delta * mu / (2.0 + delta));
}

/// max over pairs u, v in e of R_{G_H}(u, v), for each hyperedge.
inline std::map<EdgeId, double> hyperedge_resistances(const Hypergraph& h) {
  const Eigen::MatrixXd r = resistance_matrix(build_associated_graph(h));
  std::map<EdgeId, double> out;
  for (const auto& [id, e] : h.edges()) {
    double best = 0.0;
    for (std::size_t a = 0; a < e.vertices.size(); ++a) {
      for (std::size_t b = a + 1; b < e.vertices.size(); ++b) best = std::max(best, r(e.vertices[a], e.vertices[b]));
    }
    out[id] = best;
  }
  return out;
}

struct ReferenceSample {
  Hypergraph sparsifier;
  std::map<EdgeId, double> probability;
  double expected_size = 0.0;
};

/// Independent sampling with p_e = min{1, c_gamma r^4 eps^-2 log2 n * w_e max R(u, v)}, kept at w_e / p_e.
inline ReferenceSample resistance_importance_sampler(const Hypergraph& h, double eps, double gamma, double c_gamma,
                                                      std::uint64_t seed) {
  (void)gamma;  // enters only through c_gamma
  require_capacity(h.num_vertices());
  ReferenceSample out{Hypergraph(h.num_vertices()), {}, 0.0};
  if (h.num_edges() == 0) return out;
  const double r = static_cast<double>(h.rank());
  const double logn = std::log2(std::max<double>(2.0, static_cast<double>(h.num_vertices())));
  const double scale = c_gamma * std::pow(r, 4) * logn / (eps * eps);
  const auto res = hyperedge_resistances(h);
  Rng rng(seed);
  for (const auto& [id, e] : h.edges()) {
    const double p = std::min(1.0, scale * e.weight * res.at(id));
    out.probability[id] = p;
    out.expected_size += p;
    if (rng.uniform() < p) out.sparsifier.insert_with_id(id, e.vertices, e.weight / p);
  }
  return out;
}

/// Dijkstra over a multigraph with edge length 1/w.
inline std::vector<double> graph_distances(const MultiGraph& g, VertexId source) {
  std::vector<std::vector<std::pair<VertexId, double>>> adj(g.num_vertices());
  for (const auto& e : g.edges()) {
    adj[e.u].emplace_back(e.v, 1.0 / e.weight);
    adj[e.v].emplace_back(e.u, 1.0 / e.weight);
  }
  std::vector<double> dist(g.num_vertices(), kInfinity);
  using Item = std::pair<double, VertexId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> q;
  dist[source] = 0.0;
  q.emplace(0.0, source);
  while (!q.empty()) {
    auto [d, u] = q.top();
    q.pop();
    if (d > dist[u]) continue;
    for (auto [v, len] : adj[u]) {
      if (d + len < dist[v]) {
        dist[v] = d + len;
        q.emplace(dist[v], v);
      }
    }
  }
  return dist;
}

/// Hop distances (BFS) over the live edges of an unweighted edge list.
inline std::vector<int> hop_distances(std::size_t n, const std::vector<SpannerEdge>& edges,
                                      const std::vector<bool>& keep, VertexId source) {
  std::vector<std::vector<VertexId>> adj(n);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!keep[i]) continue;
    adj[edges[i].u].push_back(edges[i].v);
    adj[edges[i].v].push_back(edges[i].u);
  }
  std::vector<int> dist(n, -1);
  std::queue<VertexId> q;
  dist[source] = 0;
  q.push(source);
  while (!q.empty()) {
    const VertexId u = q.front();
    q.pop();
    for (VertexId v : adj[u]) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
    }
  }
  return dist;
}

struct StretchReport {
  double worst = 0.0;  // max d_F / d_G over connected pairs
  std::size_t violations = 0;
  std::size_t pairs = 0;
};

/// All-pairs hop stretch of F inside the live graph of one unweighted spanner.
inline StretchReport spanner_stretch(const MonotoneSpanner& s) {
  const auto& edges = s.edges();
  std::vector<bool> live(edges.size()), in_f(edges.size());
  for (EdgeKey k = 0; k < edges.size(); ++k) {
    live[k] = s.alive(k);
    in_f[k] = s.in_spanner(k);
  }
  const double bound = 2.0 * s.depth() - 1.0;
  StretchReport rep;
  for (VertexId u = 0; u < s.num_vertices(); ++u) {
    const auto dg = hop_distances(s.num_vertices(), edges, live, u);
    const auto df = hop_distances(s.num_vertices(), edges, in_f, u);
    for (VertexId v = u + 1; v < s.num_vertices(); ++v) {
      if (dg[v] <= 0) continue;
      ++rep.pairs;
      const double ratio = df[v] < 0 ? kInfinity : static_cast<double>(df[v]) / dg[v];
      rep.worst = std::max(rep.worst, ratio);
      if (ratio > bound) ++rep.violations;
    }
  }
  return rep;
}

/// Weighted all-pairs stretch of the union of all classes of a batched spanner, against `bound`.
inline StretchReport weighted_spanner_stretch(const WeightedSpanner& s, double bound) {
  MultiGraph g(s.num_vertices()), f(s.num_vertices());
  for (std::size_t i = 0; i < s.edges().size(); ++i) {
    if (!s.alive(i)) continue;
    const auto& e = s.edges()[i];
    g.add_edge(e.u, e.v, e.weight, e.origin);
    if (s.in_spanner(i)) f.add_edge(e.u, e.v, e.weight, e.origin);
  }
  StretchReport rep;
  for (VertexId u = 0; u < s.num_vertices(); ++u) {
    const auto dg = graph_distances(g, u);
    const auto df = graph_distances(f, u);
    for (VertexId v = u + 1; v < s.num_vertices(); ++v) {
      if (dg[v] == kInfinity) continue;
      ++rep.pairs;
      const double ratio = df[v] / dg[v];
      rep.worst = std::max(rep.worst, ratio);
      if (ratio > bound * (1.0 + 1e-12)) ++rep.violations;
    }
  }
  return rep;
}

struct ClusterMismatch {
  int level = 0;
  VertexId vertex = 0;
  std::string what;
};

using Adjacency = std::vector<std::vector<std::pair<VertexId, EdgeKey>>>;

/// Recomputes every level's clustering of the graph `adj` from scratch by
/// multi-source BFS with sigma tie-breaks (using s's permutation and centers)
/// and compares (center, distance, parent) with the state maintained in s.
inline std::vector<ClusterMismatch> validate_clusters(const MonotoneSpanner& s, const Adjacency& adj) {
  std::vector<ClusterMismatch> out;
  const std::size_t n = s.num_vertices();
  const auto& sigma = s.permutation();
  for (int level = 1; level < s.depth(); ++level) {
    std::vector<int> dist(n, -1);
    std::vector<std::uint32_t> owner(n, std::numeric_limits<std::uint32_t>::max());
    std::vector<VertexId> frontier;
    for (VertexId v = 0; v < n; ++v) {
      if (s.is_center(level, v)) {
        dist[v] = 0;
        owner[v] = sigma.rank(v);
        frontier.push_back(v);
      }
    }
    for (int d = 1; d <= level && !frontier.empty(); ++d) {
      std::vector<VertexId> next;
      for (VertexId u : frontier) {
        for (auto [w, key] : adj[u]) {
          if (dist[w] == -1 || dist[w] == d) {
            if (dist[w] == -1) {
              dist[w] = d;
              next.push_back(w);
            }
            owner[w] = std::min(owner[w], owner[u]);
          }
        }
      }
      frontier = std::move(next);
    }
    for (VertexId v = 0; v < n; ++v) {
      const std::int64_t want_center = dist[v] < 0 ? kNone : static_cast<std::int64_t>(sigma.vertex(owner[v]));
      const std::int64_t want_dist = dist[v] < 0 ? kNone : dist[v];
      if (s.center(level, v) != want_center) out.push_back({level, v, "center"});
      if (s.distance(level, v) != want_dist) out.push_back({level, v, "distance"});
      // Parent: smallest-sigma neighbour one step closer in the same cluster; parallel edges by key.
      std::int64_t want_parent = kNone, want_key = kNone;
      if (dist[v] > 0) {
        std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
        for (auto [w, key] : adj[v]) {
          if (dist[w] != dist[v] - 1 || owner[w] != owner[v]) continue;
          const auto r = sigma.rank(w);
          if (r < best || (r == best && static_cast<std::int64_t>(key) < want_key)) {
            best = r;
            want_parent = w;
            want_key = key;
          }
        }
      }
      if (s.parent(level, v) != want_parent) out.push_back({level, v, "parent"});
      if (s.parent_edge(level, v) != want_key) out.push_back({level, v, "parent-edge"});
    }
  }
  return out;
}

/// Validates against the spanner's own live graph.
inline std::vector<ClusterMismatch> validate_clusters(const MonotoneSpanner& s) {
  Adjacency adj(s.num_vertices());
  for (VertexId v = 0; v < s.num_vertices(); ++v) adj[v] = s.neighbours(v);
  return validate_clusters(s, adj);
}

/// Shortest hyperpath length between u and v using only hyperedges `ids` of h.
inline double restricted_hyperpath(const Hypergraph& h, const std::vector<EdgeId>& ids, VertexId u, VertexId v) {
  Hypergraph sub(h.num_vertices());
  for (EdgeId id : ids) sub.insert_with_id(id, h.edge(id).vertices, h.edge(id).weight);
  return hyperpath_distance(sub, u, v);
}

/// Number of layers (each a disjoint hyperedge set) containing a (u, v)-hyperpath of length <= budget.
inline std::size_t disjoint_hyperpath_certificate(const Hypergraph& h, const std::vector<std::vector<EdgeId>>& layers,
                                                  VertexId u, VertexId v, double budget) {
  std::size_t count = 0;
  for (const auto& layer : layers) {
    if (restricted_hyperpath(h, layer, u, v) <= budget * (1.0 + 1e-12)) ++count;
  }
  return count;
}

struct ResistanceCertificate {
  double value = 0.0;  // max over residual e and u, v in e of w_e R_{G_H}(u, v)
  double bound = 0.0;  // 4 alpha / ((r/2) t)
  bool ok = true;
};

/// Leverage of the residual of a bundle built over a hypergraph of rank class r.
inline ResistanceCertificate resistance_certificate(const Bundle& b, std::size_t r) {
  ResistanceCertificate cert;
  cert.bound = 4.0 * b.alpha() / ((static_cast<double>(r) / 2.0) * b.t());
  const auto residual = b.residual_edges();
  if (residual.empty()) return cert;
  const auto res = hyperedge_resistances(b.host());
  for (EdgeId id : residual) cert.value = std::max(cert.value, b.host().edge(id).weight * res.at(id));
  cert.ok = cert.value <= cert.bound * (1.0 + 1e-9);
  return cert;
}

}  // namespace hypersparse::oracle
