#pragma once

// Decremental monotone (2k-1)-spanner of an unweighted multigraph, built from
// a clustering hierarchy C_1..C_k with random-permutation tie-breaking, plus
// the weight-class batching that lifts it to weighted multigraphs.
//
// Level i (0 <= i <= k) clusters vertices around the centers S_i within
// radius i. Each vertex carries the label (d(v, s), sigma(s)) of its nearest
// center s, ties broken by the permutation sigma; labels are exactly the
// fixpoint of label(v) = min over neighbours u of (d(u) + 1, sigma(center(u)))
// truncated at depth i. Under deletions labels only grow, so they are
// maintained as lower bounds that are raised until the fixpoint is restored.
// Level 0 is the trivial clustering (S_0 = V, every vertex its own cluster)
// and level k is empty (S_k = {}); neither needs maintenance.
//
// The spanner F holds, for the current state, every forest edge (v, parent)
// and, for every v in V_i \ V_{i+1}, one edge into each neighbouring level-i
// cluster (the neighbour with smallest sigma, then the smallest edge key).
// Edges are never evicted from F unless deleted from the graph.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "hypersparse/core.hpp"
#include "hypersparse/error.hpp"
#include "hypersparse/event_log.hpp"
#include "hypersparse/rng.hpp"

namespace hypersparse {

using EdgeKey = std::uint32_t;

struct SpannerEdge {
  VertexId u = 0;
  VertexId v = 0;
};

/// Random bijection V -> [0, n), fixed for the lifetime of one spanner.
class Permutation {
 public:
  Permutation() = default;
  Permutation(std::size_t n, Rng& rng) : rank_(n), vertex_(n) {
    std::iota(vertex_.begin(), vertex_.end(), VertexId{0});
    rng.shuffle(vertex_);
    for (std::size_t r = 0; r < n; ++r) rank_[vertex_[r]] = static_cast<std::uint32_t>(r);
  }

  std::uint32_t rank(VertexId v) const { return rank_[v]; }
  VertexId vertex(std::uint32_t r) const { return vertex_[r]; }
  std::size_t size() const { return rank_.size(); }

 private:
  std::vector<std::uint32_t> rank_;
  std::vector<VertexId> vertex_;
};

/// Default hierarchy depth: ceil(log2 n), at least 2.
inline int default_spanner_depth(std::size_t n) {
  int k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return std::max(k, 2);
}

class MonotoneSpanner {
 public:
  static constexpr std::uint64_t kUnassigned = std::numeric_limits<std::uint64_t>::max();
  static constexpr std::uint32_t kNoParent = std::numeric_limits<std::uint32_t>::max();
  static constexpr std::uint64_t kUnchanged = kUnassigned - 1;

  MonotoneSpanner(std::size_t n, std::vector<SpannerEdge> edges, int k, std::uint64_t seed,
                  EventLog* log = nullptr, std::string name = "spanner")
      : n_(n), k_(k), edges_(std::move(edges)), log_(log) {
    if (k < 2) throw Error(ErrorCode::invalid_parameter, "spanner depth k must be at least 2");
    Rng rng(seed);
    sigma_ = Permutation(n, rng);
    // S_0 = V; S_{i+1} keeps each vertex of S_i with probability n^{-1/k}; S_k = {}.
    const double keep = n > 1 ? std::pow(static_cast<double>(n), -1.0 / k) : 1.0;
    top_level_.assign(n, 0);
    for (VertexId v = 0; v < n; ++v) {
      int level = 0;
      while (level + 1 < k && rng.bernoulli(keep)) ++level;
      top_level_[v] = level;
    }
    if (log_ != nullptr) instance_ = log_->register_instance(std::move(name));

    adj_.resize(n);
    alive_.assign(edges_.size(), true);
    in_f_.assign(edges_.size(), false);
    slot_.resize(edges_.size());
    for (EdgeKey key = 0; key < edges_.size(); ++key) {
      const auto [u, v] = edges_[key];
      if (u >= n || v >= n || u == v) {
        throw Error(ErrorCode::invalid_parameter, "spanner edge endpoints must be distinct and in range");
      }
      slot_[key] = {static_cast<std::uint32_t>(adj_[u].size()), static_cast<std::uint32_t>(adj_[v].size())};
      adj_[u].push_back({v, key});
      adj_[v].push_back({u, key});
    }

    levels_.resize(k_);  // index 0 unused (trivial level)
    previous_.assign(n, kUnchanged);
    parent_changes_.assign(k_, std::vector<std::uint64_t>(n, 0));
    for (int i = 1; i < k_; ++i) build_level(i);

    std::vector<EdgeKey> added;
    for (int i = 0; i < k_; ++i) {
      for (VertexId v = 0; v < n_; ++v) collect_required(i, v, added);
    }
    admit(added);
  }

  /// Deletes one edge; returns the keys newly added to F (sorted).
  std::vector<EdgeKey> erase(EdgeKey key) {
    if (key >= edges_.size() || !alive_[key]) {
      throw Error(ErrorCode::unknown_edge, "spanner edge " + std::to_string(key) + " is not live");
    }
    ++updates_;
    const auto [a, b] = edges_[key];
    detach(key);
    log_membership(MembershipEvent::Kind::host_remove, key);
    if (in_f_[key]) {
      in_f_[key] = false;
      --f_size_;
      log_membership(MembershipEvent::Kind::leave, key);
    }

    // changed[i]: vertices whose level-i label moved, with their previous label.
    std::vector<std::vector<std::pair<VertexId, std::uint64_t>>> changed(k_ + 1);
    for (int i = 1; i < k_; ++i) changed[i] = relabel(i, {a, b});

    std::vector<EdgeKey> added;
    std::vector<ClusterEvent> events;
    std::vector<char> mark(n_, 0);
    for (int i = 0; i < k_; ++i) {
      std::vector<VertexId> dirty{a, b};
      for (const auto& [v, old] : changed[i]) {
        previous_[v] = old;
        dirty.push_back(v);
        for (const auto& [w, ek] : adj_[v]) dirty.push_back(w);
      }
      for (const auto& [v, old] : changed[i + 1]) dirty.push_back(v);
      for (VertexId v : dirty) {
        if (mark[v] == i + 1) continue;
        mark[v] = static_cast<char>(i + 1);
        if (i >= 1) refresh_parent(i, v, events);
        collect_required(i, v, added);
      }
      for (const auto& [v, old] : changed[i]) previous_[v] = kUnchanged;
    }
    auto fresh = admit(added);
    for (auto& ev : events) {
      if (log_ != nullptr) log_->record(ev);
    }
    std::sort(fresh.begin(), fresh.end());
    return fresh;
  }

  std::size_t num_vertices() const { return n_; }
  int depth() const { return k_; }
  const std::vector<SpannerEdge>& edges() const { return edges_; }
  bool alive(EdgeKey key) const { return alive_.at(key); }
  bool in_spanner(EdgeKey key) const { return in_f_.at(key); }
  std::size_t spanner_size() const { return f_size_; }
  std::uint64_t work() const { return work_; }
  std::uint64_t updates() const { return updates_; }
  const Permutation& permutation() const { return sigma_; }

  std::vector<EdgeKey> spanner_edges() const {
    std::vector<EdgeKey> out;
    for (EdgeKey key = 0; key < edges_.size(); ++key) {
      if (in_f_[key]) out.push_back(key);
    }
    return out;
  }

  /// Membership in S_level.
  bool is_center(int level, VertexId v) const {
    if (level <= 0) return true;
    return level < k_ && top_level_[v] >= level;
  }

  /// Assigned center at `level`, or kNone when v lies outside V_level.
  std::int64_t center(int level, VertexId v) const {
    if (level == 0) return v;
    if (level >= k_) return kNone;
    const auto lab = levels_[level].label[v];
    return lab == kUnassigned ? kNone : static_cast<std::int64_t>(sigma_.vertex(lab & 0xffffffffu));
  }

  /// d(v, S_level) when at most `level`, else kNone.
  std::int64_t distance(int level, VertexId v) const {
    if (level == 0) return 0;
    if (level >= k_) return kNone;
    const auto lab = levels_[level].label[v];
    return lab == kUnassigned ? kNone : static_cast<std::int64_t>(lab >> 32);
  }

  /// Parent vertex in the level forest, or kNone for centers and unassigned vertices.
  std::int64_t parent(int level, VertexId v) const {
    if (level <= 0 || level >= k_) return kNone;
    const auto p = levels_[level].parent[v];
    return p == kNoParent ? kNone : static_cast<std::int64_t>(p);
  }

  /// Edge key joining v to its parent, or kNone.
  std::int64_t parent_edge(int level, VertexId v) const {
    if (level <= 0 || level >= k_) return kNone;
    const auto p = levels_[level].parent_key[v];
    return p == kNoParent ? kNone : static_cast<std::int64_t>(p);
  }

  std::uint64_t parent_change_count(VertexId v, int level) const {
    if (level <= 0 || level >= k_) return 0;
    return parent_changes_[level][v];
  }

  /// Edges (keys) incident to v that are still in the graph.
  std::vector<std::pair<VertexId, EdgeKey>> neighbours(VertexId v) const {
    std::vector<std::pair<VertexId, EdgeKey>> out;
    for (const auto& a : adj_[v]) out.emplace_back(a.to, a.key);
    return out;
  }

 private:
  struct Adj {
    VertexId to;
    EdgeKey key;
  };
  struct Slot {
    std::uint32_t at_u;
    std::uint32_t at_v;
  };
  struct Level {
    std::vector<std::uint64_t> label;  // (distance << 32) | sigma(center), or kUnassigned
    std::vector<std::uint32_t> parent;
    std::vector<std::uint32_t> parent_key;
  };

  static std::uint64_t pack(std::uint64_t dist, std::uint32_t sigma_center) { return (dist << 32) | sigma_center; }

  void detach(EdgeKey key) {
    alive_[key] = false;
    const auto [u, v] = edges_[key];
    remove_slot(u, slot_[key].at_u);
    remove_slot(v, slot_[key].at_v);
  }

  void remove_slot(VertexId owner, std::uint32_t pos) {
    auto& list = adj_[owner];
    const Adj moved = list.back();
    list[pos] = moved;
    list.pop_back();
    if (pos < list.size()) {
      auto& s = slot_[moved.key];
      // A self-loop is impossible, so exactly one side of `moved` lives in `owner`'s list.
      if (edges_[moved.key].u == owner) {
        s.at_u = pos;
      } else {
        s.at_v = pos;
      }
    }
  }

  std::uint64_t compute_label(int level, VertexId v) {
    if (is_center(level, v)) return pack(0, sigma_.rank(v));
    std::uint64_t best = kUnassigned;
    const auto& label = levels_[level].label;
    for (const auto& [w, key] : adj_[v]) {
      ++work_;
      const auto lab = label[w];
      if (lab == kUnassigned || static_cast<int>(lab >> 32) >= level) continue;
      best = std::min(best, lab + (std::uint64_t{1} << 32));
    }
    return best;
  }

  void build_level(int level) {
    auto& lv = levels_[level];
    lv.label.assign(n_, kUnassigned);
    lv.parent.assign(n_, kNoParent);
    lv.parent_key.assign(n_, kNoParent);
    std::vector<VertexId> frontier;
    for (VertexId v = 0; v < n_; ++v) {
      if (is_center(level, v)) {
        lv.label[v] = pack(0, sigma_.rank(v));
        frontier.push_back(v);
      }
    }
    for (int d = 0; d < level && !frontier.empty(); ++d) {
      std::vector<VertexId> next;
      for (VertexId u : frontier) {
        const auto cand = lv.label[u] + (std::uint64_t{1} << 32);
        for (const auto& [w, key] : adj_[u]) {
          ++work_;
          if (cand < lv.label[w]) {
            if (lv.label[w] == kUnassigned) next.push_back(w);
            lv.label[w] = cand;
          }
        }
      }
      frontier = std::move(next);
    }
    for (VertexId v = 0; v < n_; ++v) {
      assign_parent(level, v);
      if (log_ != nullptr && lv.label[v] != kUnassigned) {
        ClusterEvent ev;
        ev.update = 0;
        ev.instance = instance_;
        ev.level = level;
        ev.vertex = v;
        ev.new_center = center(level, v);
        ev.new_parent = parent(level, v);
        ev.new_distance = distance(level, v);
        log_->record(ev);
      }
    }
  }

  /// Raises level-`level` labels from `seeds` outward until the fixpoint holds.
  std::vector<std::pair<VertexId, std::uint64_t>> relabel(int level, std::initializer_list<VertexId> seeds) {
    auto& label = levels_[level].label;
    using Item = std::pair<std::uint64_t, VertexId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    std::vector<char> queued(n_, 0);
    std::vector<char> touched(n_, 0);
    std::vector<std::pair<VertexId, std::uint64_t>> changed;
    for (VertexId s : seeds) {
      if (!queued[s]) {
        queued[s] = 1;
        queue.emplace(label[s], s);
      }
    }
    while (!queue.empty()) {
      const VertexId v = queue.top().second;
      queue.pop();
      queued[v] = 0;
      const auto fresh = compute_label(level, v);
      if (fresh == label[v]) continue;
      if (!touched[v]) {
        touched[v] = 1;
        changed.emplace_back(v, label[v]);
      }
      label[v] = fresh;
      for (const auto& [w, key] : adj_[v]) {
        ++work_;
        if (!queued[w] && !is_center(level, w)) {
          queued[w] = 1;
          queue.emplace(label[w], w);
        }
      }
    }
    return changed;
  }

  /// Smallest-sigma neighbour one step closer to the same center; parallel edges by smallest key.
  void assign_parent(int level, VertexId v) {
    auto& lv = levels_[level];
    lv.parent[v] = kNoParent;
    lv.parent_key[v] = kNoParent;
    const auto lab = lv.label[v];
    if (lab == kUnassigned || (lab >> 32) == 0) return;
    const auto want = lab - (std::uint64_t{1} << 32);
    std::uint32_t best_rank = kNoParent;
    for (const auto& [w, key] : adj_[v]) {
      ++work_;
      if (lv.label[w] != want) continue;
      const auto r = sigma_.rank(w);
      if (r < best_rank || (r == best_rank && key < lv.parent_key[v])) {
        best_rank = r;
        lv.parent[v] = w;
        lv.parent_key[v] = key;
      }
    }
  }

  void refresh_parent(int level, VertexId v, std::vector<ClusterEvent>& events) {
    auto& lv = levels_[level];
    const auto old_parent = parent(level, v);
    const auto old_key = lv.parent_key[v];
    const auto old_label = previous_[v] == kUnchanged ? lv.label[v] : previous_[v];
    assign_parent(level, v);
    const auto new_parent = parent(level, v);
    if (new_parent != kNone && old_parent != kNone && new_parent != old_parent) ++parent_changes_[level][v];
    if (old_label == lv.label[v] && old_parent == new_parent) return;
    ClusterEvent ev;
    ev.update = updates_;
    ev.instance = instance_;
    ev.level = level;
    ev.vertex = v;
    ev.old_center = unpack_center(old_label);
    ev.new_center = center(level, v);
    ev.old_parent = old_parent;
    ev.new_parent = new_parent;
    ev.old_distance = unpack_distance(old_label);
    ev.new_distance = distance(level, v);
    if (new_parent != kNone && lv.parent_key[v] != old_key) ev.f_additions.push_back(lv.parent_key[v]);
    events.push_back(std::move(ev));
  }

  std::int64_t unpack_center(std::uint64_t lab) const {
    return lab == kUnassigned ? kNone : static_cast<std::int64_t>(sigma_.vertex(lab & 0xffffffffu));
  }
  static std::int64_t unpack_distance(std::uint64_t lab) {
    return lab == kUnassigned ? kNone : static_cast<std::int64_t>(lab >> 32);
  }

  void collect_required(int level, VertexId v, std::vector<EdgeKey>& out) {
    if (level >= 1) {
      const auto pk = levels_[level].parent_key[v];
      if (pk != kNoParent) out.push_back(pk);
    }
    // Inter-cluster edges for v in V_level \ V_{level+1}.
    const auto own = center(level, v);
    if (own == kNone || center(level + 1, v) != kNone) return;
    std::map<std::int64_t, std::pair<std::uint32_t, EdgeKey>> best;  // neighbour cluster -> (sigma, key)
    for (const auto& [w, key] : adj_[v]) {
      ++work_;
      const auto c = center(level, w);
      if (c == kNone || c == own) continue;
      const std::pair<std::uint32_t, EdgeKey> cand{sigma_.rank(w), key};
      auto it = best.find(c);
      if (it == best.end() || cand < it->second) best[c] = cand;
    }
    for (const auto& [c, pick] : best) out.push_back(pick.second);
  }

  /// Adds `keys` to F; returns the ones that were not there yet.
  std::vector<EdgeKey> admit(const std::vector<EdgeKey>& keys) {
    std::vector<EdgeKey> fresh;
    for (EdgeKey key : keys) {
      if (in_f_[key]) continue;
      in_f_[key] = true;
      ++f_size_;
      fresh.push_back(key);
      log_membership(MembershipEvent::Kind::enter, key);
    }
    return fresh;
  }

  void log_membership(MembershipEvent::Kind kind, EdgeKey key) {
    if (log_ == nullptr) return;
    MembershipEvent ev;
    ev.update = updates_;
    ev.instance = instance_;
    ev.set = "F";
    ev.level = 0;
    ev.kind = kind;
    ev.item = key;
    log_->record(ev);
  }

  std::size_t n_;
  int k_;
  std::vector<SpannerEdge> edges_;
  EventLog* log_ = nullptr;
  std::uint32_t instance_ = 0;
  Permutation sigma_;
  std::vector<int> top_level_;
  std::vector<std::vector<Adj>> adj_;
  std::vector<Slot> slot_;
  std::vector<bool> alive_;
  std::vector<bool> in_f_;
  std::size_t f_size_ = 0;
  std::vector<Level> levels_;
  std::vector<std::vector<std::uint64_t>> parent_changes_;
  std::vector<std::uint64_t> previous_;
  std::uint64_t work_ = 0;
  std::uint64_t updates_ = 0;
};

/// Weight class of w relative to a fixed minimum: class c >= 1 holds
/// [2^{c-1} w_min, 2^c w_min).
inline int weight_class(double w, double w_min) {
  if (!(w >= w_min) || !(w_min > 0.0)) {
    throw Error(ErrorCode::invalid_parameter, "weight below the class base");
  }
  int c = 1;
  double hi = 2.0 * w_min;
  while (w >= hi) {
    hi *= 2.0;
    ++c;
  }
  return c;
}

/// Weighted decremental spanner: one MonotoneSpanner per weight class, each
/// over the unit-length copy of that class. Edge indices are positions in the
/// vector handed to the constructor.
class WeightedSpanner {
 public:
  WeightedSpanner(std::size_t n, const std::vector<GraphEdge>& edges, int k, std::uint64_t seed,
                  EventLog* log = nullptr, const std::string& name = "spanner")
      : n_(n), k_(k), edges_(edges) {
    w_min_ = kInfinity;
    for (const auto& e : edges_) w_min_ = std::min(w_min_, e.weight);
    std::map<int, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < edges_.size(); ++i) members[weight_class(edges_[i].weight, w_min_)].push_back(i);
    where_.resize(edges_.size());
    for (auto& [c, list] : members) {
      std::vector<SpannerEdge> local;
      local.reserve(list.size());
      for (std::size_t j = 0; j < list.size(); ++j) {
        local.push_back({edges_[list[j]].u, edges_[list[j]].v});
        where_[list[j]] = {classes_.size(), static_cast<EdgeKey>(j)};
      }
      classes_.push_back(Class{c, list,
                               MonotoneSpanner(n, std::move(local), k, derive_seed(seed, {static_cast<std::uint64_t>(c)}),
                                               log, name + "/w" + std::to_string(c))});
    }
  }

  /// Deletes edge `index`; returns indices newly added to the spanner (sorted).
  std::vector<std::size_t> erase(std::size_t index) {
    if (index >= edges_.size()) throw Error(ErrorCode::unknown_edge, "spanner edge index out of range");
    const auto [cls, key] = where_[index];
    auto& c = classes_[cls];
    std::vector<std::size_t> out;
    for (EdgeKey k : c.spanner.erase(key)) out.push_back(c.members[k]);
    std::sort(out.begin(), out.end());
    return out;
  }

  bool alive(std::size_t index) const {
    const auto [cls, key] = where_.at(index);
    return classes_[cls].spanner.alive(key);
  }
  bool in_spanner(std::size_t index) const {
    const auto [cls, key] = where_.at(index);
    return classes_[cls].spanner.in_spanner(key);
  }

  std::vector<std::size_t> spanner_edges() const {
    std::vector<std::size_t> out;
    for (const auto& c : classes_) {
      for (EdgeKey k : c.spanner.spanner_edges()) out.push_back(c.members[k]);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::size_t spanner_size() const {
    std::size_t total = 0;
    for (const auto& c : classes_) total += c.spanner.spanner_size();
    return total;
  }

  std::uint64_t work() const {
    std::uint64_t total = 0;
    for (const auto& c : classes_) total += c.spanner.work();
    return total;
  }

  const std::vector<GraphEdge>& edges() const { return edges_; }
  std::size_t num_vertices() const { return n_; }
  int depth() const { return k_; }
  double min_weight() const { return w_min_; }
  std::size_t num_classes() const { return classes_.size(); }
  int class_id(std::size_t i) const { return classes_.at(i).id; }
  const MonotoneSpanner& class_spanner(std::size_t i) const { return classes_.at(i).spanner; }

 private:
  struct Class {
    int id;
    std::vector<std::size_t> members;  // local key -> global index
    MonotoneSpanner spanner;
  };

  std::size_t n_;
  int k_;
  std::vector<GraphEdge> edges_;
  double w_min_ = 1.0;
  std::vector<Class> classes_;
  std::vector<std::pair<std::size_t, EdgeKey>> where_;
};

}  // namespace hypersparse
