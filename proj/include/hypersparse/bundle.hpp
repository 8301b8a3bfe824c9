#pragma once

// Decremental t-bundle hyperspanner. Layer i runs a weighted monotone spanner
// over the star graph of R_i = H minus the hyperedges of layers 1..i-1; the
// hyperedge set T_i is the set of origins of that spanner's edges. Whatever no
// layer picks is the residual.
//
// A hyperedge e of R_i lives in the underlying graphs of layers 1..layer(e).
// When layer i's spanner admits a star edge whose origin sits deeper (in T_j
// with j > i, or in the residual), that origin moves up to T_i and its star
// edges are deleted from layers i+1..j. Those deletions are processed in layer
// order, so a cascade never has to revisit a layer.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "hypersparse/core.hpp"
#include "hypersparse/dynspanner.hpp"
#include "hypersparse/error.hpp"
#include "hypersparse/event_log.hpp"
#include "hypersparse/rng.hpp"

namespace hypersparse {

/// alpha = 2 (star graph) * 2 (weight batching) * (2k - 1).
inline double bundle_stretch(int spanner_depth) { return 4.0 * (2 * spanner_depth - 1); }

struct Promotion {
  EdgeId id = 0;
  int from_layer = 0;  // 0 means the residual
  int to_layer = 0;
};

struct BundleReport {
  int removed_from_layer = 0;  // 0 means the deleted hyperedge was residual
  std::vector<Promotion> promotions;
};

class Bundle {
 public:
  static constexpr int kResidual = 0;

  /// `k` = 0 picks the default spanner depth for h's vertex count.
  Bundle(const Hypergraph& h, int t, int k, std::uint64_t seed, EventLog* log = nullptr,
         const std::string& name = "bundle")
      : host_(h), t_(t), k_(k == 0 ? default_spanner_depth(h.num_vertices()) : k), log_(log) {
    if (t < 1) throw Error(ErrorCode::invalid_parameter, "bundle size t must be at least 1");
    if (log_ != nullptr) instance_ = log_->register_instance(name);
    for (const auto& [id, e] : host_.edges()) layer_of_[id] = kResidual;
    // Layers past the first empty one stay empty forever (edges only move
    // to shallower layers), so they are never materialized.
    for (int i = 1; i <= t_; ++i) {
      Layer layer;
      Hypergraph residual(host_.num_vertices());
      for (const auto& [id, e] : host_.edges()) {
        if (layer_of_[id] == kResidual) residual.insert_with_id(id, e.vertices, e.weight);
      }
      if (residual.num_edges() == 0) break;
      const MultiGraph star = build_star_graph(residual);
      for (std::size_t idx = 0; idx < star.edges().size(); ++idx) {
        layer.star_edges[star.edges()[idx].origin].push_back(idx);
      }
      layer.spanner = std::make_unique<WeightedSpanner>(host_.num_vertices(), star.edges(), k_,
                                                        derive_seed(seed, {static_cast<std::uint64_t>(i)}), log_,
                                                        name + "/F" + std::to_string(i));
      for (std::size_t idx : layer.spanner->spanner_edges()) {
        const EdgeId origin = star.edges()[idx].origin;
        if (layer_of_[origin] == kResidual) {
          layer_of_[origin] = i;
          log_member("T", i, MembershipEvent::Kind::enter, origin);
          log_member("B", 0, MembershipEvent::Kind::enter, origin);
        }
      }
      layers_.push_back(std::move(layer));
    }
  }

  Bundle(Bundle&&) noexcept = default;
  Bundle& operator=(Bundle&&) noexcept = default;

  BundleReport erase(EdgeId id) {
    auto it = layer_of_.find(id);
    if (it == layer_of_.end()) throw Error(ErrorCode::unknown_edge, "edge " + std::to_string(id) + " is not live");
    BundleReport report;
    const int home = it->second;
    report.removed_from_layer = home;

    // pending[i] lists hyperedges whose star edges must leave layer i's graph.
    std::vector<std::vector<EdgeId>> pending(layers_.size() + 1);
    for (int i = 1; i <= depth_of(home); ++i) pending[i].push_back(id);
    if (home != kResidual) {
      log_member("T", home, MembershipEvent::Kind::host_remove, id);
      log_member("T", home, MembershipEvent::Kind::leave, id);
      log_member("B", 0, MembershipEvent::Kind::host_remove, id);
      log_member("B", 0, MembershipEvent::Kind::leave, id);
    }
    layer_of_.erase(it);
    host_.erase(id);

    for (int i = 1; i <= materialized_layers(); ++i) {
      auto& layer = layers_[i - 1];
      for (EdgeId gone : pending[i]) {
        auto star = layer.star_edges.find(gone);
        if (star == layer.star_edges.end()) continue;
        const std::vector<std::size_t> indices = std::move(star->second);
        layer.star_edges.erase(star);
        for (std::size_t idx : indices) {
          for (std::size_t added : layer.spanner->erase(idx)) {
            const EdgeId origin = layer.spanner->edges()[added].origin;
            auto where = layer_of_.find(origin);
            if (where == layer_of_.end()) continue;  // the hyperedge being deleted
            const int from = where->second;
            if (from != kResidual && from <= i) continue;
            where->second = i;
            report.promotions.push_back({origin, from, i});
            // The origin disappears from the graphs of layers i+1..from.
            for (int j = i + 1; j <= depth_of(from); ++j) {
              pending[j].push_back(origin);
              log_member("T", j, MembershipEvent::Kind::host_remove, origin);
            }
            if (from != kResidual) log_member("T", from, MembershipEvent::Kind::leave, origin);
            log_member("T", i, MembershipEvent::Kind::enter, origin);
            if (from == kResidual) log_member("B", 0, MembershipEvent::Kind::enter, origin);
          }
        }
      }
    }
    return report;
  }

  int t() const { return t_; }
  int spanner_depth() const { return k_; }
  /// Layers that were nonempty at construction; the rest hold no edges.
  int materialized_layers() const { return static_cast<int>(layers_.size()); }
  double alpha() const { return bundle_stretch(k_); }
  const Hypergraph& host() const { return host_; }
  bool contains(EdgeId id) const { return layer_of_.count(id) != 0; }

  /// 1..t for bundle layers, 0 for the residual.
  int layer_of(EdgeId id) const {
    auto it = layer_of_.find(id);
    if (it == layer_of_.end()) throw Error(ErrorCode::unknown_edge, "edge " + std::to_string(id) + " is not live");
    return it->second;
  }

  bool in_bundle(EdgeId id) const { return layer_of(id) != kResidual; }

  std::vector<EdgeId> layer_edges(int layer) const {
    std::vector<EdgeId> out;
    for (const auto& [id, l] : layer_of_) {
      if (l == layer) out.push_back(id);
    }
    return out;
  }
  std::vector<EdgeId> residual_edges() const { return layer_edges(kResidual); }

  std::size_t bundle_size() const {
    std::size_t count = 0;
    for (const auto& [id, l] : layer_of_) count += l != kResidual ? 1 : 0;
    return count;
  }
  std::size_t residual_size() const { return layer_of_.size() - bundle_size(); }

  /// Sub-hypergraph of the host induced by `ids`, keeping ids and weights.
  Hypergraph induced(const std::vector<EdgeId>& ids) const {
    Hypergraph out(host_.num_vertices());
    for (EdgeId id : ids) {
      const auto& e = host_.edge(id);
      out.insert_with_id(id, e.vertices, e.weight);
    }
    return out;
  }

  /// The hypergraph R_i currently underlying layer i (1-based).
  Hypergraph layer_host(int layer) const {
    std::vector<EdgeId> ids;
    for (const auto& [id, l] : layer_of_) {
      if (l == kResidual || l >= layer) ids.push_back(id);
    }
    return induced(ids);
  }

  const WeightedSpanner& layer_spanner(int layer) const { return *layers_.at(layer - 1).spanner; }

  std::uint64_t work() const {
    std::uint64_t total = 0;
    for (const auto& layer : layers_) total += layer.spanner->work();
    return total;
  }

 private:
  struct Layer {
    std::unique_ptr<WeightedSpanner> spanner;
    std::map<EdgeId, std::vector<std::size_t>> star_edges;  // live star edges per origin
  };

  /// Deepest layer whose graph contains a hyperedge sitting at `layer`.
  int depth_of(int layer) const { return layer == kResidual ? materialized_layers() : layer; }

  void log_member(const char* set, int level, MembershipEvent::Kind kind, EdgeId item) {
    if (log_ == nullptr) return;
    MembershipEvent ev;
    ev.update = ++log_clock_;
    ev.instance = instance_;
    ev.set = set;
    ev.level = level;
    ev.kind = kind;
    ev.item = item;
    log_->record(ev);
  }

  Hypergraph host_;
  int t_;
  int k_;
  EventLog* log_ = nullptr;
  std::uint32_t instance_ = 0;
  std::uint64_t log_clock_ = 0;
  std::map<EdgeId, int> layer_of_;
  std::vector<Layer> layers_;
};

}  // namespace hypersparse
