#pragma once

// Fully dynamic sparsifier from decremental ones by binary-counter bucketing.
// Insertion number tau goes to bucket j = 1 + ctz(tau), which absorbs the
// edges of buckets 1..j and is rebuilt from scratch; deletions go to the
// bucket that owns the edge. Bucket i therefore holds at most 2^{i-1} edges.

#include <bit>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hypersparse/core.hpp"
#include "hypersparse/error.hpp"
#include "hypersparse/event_log.hpp"
#include "hypersparse/rng.hpp"
#include "hypersparse/sparsifier.hpp"
#include "json.hpp"

namespace hypersparse {

struct BucketConfig {
  std::size_t n = 0;
  std::size_t m_cap = 0;
  std::size_t max_rank = 0;  // 0 = unbounded
  std::uint64_t deletion_cap = 0;
  std::uint64_t seed = 0;
  SparsifyParams params;
};

/// floor(log2 m_cap) + 1, the bit length of m_cap.
inline int bucket_count(std::size_t m_cap) { return m_cap == 0 ? 0 : static_cast<int>(std::bit_width(m_cap)); }

/// 1 + number of trailing zeros of tau (tau >= 1).
inline int bucket_for_insertion(std::uint64_t tau) { return 1 + std::countr_zero(tau); }

class BucketArray {
 public:
  explicit BucketArray(BucketConfig cfg, EventLog* log = nullptr)
      : cfg_(std::move(cfg)), log_(log), graph_(cfg_.n, cfg_.max_rank) {
    cfg_.params.validate();
    if (cfg_.m_cap == 0) throw Error(ErrorCode::invalid_parameter, "m_cap must be positive");
    k_ = bucket_count(cfg_.m_cap);
    buckets_.resize(k_);
  }

  struct InsertResult {
    EdgeId id = 0;
    int bucket = 0;
    DeltaReport delta;
  };

  InsertResult insert(std::vector<VertexId> vertices, double weight) {
    if (tau_ >= cfg_.m_cap) {
      throw Error(ErrorCode::capacity_exceeded,
                  "insertion " + std::to_string(tau_ + 1) + " exceeds m_cap = " + std::to_string(cfg_.m_cap));
    }
    InsertResult out;
    out.id = graph_.insert(std::move(vertices), weight);
    ++tau_;
    const int j = bucket_for_insertion(tau_);
    out.bucket = j;

    std::map<EdgeId, double> before;
    Hypergraph merged(cfg_.n, cfg_.max_rank);
    const auto& fresh = graph_.edge(out.id);
    merged.insert_with_id(out.id, fresh.vertices, fresh.weight);
    for (int i = 1; i <= j; ++i) {
      auto& b = buckets_[i - 1];
      for (EdgeId id : b.edges) {
        const auto& e = graph_.edge(id);
        merged.insert_with_id(id, e.vertices, e.weight);
        if (auto w = b.weight(id)) before[id] = *w;
      }
      ++b.resets;
      if (b.sparsifier) retired_work_ += b.sparsifier->work();
      b.sparsifier.reset();
      b.edges.clear();
    }

    auto& target = buckets_[j - 1];
    ++target.builds;
    for (const auto& [id, e] : merged.edges()) {
      target.edges.insert(id);
      owner_[id] = j;
    }
    target.sparsifier = std::make_unique<RankPartitionedSparsifier>(
        merged, cfg_.params, derive_seed(cfg_.seed, {static_cast<std::uint64_t>(j), target.builds}), log_,
        "bucket" + std::to_string(j) + "#" + std::to_string(target.builds));

    for (const auto& [id, e] : merged.edges()) {
      std::optional<double> old;
      if (auto it = before.find(id); it != before.end()) old = it->second;
      classify_change(out.delta, id, old, target.weight(id));
    }
    check_cardinality();
    return out;
  }

  DeltaReport erase(EdgeId id) {
    auto it = owner_.find(id);
    if (it == owner_.end()) throw Error(ErrorCode::unknown_edge, "edge " + std::to_string(id) + " is not live");
    if (deletions_ >= cfg_.deletion_cap) {
      throw Error(ErrorCode::deletion_budget_exceeded,
                  "deletion " + std::to_string(deletions_ + 1) + " exceeds the cap of " + std::to_string(cfg_.deletion_cap));
    }
    ++deletions_;
    auto& b = buckets_[it->second - 1];
    owner_.erase(it);
    b.edges.erase(id);
    graph_.erase(id);
    return b.sparsifier->erase(id);
  }

  /// Union of the bucket sparsifiers.
  Hypergraph current_sparsifier() const {
    Hypergraph out(cfg_.n, cfg_.max_rank);
    for (const auto& b : buckets_) {
      if (!b.sparsifier) continue;
      for (const auto& [c, chain] : b.sparsifier->chains()) {
        for (const auto& [id, w] : chain.output_weights()) out.insert_with_id(id, graph_.edge(id).vertices, w);
      }
    }
    return out;
  }

  std::size_t sparsifier_size() const {
    std::size_t total = 0;
    for (const auto& b : buckets_) total += b.sparsifier ? b.sparsifier->output_size() : 0;
    return total;
  }

  const Hypergraph& graph() const { return graph_; }
  const BucketConfig& config() const { return cfg_; }
  int num_buckets() const { return k_; }
  std::uint64_t insertions() const { return tau_; }
  std::uint64_t deletions() const { return deletions_; }
  std::size_t bucket_size(int i) const { return buckets_.at(i - 1).edges.size(); }
  const std::set<EdgeId>& bucket_edges(int i) const { return buckets_.at(i - 1).edges; }
  /// Times bucket i was reinitialized, as the merge target or as a cleared source.
  std::uint64_t reset_count(int i) const { return buckets_.at(i - 1).resets; }
  /// Times bucket i was built as the merge target.
  std::uint64_t build_count(int i) const { return buckets_.at(i - 1).builds; }
  const RankPartitionedSparsifier* bucket_sparsifier(int i) const { return buckets_.at(i - 1).sparsifier.get(); }
  std::optional<int> owner(EdgeId id) const {
    auto it = owner_.find(id);
    if (it == owner_.end()) return std::nullopt;
    return it->second;
  }
  std::size_t cardinality_violations() const { return cardinality_violations_; }

  /// Elementary spanner operations, including those of torn-down buckets.
  std::uint64_t work() const {
    std::uint64_t total = retired_work_;
    for (const auto& b : buckets_) total += b.sparsifier ? b.sparsifier->work() : 0;
    return total;
  }

  nlohmann::json to_json() const {
    nlohmann::json buckets = nlohmann::json::array();
    for (int i = 1; i <= k_; ++i) {
      const auto& b = buckets_[i - 1];
      buckets.push_back({{"index", i},
                         {"size", b.edges.size()},
                         {"resets", b.resets},
                         {"builds", b.builds},
                         {"classes", b.sparsifier ? b.sparsifier->to_json() : nlohmann::json::array()}});
    }
    return buckets;
  }

 private:
  struct Bucket {
    std::set<EdgeId> edges;
    std::unique_ptr<RankPartitionedSparsifier> sparsifier;
    std::uint64_t resets = 0;
    std::uint64_t builds = 0;

    std::optional<double> weight(EdgeId id) const {
      return sparsifier ? sparsifier->output_weight(id) : std::nullopt;
    }
  };

  void check_cardinality() {
    for (int i = 1; i <= k_; ++i) {
      if (buckets_[i - 1].edges.size() > (std::size_t{1} << (i - 1))) ++cardinality_violations_;
    }
  }

  BucketConfig cfg_;
  EventLog* log_ = nullptr;
  Hypergraph graph_;
  int k_ = 0;
  std::vector<Bucket> buckets_;
  std::map<EdgeId, int> owner_;
  std::uint64_t tau_ = 0;
  std::uint64_t deletions_ = 0;
  std::uint64_t retired_work_ = 0;
  std::size_t cardinality_violations_ = 0;
};

}  // namespace hypersparse
