#pragma once

// Append-only instrumentation shared by the spanner and bundle layers.
// Besides (optionally) keeping records for NDJSON export, the log audits two
// properties online:
//   * monotonicity: an item may leave a maintained set only after the same
//     item was removed from that set's host structure;
//   * cluster history: per (vertex, level) the distance to the center set
//     never decreases, and a (center, parent) configuration is never revisited
//     while that distance stays the same.

#include <cstdint>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "json.hpp"

namespace hypersparse {

inline constexpr std::int64_t kNone = -1;

struct ClusterEvent {
  std::uint64_t update = 0;
  std::uint32_t instance = 0;
  int level = 0;
  std::uint32_t vertex = 0;
  std::int64_t old_center = kNone;
  std::int64_t new_center = kNone;
  std::int64_t old_parent = kNone;
  std::int64_t new_parent = kNone;
  std::int64_t old_distance = kNone;
  std::int64_t new_distance = kNone;
  std::vector<std::uint64_t> f_additions;
};

struct MembershipEvent {
  enum class Kind { host_remove, enter, leave };
  std::uint64_t update = 0;
  std::uint32_t instance = 0;
  std::string set;  // "F", "T" or "B"
  int level = 0;
  Kind kind = Kind::enter;
  std::uint64_t item = 0;
};

class EventLog {
 public:
  explicit EventLog(bool keep_records = false) : keep_records_(keep_records) {}

  std::uint32_t register_instance(std::string name) {
    instance_names_.push_back(std::move(name));
    return static_cast<std::uint32_t>(instance_names_.size() - 1);
  }

  void record(const MembershipEvent& ev) {
    const auto key = std::make_tuple(ev.instance, ev.set, ev.level);
    switch (ev.kind) {
      case MembershipEvent::Kind::host_remove:
        host_removed_[key].insert(ev.item);
        break;
      case MembershipEvent::Kind::enter:
        break;
      case MembershipEvent::Kind::leave: {
        auto it = host_removed_.find(key);
        if (it == host_removed_.end() || it->second.count(ev.item) == 0) {
          ++monotonicity_violations_;
          violation_notes_.push_back(instance_names_.at(ev.instance) + " " + ev.set + "[" +
                                     std::to_string(ev.level) + "] lost live item " + std::to_string(ev.item));
        }
        break;
      }
    }
    ++membership_events_;
    if (keep_records_) memberships_.push_back(ev);
  }

  void record(const ClusterEvent& ev) {
    auto& hist = history_[std::make_tuple(ev.instance, ev.level, ev.vertex)];
    if (ev.new_distance != kNone) {
      if (hist.distance != kNone && ev.new_distance < hist.distance) {
        ++cluster_violations_;
        violation_notes_.push_back("distance decreased at vertex " + std::to_string(ev.vertex));
      }
      if (ev.new_distance != hist.distance) {
        hist.distance = ev.new_distance;
        hist.seen.clear();
      }
      const auto config = std::make_pair(ev.new_center, ev.new_parent);
      if (!hist.seen.insert(config).second) {
        ++cluster_violations_;
        violation_notes_.push_back("configuration revisited at vertex " + std::to_string(ev.vertex));
      }
    } else {
      hist.distance = std::numeric_limits<std::int64_t>::max();
      hist.seen.clear();
    }
    ++cluster_events_;
    if (keep_records_) clusters_.push_back(ev);
  }

  std::size_t monotonicity_violations() const { return monotonicity_violations_; }
  std::size_t cluster_violations() const { return cluster_violations_; }
  std::size_t membership_event_count() const { return membership_events_; }
  std::size_t cluster_event_count() const { return cluster_events_; }
  const std::vector<std::string>& violation_notes() const { return violation_notes_; }
  const std::vector<ClusterEvent>& cluster_events() const { return clusters_; }
  const std::vector<MembershipEvent>& membership_events() const { return memberships_; }
  const std::string& instance_name(std::uint32_t id) const { return instance_names_.at(id); }

  /// One JSON object per line; cluster events first, then membership events.
  void write_ndjson(std::ostream& out) const {
    for (const auto& ev : clusters_) {
      nlohmann::json j{{"type", "cluster"},
                       {"update", ev.update},
                       {"instance", instance_names_.at(ev.instance)},
                       {"level", ev.level},
                       {"vertex", ev.vertex},
                       {"old_center", ev.old_center},
                       {"new_center", ev.new_center},
                       {"old_parent", ev.old_parent},
                       {"new_parent", ev.new_parent},
                       {"old_distance", ev.old_distance},
                       {"new_distance", ev.new_distance},
                       {"f_additions", ev.f_additions}};
      out << j.dump() << '\n';
    }
    for (const auto& ev : memberships_) {
      static const char* kinds[] = {"host_remove", "enter", "leave"};
      nlohmann::json j{{"type", "membership"},
                       {"update", ev.update},
                       {"instance", instance_names_.at(ev.instance)},
                       {"set", ev.set},
                       {"level", ev.level},
                       {"kind", kinds[static_cast<int>(ev.kind)]},
                       {"item", ev.item}};
      out << j.dump() << '\n';
    }
  }

 private:
  struct VertexHistory {
    std::int64_t distance = kNone;
    std::set<std::pair<std::int64_t, std::int64_t>> seen;
  };

  bool keep_records_;
  std::vector<std::string> instance_names_;
  std::map<std::tuple<std::uint32_t, std::string, int>, std::set<std::uint64_t>> host_removed_;
  std::map<std::tuple<std::uint32_t, int, std::uint32_t>, VertexHistory> history_;
  std::size_t monotonicity_violations_ = 0;
  std::size_t cluster_violations_ = 0;
  std::size_t membership_events_ = 0;
  std::size_t cluster_events_ = 0;
  std::vector<std::string> violation_notes_;
  std::vector<ClusterEvent> clusters_;
  std::vector<MembershipEvent> memberships_;
};

}  // namespace hypersparse
