#pragma once

// Bundle peeling plus uniform 1/4 sampling, kept up to date under deletions.
//
//   SlightSparsifier            one bundle, residual kept with probability 1/4 at weight 4w
//   SparsifierChain             repeated peeling H_0 -> H_1 -> ... -> H_{i_last}
//   RankPartitionedSparsifier   one chain per size class (2^{c-1}, 2^c]
//
// Sampling coins are drawn once per hyperedge when a level is created and are
// never redrawn, so deletions chosen in advance cannot bias them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hypersparse/bundle.hpp"
#include "hypersparse/core.hpp"
#include "hypersparse/error.hpp"
#include "hypersparse/event_log.hpp"
#include "hypersparse/rng.hpp"
#include "json.hpp"

namespace hypersparse {

inline int ceil_log2(double x) {
  if (!(x > 0.0)) throw Error(ErrorCode::invalid_parameter, "log of a non-positive value");
  return static_cast<int>(std::ceil(std::log2(x) - 1e-12));
}

struct SparsifyParams {
  double epsilon = 0.5;
  double gamma = 1.0;
  double c_gamma = 1.0;
  double c = 1.0;
  /// Reduction parameter; 0 means "use the chain's own edge count".
  double rho = 0.0;
  /// Size threshold; 0 means "use n".
  double m_star = 0.0;
  /// 1 is theory mode. Larger values divide the bundle size t.
  double practical_scale = 1.0;
  /// Overrides the computed stretch alpha when positive.
  double alpha_override = 0.0;
  /// Spanner hierarchy depth; 0 picks ceil(log2 n).
  int spanner_depth = 0;

  bool theory_mode() const { return practical_scale == 1.0; }

  void validate() const {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw Error(ErrorCode::invalid_parameter, "epsilon must lie in (0, 1]");
    if (!(gamma >= 1.0)) throw Error(ErrorCode::invalid_parameter, "gamma must be at least 1");
    if (!(c_gamma > 0.0) || !(c > 0.0)) throw Error(ErrorCode::invalid_parameter, "c_gamma and c must be positive");
    if (rho != 0.0 && !(rho >= 1.0)) throw Error(ErrorCode::invalid_parameter, "rho must be at least 1");
    if (!(practical_scale >= 1.0)) throw Error(ErrorCode::invalid_parameter, "practical scale must be at least 1");
    if (spanner_depth != 0 && spanner_depth < 2) throw Error(ErrorCode::invalid_parameter, "spanner depth must be >= 2");
  }

  int depth_for(std::size_t n) const { return spanner_depth != 0 ? spanner_depth : default_spanner_depth(n); }
  double alpha_for(std::size_t n) const { return alpha_override > 0.0 ? alpha_override : bundle_stretch(depth_for(n)); }
};

/// ceil(16 alpha c_gamma r^3 eps^-2 log2 n).
inline std::uint64_t theory_bundle_size(double alpha, double c_gamma, double r, double eps, std::size_t n) {
  const double logn = n > 1 ? std::log2(static_cast<double>(n)) : 1.0;
  return static_cast<std::uint64_t>(std::ceil(16.0 * alpha * c_gamma * r * r * r * logn / (eps * eps) - 1e-9));
}

/// max(1, t_theory / scale), rounded down.
inline int effective_bundle_size(std::uint64_t t_theory, double scale) {
  const double t = std::floor(static_cast<double>(t_theory) / scale);
  return static_cast<int>(std::clamp(t, 1.0, 1e9));
}

/// Whether (1 + eps/(2k))^k <= 1 + eps and (1 - eps/(2k))^k >= 1 - eps.
inline bool epsilon_budget_holds(double eps, int k) {
  if (k <= 0) return true;
  const double step = eps / (2.0 * k);
  return std::pow(1.0 + step, k) <= 1.0 + eps && std::pow(1.0 - step, k) >= 1.0 - eps;
}

/// Output changes caused by one update: ids whose presence or weight in the sparsifier moved.
struct DeltaReport {
  std::vector<EdgeId> removed;
  std::vector<EdgeId> added;
  std::vector<EdgeId> reweighted;
  std::size_t recourse() const { return removed.size() + added.size() + reweighted.size(); }
};

/// Folds before/after weights (nullopt = absent) of touched ids into a delta.
inline void classify_change(DeltaReport& d, EdgeId id, std::optional<double> before, std::optional<double> after) {
  if (before && !after) d.removed.push_back(id);
  if (!before && after) d.added.push_back(id);
  if (before && after && *before != *after) d.reweighted.push_back(id);
}

inline void check_size_class(const Hypergraph& h, std::size_t r) {
  for (const auto& [id, e] : h.edges()) {
    const std::size_t s = e.vertices.size();
    if (2 * s <= r || s > r) {
      throw Error(ErrorCode::size_class_violation,
                  "hyperedge " + std::to_string(id) + " of size " + std::to_string(s) + " outside (r/2, r] for r = " +
                      std::to_string(r));
    }
  }
}

/// One round of bundle peeling and sampling.
class SlightSparsifier {
 public:
  struct EraseResult {
    BundleReport bundle;
    /// Ids that left the sampled residual (deleted or promoted into the bundle).
    std::vector<EdgeId> left_sample;
  };

  SlightSparsifier(const Hypergraph& h, std::size_t r, int t, int k, std::uint64_t seed, EventLog* log = nullptr,
                   const std::string& name = "slight")
      : r_(r) {
    check_size_class(h, r);
    Rng coins(derive_seed(seed, {0}));
    for (const auto& [id, e] : h.edges()) coin_[id] = coins.quarter();
    bundle_ = std::make_unique<Bundle>(h, t, k, derive_seed(seed, {1}), log, name);
    for (const auto& [id, heads] : coin_) {
      if (heads && !bundle_->in_bundle(id)) sampled_.insert(id);
    }
  }

  EraseResult erase(EdgeId id) {
    EraseResult out;
    if (sampled_.erase(id) != 0) out.left_sample.push_back(id);
    out.bundle = bundle_->erase(id);
    for (const auto& p : out.bundle.promotions) {
      if (sampled_.erase(p.id) != 0) out.left_sample.push_back(p.id);
    }
    coin_.erase(id);
    return out;
  }

  const Bundle& bundle() const { return *bundle_; }
  bool contains(EdgeId id) const { return bundle_->contains(id); }
  bool coin(EdgeId id) const { return coin_.at(id); }
  bool sampled(EdgeId id) const { return sampled_.count(id) != 0; }
  const std::set<EdgeId>& sampled_edges() const { return sampled_; }
  std::size_t rank() const { return r_; }

  /// B at its weights plus the sampled residual at 4x weight.
  Hypergraph output() const {
    const auto& host = bundle_->host();
    Hypergraph out(host.num_vertices());
    for (const auto& [id, e] : host.edges()) {
      if (bundle_->in_bundle(id)) {
        out.insert_with_id(id, e.vertices, e.weight);
      } else if (sampled(id)) {
        out.insert_with_id(id, e.vertices, 4.0 * e.weight);
      }
    }
    return out;
  }

  /// The sampled residual at 4x weight: the next level's input.
  Hypergraph sampled_residual() const {
    const auto& host = bundle_->host();
    Hypergraph out(host.num_vertices());
    for (EdgeId id : sampled_) {
      const auto& e = host.edge(id);
      out.insert_with_id(id, e.vertices, 4.0 * e.weight);
    }
    return out;
  }

 private:
  std::size_t r_;
  std::map<EdgeId, bool> coin_;
  std::set<EdgeId> sampled_;
  std::unique_ptr<Bundle> bundle_;
};

class SparsifierChain {
 public:
  struct LevelInfo {
    int t = 0;
    std::uint64_t t_theory = 0;
    double epsilon = 0.0;
  };

  SparsifierChain(const Hypergraph& h, std::size_t r, const SparsifyParams& p, std::uint64_t seed,
                  EventLog* log = nullptr, const std::string& name = "chain")
      : base_(h), r_(r), initial_edges_(h.num_edges()), params_(p) {
    p.validate();
    check_size_class(h, r);
    const std::size_t n = h.num_vertices();
    const double m = static_cast<double>(h.num_edges());
    m_star_ = p.m_star > 0.0 ? p.m_star : static_cast<double>(n);
    if (m_star_ < static_cast<double>(n)) throw Error(ErrorCode::invalid_parameter, "m_star must be at least n");
    rho_ = p.rho > 0.0 ? p.rho : std::max(1.0, m);
    if (m >= 1.0 && rho_ > m) throw Error(ErrorCode::invalid_parameter, "rho must not exceed m");
    k_ = ceil_log2(rho_);
    epsilon_level_ = k_ > 0 ? p.epsilon / (2.0 * k_) : p.epsilon;

    const int depth = p.depth_for(n);
    const double alpha = p.alpha_for(n);
    Hypergraph current = h;
    int i = 0;
    while (i < k_ && static_cast<double>(current.num_edges()) > p.c * m_star_) {
      LevelInfo info;
      info.epsilon = epsilon_level_;
      info.t_theory = theory_bundle_size(alpha, p.c_gamma, static_cast<double>(r), epsilon_level_, n);
      info.t = effective_bundle_size(info.t_theory, p.practical_scale);
      levels_.push_back(std::make_unique<SlightSparsifier>(current, r, info.t, depth,
                                                           derive_seed(seed, {static_cast<std::uint64_t>(i + 1)}), log,
                                                           name + "/L" + std::to_string(i + 1)));
      info_.push_back(info);
      current = levels_.back()->sampled_residual();
      ++i;
    }
    for (const auto& [id, e] : base_.edges()) refresh(id);
  }

  SparsifierChain(SparsifierChain&&) noexcept = default;
  SparsifierChain& operator=(SparsifierChain&&) noexcept = default;

  DeltaReport erase(EdgeId id) {
    if (!base_.contains(id)) throw Error(ErrorCode::unknown_edge, "edge " + std::to_string(id) + " is not live");
    std::set<EdgeId> touched{id};
    std::vector<EdgeId> doomed{id};
    for (auto& level : levels_) {
      std::vector<EdgeId> next;
      for (EdgeId x : doomed) {
        if (!level->contains(x)) continue;
        auto res = level->erase(x);
        for (const auto& pr : res.bundle.promotions) touched.insert(pr.id);
        next.insert(next.end(), res.left_sample.begin(), res.left_sample.end());
      }
      doomed = std::move(next);
    }
    base_.erase(id);

    DeltaReport delta;
    for (EdgeId x : touched) {
      std::optional<double> before;
      if (auto it = output_.find(x); it != output_.end()) before = it->second;
      refresh(x);
      std::optional<double> after;
      if (auto it = output_.find(x); it != output_.end()) after = it->second;
      classify_change(delta, x, before, after);
    }
    return delta;
  }

  std::size_t rank() const { return r_; }
  int k() const { return k_; }
  int i_last() const { return static_cast<int>(levels_.size()); }
  /// Edge count of the input at construction, the m of the iteration bound.
  std::size_t initial_edges() const { return initial_edges_; }
  double rho() const { return rho_; }
  double m_star() const { return m_star_; }
  double level_epsilon() const { return epsilon_level_; }
  const SparsifyParams& params() const { return params_; }
  const Hypergraph& input() const { return base_; }
  const SlightSparsifier& level(int j) const { return *levels_.at(j - 1); }
  const LevelInfo& level_info(int j) const { return info_.at(j - 1); }
  const std::map<EdgeId, double>& output_weights() const { return output_; }

  /// max(0, min(ceil(log rho), ceil(log(m / m_star)))) for the edge count m at construction.
  static int iteration_bound(double rho, double m, double m_star) {
    if (m <= 0.0) return 0;
    return std::max(0, std::min(ceil_log2(rho), ceil_log2(m / m_star)));
  }

  Hypergraph output() const {
    Hypergraph out(base_.num_vertices());
    for (const auto& [id, w] : output_) out.insert_with_id(id, base_.edge(id).vertices, w);
    return out;
  }

  /// Rebuilds (union of B_j at level weights) + H_{i_last} from the level states.
  std::map<EdgeId, double> reconstruct_output() const {
    std::map<EdgeId, double> out;
    for (const auto& level : levels_) {
      for (const auto& [id, e] : level->bundle().host().edges()) {
        if (level->bundle().in_bundle(id)) out[id] = e.weight;
      }
    }
    if (levels_.empty()) {
      for (const auto& [id, e] : base_.edges()) out[id] = e.weight;
    } else {
      const auto& last = *levels_.back();
      for (EdgeId id : last.sampled_edges()) out[id] = 4.0 * last.bundle().host().edge(id).weight;
    }
    return out;
  }

  std::uint64_t work() const {
    std::uint64_t total = 0;
    for (const auto& level : levels_) total += level->bundle().work();
    return total;
  }

  nlohmann::json to_json() const {
    nlohmann::json levels = nlohmann::json::array();
    for (std::size_t j = 0; j < levels_.size(); ++j) {
      const auto& b = levels_[j]->bundle();
      levels.push_back({{"t", info_[j].t},
                        {"t_theory", info_[j].t_theory},
                        {"bundle_size", b.bundle_size()},
                        {"residual_size", b.residual_size()},
                        {"sampled_count", levels_[j]->sampled_edges().size()},
                        {"epsilon", info_[j].epsilon}});
    }
    return {{"rank", r_},      {"m", base_.num_edges()},        {"k", k_},
            {"i_last", i_last()}, {"practical_scale", params_.practical_scale}, {"levels", levels},
            {"output_size", output_.size()}};
  }

 private:
  /// Output weight of `id`: first level whose bundle holds it, else H_{i_last}.
  void refresh(EdgeId id) {
    output_.erase(id);
    if (!base_.contains(id)) return;
    double w = base_.edge(id).weight;
    for (const auto& level : levels_) {
      if (!level->contains(id)) return;
      if (level->bundle().in_bundle(id)) {
        output_[id] = w;
        return;
      }
      w *= 4.0;
    }
    if (levels_.empty() || levels_.back()->sampled(id)) output_[id] = w;
  }

  Hypergraph base_;
  std::size_t r_;
  std::size_t initial_edges_;
  SparsifyParams params_;
  double m_star_ = 0.0;
  double rho_ = 1.0;
  int k_ = 0;
  double epsilon_level_ = 0.0;
  std::vector<std::unique_ptr<SlightSparsifier>> levels_;
  std::vector<LevelInfo> info_;
  std::map<EdgeId, double> output_;
};

/// Size class c with 2^{c-1} < s <= 2^c.
inline int size_class(std::size_t s) {
  if (s < 2) throw Error(ErrorCode::edge_too_small, "a hyperedge needs at least 2 vertices");
  int c = 0;
  while ((std::size_t{1} << c) < s) ++c;
  return c;
}

class RankPartitionedSparsifier {
 public:
  RankPartitionedSparsifier(const Hypergraph& h, const SparsifyParams& p, std::uint64_t seed, EventLog* log = nullptr,
                            const std::string& name = "rank")
      : n_(h.num_vertices()) {
    std::map<int, Hypergraph> parts;
    for (const auto& [id, e] : h.edges()) {
      const int c = size_class(e.vertices.size());
      auto it = parts.try_emplace(c, h.num_vertices()).first;
      it->second.insert_with_id(id, e.vertices, e.weight);
      class_of_[id] = c;
    }
    for (auto& [c, part] : parts) {
      SparsifyParams local = p;
      if (local.rho > static_cast<double>(part.num_edges())) local.rho = 0.0;
      chains_.emplace(c, SparsifierChain(part, std::size_t{1} << c, local,
                                         derive_seed(seed, {static_cast<std::uint64_t>(c)}), log,
                                         name + "/r" + std::to_string(1 << c)));
    }
  }

  DeltaReport erase(EdgeId id) {
    auto it = class_of_.find(id);
    if (it == class_of_.end()) throw Error(ErrorCode::unknown_edge, "edge " + std::to_string(id) + " is not live");
    const int c = it->second;
    class_of_.erase(it);
    return chains_.at(c).erase(id);
  }

  bool contains(EdgeId id) const { return class_of_.count(id) != 0; }
  std::size_t num_edges() const { return class_of_.size(); }
  const std::map<int, SparsifierChain>& chains() const { return chains_; }

  std::size_t output_size() const {
    std::size_t total = 0;
    for (const auto& [c, chain] : chains_) total += chain.output_weights().size();
    return total;
  }

  /// Current output weight of `id`, if it is in the sparsifier.
  std::optional<double> output_weight(EdgeId id) const {
    auto it = class_of_.find(id);
    if (it == class_of_.end()) return std::nullopt;
    const auto& w = chains_.at(it->second).output_weights();
    auto found = w.find(id);
    if (found == w.end()) return std::nullopt;
    return found->second;
  }

  /// Union of the per-class outputs.
  Hypergraph output() const {
    Hypergraph out(n_);
    for (const auto& [c, chain] : chains_) {
      for (const auto& [id, w] : chain.output_weights()) out.insert_with_id(id, chain.input().edge(id).vertices, w);
    }
    return out;
  }

  std::uint64_t work() const {
    std::uint64_t total = 0;
    for (const auto& [c, chain] : chains_) total += chain.work();
    return total;
  }

  nlohmann::json to_json() const {
    nlohmann::json classes = nlohmann::json::array();
    for (const auto& [c, chain] : chains_) classes.push_back(chain.to_json());
    return classes;
  }

 private:
  std::size_t n_;
  std::map<EdgeId, int> class_of_;
  std::map<int, SparsifierChain> chains_;
};

}  // namespace hypersparse
