#pragma once

// Command implementations behind the `hypersparse` binary. Each command takes
// a parsed configuration plus an event list and returns a JSON report; the
// binary only handles argument parsing, file IO and exit codes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hypersparse/bundle.hpp"
#include "hypersparse/core.hpp"
#include "hypersparse/error.hpp"
#include "hypersparse/event_log.hpp"
#include "hypersparse/fulldyn.hpp"
#include "hypersparse/oracle.hpp"
#include "hypersparse/rng.hpp"
#include "hypersparse/sparsifier.hpp"
#include "hypersparse/stream.hpp"
#include "json.hpp"

namespace hypersparse::cli {

inline constexpr const char* kRunSchema = "hypersparse.run/1";
inline constexpr const char* kVerifySchema = "hypersparse.verify/1";
inline constexpr const char* kBenchSchema = "hypersparse.bench/1";
inline constexpr const char* kOracleSchema = "hypersparse.oracle/1";

/// Thrown for configuration problems; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::uint64_t seed = 1;
  std::size_t n = 16;
  std::size_t m_cap = 1024;
  std::size_t r = 0;  // max rank, 0 = unbounded
  double epsilon = 0.5;
  double gamma = 2.0;
  double c_gamma = 1.0;
  double c = 1.0;
  double rho = 0.0;
  double m_star = 0.0;
  double practical_scale = 1e6;
  int spanner_depth = 0;
  /// 0 means floor(n^gamma).
  std::uint64_t deletion_cap = 0;
  std::size_t probes = 100;
  bool timing = false;
  /// verify only: corrupt one sparsifier weight after this many events (0 = off).
  std::size_t inject_fault_at = 0;

  std::uint64_t effective_deletion_cap() const {
    const double limit = std::floor(std::pow(static_cast<double>(n), gamma));
    return deletion_cap == 0 ? static_cast<std::uint64_t>(limit) : deletion_cap;
  }

  SparsifyParams params() const {
    SparsifyParams p;
    p.epsilon = epsilon;
    p.gamma = gamma;
    p.c_gamma = c_gamma;
    p.c = c;
    p.rho = rho;
    p.m_star = m_star;
    p.practical_scale = practical_scale;
    p.spanner_depth = spanner_depth;
    return p;
  }

  void validate() const {
    if (n == 0) throw UsageError("n must be positive");
    if (m_cap == 0) throw UsageError("m_cap must be positive");
    if (r == 1) throw UsageError("rank must be at least 2");
    if (m_star != 0.0 && m_star < static_cast<double>(n)) throw UsageError("m_star must be at least n");
    const double limit = std::floor(std::pow(static_cast<double>(n), gamma));
    if (static_cast<double>(effective_deletion_cap()) > limit) {
      throw UsageError("deletion cap exceeds n^gamma = " + std::to_string(static_cast<std::uint64_t>(limit)));
    }
    try {
      params().validate();
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }

  BucketConfig bucket_config() const {
    BucketConfig b;
    b.n = n;
    b.m_cap = m_cap;
    b.max_rank = r;
    b.deletion_cap = effective_deletion_cap();
    b.seed = seed;
    b.params = params();
    return b;
  }

  nlohmann::json to_json() const {
    return {{"seed", seed},
            {"n", n},
            {"m_cap", m_cap},
            {"r", r},
            {"epsilon", epsilon},
            {"gamma", gamma},
            {"c_gamma", c_gamma},
            {"c", c},
            {"rho", rho},
            {"m_star", m_star},
            {"mode", practical_scale == 1.0 ? "theory" : "practical"},
            {"practical_scale", practical_scale},
            {"spanner_depth", spanner_depth},
            {"deletion_cap", effective_deletion_cap()}};
  }
};

/// Applies one stream event; returns (recourse, assigned id for inserts).
inline std::pair<std::size_t, std::optional<EdgeId>> apply_event(BucketArray& engine, const StreamEvent& ev) {
  if (ev.kind == StreamEvent::Kind::insert) {
    auto res = engine.insert(ev.vertices, ev.weight);
    return {res.delta.recourse(), res.id};
  }
  return {engine.erase(ev.id).recourse(), std::nullopt};
}

inline std::string describe(const Error& e, const StreamEvent& ev) {
  return "line " + std::to_string(ev.line) + ": " + to_string(e.code()) + ": " + e.what();
}

inline nlohmann::json cmd_run(const RunConfig& cfg, const std::vector<StreamEvent>& events) {
  cfg.validate();
  BucketArray engine(cfg.bucket_config());
  std::vector<std::size_t> recourse;
  std::vector<EdgeId> ids;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& ev : events) {
    try {
      auto [changed, id] = apply_event(engine, ev);
      recourse.push_back(changed);
      if (id) ids.push_back(*id);
    } catch (const Error& e) {
      throw Error(e.code(), describe(e, ev));
    }
  }
  const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  std::size_t total_recourse = 0, max_recourse = 0;
  for (auto x : recourse) {
    total_recourse += x;
    max_recourse = std::max(max_recourse, x);
  }
  const double updates = static_cast<double>(events.size());
  nlohmann::json buckets = nlohmann::json::array();
  for (int i = 1; i <= engine.num_buckets(); ++i) {
    buckets.push_back({{"index", i},
                       {"size", engine.bucket_size(i)},
                       {"rebuilds", engine.reset_count(i)},
                       {"builds", engine.build_count(i)}});
  }
  nlohmann::json report{
      {"schema", kRunSchema},
      {"config", cfg.to_json()},
      {"updates", events.size()},
      {"insertions", engine.insertions()},
      {"deletions", engine.deletions()},
      {"final_edges", engine.graph().num_edges()},
      {"sparsifier_size", engine.sparsifier_size()},
      {"assigned_ids", ids},
      {"recourse",
       {{"total", total_recourse},
        {"max", max_recourse},
        {"amortized", updates > 0 ? total_recourse / updates : 0.0},
        {"per_update", recourse}}},
      {"work", {{"total", engine.work()}, {"amortized", updates > 0 ? engine.work() / updates : 0.0}}},
      {"buckets", buckets},
      {"chains", engine.to_json()},
  };
  if (cfg.practical_scale != 1.0) {
    report["caveat"] = "practical mode: bundle sizes divided by practical_scale; c_gamma is a placeholder constant";
  }
  if (cfg.timing) {
    report["wall_clock_ms"] = {{"total", elapsed}, {"amortized", updates > 0 ? elapsed / updates : 0.0}};
  }
  return report;
}

/// Gaussian probe vectors, reproducible from (seed, step).
inline std::vector<PotentialVector> gaussian_probes(std::size_t n, std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<PotentialVector> probes(count, PotentialVector(n));
  for (auto& x : probes) {
    for (auto& v : x) v = rng.gaussian();
  }
  return probes;
}

/// Visits every live bundle of an engine together with the rank of its class.
inline void for_each_bundle(const BucketArray& engine, const std::function<void(const Bundle&, std::size_t)>& fn) {
  for (int i = 1; i <= engine.num_buckets(); ++i) {
    const auto* sp = engine.bucket_sparsifier(i);
    if (sp == nullptr) continue;
    for (const auto& [c, chain] : sp->chains()) {
      for (int j = 1; j <= chain.i_last(); ++j) fn(chain.level(j).bundle(), chain.rank());
    }
  }
}

/// Structural invariants of the engine apart from the spectral check.
struct InvariantReport {
  std::size_t cluster_mismatches = 0;
  std::size_t partition_errors = 0;
  std::size_t telescoping_errors = 0;
  std::size_t cardinality_errors = 0;
  std::size_t iteration_bound_errors = 0;
  std::vector<std::string> notes;

  bool ok() const {
    return cluster_mismatches + partition_errors + telescoping_errors + cardinality_errors + iteration_bound_errors == 0;
  }
};

inline InvariantReport check_invariants(const BucketArray& engine) {
  InvariantReport rep;
  for_each_bundle(engine, [&](const Bundle& b, std::size_t) {
    std::size_t counted = b.residual_size();
    for (int l = 1; l <= b.materialized_layers(); ++l) {
      counted += b.layer_edges(l).size();
      const auto& ws = b.layer_spanner(l);
      for (std::size_t c = 0; c < ws.num_classes(); ++c) {
        const auto bad = oracle::validate_clusters(ws.class_spanner(c));
        rep.cluster_mismatches += bad.size();
        if (!bad.empty()) rep.notes.push_back("cluster mismatch at level " + std::to_string(bad.front().level));
      }
    }
    if (counted != b.host().num_edges()) {
      ++rep.partition_errors;
      rep.notes.push_back("bundle layers and residual do not partition the host");
    }
  });
  for (int i = 1; i <= engine.num_buckets(); ++i) {
    if (engine.bucket_size(i) > (std::size_t{1} << (i - 1))) ++rep.cardinality_errors;
    const auto* sp = engine.bucket_sparsifier(i);
    if (sp == nullptr) continue;
    for (const auto& [c, chain] : sp->chains()) {
      if (chain.reconstruct_output() != chain.output_weights()) {
        ++rep.telescoping_errors;
        rep.notes.push_back("maintained output differs from the reconstructed chain union");
      }
    }
  }
  return rep;
}

inline nlohmann::json cmd_verify(const RunConfig& cfg, const std::vector<StreamEvent>& events) {
  cfg.validate();
  if (cfg.probes == 0) throw UsageError("verification needs probes >= 1");
  if (cfg.n > oracle::kCapacity) {
    throw UsageError("n = " + std::to_string(cfg.n) + " exceeds the oracle capacity of " +
                     std::to_string(oracle::kCapacity) + "; use a smaller instance");
  }
  EventLog log;
  BucketArray engine(cfg.bucket_config(), &log);
  nlohmann::json report{{"schema", kVerifySchema}, {"config", cfg.to_json()}, {"events", events.size()}};
  double worst_ratio = 0.0;

  auto fail = [&](std::size_t step, const std::string& reason) {
    std::vector<StreamEvent> prefix(events.begin(), events.begin() + static_cast<std::ptrdiff_t>(step));
    std::ostringstream text;
    write_stream(text, prefix);
    report["pass"] = false;
    report["failed_after_event"] = step;
    report["reason"] = reason;
    report["reproduction"] = {{"seed", cfg.seed}, {"prefix", text.str()}};
    return report;
  };

  for (std::size_t step = 1; step <= events.size(); ++step) {
    const auto& ev = events[step - 1];
    try {
      apply_event(engine, ev);
    } catch (const Error& e) {
      return fail(step, describe(e, ev));
    }
    Hypergraph sparse = engine.current_sparsifier();
    if (cfg.inject_fault_at != 0 && step >= cfg.inject_fault_at && sparse.num_edges() > 0) {
      const EdgeId victim = sparse.edges().begin()->first;
      sparse.set_weight(victim, 3.0 * sparse.edge(victim).weight);
    }
    const auto probes = gaussian_probes(cfg.n, cfg.probes, derive_seed(cfg.seed, {0x70726f6265, step}));
    const auto check = is_spectral_sparsifier(engine.graph(), sparse, cfg.epsilon, probes);
    worst_ratio = std::max(worst_ratio, check.worst_ratio);
    if (!check.ok) {
      return fail(step, "spectral check failed on probe " + std::to_string(check.first_failure) +
                            " (worst |Q_H/Q_sparse - 1| = " + std::to_string(check.worst_ratio) + ")");
    }
    const auto inv = check_invariants(engine);
    if (!inv.ok()) return fail(step, inv.notes.empty() ? "invariant violated" : inv.notes.front());
    if (log.monotonicity_violations() != 0) return fail(step, log.violation_notes().front());
    if (log.cluster_violations() != 0) return fail(step, log.violation_notes().front());
  }
  report["pass"] = true;
  report["worst_ratio"] = worst_ratio;
  report["membership_events"] = log.membership_event_count();
  report["cluster_events"] = log.cluster_event_count();
  return report;
}

struct BenchSpec {
  std::vector<std::size_t> n_values{64, 128, 256, 512};
  double edges_per_vertex = 4.0;
  std::size_t r = 4;
  double max_weight = 8.0;
  double delete_fraction = 0.25;
};

/// Random workload: m insertions of hyperedges with sizes in [2, r] and
/// weights uniform in [1, W], then a random subset of deletions.
inline std::vector<StreamEvent> random_workload(std::size_t n, std::size_t m, std::size_t r, double w_max,
                                                std::size_t deletions, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<StreamEvent> out;
  for (std::size_t i = 0; i < m; ++i) {
    StreamEvent ev;
    ev.kind = StreamEvent::Kind::insert;
    const std::size_t size = 2 + rng.below(std::min(r, n) - 1);
    while (ev.vertices.size() < size) {
      const auto v = static_cast<VertexId>(rng.below(n));
      if (std::find(ev.vertices.begin(), ev.vertices.end(), v) == ev.vertices.end()) ev.vertices.push_back(v);
    }
    ev.weight = 1.0 + (w_max - 1.0) * rng.uniform();
    out.push_back(std::move(ev));
  }
  std::vector<EdgeId> ids(m);
  std::iota(ids.begin(), ids.end(), EdgeId{0});
  rng.shuffle(ids);
  for (std::size_t i = 0; i < std::min(deletions, m); ++i) {
    StreamEvent ev;
    ev.kind = StreamEvent::Kind::erase;
    ev.id = ids[i];
    out.push_back(ev);
  }
  return out;
}

/// Least-squares slope of log y against log x.
inline std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2) return std::nullopt;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = k * sxx - sx * sx;
  if (den == 0.0) return std::nullopt;
  return (k * sxy - sx * sy) / den;
}

inline nlohmann::json cmd_bench(const RunConfig& base, const BenchSpec& spec) {
  if (spec.n_values.empty()) throw UsageError("bench needs at least one n value");
  nlohmann::json rows = nlohmann::json::array();
  std::vector<double> ns, ms, sizes, amortized;
  for (std::size_t n : spec.n_values) {
    RunConfig cfg = base;
    cfg.n = n;
    const auto m = static_cast<std::size_t>(std::llround(spec.edges_per_vertex * static_cast<double>(n)));
    const auto dels = static_cast<std::size_t>(std::floor(spec.delete_fraction * static_cast<double>(m)));
    cfg.m_cap = std::max<std::size_t>(m, 1);
    cfg.r = spec.r;
    cfg.deletion_cap = dels;
    const auto events = random_workload(n, m, spec.r, spec.max_weight, dels, derive_seed(base.seed, {n}));
    cfg.validate();
    BucketArray engine(cfg.bucket_config());
    const auto start = std::chrono::steady_clock::now();
    for (const auto& ev : events) apply_event(engine, ev);
    const auto ms_elapsed =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    const double updates = static_cast<double>(events.size());
    const double amort = static_cast<double>(engine.work()) / updates;
    nlohmann::json row{{"n", n},
                       {"m", m},
                       {"updates", events.size()},
                       {"total_ops", engine.work()},
                       {"amortized_ops", amort},
                       {"sparsifier_size", engine.sparsifier_size()},
                       {"final_edges", engine.graph().num_edges()}};
    if (base.timing) row["wall_clock_ms"] = ms_elapsed;
    rows.push_back(row);
    ns.push_back(static_cast<double>(n));
    ms.push_back(static_cast<double>(m));
    sizes.push_back(std::max<double>(1.0, static_cast<double>(engine.sparsifier_size())));
    amortized.push_back(std::max(1e-9, amort));
  }
  nlohmann::json report{{"schema", kBenchSchema}, {"config", base.to_json()}, {"rows", rows}};
  nlohmann::json warnings = nlohmann::json::array();
  if (auto s = loglog_slope(ns, sizes)) {
    report["size_vs_n_slope"] = *s;
    if (*s < 0.8 || *s > 1.3) warnings.push_back("sparsifier size vs n slope outside [0.8, 1.3]");
  }
  if (auto s = loglog_slope(ms, amortized)) {
    report["amortized_ops_vs_m_slope"] = *s;
    if (*s < -0.2 || *s > 0.4) warnings.push_back("amortized work vs m slope outside [-0.2, 0.4]");
  }
  report["warnings"] = warnings;
  return report;
}

/// CSV rendering of a bench report's rows.
inline std::string bench_csv(const nlohmann::json& report) {
  std::ostringstream out;
  out << "n,m,updates,total_ops,amortized_ops,sparsifier_size\n";
  for (const auto& row : report.at("rows")) {
    out << row.at("n") << ',' << row.at("m") << ',' << row.at("updates") << ',' << row.at("total_ops") << ','
        << row.at("amortized_ops") << ',' << row.at("sparsifier_size") << '\n';
  }
  return out.str();
}

/// Replays the stream into a plain hypergraph and reports brute-force quantities.
inline nlohmann::json cmd_oracle(const RunConfig& cfg, const std::vector<StreamEvent>& events) {
  if (cfg.n > oracle::kCapacity) {
    throw UsageError("n = " + std::to_string(cfg.n) + " exceeds the oracle capacity of " +
                     std::to_string(oracle::kCapacity));
  }
  Hypergraph h(cfg.n, cfg.r);
  for (const auto& ev : events) {
    try {
      if (ev.kind == StreamEvent::Kind::insert) {
        h.insert(ev.vertices, ev.weight);
      } else {
        h.erase(ev.id);
      }
    } catch (const Error& e) {
      throw Error(e.code(), describe(e, ev));
    }
  }
  nlohmann::json edges = nlohmann::json::array();
  const auto res = oracle::hyperedge_resistances(h);
  for (const auto& [id, e] : h.edges()) {
    edges.push_back({{"id", id}, {"weight", e.weight}, {"max_resistance", res.at(id)},
                     {"leverage", e.weight * res.at(id)}});
  }
  const auto ref = oracle::resistance_importance_sampler(h, cfg.epsilon, cfg.gamma, cfg.c_gamma, cfg.seed);
  const auto lap = oracle::DenseLaplacian(build_associated_graph(h));
  return {{"schema", kOracleSchema},
          {"n", h.num_vertices()},
          {"m", h.num_edges()},
          {"rank", h.rank()},
          {"weight_ratio", h.weight_ratio()},
          {"laplacian_min_eigenvalue", lap.min_eigenvalue()},
          {"hyperedges", edges},
          {"reference_sample", {{"expected_size", ref.expected_size}, {"size", ref.sparsifier.num_edges()}}}};
}

}  // namespace hypersparse::cli
