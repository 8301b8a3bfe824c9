#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "hypersparse/cli.hpp"

namespace hc = hypersparse::cli;

namespace {

std::vector<hypersparse::StreamEvent> read_events(const std::string& path) {
  if (path.empty() || path == "-") return hypersparse::parse_stream(std::cin);
  std::ifstream in(path);
  if (!in) throw hc::UsageError("cannot open stream file '" + path + "'");
  return hypersparse::parse_stream(in);
}

void emit(const nlohmann::json& report, const std::string& path) {
  const std::string text = report.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw hc::UsageError("cannot write report to '" + path + "'");
  out << text;
}

void add_engine_options(CLI::App* cmd, hc::RunConfig& cfg) {
  cmd->add_option("--seed", cfg.seed, "master seed")->capture_default_str();
  cmd->add_option("-n,--vertices", cfg.n, "vertex count")->capture_default_str();
  cmd->add_option("--m-cap", cfg.m_cap, "maximum number of insertions")->capture_default_str();
  cmd->add_option("-r,--rank", cfg.r, "maximum hyperedge size (0 = unbounded)")->capture_default_str();
  cmd->add_option("--epsilon", cfg.epsilon, "approximation parameter in (0, 1]")->capture_default_str();
  cmd->add_option("--gamma", cfg.gamma, "deletion budget exponent")->capture_default_str();
  cmd->add_option("--c-gamma", cfg.c_gamma, "sampling constant")->capture_default_str();
  cmd->add_option("--c", cfg.c, "size-threshold constant")->capture_default_str();
  cmd->add_option("--rho", cfg.rho, "reduction parameter (0 = chain size)")->capture_default_str();
  cmd->add_option("--m-star", cfg.m_star, "size threshold (0 = n)")->capture_default_str();
  cmd->add_option("--practical-scale", cfg.practical_scale, "divisor for the bundle size (1 = theory)")
      ->capture_default_str();
  cmd->add_option("--spanner-depth", cfg.spanner_depth, "clustering depth k (0 = ceil(log2 n))")->capture_default_str();
  cmd->add_option("--deletion-cap", cfg.deletion_cap, "maximum deletions (0 = floor(n^gamma))")->capture_default_str();
  cmd->add_flag("--timing", cfg.timing, "include wall-clock figures in reports");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic spectral hypergraph sparsifier"};
  app.set_config("--config", "", "TOML-style configuration file; command-line flags take precedence");
  app.require_subcommand(1);

  hc::RunConfig cfg;
  std::string input, output;
  bool csv = false;
  hc::BenchSpec bench;

  auto* run = app.add_subcommand("run", "replay an update stream and report statistics");
  auto* verify = app.add_subcommand("verify", "replay a stream and check every structure after each event");
  auto* bench_cmd = app.add_subcommand("bench", "scaling sweep over random workloads");
  auto* oracle = app.add_subcommand("oracle", "brute-force quantities of a stream's final hypergraph");
  for (auto* cmd : {run, verify, bench_cmd, oracle}) {
    add_engine_options(cmd, cfg);
    cmd->add_option("-o,--output", output, "report path (default stdout)");
  }
  for (auto* cmd : {run, verify, oracle}) cmd->add_option("-i,--input", input, "stream file (default stdin)");
  verify->add_option("--probes", cfg.probes, "Gaussian probes per event")->capture_default_str();
  verify->add_option("--inject-fault", cfg.inject_fault_at, "corrupt a sparsifier weight from this event on");
  bench_cmd->add_option("--n-values", bench.n_values, "vertex counts of the sweep")->capture_default_str();
  bench_cmd->add_option("--edges-per-vertex", bench.edges_per_vertex, "m / n")->capture_default_str();
  bench_cmd->add_option("--bench-rank", bench.r, "hyperedge size upper bound")->capture_default_str();
  bench_cmd->add_option("--max-weight", bench.max_weight, "weights drawn from [1, W]")->capture_default_str();
  bench_cmd->add_option("--delete-fraction", bench.delete_fraction, "fraction of edges deleted")->capture_default_str();
  bench_cmd->add_flag("--csv", csv, "print the table as CSV instead of JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      emit(hc::cmd_run(cfg, read_events(input)), output);
      return 0;
    }
    if (*verify) {
      const auto report = hc::cmd_verify(cfg, read_events(input));
      emit(report, output);
      return report.at("pass").get<bool>() ? 0 : 1;
    }
    if (*bench_cmd) {
      const auto report = hc::cmd_bench(cfg, bench);
      if (csv) {
        std::cout << hc::bench_csv(report);
      } else {
        emit(report, output);
      }
      for (const auto& w : report.at("warnings")) std::cerr << "warning: " << w.get<std::string>() << '\n';
      return 0;
    }
    if (*oracle) {
      emit(hc::cmd_oracle(cfg, read_events(input)), output);
      return 0;
    }
  } catch (const hc::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const hypersparse::Error& e) {
    std::cerr << "error: " << hypersparse::to_string(e.code()) << ": " << e.what() << '\n';
    const bool usage = e.code() == hypersparse::ErrorCode::parse_error ||
                       e.code() == hypersparse::ErrorCode::invalid_parameter ||
                       e.code() == hypersparse::ErrorCode::oracle_capacity;
    return usage ? 2 : 1;
  }
  return 2;
}
