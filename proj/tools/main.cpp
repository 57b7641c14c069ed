#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <json.hpp>

#include "bench.hpp"
#include "dpim/error.hpp"
#include "dpim/noise_injection.hpp"
#include "dpim/oracles.hpp"
#include "dpim/projection.hpp"
#include "dpim/repair.hpp"

namespace {

using dpim::AttrKind;
using dpim::Value;
using ordered_json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 2;
constexpr int kExitRuntimeError = 3;

struct InputArgs {
  std::string dataset;
  std::string constraints;
  std::string schema;
  unsigned threads = 1;
};

void add_input_options(CLI::App* cmd, InputArgs& args, bool need_constraints = true) {
  cmd->add_option("--dataset", args.dataset, "CSV file with a header row")->required();
  auto* c = cmd->add_option("--constraints", args.constraints,
                            "constraint file, one denial constraint per line");
  if (need_constraints) c->required();
  cmd->add_option("--schema", args.schema, "schema sidecar file (name:kind per line)");
  cmd->add_option("--threads", args.threads, "worker threads for the conflict-graph build");
}

dpim::Dataset load_dataset(const InputArgs& args) {
  std::optional<std::vector<dpim::AttributeSchema>> schema;
  if (!args.schema.empty()) schema = dpim::load_schema_file(args.schema);
  return dpim::load_csv(args.dataset, schema);
}

ordered_json value_json(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return std::get<std::string>(v);
}

ordered_json ledger_json(const dpim::PrivacyBudget& budget) {
  ordered_json stages = ordered_json::array();
  for (const auto& [stage, eps] : budget.ledger()) {
    stages.push_back({{"stage", stage}, {"epsilon", eps}});
  }
  return {{"epsilon_total", budget.total()}, {"stages", stages}};
}

ordered_json report_json(const dpim::MeasureReport& report, bool clamped,
                         std::optional<double> wall_ms) {
  ordered_json out;
  out["kind"] = report.kind;
  out["strategy"] = report.strategy;
  if (report.theta_star) out["theta_star"] = *report.theta_star;
  out["noisy_value"] = report.noisy_value;
  out["ledger"] = ledger_json(report.ledger);
  out["seed"] = report.seed;
  out["non_private"] = report.non_private;
  out["clamp_nonnegative"] = clamped;
  if (report.kind != "r") {
    out["fd_branch_used"] = report.fd_branch_used;
    out["fallback_used"] = report.fallback_used;
    out["candidates_pruned_to_n"] = report.candidates_pruned_to_n;
    if (report.noisy_degree_bound) out["noisy_degree_bound"] = *report.noisy_degree_bound;
  }
  if (wall_ms) out["wall_time_ms"] = *wall_ms;
  return out;
}

std::pair<double, double> parse_eps_split(const std::string& text, double eps) {
  auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw dpim::InputError("--eps-split must look like `0.4:0.6`");
  }
  double a = 0.0, b = 0.0;
  try {
    a = std::stod(text.substr(0, colon));
    b = std::stod(text.substr(colon + 1));
  } catch (const std::exception&) {
    throw dpim::InputError("--eps-split must look like `0.4:0.6`");
  }
  if (!(a > 0.0) || !(b > 0.0)) throw dpim::InputError("--eps-split parts must be positive");
  return {eps * a / (a + b), eps * b / (a + b)};
}

dpim::CandidateSet parse_theta_set(const std::string& text, std::size_t n_nodes) {
  if (text == "default") return dpim::default_candidate_set(n_nodes);
  std::vector<std::int64_t> thetas;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      thetas.push_back(std::stoll(item));
    } catch (const std::exception&) {
      throw dpim::InputError("--theta-set: '" + item + "' is not an integer");
    }
  }
  return dpim::CandidateSet(std::move(thetas));
}

void emit(const ordered_json& payload, const std::string& out_path) {
  std::string text = payload.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw dpim::InputError("cannot open " + out_path + " for writing");
    out << text;
  }
}

int run_measure(const InputArgs& input, const std::string& kind_name,
                const std::string& strategy_name, double eps, const std::string& split_text,
                const std::string& theta_text, std::uint64_t seed, bool clamp,
                const std::string& fd_bound, bool timings, const std::string& out_path) {
  auto started = std::chrono::steady_clock::now();
  dpim::Dataset dataset = load_dataset(input);
  std::vector<dpim::DenialConstraint> constraints = dpim::parse_dc_file(input.constraints);
  dpim::RandomSource rng(seed);

  dpim::MeasureReport report;
  if (kind_name == "r") {
    dpim::BuildOptions build;
    build.threads = input.threads;
    report = dpim::dp_repair_measure(dataset, constraints, eps, rng, build);
  } else {
    auto [eps1, eps2] = parse_eps_split(split_text, eps);
    auto strategy = dpim::strategy_from_cli_string(strategy_name);
    if (!strategy) throw dpim::InputError("unknown strategy '" + strategy_name + "'");
    dpim::MeasureKind kind = kind_name == "mi" ? dpim::MeasureKind::MinimalInconsistency
                                               : dpim::MeasureKind::Problematic;
    dpim::BuildOptions build;
    build.threads = input.threads;
    dpim::ConflictGraph graph = dpim::build_conflict_graph(dataset, constraints, build);
    dpim::MeasureOptions options;
    options.prebuilt_graph = &graph;
    options.candidates = parse_theta_set(theta_text, graph.node_count());
    options.fd_mode = fd_bound == "on"
                          ? dpim::FdBranchMode::On
                          : (fd_bound == "off" ? dpim::FdBranchMode::Off : dpim::FdBranchMode::Auto);
    report = dpim::dp_measure(dataset, constraints, kind, eps1, eps2, *strategy, rng, options);
  }
  if (clamp) report.noisy_value = std::max(0.0, report.noisy_value);

  std::optional<double> wall_ms;
  if (timings) {
    wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                        started)
                  .count();
  }
  emit(report_json(report, clamp, wall_ms), out_path);
  return kExitOk;
}

int run_true_measure(const InputArgs& input, const std::string& kind_name,
                     const std::string& out_path) {
  dpim::Dataset dataset = load_dataset(input);
  std::vector<dpim::DenialConstraint> constraints = dpim::parse_dc_file(input.constraints);
  dpim::TrueMeasureKind kind;
  if (kind_name == "d") kind = dpim::TrueMeasureKind::Drastic;
  else if (kind_name == "mi") kind = dpim::TrueMeasureKind::MinimalInconsistency;
  else if (kind_name == "p") kind = dpim::TrueMeasureKind::Problematic;
  else if (kind_name == "r-approx") kind = dpim::TrueMeasureKind::RepairApprox;
  else if (kind_name == "r-exact") kind = dpim::TrueMeasureKind::RepairExact;
  else throw dpim::InputError("unknown measure kind '" + kind_name + "'");

  dpim::BuildOptions build;
  build.threads = input.threads;
  std::int64_t value = dpim::true_measure(dataset, constraints, kind, build);
  ordered_json out;
  out["kind"] = kind_name;
  out["value"] = value;
  out["non_private"] = true;
  emit(out, out_path);
  return kExitOk;
}

int run_inject_noise(const InputArgs& input, const std::string& mode, double alpha,
                     int iterations, std::uint64_t seed, const std::string& out_csv,
                     const std::string& log_path) {
  dpim::Dataset dataset = load_dataset(input);
  std::vector<dpim::DenialConstraint> constraints = dpim::parse_dc_file(input.constraints);
  dpim::RandomSource rng(seed);

  std::pair<dpim::Dataset, dpim::InjectionLog> result =
      mode == "rnoise" ? dpim::rnoise(dataset, constraints, alpha, rng)
                       : dpim::conoise(dataset, constraints, iterations, rng);

  dpim::save_csv(result.first, out_csv);
  if (!log_path.empty()) {
    ordered_json log;
    log["generator"] = mode;
    if (mode == "rnoise") {
      log["alpha"] = alpha;
      log["cell_population"] = result.second.cell_population;
    } else {
      log["iterations"] = iterations;
    }
    log["seed"] = seed;
    ordered_json records = ordered_json::array();
    for (const auto& r : result.second.records) {
      records.push_back({{"id", r.id},
                         {"attribute", r.attribute},
                         {"old", value_json(r.old_value)},
                         {"new", value_json(r.new_value)}});
    }
    log["records"] = records;
    emit(log, log_path);
  }
  return kExitOk;
}

int run_graph_stats(const InputArgs& input, const std::string& load_cache,
                    const std::string& save_cache, const std::string& out_path) {
  dpim::ConflictGraph graph;
  if (!load_cache.empty()) {
    graph = dpim::load_graph_cache(load_cache);
  } else {
    if (input.dataset.empty() || input.constraints.empty()) {
      throw dpim::InputError("graph-stats needs --dataset and --constraints, or --load-cache");
    }
    dpim::Dataset dataset = load_dataset(input);
    std::vector<dpim::DenialConstraint> constraints = dpim::parse_dc_file(input.constraints);
    dpim::BuildOptions build;
    build.threads = input.threads;
    graph = dpim::build_conflict_graph(dataset, constraints, build);
  }
  if (!save_cache.empty()) dpim::save_graph_cache(graph, save_cache);

  ordered_json out;
  out["nodes"] = graph.node_count();
  out["edges"] = graph.edge_count();
  out["max_degree"] = dpim::max_degree(graph);
  out["positive_degree_nodes"] = dpim::f_positive_degree_count(graph);
  emit(out, out_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private inconsistency measures for denial constraints"};
  app.require_subcommand(1);

  // measure
  auto* measure = app.add_subcommand("measure", "release a private inconsistency measure");
  InputArgs measure_input;
  add_input_options(measure, measure_input);
  std::string kind, strategy = "ub-hier-em", split = "0.4:0.6", theta_set = "default";
  std::string fd_bound = "auto", out_path;
  double eps = 1.0;
  std::uint64_t seed = 0;
  bool clamp = false, timings = false;
  measure->add_option("--kind", kind, "measure: mi (conflicts), p (problematic tuples), r (repair)")
      ->required()
      ->check(CLI::IsMember({"mi", "p", "r"}));
  measure->add_option("--strategy", strategy, "theta selection strategy")
      ->check(CLI::IsMember({"baseline1", "baseline2", "em", "hier-em", "ub-hier-em"}));
  measure->add_option("--eps", eps, "total privacy budget");
  measure->add_option("--eps-split", split, "selection:release budget ratio");
  measure->add_option("--theta-set", theta_set, "`default` or a comma list of degree bounds");
  measure->add_option("--seed", seed, "random seed (controls all randomness)");
  measure->add_flag("--clamp-nonnegative", clamp, "clamp the released value at zero");
  measure->add_option("--fd-bound", fd_bound, "FD degree-bound stage: auto, on, off")
      ->check(CLI::IsMember({"auto", "on", "off"}));
  measure->add_flag("--timings", timings, "include wall_time_ms in the output");
  measure->add_option("--out", out_path, "write the JSON report here instead of stdout");

  // true-measure
  auto* true_cmd = app.add_subcommand("true-measure", "exact non-private measure");
  InputArgs true_input;
  add_input_options(true_cmd, true_input);
  std::string true_kind;
  std::string true_out;
  true_cmd->add_option("--kind", true_kind, "d, mi, p, r-approx, or r-exact")
      ->required()
      ->check(CLI::IsMember({"d", "mi", "p", "r-approx", "r-exact"}));
  true_cmd->add_option("--out", true_out, "write the JSON here instead of stdout");

  // inject-noise
  auto* inject = app.add_subcommand("inject-noise", "add synthetic violations to a dataset");
  InputArgs inject_input;
  add_input_options(inject, inject_input);
  std::string mode, inject_out, inject_log;
  double alpha = 0.01;
  int iterations = 200;
  std::uint64_t inject_seed = 0;
  inject->add_option("--mode", mode, "rnoise or conoise")
      ->required()
      ->check(CLI::IsMember({"rnoise", "conoise"}));
  inject->add_option("--alpha", alpha, "fraction of constraint-relevant cells (rnoise)");
  inject->add_option("--iterations", iterations, "iteration count (conoise)");
  inject->add_option("--seed", inject_seed, "random seed");
  inject->add_option("--out", inject_out, "output CSV path")->required();
  inject->add_option("--log", inject_log, "write the replayable injection log (JSON)");

  // graph-stats
  auto* stats = app.add_subcommand("graph-stats", "conflict graph summary");
  InputArgs stats_input;
  auto* stats_dataset =
      stats->add_option("--dataset", stats_input.dataset, "CSV file with a header row");
  auto* stats_constraints =
      stats->add_option("--constraints", stats_input.constraints, "constraint file");
  stats->add_option("--schema", stats_input.schema, "schema sidecar file");
  stats->add_option("--threads", stats_input.threads, "build worker threads");
  std::string load_cache, save_cache, stats_out;
  stats->add_option("--load-cache", load_cache, "read the graph from a cache file");
  stats->add_option("--save-cache", save_cache, "write the graph cache file");
  stats->add_option("--out", stats_out, "write the JSON here instead of stdout");
  stats_dataset->needs(stats_constraints);

  // bench
  auto* bench = app.add_subcommand("bench", "sweep strategies/budgets/seeds, emit CSV");
  std::string bench_config, bench_out;
  unsigned bench_workers = 1;
  bool bench_timings = false;
  bench->add_option("--config", bench_config, "flat key=value benchmark description")->required();
  bench->add_option("--out", bench_out, "output CSV path (default stdout)");
  bench->add_option("--workers", bench_workers, "parallel sweep workers");
  bench->add_flag("--timings", bench_timings, "append a wall_time_ms column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (measure->parsed()) {
      return run_measure(measure_input, kind, strategy, eps, split, theta_set, seed, clamp,
                         fd_bound, timings, out_path);
    }
    if (true_cmd->parsed()) {
      return run_true_measure(true_input, true_kind, true_out);
    }
    if (inject->parsed()) {
      return run_inject_noise(inject_input, mode, alpha, iterations, inject_seed, inject_out,
                              inject_log);
    }
    if (stats->parsed()) {
      return run_graph_stats(stats_input, load_cache, save_cache, stats_out);
    }
    if (bench->parsed()) {
      dpim::cli::BenchConfig config = dpim::cli::load_bench_config(bench_config);
      std::string csv = dpim::cli::run_bench(config, bench_workers, bench_timings);
      if (bench_out.empty()) {
        std::cout << csv;
      } else {
        std::ofstream out(bench_out, std::ios::binary);
        if (!out) throw dpim::InputError("cannot open " + bench_out + " for writing");
        out << csv;
      }
      return kExitOk;
    }
  } catch (const dpim::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
  return kExitOk;
}
