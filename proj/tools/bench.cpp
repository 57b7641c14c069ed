#include "bench.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "dpim/error.hpp"
#include "dpim/noise_injection.hpp"
#include "dpim/oracles.hpp"
#include "dpim/projection.hpp"
#include "dpim/repair.hpp"

namespace dpim::cli {

namespace {

std::string trim(const std::string& s) {
  auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct Cell {
  std::string measure;
  std::string strategy;  // "vertex-cover" for r
  double eps = 1.0;
  std::uint64_t seed = 0;
};

struct CellResult {
  bool ok = false;
  std::string error_message;
  std::optional<std::int64_t> theta_star;
  double noisy_value = 0.0;
  std::int64_t true_value = 0;
  double error = 0.0;
  bool error_is_absolute = false;
  std::string ledger;
  double wall_ms = 0.0;
};

std::string ledger_string(const PrivacyBudget& budget) {
  std::string out;
  for (const auto& [stage, eps] : budget.ledger()) {
    if (!out.empty()) out += ";";
    out += stage + ":" + format_double(eps);
  }
  return out;
}

}  // namespace

BenchConfig load_bench_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open bench config " + path.string());
  const auto base = path.parent_path();

  BenchConfig config;
  bool have_dataset = false, have_constraints = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw InputError(path.string() + ":" + std::to_string(line_no) +
                       ": expected `key = value`");
    }
    std::string key = trim(text.substr(0, eq));
    std::string value = trim(text.substr(eq + 1));
    auto resolve = [&base](const std::string& p) {
      std::filesystem::path fp(p);
      return fp.is_absolute() ? fp : base / fp;
    };
    try {
      if (key == "dataset") {
        config.dataset = resolve(value);
        have_dataset = true;
      } else if (key == "constraints") {
        config.constraints = resolve(value);
        have_constraints = true;
      } else if (key == "schema") {
        config.schema = resolve(value);
      } else if (key == "measures") {
        config.measures = split_list(value);
      } else if (key == "strategies") {
        config.strategies = split_list(value);
      } else if (key == "eps") {
        for (const auto& item : split_list(value)) config.eps_values.push_back(std::stod(item));
      } else if (key == "seeds") {
        for (const auto& item : split_list(value)) config.seeds.push_back(std::stoull(item));
      } else if (key == "eps_split") {
        auto colon = value.find(':');
        if (colon == std::string::npos) throw InputError("eps_split must be `a:b`");
        config.split_selection = std::stod(value.substr(0, colon));
        config.split_release = std::stod(value.substr(colon + 1));
      } else if (key == "theta_set") {
        config.theta_set = value;
      } else if (key == "fd_bound") {
        config.fd_bound = value;
      } else if (key == "noise_mode") {
        config.noise_mode = value;
      } else if (key == "alpha") {
        config.alpha = std::stod(value);
      } else if (key == "iterations") {
        config.iterations = std::stoi(value);
      } else if (key == "noise_seed") {
        config.noise_seed = std::stoull(value);
      } else if (key == "threads") {
        config.threads = static_cast<unsigned>(std::stoul(value));
      } else {
        throw InputError("unknown key '" + key + "'");
      }
    } catch (const InputError&) {
      throw;
    } catch (const std::exception& e) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": bad value for '" +
                       key + "': " + e.what());
    }
  }
  if (!have_dataset || !have_constraints) {
    throw InputError(path.string() + ": config needs at least `dataset` and `constraints`");
  }
  if (config.measures.empty()) config.measures = {"mi"};
  if (config.strategies.empty()) config.strategies = {"ub-hier-em"};
  if (config.eps_values.empty()) config.eps_values = {1.0};
  if (config.seeds.empty()) config.seeds = {0};
  for (const auto& m : config.measures) {
    if (m != "mi" && m != "p" && m != "r") throw InputError("unknown measure '" + m + "'");
  }
  for (const auto& s : config.strategies) {
    if (!strategy_from_cli_string(s)) throw InputError("unknown strategy '" + s + "'");
  }
  double total = config.split_selection + config.split_release;
  if (!(config.split_selection > 0.0) || !(config.split_release > 0.0)) {
    throw InputError("eps_split parts must be positive");
  }
  config.split_selection /= total;
  config.split_release /= total;
  return config;
}

std::string run_bench(const BenchConfig& config, unsigned workers, bool timings) {
  std::optional<std::vector<AttributeSchema>> schema;
  if (config.schema) schema = load_schema_file(*config.schema);
  Dataset dataset = load_csv(config.dataset, schema);
  std::vector<DenialConstraint> constraints = parse_dc_file(config.constraints);

  if (config.noise_mode) {
    RandomSource noise_rng(mix_seed(config.noise_seed, "bench-noise"));
    if (*config.noise_mode == "rnoise") {
      dataset = rnoise(dataset, constraints, config.alpha, noise_rng).first;
    } else if (*config.noise_mode == "conoise") {
      dataset = conoise(dataset, constraints, config.iterations, noise_rng).first;
    } else {
      throw InputError("unknown noise_mode '" + *config.noise_mode + "'");
    }
  }

  BuildOptions build;
  build.threads = config.threads;
  ConflictGraph graph = build_conflict_graph(dataset, constraints, build);

  std::optional<CandidateSet> candidates;
  if (config.theta_set != "default") {
    std::vector<std::int64_t> thetas;
    for (const auto& item : split_list(config.theta_set)) thetas.push_back(std::stoll(item));
    candidates = CandidateSet(std::move(thetas));
  }
  FdBranchMode fd_mode = FdBranchMode::Auto;
  if (config.fd_bound == "on") fd_mode = FdBranchMode::On;
  if (config.fd_bound == "off") fd_mode = FdBranchMode::Off;

  // True values, once per measure kind. The repair reference is the
  // deterministic greedy cover (the exact optimum is NP-hard at scale).
  std::int64_t true_mi = true_measure_on_graph(graph, TrueMeasureKind::MinimalInconsistency);
  std::int64_t true_p = true_measure_on_graph(graph, TrueMeasureKind::Problematic);
  std::int64_t true_r = true_measure_on_graph(graph, TrueMeasureKind::RepairApprox);
  auto true_for = [&](const std::string& m) {
    return m == "mi" ? true_mi : (m == "p" ? true_p : true_r);
  };

  std::vector<Cell> cells;
  for (const auto& measure : config.measures) {
    for (double eps : config.eps_values) {
      if (measure == "r") {
        for (std::uint64_t seed : config.seeds) cells.push_back({measure, "vertex-cover", eps, seed});
      } else {
        for (const auto& strategy : config.strategies) {
          for (std::uint64_t seed : config.seeds) cells.push_back({measure, strategy, eps, seed});
        }
      }
    }
  }

  std::vector<CellResult> results(cells.size());
  auto run_cell = [&](std::size_t index) {
    const Cell& cell = cells[index];
    CellResult& out = results[index];
    const std::string label =
        cell.measure + "|" + cell.strategy + "|" + format_double(cell.eps);
    RandomSource rng(mix_seed(cell.seed, label));
    auto started = std::chrono::steady_clock::now();
    try {
      MeasureReport report;
      if (cell.measure == "r") {
        report = dp_repair_measure_on_graph(graph, cell.eps, rng);
      } else {
        MeasureKind kind = cell.measure == "mi" ? MeasureKind::MinimalInconsistency
                                                : MeasureKind::Problematic;
        MeasureOptions options;
        options.prebuilt_graph = &graph;
        options.candidates = candidates;
        options.fd_mode = fd_mode;
        report = dp_measure(dataset, constraints, kind, cell.eps * config.split_selection,
                            cell.eps * config.split_release,
                            *strategy_from_cli_string(cell.strategy), rng, options);
      }
      out.ok = true;
      out.theta_star = report.theta_star;
      out.noisy_value = report.noisy_value;
      out.true_value = true_for(cell.measure);
      ErrorValue err = relative_error(out.true_value, out.noisy_value);
      out.error = err.value;
      out.error_is_absolute = err.is_absolute;
      out.ledger = ledger_string(report.ledger);
    } catch (const std::exception& e) {
      out.ok = false;
      out.error_message = e.what();
    }
    out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                            started)
                      .count();
  };

  workers = std::max(1u, workers);
  if (workers == 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1)) {
          run_cell(i);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  std::ostringstream csv;
  csv << "row_type,measure,strategy,eps,seed,theta_star,true_value,noisy_value,error,"
         "error_is_absolute,error_std,ledger,status";
  if (timings) csv << ",wall_time_ms";
  csv << "\n";

  auto emit_run = [&](const Cell& cell, const CellResult& r) {
    csv << "run," << cell.measure << "," << cell.strategy << "," << format_double(cell.eps)
        << "," << cell.seed << ",";
    if (r.ok && r.theta_star) csv << *r.theta_star;
    csv << ",";
    if (r.ok) {
      csv << r.true_value << "," << format_double(r.noisy_value) << ","
          << format_double(r.error) << "," << (r.error_is_absolute ? "1" : "0") << ",,\""
          << r.ledger << "\",ok";
    } else {
      std::string msg = r.error_message;
      for (char& c : msg) {
        if (c == '"' || c == '\n' || c == ',') c = ' ';
      }
      csv << ",,,,,," << "error: " << msg;
    }
    if (timings) csv << "," << format_double(r.wall_ms);
    csv << "\n";
  };

  // Group rows: consecutive cells share (measure, strategy, eps) with seeds innermost.
  std::size_t index = 0;
  while (index < cells.size()) {
    std::size_t group_end = index;
    while (group_end < cells.size() && cells[group_end].measure == cells[index].measure &&
           cells[group_end].strategy == cells[index].strategy &&
           cells[group_end].eps == cells[index].eps) {
      ++group_end;
    }
    double sum = 0.0, sum_sq = 0.0, noisy_sum = 0.0;
    std::size_t ok_count = 0;
    std::int64_t group_true = 0;
    for (std::size_t i = index; i < group_end; ++i) {
      emit_run(cells[i], results[i]);
      if (results[i].ok) {
        sum += results[i].error;
        sum_sq += results[i].error * results[i].error;
        noisy_sum += results[i].noisy_value;
        group_true = results[i].true_value;
        ++ok_count;
      }
    }
    csv << "aggregate," << cells[index].measure << "," << cells[index].strategy << ","
        << format_double(cells[index].eps) << ",,,";
    if (ok_count > 0) {
      double mean = sum / static_cast<double>(ok_count);
      double variance = sum_sq / static_cast<double>(ok_count) - mean * mean;
      csv << group_true << "," << format_double(noisy_sum / ok_count) << ","
          << format_double(mean) << ",," << format_double(std::sqrt(std::max(0.0, variance)))
          << ",,aggregate(n=" << ok_count << ")";
    } else {
      csv << ",,,,,,aggregate(n=0)";
    }
    if (timings) csv << ",";
    csv << "\n";
    index = group_end;
  }
  return csv.str();
}

}  // namespace dpim::cli
