#include "overlay/harness.hpp"

#include <omp.h>

#include <charconv>
#include <chrono>
#include <functional>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include "overlay/builder.hpp"
#include "overlay/csv.hpp"
#include "overlay/metrics.hpp"
#include "overlay/rng.hpp"
#include "overlay/stats.hpp"

namespace overlay {

namespace {

constexpr const char* kResultsHeader =
    "policy,distribution,n,run,seed,min_delay_mean_s,tree_delay_mean_s,mean_node_vuln,"
    "max_sys_vuln,build_ms,failed";
constexpr const char* kAggregateHeader = "policy,distribution,n,metric,mean,ci95_halfwidth,k";

using CellKey = std::tuple<std::string, std::string, std::size_t, std::size_t>;

CellKey key_of(const CellResult& c) { return {c.policy, c.distribution, c.n, c.run}; }

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

void write_row(std::ostream& out, const CellResult& c) {
  out << c.policy << ',' << c.distribution << ',' << c.n << ',' << c.run << ',' << c.seed << ','
      << format_double(c.min_delay) << ',' << format_double(c.tree_delay) << ','
      << format_double(c.node_vulnerability) << ',' << format_double(c.system_vulnerability) << ','
      << format_double(c.build_ms) << ',' << (c.failed ? 1 : 0) << '\n';
}

void write_file_atomically(const std::filesystem::path& path,
                           const std::function<void(std::ostream&)>& body) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    body(out);
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

std::vector<CellSpec> enumerate_cells(const ExperimentConfig& config) {
  std::vector<CellSpec> cells;
  cells.reserve(config.distributions.size() * config.policies.size() * config.sizes.size() *
                config.runs);
  for (auto d : config.distributions)
    for (const auto& p : config.policies)
      for (auto n : config.sizes)
        for (std::size_t run = 0; run < config.runs; ++run) cells.push_back(CellSpec{d, p, n, run});
  return cells;
}

std::uint64_t cell_seed(std::uint64_t master, Distribution distribution, std::size_t n,
                        std::size_t run) {
  return derive_seed(master, {hash_key("cell"), hash_key(to_string(distribution)),
                              static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(run)});
}

CellResult run_cell(const ExperimentConfig& config, Distribution distribution,
                    const PolicySpec& policy, std::size_t n, std::size_t run) {
  CellResult r;
  r.policy = policy.name();
  r.distribution = std::string(to_string(distribution));
  r.n = n;
  r.run = run;
  r.seed = cell_seed(config.master_seed, distribution, n, run);

  const auto space = generate(
      DistributionSpec::standard(distribution, n, derive_seed(r.seed, {hash_key("space")})));
  const auto caps = CapacityProfile::random(n, config.sim.peercaster_capacity,
                                            config.sim.capacity_choices,
                                            derive_seed(r.seed, {hash_key("capacity")}));
  const int M = config.sim.substreams;

  const auto t0 = std::chrono::steady_clock::now();
  Topology topology;
  try {
    topology = build(space, caps, policy, M, derive_seed(r.seed, {hash_key("build")}));
  } catch (const AdmissionStuck&) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    r.failed = true;
    r.min_delay = r.tree_delay = r.node_vulnerability = r.system_vulnerability = nan;
    return r;
  }
  const double build_ms = elapsed_ms(t0);
  r.build_ms = config.record_timing ? build_ms : 0.0;

  const auto t1 = std::chrono::steady_clock::now();
  if (config.verify) {
    const auto check = verify_feasible(topology, caps.u, M);
    if (!check.ok)
      throw std::logic_error("built topology is infeasible (" + r.policy + ", " + r.distribution +
                             ", n=" + std::to_string(n) + "): " + check.message);
  }
  const auto report = evaluate(topology, space, M);
  r.wall_ms = build_ms + elapsed_ms(t1);
  r.min_delay = report.min_delay.mean;
  r.tree_delay = report.tree_delay.mean;
  r.node_vulnerability = report.node_vulnerability.value;
  r.system_vulnerability = report.system_vulnerability.value;
  return r;
}

std::vector<AggregateRow> aggregate(std::span<const CellResult> cells, bool pooled) {
  std::map<std::string, std::size_t> policy_rank;
  std::map<std::string, std::size_t> dist_rank;
  for (const auto& c : cells) {
    policy_rank.try_emplace(c.policy, policy_rank.size());
    dist_rank.try_emplace(c.distribution, dist_rank.size());
  }
  struct Group {
    std::string policy, distribution;
    std::size_t n = 0;
    std::vector<double> values[4];
  };
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, Group> groups;
  for (const auto& c : cells) {
    const std::size_t d = pooled ? 0 : dist_rank.at(c.distribution);
    auto& g = groups[{policy_rank.at(c.policy), c.n, d}];
    g.policy = c.policy;
    g.distribution = pooled ? "all" : c.distribution;
    g.n = c.n;
    if (c.failed) continue;
    g.values[0].push_back(c.min_delay);
    g.values[1].push_back(c.tree_delay);
    g.values[2].push_back(c.node_vulnerability);
    g.values[3].push_back(c.system_vulnerability);
  }
  static const char* const names[4] = {"min_delay_s", "tree_delay_s", "mean_node_vuln",
                                       "max_sys_vuln"};
  std::vector<AggregateRow> rows;
  for (const auto& [key, g] : groups) {
    for (int m = 0; m < 4; ++m) {
      const auto ci = mean_interval(g.values[m]);
      rows.push_back(AggregateRow{g.policy, g.distribution, g.n, names[m], ci.mean,
                                  ci.half_width, ci.count});
    }
  }
  return rows;
}

void write_results_csv(std::ostream& out, std::span<const CellResult> cells) {
  out << kResultsHeader << '\n';
  for (const auto& c : cells) write_row(out, c);
}

std::vector<CellResult> read_results_csv(std::istream& in) {
  csv::expect_header(in, kResultsHeader);
  std::vector<CellResult> out;
  std::string line;
  while (csv::next_line(in, line)) {
    const auto f = csv::split(line);
    if (f.size() != 11) throw std::runtime_error("results row needs 11 fields: " + line);
    CellResult c;
    c.policy = f[0];
    c.distribution = f[1];
    c.n = static_cast<std::size_t>(csv::to_int(f[2]));
    c.run = static_cast<std::size_t>(csv::to_int(f[3]));
    {
      std::uint64_t s = 0;
      auto [ptr, ec] = std::from_chars(f[4].data(), f[4].data() + f[4].size(), s);
      if (ec != std::errc() || ptr != f[4].data() + f[4].size())
        throw std::runtime_error("bad seed: " + f[4]);
      c.seed = s;
    }
    c.min_delay = csv::to_double(f[5]);
    c.tree_delay = csv::to_double(f[6]);
    c.node_vulnerability = csv::to_double(f[7]);
    c.system_vulnerability = csv::to_double(f[8]);
    c.build_ms = csv::to_double(f[9]);
    c.failed = csv::to_int(f[10]) != 0;
    out.push_back(std::move(c));
  }
  return out;
}

void write_aggregate_csv(std::ostream& out, std::span<const AggregateRow> rows) {
  out << kAggregateHeader << '\n';
  for (const auto& r : rows) {
    out << r.policy << ',' << r.distribution << ',' << r.n << ',' << r.metric << ','
        << format_double(r.mean) << ','
        << (r.ci95_half_width ? format_double(*r.ci95_half_width) : std::string("NA")) << ','
        << r.k << '\n';
  }
}

void write_aggregates(const std::filesystem::path& dir, std::span<const CellResult> cells) {
  const auto pooled = aggregate(cells, true);
  const auto split = aggregate(cells, false);
  write_file_atomically(dir / "agg.csv", [&](std::ostream& o) { write_aggregate_csv(o, pooled); });
  write_file_atomically(dir / "agg_by_distribution.csv",
                        [&](std::ostream& o) { write_aggregate_csv(o, split); });
}

RunSummary run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::filesystem::create_directories(config.output_dir);
  const auto results_path = config.output_dir / "results.csv";

  // Previously written rows, reused when the seed still matches.
  std::vector<CellResult> previous;
  if (std::filesystem::exists(results_path)) {
    std::ifstream in(results_path);
    previous = read_results_csv(in);
  }
  std::map<CellKey, std::size_t> previous_index;
  for (std::size_t i = 0; i < previous.size(); ++i) previous_index[key_of(previous[i])] = i;

  const std::vector<CellSpec> tasks = enumerate_cells(config);

  RunSummary summary;
  summary.cells.resize(tasks.size());
  std::vector<char> ready(tasks.size(), 0);
  std::vector<char> reused_from(previous.size(), 0);
  std::vector<std::size_t> todo;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const auto& task = tasks[t];
    CellKey key{task.policy.name(), std::string(to_string(task.distribution)), task.n, task.run};
    auto it = previous_index.find(key);
    if (it != previous_index.end()) reused_from[it->second] = 1;  // reused or superseded
    if (it != previous_index.end() &&
        previous[it->second].seed ==
            cell_seed(config.master_seed, task.distribution, task.n, task.run)) {
      summary.cells[t] = previous[it->second];
      ready[t] = 1;
      ++summary.reused;
    } else {
      todo.push_back(t);
    }
  }

  // New rows are appended in configuration order as soon as every earlier
  // pending cell has finished.
  {
    std::ofstream append;
    if (!todo.empty()) {
      const bool fresh = previous.empty();
      append.open(results_path, std::ios::binary | std::ios::app);
      if (!append) throw std::runtime_error("cannot write " + results_path.string());
      if (fresh) append << kResultsHeader << '\n' << std::flush;
    }
    std::mutex commit;
    std::size_t next_commit = 0;
    std::exception_ptr failure;
    const auto count = static_cast<std::ptrdiff_t>(todo.size());

#pragma omp parallel for schedule(dynamic, 1) num_threads(config.parallel)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
      {
        std::lock_guard lock(commit);
        if (failure) continue;
      }
      const std::size_t t = todo[k];
      CellResult r;
      try {
        r = run_cell(config, tasks[t].distribution, tasks[t].policy, tasks[t].n, tasks[t].run);
      } catch (...) {
        std::lock_guard lock(commit);
        if (!failure) failure = std::current_exception();
        continue;
      }
      std::lock_guard lock(commit);
      summary.cells[t] = std::move(r);
      ready[t] = 1;
      while (next_commit < todo.size() && ready[todo[next_commit]]) {
        write_row(append, summary.cells[todo[next_commit]]);
        ++next_commit;
      }
      append.flush();
    }
    if (failure) std::rethrow_exception(failure);
    summary.computed = todo.size();
  }

  for (const auto& c : summary.cells) summary.failures += c.failed ? 1 : 0;

  // Canonical file: configured cells in order, then unrelated earlier rows.
  write_file_atomically(results_path, [&](std::ostream& out) {
    write_results_csv(out, summary.cells);
    for (std::size_t i = 0; i < previous.size(); ++i)
      if (!reused_from[i]) write_row(out, previous[i]);
  });
  write_file_atomically(config.output_dir / "timings.csv", [&](std::ostream& out) {
    out << "policy,distribution,n,run,wall_ms\n";
    for (std::size_t t : todo) {
      const auto& c = summary.cells[t];
      out << c.policy << ',' << c.distribution << ',' << c.n << ',' << c.run << ','
          << format_double(c.wall_ms) << '\n';
    }
  });
  write_aggregates(config.output_dir, summary.cells);
  return summary;
}

}  // namespace overlay
