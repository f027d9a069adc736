#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "overlay/delay_space.hpp"
#include "overlay/policy.hpp"

namespace overlay {

struct SimParams {
  int substreams = 4;
  std::vector<int> capacity_choices{1, 5, 10, 16};
  int peercaster_capacity = 16;

  void validate() const;
};

struct ExperimentConfig {
  std::vector<Distribution> distributions;
  std::vector<PolicySpec> policies;
  std::vector<std::size_t> sizes;
  std::size_t runs = 3;
  std::uint64_t master_seed = 1;
  SimParams sim;
  std::filesystem::path output_dir = "results";
  /// Max-flow check of every built topology.
  bool verify = true;
  /// Write measured build times into results.csv (otherwise 0, which
  /// keeps results.csv a pure function of the configuration).
  bool record_timing = false;
  int parallel = 1;

  void validate() const;

  /// 3 distributions x 14 policies x sizes 10..5000 x 3 runs.
  static ExperimentConfig standard_grid();
  /// Small grid used by `demo`.
  static ExperimentConfig demo();
};

/// Parses flat key=value text. Keys: distributions, policies, sizes, runs,
/// seed, M, u0, capacities, verify, timing. '#' starts a comment.
/// Throws std::invalid_argument on unknown keys or bad values.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

std::vector<std::size_t> parse_size_list(std::string_view csv);

struct CellResult {
  std::string policy;
  std::string distribution;
  std::size_t n = 0;
  std::size_t run = 0;
  std::uint64_t seed = 0;
  double min_delay = 0.0;
  double tree_delay = 0.0;
  double node_vulnerability = 0.0;
  double system_vulnerability = 0.0;
  double build_ms = 0.0;
  bool failed = false;
  /// Build plus metrics wall time; goes to timings.csv only.
  double wall_ms = 0.0;
};

struct CellSpec {
  Distribution distribution;
  PolicySpec policy;
  std::size_t n;
  std::size_t run;
};

/// Every cell of the grid in configuration order: distribution, then
/// policy, then size, then run.
std::vector<CellSpec> enumerate_cells(const ExperimentConfig& config);

/// Seed of the cell (distribution, n, run): every policy of that cell sees
/// the same delay space, capacities and connection stream.
///
///   derive_seed(master, {hash_key("cell"), hash_key(distribution), n, run})
std::uint64_t cell_seed(std::uint64_t master, Distribution distribution, std::size_t n,
                        std::size_t run);

/// Generates, builds, verifies and measures one cell.
CellResult run_cell(const ExperimentConfig& config, Distribution distribution,
                    const PolicySpec& policy, std::size_t n, std::size_t run);

struct AggregateRow {
  std::string policy;
  std::string distribution;  // "all" when pooled
  std::size_t n = 0;
  std::string metric;
  double mean = 0.0;
  std::optional<double> ci95_half_width;
  std::size_t k = 0;
};

/// Pooled over runs and distributions per (policy, n) when `pooled`,
/// otherwise per (policy, distribution, n). Failed cells are skipped.
std::vector<AggregateRow> aggregate(std::span<const CellResult> cells, bool pooled = true);

void write_results_csv(std::ostream& out, std::span<const CellResult> cells);
std::vector<CellResult> read_results_csv(std::istream& in);
void write_aggregate_csv(std::ostream& out, std::span<const AggregateRow> rows);

struct RunSummary {
  std::vector<CellResult> cells;  // in configuration order
  std::size_t computed = 0;
  std::size_t reused = 0;
  std::size_t failures = 0;
};

/// Runs every cell of the grid and writes results.csv, agg.csv,
/// agg_by_distribution.csv and timings.csv into config.output_dir. Rows
/// already in results.csv with a matching seed are reused.
RunSummary run_experiment(const ExperimentConfig& config);

/// Writes agg.csv and agg_by_distribution.csv for `cells` into `dir`.
void write_aggregates(const std::filesystem::path& dir, std::span<const CellResult> cells);

}  // namespace overlay
