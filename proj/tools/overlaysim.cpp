// Command line front end: run / aggregate / verify / distributions / build / demo.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "overlay/builder.hpp"
#include "overlay/harness.hpp"
#include "overlay/metrics.hpp"
#include "overlay/rng.hpp"

namespace fs = std::filesystem;
using namespace overlay;

namespace {

struct GridFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  int parallel = 1;
  std::string sizes;
  std::string policies;
  bool timing = false;
};

void add_grid_flags(CLI::App* cmd, GridFlags& f, bool config_required) {
  auto* opt = cmd->add_option("--config", f.config, "key=value experiment file");
  if (config_required) opt->required();
  cmd->add_option("--seed", f.seed, "master seed (overrides config)");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--parallel", f.parallel, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--sizes", f.sizes, "comma separated peer counts (overrides config)");
  cmd->add_option("--policies", f.policies, "comma separated policy codes (overrides config)");
  cmd->add_flag("--timing", f.timing, "record build times in results.csv");
}

void apply_flags(ExperimentConfig& c, const GridFlags& f) {
  if (f.seed) c.master_seed = *f.seed;
  if (!f.out.empty()) c.output_dir = f.out;
  if (!f.sizes.empty()) c.sizes = parse_size_list(f.sizes);
  if (!f.policies.empty()) c.policies = parse_policy_list(f.policies);
  if (f.timing) c.record_timing = true;
  c.parallel = f.parallel;
  c.validate();
}

int run_grid(const ExperimentConfig& config) {
  const auto summary = run_experiment(config);
  std::cout << "cells: " << summary.cells.size() << " (computed " << summary.computed
            << ", reused " << summary.reused << ", admission failures " << summary.failures
            << ")\n"
            << "wrote " << (config.output_dir / "results.csv").string() << ", agg.csv, "
            << "agg_by_distribution.csv, timings.csv\n";
  return 0;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Overlay topology simulator for peer-to-peer live streaming"};
  app.require_subcommand(1);

  GridFlags run_flags;
  auto* run = app.add_subcommand("run", "execute an experiment grid");
  add_grid_flags(run, run_flags, true);

  GridFlags demo_flags;
  auto* demo = app.add_subcommand("demo", "run the small built-in grid");
  add_grid_flags(demo, demo_flags, false);

  std::string agg_in, agg_out;
  auto* agg = app.add_subcommand("aggregate", "re-aggregate a results.csv");
  agg->add_option("--in", agg_in, "results.csv")->required();
  agg->add_option("--out", agg_out, "output directory (default: next to input)");

  std::string topo_path, caps_path;
  int verify_m = 4;
  auto* verify = app.add_subcommand("verify", "feasibility-check a topology");
  verify->add_option("--topology", topo_path, "uploader,downloader,multiplicity CSV")->required();
  verify->add_option("--capacities", caps_path, "node,u,residual_u CSV")->required();
  verify->add_option("--M", verify_m, "substreams per peer")->check(CLI::PositiveNumber);

  std::string dist_kind = "all", dist_out = "distributions";
  std::size_t dist_n = 1000;
  std::uint64_t dist_seed = 1;
  auto* dists = app.add_subcommand("distributions", "emit node scatter CSVs");
  dists->add_option("--kind", dist_kind, "flat, tight, loose or all");
  dists->add_option("--n", dist_n, "number of peers")->check(CLI::PositiveNumber);
  dists->add_option("--seed", dist_seed, "seed");
  dists->add_option("--out", dist_out, "output directory");

  std::string build_policy = "FCS", build_kind = "flat", build_out = "topology";
  std::size_t build_n = 200;
  std::uint64_t build_seed = 1;
  auto* buildc = app.add_subcommand("build", "build one topology and export it");
  buildc->add_option("--policy", build_policy, "policy code");
  buildc->add_option("--kind", build_kind, "flat, tight or loose");
  buildc->add_option("--n", build_n, "number of peers")->check(CLI::PositiveNumber);
  buildc->add_option("--seed", build_seed, "cell seed");
  buildc->add_option("--out", build_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto config = load_config(run_flags.config);
      apply_flags(config, run_flags);
      return run_grid(config);
    }
    if (*demo) {
      auto config = demo_flags.config.empty() ? ExperimentConfig::demo() : load_config(demo_flags.config);
      apply_flags(config, demo_flags);
      return run_grid(config);
    }
    if (*agg) {
      std::ifstream in(agg_in);
      if (!in) throw std::runtime_error("cannot open " + agg_in);
      const auto cells = read_results_csv(in);
      const fs::path dir = agg_out.empty() ? fs::path(agg_in).parent_path() : fs::path(agg_out);
      if (!dir.empty()) fs::create_directories(dir);
      write_aggregates(dir.empty() ? fs::path(".") : dir, cells);
      std::cout << "aggregated " << cells.size() << " rows\n";
      return 0;
    }
    if (*verify) {
      std::ifstream edges(topo_path), caps(caps_path);
      if (!edges) throw std::runtime_error("cannot open " + topo_path);
      if (!caps) throw std::runtime_error("cannot open " + caps_path);
      const auto topology = read_topology_csv(edges, caps);
      const auto result = verify_feasible(topology, topology.capacities(), verify_m);
      if (!result.ok) {
        std::cerr << "infeasible: " << result.message << '\n';
        return 1;
      }
      std::cout << "feasible: " << topology.size() - 1 << " peers, M = " << verify_m << '\n';
      return 0;
    }
    if (*dists) {
      std::vector<Distribution> kinds;
      if (dist_kind == "all")
        kinds = {Distribution::Flat, Distribution::TightCluster, Distribution::LooseCluster};
      else
        kinds = {parse_distribution(dist_kind)};
      for (auto k : kinds) {
        const auto space = generate(DistributionSpec::standard(k, dist_n, dist_seed));
        const fs::path path = fs::path(dist_out) / (std::string(to_string(k)) + ".csv");
        auto out = open_out(path);
        write_space_csv(out, space);
        std::cout << "wrote " << path.string() << '\n';
      }
      return 0;
    }
    if (*buildc) {
      const auto policy = PolicySpec::parse(build_policy);
      const auto kind = parse_distribution(build_kind);
      const SimParams sim;
      const auto space = generate(
          DistributionSpec::standard(kind, build_n, derive_seed(build_seed, {hash_key("space")})));
      const auto caps = CapacityProfile::random(build_n, sim.peercaster_capacity,
                                                sim.capacity_choices,
                                                derive_seed(build_seed, {hash_key("capacity")}));
      const auto topology = overlay::build(space, caps, policy, sim.substreams,
                                           derive_seed(build_seed, {hash_key("build")}));
      const fs::path dir = build_out;
      {
        auto out = open_out(dir / "topology.csv");
        write_topology_csv(out, topology);
      }
      {
        auto out = open_out(dir / "capacities.csv");
        write_capacity_csv(out, topology);
      }
      {
        auto out = open_out(dir / "space.csv");
        write_space_csv(out, space);
      }
      const auto report = evaluate(topology, space, sim.substreams);
      std::cout << policy.name() << " " << to_string(kind) << " n=" << build_n
                << " min_delay=" << report.min_delay.mean
                << " tree_delay=" << report.tree_delay.mean
                << " node_vuln=" << report.node_vulnerability.value
                << " sys_vuln=" << report.system_vulnerability.value << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
