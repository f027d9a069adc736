// Acceptance suite. One PASS/FAIL line per criterion; exit status is the
// number of failed criteria. `--quick` skips the full-grid timing run.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "overlay/builder.hpp"
#include "overlay/harness.hpp"
#include "overlay/metrics.hpp"
#include "overlay/stats.hpp"

using namespace overlay;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

constexpr int kM = 4;
constexpr std::uint64_t kMaster = 2009;

int failures = 0;

void report(int id, const std::string& title, bool ok, const std::string& detail) {
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << id << ". " << title << " -- " << detail << std::endl;
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Instance {
  DelaySpace space;
  CapacityProfile caps;
  std::uint64_t build_seed;
};

// Same derivation as the harness cells.
Instance instance(Distribution d, std::size_t n, std::size_t run) {
  const auto seed = cell_seed(kMaster, d, n, run);
  const SimParams sim;
  Instance in;
  in.space = generate(DistributionSpec::standard(d, n, derive_seed(seed, {hash_key("space")})));
  in.caps = CapacityProfile::random(n, sim.peercaster_capacity, sim.capacity_choices,
                                    derive_seed(seed, {hash_key("capacity")}));
  in.build_seed = derive_seed(seed, {hash_key("build")});
  return in;
}

const std::vector<Distribution> kDistributions{Distribution::Flat, Distribution::TightCluster,
                                               Distribution::LooseCluster};

struct SystemValues {
  double min_delay = 0, tree_delay = 0, node_vuln = 0, sys_vuln = 0;
};

}  // namespace

int main(int argc, char** argv) {
  const bool quick = argc > 1 && std::string(argv[1]) == "--quick";
  std::cout << std::setprecision(6);

  // 1 + 4: feasibility and metric bounds over 840 builds.
  std::map<std::string, std::vector<SystemValues>> at_1000;  // policy -> 15 cells
  {
    const auto t0 = Clock::now();
    int builds = 0, infeasible = 0, bound_violations = 0;
    std::string first_problem;
    double build_and_verify_s = 0.0;
    for (std::size_t n : {10, 50, 200, 1000})
      for (auto d : kDistributions)
        for (std::size_t run = 0; run < 5; ++run) {
          const auto in = instance(d, n, run);
          for (const auto& p : all_policies()) {
            const auto tb = Clock::now();
            const auto t = build(in.space, in.caps, p, kM, in.build_seed);
            const auto check = verify_feasible(t, in.caps.u, kM);
            build_and_verify_s += seconds_since(tb);
            ++builds;
            bool ok = check.ok;
            for (NodeId i = 1; ok && i < t.size(); ++i) ok = t.in_multiplicity(i) == kM;
            for (NodeId i = 0; ok && i < t.size(); ++i) ok = t.out_multiplicity(i) <= in.caps.u[i];
            if (!ok) {
              ++infeasible;
              if (first_problem.empty()) first_problem = p.name() + ": " + check.message;
            }

            const auto r = evaluate(t, in.space, kM);
            bool bounded = r.node_vulnerability.value >= 0 && r.node_vulnerability.value <= 1 &&
                           r.system_vulnerability.value >= 0 && r.system_vulnerability.value <= 1;
            for (NodeId i = 1; i < t.size(); ++i)
              bounded = bounded && r.min_delay.per_node[i] <= r.tree_delay.per_node[i] &&
                        std::isfinite(r.tree_delay.per_node[i]);
            if (!bounded) ++bound_violations;
            if (n == 1000)
              at_1000[p.name()].push_back({r.min_delay.mean, r.tree_delay.mean,
                                           r.node_vulnerability.value,
                                           r.system_vulnerability.value});
          }
        }
    std::ostringstream detail;
    detail << builds << " builds, " << infeasible << " infeasible, build+verify "
           << build_and_verify_s << " s (limit 300 s)";
    if (!first_problem.empty()) detail << "; first: " << first_problem;
    report(1, "feasibility suite", builds == 840 && infeasible == 0 && build_and_verify_s <= 300.0,
           detail.str());

    // All-direct star: every vulnerability component exactly zero.
    DelaySpace star_space({{0, 0}, {0.1, 0}, {0, 0.2}, {-0.3, 0}});
    Topology star(4, {12, 4, 4, 4});
    for (NodeId i = 1; i < 4; ++i)
      for (int k = 0; k < kM; ++k) star.add_connection(0, i);
    const auto sr = evaluate(star, star_space, kM);
    bool star_zero = sr.node_vulnerability.value == 0.0 && sr.system_vulnerability.value == 0.0;
    for (auto v : sr.node_vulnerability.per_node) star_zero = star_zero && v == 0;
    for (auto v : sr.system_vulnerability.per_node) star_zero = star_zero && v == 0;
    std::ostringstream d4;
    d4 << bound_violations << " builds violating min<=tree or [0,1] bounds; star vulnerabilities "
       << (star_zero ? "all zero" : "NOT zero") << "; " << seconds_since(t0) << " s with metrics";
    report(4, "metric bounds and ordering", bound_violations == 0 && star_zero, d4.str());
  }

  // 2: oracle equivalence on 200 small instances.
  {
    int instances = 0, distance_mismatch = 0, flow_mismatch = 0;
    for (std::uint64_t s = 0; instances < 200; ++s) {
      const std::size_t n = 1 + s % 15;
      const auto d = kDistributions[s % 3];
      const auto in = instance(d, n, 100 + s);
      const auto& p = all_policies()[(s / 3) % 14];
      const auto t = build(in.space, in.caps, p, kM, in.build_seed);
      ++instances;
      const auto sp = shortest_paths_from_peercaster(t, in.space);
      const auto brute = oracle::all_paths_min_delay(t, in.space);
      for (NodeId i = 0; i < t.size(); ++i) distance_mismatch += sp.distance[i] != brute[i];
      for (NodeId i = 1; i < t.size(); ++i)
        flow_mismatch += max_flow(t, 0, i) != oracle::min_cut(t, 0, i);
    }
    std::ostringstream d;
    d << instances << " instances (N <= 15): " << distance_mismatch << " distance and "
      << flow_mismatch << " max-flow mismatches against brute force";
    report(2, "oracle equivalence", distance_mismatch == 0 && flow_mismatch == 0, d.str());
  }

  // 3: FR and GR identical.
  {
    int pairs = 0, different = 0;
    for (std::size_t n : {10, 50, 200, 1000})
      for (auto d : kDistributions)
        for (std::size_t run = 0; run < 5; ++run) {
          const auto in = instance(d, n, run);
          const auto fr = build(in.space, in.caps, PolicySpec::parse("FR"), kM, in.build_seed);
          const auto gr = build(in.space, in.caps, PolicySpec::parse("GR"), kM, in.build_seed);
          ++pairs;
          different += !(fr.edges() == gr.edges());
        }
    std::ostringstream d;
    d << pairs << " seed-matched pairs, " << different << " with differing edge multisets";
    report(3, "FR equals GR", different == 0, d.str());
  }

  // 5: qualitative orderings at n = 1000 (5 seeds x 3 distributions).
  {
    std::map<std::string, SystemValues> mean;
    for (const auto& [name, cells] : at_1000) {
      SystemValues m;
      for (const auto& c : cells) {
        m.min_delay += c.min_delay / cells.size();
        m.tree_delay += c.tree_delay / cells.size();
        m.node_vuln += c.node_vuln / cells.size();
        m.sys_vuln += c.sys_vuln / cells.size();
      }
      mean[name] = m;
    }
    auto group = [&](std::initializer_list<const char*> names) {
      double s = 0;
      for (auto n : names) s += mean[n].node_vuln;
      return s / names.size();
    };
    const double no_div = group({"FCN", "GCN", "FDN", "GDN"});
    const double div = group({"FCD", "GCD", "FDD", "GDD"});
    const double sw = group({"FCS", "GCS", "FDS", "GDS", "FR", "GR"});

    std::cout << "       n=1000 means over " << at_1000.begin()->second.size() << " cells:\n"
              << "       policy  min_delay  tree_delay  node_vuln  sys_vuln\n";
    for (const auto& p : all_policies()) {
      const auto& m = mean[p.name()];
      std::cout << "       " << std::left << std::setw(6) << p.name() << std::right
                << std::setw(11) << m.min_delay << std::setw(12) << m.tree_delay
                << std::setw(11) << m.node_vuln << std::setw(10) << m.sys_vuln << '\n';
    }

    const bool vuln = no_div > div && div > sw;
    const bool delay = mean["FCS"].min_delay < mean["FR"].min_delay &&
                       mean["FCN"].min_delay > mean["FCS"].min_delay;
    const bool tree = mean["FDN"].tree_delay < mean["FR"].tree_delay &&
                      mean["GDN"].tree_delay < mean["GR"].tree_delay;
    std::ostringstream d;
    d << "node vuln groups no-div " << no_div << " > div " << div << " > sw/random " << sw
      << (vuln ? " ok" : " FAILS") << "; min delay FCS " << mean["FCS"].min_delay << " < FR "
      << mean["FR"].min_delay << ", FCN " << mean["FCN"].min_delay << " > FCS"
      << (delay ? " ok" : " FAILS") << "; tree delay FDN " << mean["FDN"].tree_delay << " < FR "
      << mean["FR"].tree_delay << ", GDN " << mean["GDN"].tree_delay << " < GR "
      << mean["GR"].tree_delay << (tree ? " ok" : " FAILS");
    report(5, "qualitative reproduction at n=1000", vuln && delay && tree, d.str());
  }

  // 6: distribution sanity.
  {
    bool flat_ok = true;
    for (std::size_t run = 0; run < 20; ++run) {
      const auto s = generate(DistributionSpec::standard(Distribution::Flat, 1000, run));
      for (const auto& c : s.coords())
        flat_ok = flat_ok && c.x > -0.25 && c.x < 0.25 && c.y > -0.25 && c.y < 0.25;
    }
    const std::size_t n = 5000;
    std::ostringstream d;
    d << "flat within (-0.25, 0.25): " << (flat_ok ? "yes" : "NO");
    bool clusters_ok = true;
    for (auto kind : {Distribution::TightCluster, Distribution::LooseCluster}) {
      double total = 0;
      for (std::uint64_t seed = 0; seed < 100; ++seed)
        total += generate_detailed(DistributionSpec::standard(kind, n, seed)).cluster_count;
      const double mean = total / 100.0;
      const double target = n * 0.01;
      const bool ok = std::abs(mean - target) <= 0.1 * target;
      clusters_ok = clusters_ok && ok;
      d << "; " << to_string(kind) << " mean clusters " << mean << " vs n*p " << target;
    }
    report(6, "distribution sanity", flat_ok && clusters_ok, d.str());
  }

  // 7: determinism and performance.
  {
    const fs::path root = fs::current_path() / "acceptance_work";
    fs::remove_all(root);
    auto demo = ExperimentConfig::demo();
    demo.output_dir = root / "demo_a";
    const auto first = run_experiment(demo);
    demo.output_dir = root / "demo_b";
    demo.parallel = 4;
    run_experiment(demo);
    const auto rerun = run_experiment(demo);  // in place: every row reused
    bool identical = true;
    for (const char* f : {"results.csv", "agg.csv", "agg_by_distribution.csv"})
      identical = identical && slurp(root / "demo_a" / f) == slurp(root / "demo_b" / f);
    const bool demo_ok = identical && first.failures == 0 && rerun.computed == 0;

    const auto in = instance(Distribution::Flat, 5000, 0);
    const auto tb = Clock::now();
    const auto gdd = build(in.space, in.caps, PolicySpec::parse("GDD"), kM, in.build_seed);
    const double gdd_s = seconds_since(tb);
    const bool gdd_ok = gdd_s <= 60.0 && verify_feasible(gdd, in.caps.u, kM).ok;

    std::ostringstream d;
    d << "demo (" << first.cells.size() << " cells) byte-identical: " << (identical ? "yes" : "NO")
      << "; GDD n=5000 build " << gdd_s << " s (limit 60 s)";
    bool grid_ok = true;
    if (quick) {
      d << "; full grid skipped (--quick)";
      grid_ok = false;
    } else {
      auto grid = ExperimentConfig::standard_grid();
      grid.output_dir = root / "grid";
      grid.parallel = 8;
      const auto tg = Clock::now();
      const auto s = run_experiment(grid);
      const double grid_s = seconds_since(tg);
      grid_ok = s.cells.size() == 1134 && grid_s <= 7200.0;
      d << "; full grid " << s.cells.size() << " cells in " << grid_s << " s with --parallel 8 "
        << "(limit 7200 s, " << s.failures << " admission failures)";
    }
    report(7, "determinism and performance", demo_ok && gdd_ok && grid_ok, d.str());
  }

  // 8: CI arithmetic.
  {
    const double xs[] = {1.0, 2.0, 3.0};
    const auto ci = mean_interval(xs);
    const bool ok = ci.mean == 2.0 && ci.half_width && std::abs(*ci.half_width - 2.484) <= 0.001;
    std::ostringstream d;
    d << "mean " << ci.mean << ", 95% half-width " << std::setprecision(10)
      << ci.half_width.value_or(NAN) << " (expected 2.484 +- 0.001)";
    report(8, "CI arithmetic", ok, d.str());
  }

  std::cout << (failures == 0 ? "all acceptance criteria passed" : "acceptance criteria failed: ")
            << (failures == 0 ? "" : std::to_string(failures)) << std::endl;
  return failures;
}
