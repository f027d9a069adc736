#include <charconv>
#include <fstream>
#include <istream>
#include <stdexcept>

#include "overlay/harness.hpp"

namespace overlay {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view s, std::string_view key) {
  s = trim(s);
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument("config: bad value '" + std::string(s) + "' for " + std::string(key));
  return v;
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t end = s.find(',', start);
    if (end == std::string_view::npos) end = s.size();
    auto item = trim(s.substr(start, end - start));
    if (!item.empty()) out.push_back(item);
    start = end + 1;
  }
  return out;
}

bool parse_flag(std::string_view s, std::string_view key) {
  s = trim(s);
  if (s == "1" || s == "true" || s == "on" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "off" || s == "no") return false;
  throw std::invalid_argument("config: bad boolean '" + std::string(s) + "' for " + std::string(key));
}

}  // namespace

void SimParams::validate() const {
  if (substreams < 1) throw std::invalid_argument("M must be at least 1");
  if (peercaster_capacity < substreams) throw std::invalid_argument("u0 must be at least M");
  if (capacity_choices.empty()) throw std::invalid_argument("capacity set is empty");
  for (int u : capacity_choices)
    if (u < 0) throw std::invalid_argument("capacities must be nonnegative");
}

void ExperimentConfig::validate() const {
  if (distributions.empty()) throw std::invalid_argument("no distributions configured");
  if (policies.empty()) throw std::invalid_argument("no policies configured");
  if (sizes.empty()) throw std::invalid_argument("no sizes configured");
  for (auto n : sizes)
    if (n == 0) throw std::invalid_argument("sizes must be positive");
  if (runs == 0) throw std::invalid_argument("runs must be positive");
  if (parallel < 1) throw std::invalid_argument("parallel must be at least 1");
  sim.validate();
}

ExperimentConfig ExperimentConfig::standard_grid() {
  ExperimentConfig c;
  c.distributions = {Distribution::Flat, Distribution::TightCluster, Distribution::LooseCluster};
  c.policies.assign(all_policies().begin(), all_policies().end());
  c.sizes = {10, 20, 50, 100, 200, 500, 1000, 2000, 5000};
  c.runs = 3;
  return c;
}

ExperimentConfig ExperimentConfig::demo() {
  ExperimentConfig c = standard_grid();
  c.sizes = {10, 50, 200};
  c.runs = 2;
  c.output_dir = "demo";
  return c;
}

std::vector<std::size_t> parse_size_list(std::string_view csv) {
  std::vector<std::size_t> out;
  for (auto item : split_list(csv)) out.push_back(parse_number<std::size_t>(item, "sizes"));
  if (out.empty()) throw std::invalid_argument("empty size list");
  return out;
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c = ExperimentConfig::standard_grid();
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key=value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "distributions") {
      c.distributions.clear();
      for (auto item : split_list(value)) c.distributions.push_back(parse_distribution(item));
    } else if (key == "policies") {
      c.policies = parse_policy_list(value);
    } else if (key == "sizes") {
      c.sizes = parse_size_list(value);
    } else if (key == "runs") {
      c.runs = parse_number<std::size_t>(value, key);
    } else if (key == "seed") {
      c.master_seed = parse_number<std::uint64_t>(value, key);
    } else if (key == "M") {
      c.sim.substreams = parse_number<int>(value, key);
    } else if (key == "u0") {
      c.sim.peercaster_capacity = parse_number<int>(value, key);
    } else if (key == "capacities") {
      c.sim.capacity_choices.clear();
      for (auto item : split_list(value)) c.sim.capacity_choices.push_back(parse_number<int>(item, key));
    } else if (key == "verify") {
      c.verify = parse_flag(value, key);
    } else if (key == "timing") {
      c.record_timing = parse_flag(value, key);
    } else {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown key '" +
                                  std::string(key) + "'");
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path.string());
  return parse_config(in);
}

}  // namespace overlay
