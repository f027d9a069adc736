#include "overlay/policy.hpp"

#include <stdexcept>

namespace overlay {

std::string PolicySpec::name() const {
  std::string s(1, ordering == Ordering::Fixed ? 'F' : 'G');
  switch (score) {
    case Score::Random: return s + 'R';
    case Score::Closest: s += 'C'; break;
    case Score::LeastDelay: s += 'D'; break;
  }
  switch (diversity) {
    case Diversity::Diverse: s += 'D'; break;
    case Diversity::None: s += 'N'; break;
    case Diversity::SmallWorld: s += 'S'; break;
  }
  return s;
}

PolicySpec PolicySpec::parse(std::string_view code) {
  for (const auto& p : all_policies())
    if (p.name() == code) return p;
  throw std::invalid_argument("unknown policy '" + std::string(code) + "'");
}

const std::array<PolicySpec, 14>& all_policies() {
  static const std::array<PolicySpec, 14> policies = [] {
    std::array<PolicySpec, 14> out{};
    std::size_t k = 0;
    for (Ordering o : {Ordering::Fixed, Ordering::Growing}) {
      out[k++] = PolicySpec{o, Score::Random, Diversity::None};
      for (Score s : {Score::Closest, Score::LeastDelay})
        for (Diversity d : {Diversity::Diverse, Diversity::None, Diversity::SmallWorld})
          out[k++] = PolicySpec{o, s, d};
    }
    return out;
  }();
  return policies;
}

std::vector<PolicySpec> parse_policy_list(std::string_view csv) {
  std::vector<PolicySpec> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    std::size_t end = csv.find(',', start);
    if (end == std::string_view::npos) end = csv.size();
    std::string_view item = csv.substr(start, end - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) out.push_back(PolicySpec::parse(item));
    start = end + 1;
  }
  if (out.empty()) throw std::invalid_argument("empty policy list");
  return out;
}

}  // namespace overlay
