#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace overlay {

/// How the next peer to admit is chosen.
enum class Ordering { Fixed, Growing };
/// How a connection is scored.
enum class Score { Random, Closest, LeastDelay };
/// How the M connections of one peer are spread over uploaders.
enum class Diversity { Diverse, None, SmallWorld };

struct PolicySpec {
  Ordering ordering = Ordering::Growing;
  Score score = Score::Random;
  Diversity diversity = Diversity::None;

  /// Three-letter code such as "FCS", or "FR"/"GR" for random scoring.
  std::string name() const;

  /// Parses a policy code. Throws std::invalid_argument for unknown names.
  static PolicySpec parse(std::string_view code);

  friend bool operator==(const PolicySpec&, const PolicySpec&) = default;
};

/// The fourteen policies, fixed first: FR FCD FCN FCS FDD FDN FDS GR GCD ...
const std::array<PolicySpec, 14>& all_policies();

/// Splits a comma separated list of policy codes.
std::vector<PolicySpec> parse_policy_list(std::string_view csv);

}  // namespace overlay
