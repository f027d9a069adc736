#pragma once

#include <cstddef>
#include <optional>
#include <span>

namespace overlay {

/// Two-sided Student-t interval for the mean.
struct MeanInterval {
  double mean = 0.0;
  /// Missing for fewer than two samples.
  std::optional<double> half_width;
  std::size_t count = 0;
};

/// `level` is the two-sided coverage, e.g. 0.95.
MeanInterval mean_interval(std::span<const double> samples, double level = 0.95);

/// Upper quantile t_{p, dof}.
double student_t_quantile(double p, double dof);

}  // namespace overlay
