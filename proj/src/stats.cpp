#include "overlay/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace overlay {

double student_t_quantile(double p, double dof) {
  if (!(dof > 0.0)) throw std::invalid_argument("degrees of freedom must be positive");
  boost::math::students_t dist(dof);
  return boost::math::quantile(dist, p);
}

MeanInterval mean_interval(std::span<const double> samples, double level) {
  MeanInterval r;
  r.count = samples.size();
  if (samples.empty()) {
    r.mean = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  double sum = 0.0;
  for (double x : samples) sum += x;
  r.mean = sum / static_cast<double>(samples.size());
  if (samples.size() < 2) return r;

  double ss = 0.0;
  for (double x : samples) ss += (x - r.mean) * (x - r.mean);
  const double k = static_cast<double>(samples.size());
  const double sd = std::sqrt(ss / (k - 1.0));
  const double t = student_t_quantile(0.5 + level / 2.0, k - 1.0);
  r.half_width = t * sd / std::sqrt(k);
  return r;
}

}  // namespace overlay
