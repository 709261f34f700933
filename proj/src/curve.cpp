#include "subriemann/curve.hpp"

#include <algorithm>
#include <cmath>

namespace subriemann {

namespace {

bool same_step(double a, double b) { return std::fabs(a - b) <= 1e-9 * std::max(std::fabs(a), std::fabs(b)); }

}  // namespace

double curve_length(const std::vector<CurveSample>& samples) {
  // Segment boundaries may repeat a time stamp with a different speed; zero-width intervals
  // split the runs and contribute nothing.
  double total = 0.0;
  std::size_t i = 0;
  const std::size_t n = samples.size();
  while (i + 1 < n) {
    const double h = samples[i + 1].t - samples[i].t;
    if (h <= 0.0) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j + 1 < n && same_step(samples[j + 1].t - samples[j].t, h)) ++j;
    // run i..j of equally spaced samples
    std::size_t a = i;
    while (a + 2 <= j) {
      total += h / 3.0 * (samples[a].speed + 4.0 * samples[a + 1].speed + samples[a + 2].speed);
      a += 2;
    }
    if (a < j) total += 0.5 * h * (samples[a].speed + samples[a + 1].speed);
    i = j;
  }
  return total;
}

}  // namespace subriemann
