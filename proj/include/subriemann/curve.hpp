#pragma once

#include <cstddef>
#include <vector>

#include "subriemann/manifold.hpp"

namespace subriemann {

struct CurveSample {
  double t = 0.0;
  Vec x;
  double speed = 0.0;  // sqrt(g_c(gamma', gamma')) at the sample
};

/// One constant-control piece: velocity sum_a controls[a] * field_a for `duration`.
struct ControlSegment {
  Vec controls;
  double duration = 0.0;
  std::size_t frame = 0;  // which tangent frame family drives the segment (surface mode)
};

struct CurveDiagnostics {
  double max_phi_drift = 0.0;
  double max_horizontality_residual = 0.0;
  double endpoint_error = 0.0;
  double energy_drift = 0.0;
};

struct HorizontalCurve {
  std::vector<ControlSegment> segments;
  std::vector<CurveSample> samples;
  double length = 0.0;
  CurveDiagnostics diagnostics;

  const Vec& start() const { return samples.front().x; }
  const Vec& end() const { return samples.back().x; }
  double duration() const { return samples.empty() ? 0.0 : samples.back().t - samples.front().t; }
};

/// Integral of the sample speeds over time: composite Simpson on runs of equally spaced
/// samples, trapezoid on leftover intervals.
double curve_length(const std::vector<CurveSample>& samples);

}  // namespace subriemann
