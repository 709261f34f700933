#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "subriemann/curve.hpp"
#include "subriemann/hypersurface.hpp"
#include "subriemann/manifold.hpp"

namespace subriemann {

struct SteerParams {
  double dt = 1e-3;                // integrator step
  double horizon = 40.0;           // total curve time budget
  double stall_threshold = 1e-2;   // relative decrease rate below which maneuvers are tried
  double maneuver_epsilon = 0.25;  // largest commutator loop scale
  double tol_endpoint = 1e-3;      // target chart distance
  std::uint64_t seed = 1;
  double char_tol = 1e-6;          // ratio |n^H|/|n^g| treated as a characteristic encounter
  double max_segment = 0.5;        // longest single greedy segment
  int max_iterations = 400;
};

/// Controlled vector fields: the horizontal frame of a manifold (ambient mode) or the
/// horizontal tangent frame tau_1..tau_{k-1} of a hypersurface (surface mode). In surface
/// mode, `choice` is the frame index left out of the Gram-Schmidt sweep.
class ControlSystem {
 public:
  explicit ControlSystem(std::shared_ptr<const Manifold> manifold);
  explicit ControlSystem(std::shared_ptr<const Hypersurface> surface);

  const Manifold& manifold() const { return *M_; }
  const Hypersurface* surface() const { return S_.get(); }
  std::size_t controls() const { return S_ ? M_->rank() - 1 : M_->rank(); }

  /// Frame family suited to x (surface mode: index of the largest |V^i|).
  std::size_t frame_choice(const Vec& x) const;
  /// Chart vectors of the controlled fields at x, one per column.
  Mat fields(const Vec& x, std::size_t choice) const;
  /// Chart bracket [f_a, f_b](x).
  Vec bracket(std::size_t a, std::size_t b, std::size_t choice, const Vec& x) const;

 private:
  std::shared_ptr<const Manifold> M_;
  std::shared_ptr<const Hypersurface> S_;
};

/// Runs a piecewise constant control schedule from p0 with RK4 (step <= params.dt),
/// projecting back to the surface after every step. Throws CharacteristicEncounter when
/// the horizontal normal ratio drops below params.char_tol and StepFailure when the
/// surface drift or horizontality residual exceeds 1e-6.
HorizontalCurve integrate_control(const ControlSystem& system, const Vec& p0,
                                  const std::vector<ControlSegment>& schedule,
                                  const SteerParams& params = {});

/// exp(-eps f_b) exp(-eps f_a) exp(eps f_b) exp(eps f_a) (p): net displacement about
/// eps^2 [f_a, f_b](p).
HorizontalCurve commutator_maneuver(const ControlSystem& system, const Vec& p, std::size_t a,
                                    std::size_t b, double eps, const SteerParams& params = {},
                                    std::optional<std::size_t> choice = std::nullopt);

struct SteerResult {
  bool success = false;
  HorizontalCurve curve;
  double distance = 0.0;             // final chart distance to the target
  std::vector<double> history;       // chart distance after every accepted move
  std::size_t maneuvers = 0;
  std::string reason;                // failure reason
  std::string status;                // "success", "inconclusive" or "obstructed"
  std::string witness;               // conserved quantity explaining an obstruction
};

/// Greedy steering from p to q inside the surface, with commutator maneuvers when the
/// descent stalls. Failure is returned, never thrown.
SteerResult steer(const ControlSystem& system, const Vec& p, const Vec& q,
                  const SteerParams& params = {});

enum class HorizontalityMode { General, Heisenberg };

struct HorizontalityReport {
  std::vector<double> residuals;  // one per sample
  double max = 0.0;
};

/// General mode: complement frame components of the sampled velocity (4th order finite
/// differences within each segment), and |g_c(velocity, V)| when a surface is given.
/// Heisenberg mode: |2 t' - 4 sum (y_i x_i' - x_i y_i')|.
HorizontalityReport check_horizontality(const Manifold& M, const Hypersurface* S,
                                        const std::vector<CurveSample>& samples,
                                        HorizontalityMode mode = HorizontalityMode::General);

/// max |y/x - (y/x)(0)| along a curve in {t = 0} of H^1. Throws NearOrigin when |x| < 1e-6
/// at some sample.
double h1_trap_invariant(const std::vector<CurveSample>& samples);

}  // namespace subriemann
