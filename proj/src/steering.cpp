#include "subriemann/steering.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>

namespace subriemann {

ControlSystem::ControlSystem(std::shared_ptr<const Manifold> manifold) : M_(std::move(manifold)) {
  if (!M_) throw Error("control system: null manifold");
}

ControlSystem::ControlSystem(std::shared_ptr<const Hypersurface> surface)
    : M_(surface ? surface->manifold_ptr() : nullptr), S_(std::move(surface)) {
  if (!S_) throw Error("control system: null surface");
  if (M_->rank() < 2) throw Error("control system: surface mode needs horizontal rank >= 2");
}

std::size_t ControlSystem::frame_choice(const Vec& x) const {
  if (!S_) return 0;
  return S_->horizontal_tangent_frame(x).dropped;
}

Mat ControlSystem::fields(const Vec& x, std::size_t choice) const {
  const auto m = static_cast<Eigen::Index>(M_->dim());
  const auto c = static_cast<Eigen::Index>(controls());
  const Mat F = M_->frame_matrix(x);
  if (!S_) return F.leftCols(c);
  std::vector<std::vector<double>> tau;
  TangentFrameSection(*S_, choice, 0).frame<double>(as_span(x), tau);
  Mat out(m, c);
  const auto k = static_cast<Eigen::Index>(M_->rank());
  for (Eigen::Index a = 0; a < c; ++a)
    out.col(a) = F.leftCols(k) * Eigen::Map<const Vec>(tau[static_cast<std::size_t>(a)].data(), k);
  return out;
}

Vec ControlSystem::bracket(std::size_t a, std::size_t b, std::size_t choice, const Vec& x) const {
  const std::size_t m = M_->dim();
  if (a >= controls() || b >= controls()) throw Error("bracket: control index out of range");
  if (!S_) {
    auto fa = [&](auto xs, auto o) { M_->eval_field(a, xs, o); };
    auto fb = [&](auto xs, auto o) { M_->eval_field(b, xs, o); };
    return bracket_at(fa, fb, m, x);
  }
  const TangentFrameSection ta(*S_, choice, a), tb(*S_, choice, b);
  return bracket_at(SectionField{M_.get(), &ta}, SectionField{M_.get(), &tb}, m, x);
}

namespace {

void finish_diagnostics(const ControlSystem& sys, HorizontalCurve& c) {
  c.length = curve_length(c.samples);
  if (const Hypersurface* S = sys.surface()) {
    double worst = 0.0;
    for (const auto& s : c.samples) worst = std::max(worst, std::fabs(S->value(s.x)));
    c.diagnostics.max_phi_drift = worst;
  }
  c.diagnostics.max_horizontality_residual =
      check_horizontality(sys.manifold(), sys.surface(), c.samples).max;
}

}  // namespace

HorizontalCurve integrate_control(const ControlSystem& sys, const Vec& p0,
                                  const std::vector<ControlSegment>& schedule,
                                  const SteerParams& params) {
  if (!(params.dt > 0.0)) throw Error("integrate_control: dt must be positive");
  const Manifold& M = sys.manifold();
  const Hypersurface* S = sys.surface();
  M.require_in_domain(p0);

  HorizontalCurve c;
  c.segments = schedule;
  Vec x = p0;
  double t = 0.0;
  c.samples.push_back({0.0, x, schedule.empty() ? 0.0 : schedule.front().controls.norm()});

  for (std::size_t s = 0; s < schedule.size(); ++s) {
    const ControlSegment& seg = schedule[s];
    if (static_cast<std::size_t>(seg.controls.size()) != sys.controls())
      throw Error("integrate_control: control vector has the wrong length");
    if (!(seg.duration >= 0.0)) throw Error("integrate_control: negative segment duration");
    const double speed = seg.controls.norm();
    if (s > 0) c.samples.push_back({t, x, speed});
    if (seg.duration == 0.0 || speed == 0.0) {
      t += seg.duration;
      if (seg.duration > 0.0) c.samples.push_back({t, x, speed});
      continue;
    }
    // at least four steps so every segment carries a full finite-difference stencil
    const auto n = std::max<std::size_t>(
        4, static_cast<std::size_t>(std::ceil(seg.duration / params.dt - 1e-9)));
    const double h = seg.duration / static_cast<double>(n);
    auto vel = [&](const Vec& y) {
      try {
        return Vec(sys.fields(y, seg.frame) * seg.controls);
      } catch (const CharacteristicPoint& e) {
        throw CharacteristicEncounter(e.what(), t);
      } catch (const ExtensionFailure& e) {
        throw CharacteristicEncounter(e.what(), t);
      }
    };
    for (std::size_t i = 0; i < n; ++i) {
      const Vec k1 = vel(x);
      const Vec k2 = vel(x + 0.5 * h * k1);
      const Vec k3 = vel(x + 0.5 * h * k2);
      const Vec k4 = vel(x + h * k3);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t = c.samples.back().t + h;
      if (!x.allFinite() || !M.in_domain(x)) throw StepFailure("curve left the domain", t);
      if (S) {
        try {
          x = S->project_to_surface(x);
        } catch (const Error& e) {
          throw StepFailure(std::string("projection failed: ") + e.what(), t);
        }
        if (S->horizontal_normal(x).ratio < params.char_tol)
          throw CharacteristicEncounter("curve reached a characteristic point", t);
      }
      c.samples.push_back({t, x, speed});
    }
  }

  finish_diagnostics(sys, c);
  auto worst_time = [&](auto&& residual) {
    double best = -1.0, when = 0.0;
    for (std::size_t i = 0; i < c.samples.size(); ++i) {
      const double r = residual(i);
      if (r > best) best = r, when = c.samples[i].t;
    }
    return when;
  };
  if (c.diagnostics.max_phi_drift > 1e-6)
    throw StepFailure("surface drift above 1e-6",
                      worst_time([&](std::size_t i) { return std::fabs(S->value(c.samples[i].x)); }));
  if (c.diagnostics.max_horizontality_residual > 1e-6) {
    const auto rep = check_horizontality(M, S, c.samples);
    throw StepFailure("horizontality residual above 1e-6",
                      worst_time([&](std::size_t i) { return rep.residuals[i]; }));
  }
  return c;
}

HorizontalCurve commutator_maneuver(const ControlSystem& sys, const Vec& p, std::size_t a,
                                    std::size_t b, double eps, const SteerParams& params,
                                    std::optional<std::size_t> choice) {
  const std::size_t nc = sys.controls();
  if (a >= nc || b >= nc || a == b) throw Error("commutator_maneuver: need two distinct controls");
  if (!(eps >= 0.0)) throw Error("commutator_maneuver: eps must be nonnegative");
  const std::size_t ch = choice ? *choice : sys.frame_choice(p);
  auto unit = [&](std::size_t i, double sign) {
    Vec u = Vec::Zero(static_cast<Eigen::Index>(nc));
    u[static_cast<Eigen::Index>(i)] = sign;
    return u;
  };
  const std::vector<ControlSegment> schedule = {
      {unit(a, 1.0), eps, ch}, {unit(b, 1.0), eps, ch}, {unit(a, -1.0), eps, ch}, {unit(b, -1.0), eps, ch}};
  return integrate_control(sys, p, schedule, params);
}

// ---------------------------------------------------------------------------

namespace {

// Lagrange derivative at nodes[at] using all given nodes.
double lagrange_derivative_weight(const std::vector<double>& nodes, std::size_t at, std::size_t j) {
  const std::size_t n = nodes.size();
  const double t = nodes[at];
  double sum = 0.0;
  for (std::size_t mm = 0; mm < n; ++mm) {
    if (mm == j) continue;
    double prod = 1.0 / (nodes[j] - nodes[mm]);
    for (std::size_t l = 0; l < n; ++l) {
      if (l == j || l == mm) continue;
      prod *= (t - nodes[l]) / (nodes[j] - nodes[l]);
    }
    sum += prod;
  }
  return sum;
}

bool equal_spacing(double a, double b) {
  return std::fabs(a - b) <= 1e-9 * std::max(std::fabs(a), std::fabs(b));
}

}  // namespace

HorizontalityReport check_horizontality(const Manifold& M, const Hypersurface* S,
                                        const std::vector<CurveSample>& samples,
                                        HorizontalityMode mode) {
  const std::size_t N = samples.size();
  HorizontalityReport rep;
  rep.residuals.assign(N, 0.0);
  if (N < 2) return rep;
  const std::size_t m = M.dim();
  const auto k = static_cast<Eigen::Index>(M.rank());

  auto residual = [&](const Vec& x, const Vec& v) {
    if (mode == HorizontalityMode::Heisenberg) {
      const std::size_t n = (m - 1) / 2;
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += x[n + i] * v[i] - x[i] * v[n + i];
      return std::fabs(2.0 * v[m - 1] - 4.0 * s);
    }
    const Vec c = M.frame_components(v, x);
    double r = c.tail(c.size() - k).norm();
    if (S) {
      const HorizontalNormal n = S->horizontal_normal(x);
      if (n.unit.size() > 0) r = std::max(r, std::fabs(c.head(k).dot(n.unit)));
    }
    return r;
  };

  std::size_t i = 0;
  while (i + 1 < N) {
    const double h = samples[i + 1].t - samples[i].t;
    if (h <= 0.0) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j + 1 < N && equal_spacing(samples[j + 1].t - samples[j].t, h)) ++j;
    const std::size_t len = j - i + 1;
    const std::size_t w = std::min<std::size_t>(5, len);
    for (std::size_t s = i; s <= j; ++s) {
      // window of w nodes containing s, centred where possible
      std::size_t lo = s >= i + w / 2 ? s - w / 2 : i;
      if (lo + w - 1 > j) lo = j + 1 - w;
      std::vector<double> nodes(w);
      for (std::size_t q = 0; q < w; ++q) nodes[q] = (samples[lo + q].t - samples[s].t) / h;
      Vec v = Vec::Zero(static_cast<Eigen::Index>(m));
      for (std::size_t q = 0; q < w; ++q)
        v += lagrange_derivative_weight(nodes, s - lo, q) * samples[lo + q].x;
      v /= h;
      rep.residuals[s] = std::max(rep.residuals[s], residual(samples[s].x, v));
    }
    i = j;
  }
  for (double r : rep.residuals) rep.max = std::max(rep.max, r);
  return rep;
}

double h1_trap_invariant(const std::vector<CurveSample>& samples) {
  if (samples.empty()) return 0.0;
  for (const auto& s : samples) {
    if (s.x.size() != 3) throw Error("h1_trap_invariant: curve must live in H^1");
    if (std::fabs(s.x[0]) < 1e-6) throw NearOrigin("h1_trap_invariant: |x| < 1e-6 along the curve");
  }
  const double r0 = samples.front().x[1] / samples.front().x[0];
  double dev = 0.0;
  for (const auto& s : samples) dev = std::max(dev, std::fabs(s.x[1] / s.x[0] - r0));
  return dev;
}

// ---------------------------------------------------------------------------

namespace {

// Residual of q - y after removing its component in the span of the controlled fields.
double off_span_distance(const ControlSystem& sys, const Vec& y, const Vec& q) {
  const Mat F = sys.fields(y, sys.frame_choice(y));
  const Vec r = q - y;
  const Vec u = F.colPivHouseholderQr().solve(r);
  return (r - F * u).norm();
}

void append(HorizontalCurve& total, const HorizontalCurve& piece) {
  const double t0 = total.samples.empty() ? 0.0 : total.samples.back().t;
  for (const auto& s : piece.samples) total.samples.push_back({t0 + s.t, s.x, s.speed});
  total.segments.insert(total.segments.end(), piece.segments.begin(), piece.segments.end());
  total.diagnostics.max_phi_drift = std::max(total.diagnostics.max_phi_drift, piece.diagnostics.max_phi_drift);
  total.diagnostics.max_horizontality_residual =
      std::max(total.diagnostics.max_horizontality_residual, piece.diagnostics.max_horizontality_residual);
}

// L_t = {t = 0} in H^1: every horizontal curve keeps y/x constant.
bool is_h1_plane(const ControlSystem& sys) {
  const Hypersurface* S = sys.surface();
  const Manifold& M = sys.manifold();
  if (!S || M.dim() != 3 || M.rank() != 2) return false;
  const double probes[][3] = {{0.3, -0.7, 0.0}, {1.1, 0.4, 0.0}, {-0.5, 0.9, 0.0}};
  for (const auto& pr : probes) {
    Vec p(3);
    p << pr[0], pr[1], pr[2];
    if (!M.in_domain(p) || std::fabs(S->value(p)) > 1e-12) return false;
    Mat expected(3, 3);
    expected << 1, 0, 0, 0, 1, 0, 2 * pr[1], -2 * pr[0], 1;
    if ((M.frame_matrix(p).leftCols(2) - expected.leftCols(2)).norm() > 1e-12) return false;
    Vec off = p;
    off[2] = 0.5;
    if (std::fabs(S->value(off)) < 1e-12) return false;
  }
  return true;
}

}  // namespace

SteerResult steer(const ControlSystem& sys, const Vec& p, const Vec& q, const SteerParams& params) {
  SteerResult R;
  R.status = "inconclusive";
  const Hypersurface* S = sys.surface();
  const Manifold& M = sys.manifold();
  auto fail = [&](std::string reason) {
    R.success = false;
    R.reason = std::move(reason);
    R.distance = R.curve.samples.empty() ? (q - p).norm() : (q - R.curve.end()).norm();
    R.curve.diagnostics.endpoint_error = R.distance;
    R.curve.length = curve_length(R.curve.samples);
    if (is_h1_plane(sys)) {
      const bool cross_ray = std::fabs(p[0]) > 1e-6 && std::fabs(q[0]) > 1e-6 &&
                             std::fabs(p[1] / p[0] - q[1] / q[0]) > 1e-8;
      double drift = 0.0;
      try {
        drift = h1_trap_invariant(R.curve.samples);
      } catch (const NearOrigin&) {
        drift = 1.0;
      }
      if (cross_ray && drift < 1e-8) {
        R.status = "obstructed";
        R.witness = "conserved ratio y/x";
        R.reason += "; y(s) = C x(s) along every horizontal curve in this plane, so the ray of the target is unreachable";
      }
    }
    return R;
  };

  try {
    M.require_in_domain(p);
    M.require_in_domain(q);
    if (S) {
      S->is_characteristic(p, params.char_tol);
      S->is_characteristic(q, params.char_tol);
    }
  } catch (const Error& e) {
    return fail(std::string("invalid endpoints: ") + e.what());
  }

  std::mt19937_64 rng(params.seed);
  Vec x = p;
  R.curve.samples.push_back({0.0, x, 0.0});
  double dist = (q - x).norm();
  R.history.push_back(dist);
  const std::size_t nc = sys.controls();

  auto accept = [&](const HorizontalCurve& piece) {
    append(R.curve, piece);
    x = piece.end();
    dist = (q - x).norm();
    R.history.push_back(dist);
  };

  for (int iter = 0; iter < params.max_iterations; ++iter) {
    if (dist <= params.tol_endpoint) break;
    if (R.curve.samples.back().t > params.horizon) return fail("time horizon exhausted");

    std::size_t choice = 0;
    Mat F;
    try {
      choice = sys.frame_choice(x);
      F = sys.fields(x, choice);
    } catch (const Error& e) {
      return fail(std::string("characteristic point encountered: ") + e.what());
    }
    const Vec r = q - x;
    const Vec u = F.colPivHouseholderQr().solve(r);
    const double along = (F * u).norm();

    // greedy descent inside the horizontal tangent span
    bool moved = false;
    if (along >= params.stall_threshold * dist && u.norm() > 0.0) {
      double dur = std::min(u.norm(), params.max_segment);
      const Vec ctrl = u / u.norm();
      for (int tries = 0; tries < 8 && !moved; ++tries, dur *= 0.5) {
        try {
          const HorizontalCurve piece = integrate_control(sys, x, {{ctrl, dur, choice}}, params);
          if ((q - piece.end()).norm() < dist) {
            accept(piece);
            moved = true;
          }
        } catch (const Error&) {
        }
      }
      if (moved) continue;
    }

    // stalled: commutator maneuvers over all control pairs
    if (nc < 2) return fail("stalled: no bracket directions available (single control field)");
    double base = 0.0;
    try {
      base = off_span_distance(sys, x, q);
    } catch (const Error& e) {
      return fail(std::string("characteristic point encountered: ") + e.what());
    }
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t a = 0; a < nc; ++a)
      for (std::size_t b = a + 1; b < nc; ++b) pairs.emplace_back(a, b);
    std::shuffle(pairs.begin(), pairs.end(), rng);

    const Mat Fp = F.completeOrthogonalDecomposition().pseudoInverse();
    auto off_span = [&](const Vec& v) { return Vec(v - F * (Fp * v)); };
    const Vec r_off = off_span(r);

    HorizontalCurve best;
    double best_off = base;
    for (const auto& [a, b] : pairs) {
      Vec B;
      try {
        B = off_span(sys.bracket(a, b, choice, x));
      } catch (const Error&) {
        continue;
      }
      const double bn2 = B.squaredNorm();
      if (bn2 < 1e-24) continue;
      const double lambda = r_off.dot(B) / bn2;  // wanted eps^2 with sign
      const bool flip = lambda < 0.0;
      double eps = std::min(std::sqrt(std::fabs(lambda)), params.maneuver_epsilon);
      for (; eps >= 1e-4; eps *= 0.5) {
        try {
          const HorizontalCurve piece = flip ? commutator_maneuver(sys, x, b, a, eps, params, choice)
                                             : commutator_maneuver(sys, x, a, b, eps, params, choice);
          const double off = off_span_distance(sys, piece.end(), q);
          if (off < best_off) {
            best_off = off;
            best = piece;
            break;
          }
        } catch (const Error&) {
        }
      }
    }
    if (best.samples.empty())
      return fail("stalled: neither descent nor any commutator maneuver reduces the distance");
    accept(best);
    ++R.maneuvers;
  }

  if (dist > params.tol_endpoint) return fail("iteration budget exhausted");
  R.success = true;
  R.status = "success";
  R.distance = dist;
  R.curve.length = curve_length(R.curve.samples);
  R.curve.diagnostics.endpoint_error = dist;
  return R;
}

}  // namespace subriemann
