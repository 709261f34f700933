#include "subriemann/hypersurface.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace subriemann {

std::size_t GridSpec::size() const {
  if (counts.size() != box.size()) throw Error("grid: one count per box interval");
  std::size_t n = 1;
  for (auto c : counts) n *= c;
  return n;
}

Vec GridSpec::seed(std::size_t index) const {
  Vec p(static_cast<Eigen::Index>(box.size()));
  for (std::size_t a = 0; a < box.size(); ++a) {
    const std::size_t c = counts[a];
    const std::size_t i = index % c;
    index /= c;
    // cell centres, so the box faces themselves are never seeds
    p[static_cast<Eigen::Index>(a)] =
        box[a].lo + (box[a].hi - box[a].lo) * (static_cast<double>(i) + 0.5) / static_cast<double>(c);
  }
  return p;
}

Hypersurface::Hypersurface(std::shared_ptr<const Manifold> manifold, Expr phi)
    : M_(std::move(manifold)), phi_(std::move(phi)), D_(M_) {
  if (phi_.arity() > M_->dim())
    throw ConfigError("surface function references a coordinate the manifold does not have");
}

Vec Hypersurface::gradient(const Vec& p) const {
  const auto m = static_cast<Eigen::Index>(M_->dim());
  Vec g(m);
  Vec e = Vec::Zero(m);
  for (Eigen::Index a = 0; a < m; ++a) {
    e.setZero();
    e[a] = 1.0;
    g[a] = phi_.directional_derivative(as_span(p), as_span(e));
  }
  return g;
}

HorizontalNormal Hypersurface::horizontal_normal(const Vec& p) const {
  const std::size_t m = M_->dim();
  const auto k = static_cast<Eigen::Index>(M_->rank());
  HorizontalNormal n;
  n.frame_gradient.resize(static_cast<Eigen::Index>(m));
  frame_derivatives<double>(as_span(p), std::span<double>(n.frame_gradient.data(), m));
  const double full = n.frame_gradient.norm();
  if (!(full > 0.0)) throw ZeroGradient("surface function has zero gradient at the point");
  n.normal = n.frame_gradient.head(k) / full;
  n.ratio = n.normal.norm();
  if (n.ratio > 0.0) n.unit = n.normal / n.ratio;
  return n;
}

bool Hypersurface::is_characteristic(const Vec& p, double tol, double surface_tol) const {
  const double g = gradient(p).norm();
  const double f = value(p);
  if (g == 0.0 ? f != 0.0 : std::fabs(f) / g > surface_tol)
    throw NotOnSurface("point is not on the surface (|phi| = " + std::to_string(std::fabs(f)) + ")");
  return horizontal_normal(p).ratio <= tol;
}

Vec Hypersurface::project_to_surface(const Vec& p, int max_iter) const {
  Vec x = p;
  for (int it = 0; it < max_iter; ++it) {
    const double f = value(x);
    if (std::fabs(f) < 1e-12) return x;
    const Vec g = gradient(x);
    const double g2 = g.squaredNorm();
    if (!(g2 > 0.0)) throw ZeroGradient("projection hit a point where grad phi = 0");
    Vec step = -(f / g2) * g;
    // keep single steps within the scale of the point to avoid wild jumps near critical points
    const double cap = std::max(1.0, x.norm());
    if (step.norm() > cap) step *= cap / step.norm();
    x += step;
    if (!x.allFinite()) break;
  }
  if (x.allFinite() && std::fabs(value(x)) < 1e-12) return x;
  throw NewtonDivergence("projection to the surface did not converge in " +
                         std::to_string(max_iter) + " iterations");
}

namespace {

// Horizontal gradient residual r = (X_i phi)_{i<k} and its chart Jacobian.
void residual_and_jacobian(const Hypersurface& S, const Vec& x, Vec& r, Mat& J) {
  const std::size_t m = S.manifold().dim();
  const std::size_t k = S.manifold().rank();
  r.resize(static_cast<Eigen::Index>(k));
  J.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m));
  std::vector<Real1> xd(m), out(k);
  for (std::size_t b = 0; b < m; ++b) {
    for (std::size_t c = 0; c < m; ++c) xd[c] = Real1(x[static_cast<Eigen::Index>(c)], c == b ? 1.0 : 0.0);
    S.frame_derivatives<Real1>(std::span<const Real1>(xd), std::span<Real1>(out));
    for (std::size_t i = 0; i < k; ++i) {
      r[static_cast<Eigen::Index>(i)] = out[i].v;
      J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b)) = out[i].d;
    }
  }
}

}  // namespace

std::vector<CharacteristicCandidate> Hypersurface::find_characteristic_points(const GridSpec& grid,
                                                                              double tol) const {
  const std::size_t m = M_->dim();
  if (grid.box.size() != m) throw Error("grid box must have one interval per coordinate");
  const std::size_t n = grid.size();
  std::vector<CharacteristicCandidate> found;
  for (std::size_t s = 0; s < n; ++s) {
    const Vec seed = grid.seed(s);
    if (!M_->in_domain(seed)) continue;
    try {
      Vec x = project_to_surface(seed);
      Vec r;
      Mat J;
      for (int it = 0; it < 40; ++it) {
        residual_and_jacobian(*this, x, r, J);
        const Vec g = gradient(x);
        const Vec nrm = g / g.norm();
        // Gauss-Newton step restricted to the tangent plane of S
        const Mat P = Mat::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m)) -
                      nrm * nrm.transpose();
        const Mat JP = J * P;
        Vec step = P * JP.completeOrthogonalDecomposition().solve(-r);
        const double cap = 0.5 * std::max(1.0, x.norm());
        if (step.norm() > cap) step *= cap / step.norm();
        x = project_to_surface(x + step);
        if (!M_->in_domain(x)) break;
        if (step.norm() < 1e-14 * std::max(1.0, x.norm())) break;
      }
      if (!M_->in_domain(x)) continue;
      const double ratio = horizontal_normal(x).ratio;
      if (!(ratio <= tol)) continue;
      auto hit = std::find_if(found.begin(), found.end(), [&](const CharacteristicCandidate& c) {
        return (c.point - x).norm() < 1e-3;
      });
      if (hit == found.end()) {
        found.push_back({x, ratio, ratio * ratio, 1});
      } else {
        ++hit->members;
        if (ratio < hit->ratio) {
          hit->point = x;
          hit->ratio = ratio;
          hit->objective = ratio * ratio;
        }
      }
    } catch (const Error&) {
      // seeds whose projection or iteration breaks down carry no information
    }
  }
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
    return std::lexicographical_compare(a.point.begin(), a.point.end(), b.point.begin(), b.point.end());
  });
  return found;
}

HorizontalTangentFrame Hypersurface::horizontal_tangent_frame(const Vec& p, double tol) const {
  const HorizontalNormal n = horizontal_normal(p);
  if (!(n.ratio > tol))
    throw CharacteristicPoint("characteristic point: horizontal normal vanishes (ratio " +
                              std::to_string(n.ratio) + ")");
  HorizontalTangentFrame f;
  f.point = p;
  f.normal = n.unit;
  f.dropped = 0;
  for (Eigen::Index i = 1; i < n.unit.size(); ++i)
    if (std::fabs(n.unit[i]) > std::fabs(n.unit[static_cast<Eigen::Index>(f.dropped)])) f.dropped = static_cast<std::size_t>(i);
  std::vector<std::vector<double>> tau;
  TangentFrameSection(*this, f.dropped, 0).frame<double>(as_span(p), tau);
  for (const auto& t : tau) f.tangent.push_back(Eigen::Map<const Vec>(t.data(), static_cast<Eigen::Index>(t.size())));
  return f;
}

CurvatureReport Hypersurface::second_fundamental_form(const Vec& p) const {
  const HorizontalTangentFrame f = horizontal_tangent_frame(p);
  const std::size_t q = f.tangent.size();
  const GammaTensor G = D_.gamma(p);
  CurvatureReport rep;
  rep.h.resize(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(q));
  for (std::size_t b = 0; b < q; ++b) {
    const TangentFrameSection tb(*this, f.dropped, b);
    for (std::size_t a = 0; a < q; ++a)
      rep.h(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          -D_.covariant_derivative(f.tangent[a], tb, p, G).dot(f.normal);
  }
  rep.h_sym = 0.5 * (rep.h + rep.h.transpose());
  rep.asymmetry = (rep.h - rep.h.transpose()).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Mat> eig(rep.h_sym);
  rep.kappa = eig.eigenvalues();
  rep.mean = rep.h.trace();
  rep.gaussian = rep.kappa.prod();
  return rep;
}

double Hypersurface::mean_curvature_divergence_form(const Vec& p) const {
  if (!M_->is_carnot())
    throw NotCarnot("divergence form of the mean curvature needs a Carnot frame");
  horizontal_tangent_frame(p);  // characteristic check
  const UnitNormalSection V(*this);
  const std::size_t k = M_->rank();
  double H = 0.0;
  Vec e = Vec::Zero(static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) {
    e.setZero();
    e[static_cast<Eigen::Index>(i)] = 1.0;
    H += V.derivative(p, M_->chart_vector(e, p))[static_cast<Eigen::Index>(i)];
  }
  return H;
}

double Hypersurface::tangent_divergence(const Section& Y, const Vec& p) const {
  const HorizontalTangentFrame f = horizontal_tangent_frame(p);
  const Vec y = Y(p);
  if (std::fabs(y.dot(f.normal)) > 1e-8 * std::max(1.0, y.norm()))
    throw NotTangent("section is not tangent to the surface at the point");
  const GammaTensor G = D_.gamma(p);
  double div = 0.0;
  for (const Vec& t : f.tangent) div += D_.covariant_derivative(t, Y, p, G).dot(t);
  return div;
}

double Hypersurface::surface_divergence(const Section& Y, const Vec& p) const {
  const std::size_t m = M_->dim();
  const std::size_t k = M_->rank();
  const auto mi = static_cast<Eigen::Index>(m);
  const HorizontalNormal n = horizontal_normal(p);
  const Vec nu = n.frame_gradient / n.frame_gradient.norm();
  const StructureTable L = D_.levi_civita_table(p);
  const Vec y = Y(p);
  // Nab(c, a) = g(nabla_{X_a} Y, X_c)
  Mat Nab = Mat::Zero(mi, mi);
  Vec e = Vec::Zero(mi);
  for (std::size_t a = 0; a < m; ++a) {
    e.setZero();
    e[static_cast<Eigen::Index>(a)] = 1.0;
    const Vec dy = Y.derivative(p, M_->chart_vector(e, p));
    for (std::size_t c = 0; c < k; ++c) Nab(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(a)) = dy[static_cast<Eigen::Index>(c)];
    for (std::size_t c = 0; c < m; ++c)
      for (std::size_t b = 0; b < k; ++b)
        Nab(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(a)) += y[static_cast<Eigen::Index>(b)] * L(a, b, c);
  }
  const Mat P = Mat::Identity(mi, mi) - nu * nu.transpose();
  return (P * Nab).trace();
}

TangentCombination::TangentCombination(const Hypersurface& S, std::size_t dropped,
                                       std::vector<Expr> coefficients)
    : S_(&S), frame_(S, dropped, 0), coeffs_(std::move(coefficients)) {
  if (coeffs_.size() + 1 != S.manifold().rank())
    throw Error("tangent combination needs one coefficient per tangent frame vector");
}

}  // namespace subriemann
