#include "subriemann/connection.hpp"

#include <algorithm>
#include <cmath>

namespace subriemann {

double GammaTensor::max_abs() const {
  double r = 0.0;
  for (double v : values) r = std::max(r, std::fabs(v));
  return r;
}

double AxiomResiduals::max() const {
  return std::max({compatibility, symmetry, leibniz, linearity});
}

namespace {

// f * V for a scalar expression f.
class ScaledSection : public SectionBase<ScaledSection> {
 public:
  ScaledSection(const Expr& f, const Section& V) : f_(f), V_(V) {}
  std::size_t rank() const override { return V_.rank(); }

  template <class T>
  void components(std::span<const T> x, std::span<T> out) const {
    V_.eval(x, out);
    const T f = f_.eval<T>(x);
    for (auto& o : out) o = f * o;
  }

 private:
  const Expr& f_;
  const Section& V_;
};

// 2 + cos(x1 + ... + xm): smooth, positive and with nonzero derivative almost everywhere.
Expr test_function(std::size_t m) {
  Expr s(0.0);
  for (std::size_t a = 0; a < m; ++a) s = s + Expr::variable(a);
  return Expr(2.0) + cos(s);
}

}  // namespace

Connection::Connection(std::shared_ptr<const Manifold> manifold) : M_(std::move(manifold)) {
  if (!M_) throw Error("connection: null manifold");
}

StructureTable Connection::structure(const Vec& p) const {
  const Manifold& M = *M_;
  M.require_in_domain(p);
  const std::size_t m = M.dim();
  const Mat F = M.frame_matrix(p);
  StructureTable C;
  C.m = m;
  C.values.assign(m * m * m, 0.0);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b) {
      auto fa = [&](auto x, auto out) { M.eval_field(a, x, out); };
      auto fb = [&](auto x, auto out) { M.eval_field(b, x, out); };
      const Vec c = Manifold::frame_components(bracket_at(fa, fb, m, p), F);
      for (std::size_t e = 0; e < m; ++e) {
        C.values[(a * m + b) * m + e] = c[e];
        C.values[(b * m + a) * m + e] = -c[e];
      }
    }
  return C;
}

GammaTensor Connection::gamma(const Vec& p) const {
  const StructureTable C = structure(p);
  const std::size_t k = M_->rank();
  GammaTensor G;
  G.point = p;
  G.k = k;
  G.values.assign(k * k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t l = 0; l < k; ++l)
        G(i, j, l) = 0.5 * (C(j, i, l) + C(l, j, i) - C(i, l, j));
  G(0, 0, 0) += gamma_perturbation_;
  return G;
}

Vec Connection::covariant_derivative(const Vec& u, const Section& V, const Vec& p,
                                     const GammaTensor& G) const {
  const std::size_t k = M_->rank();
  const Vec dir = M_->chart_vector(u, p);
  Vec out = V.derivative(p, dir);
  const Vec v = V(p);
  for (std::size_t l = 0; l < k; ++l)
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) out[l] += u[j] * v[i] * G(i, j, l);
  return out;
}

Vec Connection::covariant_derivative(const Section& U, const Section& V, const Vec& p) const {
  return covariant_derivative(U(p), V, p, gamma(p));
}

double Connection::horizontal_divergence(const Section& V, const Vec& p) const {
  const std::size_t k = M_->rank();
  const GammaTensor G = gamma(p);
  double div = 0.0;
  Vec e = Vec::Zero(static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) {
    e.setZero();
    e[i] = 1.0;
    div += covariant_derivative(e, V, p, G)[i];
  }
  return div;
}

StructureTable Connection::levi_civita_table(const Vec& p) const {
  const StructureTable C = structure(p);
  const std::size_t m = C.m;
  StructureTable L;
  L.m = m;
  L.values.assign(m * m * m, 0.0);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      for (std::size_t c = 0; c < m; ++c)
        L.values[(a * m + b) * m + c] = 0.5 * (C(a, b, c) + C(c, a, b) - C(b, c, a));
  return L;
}

double Connection::levi_civita(std::size_t a, std::size_t b, std::size_t c, const Vec& p) const {
  const std::size_t m = M_->dim();
  if (a >= m || b >= m || c >= m) throw Error("levi_civita: frame index out of range");
  return levi_civita_table(p)(a, b, c);
}

Vec Connection::riemannian_derivative(const Section& U, const Section& V, const Vec& p) const {
  const std::size_t m = M_->dim();
  const std::size_t k = M_->rank();
  const StructureTable L = levi_civita_table(p);
  const Vec u = U(p);
  const Vec v = V(p);
  Vec out = Vec::Zero(static_cast<Eigen::Index>(m));
  out.head(static_cast<Eigen::Index>(k)) = V.derivative(p, M_->chart_vector(u, p));
  for (std::size_t c = 0; c < m; ++c)
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) out[c] += u[a] * v[b] * L(a, b, c);
  return out;
}

double Connection::riemannian_divergence(const Section& V, const Vec& p) const {
  const std::size_t m = M_->dim();
  const std::size_t k = M_->rank();
  const StructureTable L = levi_civita_table(p);
  const Vec v = V(p);
  double div = 0.0;
  Vec e = Vec::Zero(static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) {
    e.setZero();
    e[i] = 1.0;
    div += V.derivative(p, M_->chart_vector(e, p))[i];
  }
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < k; ++b) div += v[b] * L(a, b, a);
  return div;
}

AxiomResiduals Connection::verify_axioms(const Section& U, const Section& V, const Section& W,
                                         const Vec& p) const {
  const Manifold& M = *M_;
  const std::size_t m = M.dim();
  const std::size_t k = M.rank();
  if (U.rank() != k || V.rank() != k || W.rank() != k)
    throw Error("verify_axioms: sections must have one component per horizontal field");
  const GammaTensor G = gamma(p);
  const Vec u = U(p), v = V(p), w = W(p);
  const Vec dir = M.chart_vector(u, p);

  AxiomResiduals r;

  // U g_c(V, W) = g_c(D_U V, W) + g_c(V, D_U W)
  const Vec DuV = covariant_derivative(u, V, p, G);
  const Vec DuW = covariant_derivative(u, W, p, G);
  const double lhs = V.derivative(p, dir).dot(w) + v.dot(W.derivative(p, dir));
  r.compatibility = std::fabs(lhs - DuV.dot(w) - v.dot(DuW));

  // D_U V - D_V U = [U, V]^H
  const Vec DvU = covariant_derivative(v, U, p, G);
  SectionField fu{&M, &U}, fv{&M, &V};
  const Vec br = Manifold::frame_components(bracket_at(fu, fv, m, p), M.frame_matrix(p));
  r.symmetry = (DuV - DvU - br.head(static_cast<Eigen::Index>(k))).norm();

  const Expr f = test_function(m);
  const double fp = f(as_span(p));
  const double Uf = f.directional_derivative(as_span(p), as_span(dir));

  // D_U(fV) = (Uf) V + f D_U V
  ScaledSection fV(f, V);
  r.leibniz = (covariant_derivative(u, fV, p, G) - Uf * v - fp * DuV).norm();

  // D_{fU} V = f D_U V
  r.linearity = (covariant_derivative(Vec(fp * u), V, p, G) - fp * DuV).norm();
  return r;
}

double Connection::verify_projection(const Section& U, const Section& V, const Vec& p) const {
  const auto k = static_cast<Eigen::Index>(M_->rank());
  const Vec D = covariant_derivative(U, V, p);
  const Vec R = riemannian_derivative(U, V, p);
  return (D - R.head(k)).norm();
}

HorizontalCurve Connection::geodesic(const Vec& p0, const Vec& c0, double duration,
                                     double dt) const {
  const Manifold& M = *M_;
  const std::size_t m = M.dim();
  const std::size_t k = M.rank();
  if (!(dt > 0.0)) throw Error("geodesic: step must be positive");
  if (!(duration >= 0.0)) throw Error("geodesic: duration must be nonnegative");
  if (static_cast<std::size_t>(c0.size()) != k)
    throw Error("geodesic: initial velocity needs one component per horizontal field");
  M.require_in_domain(p0);

  const auto mi = static_cast<Eigen::Index>(m);
  const auto ki = static_cast<Eigen::Index>(k);
  double t = 0.0;

  auto rhs = [&](const Vec& s) {
    const Vec x = s.head(mi);
    const Vec c = s.tail(ki);
    if (!M.in_domain(x) || !x.allFinite()) throw StepFailure("geodesic left the domain", t);
    if (!(M.frame_condition(x) <= 1e12)) throw StepFailure("frame degenerates along geodesic", t);
    const GammaTensor G = gamma(x);
    Vec ds(mi + ki);
    ds.head(mi) = M.chart_vector(c, x);
    for (std::size_t l = 0; l < k; ++l) {
      double acc = 0.0;
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) acc += c[j] * c[i] * G(i, j, l);
      ds[mi + l] = -acc;
    }
    return ds;
  };

  HorizontalCurve curve;
  curve.segments.push_back({c0, duration});
  const std::size_t n = duration == 0.0 ? 0 : static_cast<std::size_t>(std::ceil(duration / dt - 1e-9));
  const double h = n == 0 ? 0.0 : duration / static_cast<double>(n);
  Vec s(mi + ki);
  s << p0, c0;
  const double e0 = c0.squaredNorm();
  curve.samples.push_back({0.0, p0, c0.norm()});
  for (std::size_t step = 0; step < n; ++step) {
    const Vec k1 = rhs(s);
    const Vec k2 = rhs(s + 0.5 * h * k1);
    const Vec k3 = rhs(s + 0.5 * h * k2);
    const Vec k4 = rhs(s + h * k3);
    s += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t = static_cast<double>(step + 1) * h;
    if (!s.allFinite()) throw StepFailure("geodesic state is not finite", t);
    const Vec c = s.tail(ki);
    curve.samples.push_back({t, s.head(mi), c.norm()});
    curve.diagnostics.energy_drift =
        std::max(curve.diagnostics.energy_drift, std::fabs(c.squaredNorm() - e0));
  }
  curve.length = curve_length(curve.samples);
  return curve;
}

}  // namespace subriemann
