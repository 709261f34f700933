#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <vector>

#include "subriemann/connection.hpp"
#include "subriemann/manifold.hpp"
#include "subriemann/section.hpp"

namespace subriemann {

struct HorizontalNormal {
  Vec frame_gradient;  // (X_a phi)(p), a < m
  Vec normal;          // n^H in horizontal frame components: (X_i phi) / |grad_g phi|
  double ratio = 0.0;  // |n^H| / |n^g|, in [0, 1]
  Vec unit;            // V = n^H / |n^H|; empty when n^H = 0
};

struct HorizontalTangentFrame {
  Vec point;
  Vec normal;                // V, horizontal frame components
  std::vector<Vec> tangent;  // tau_1 .. tau_{k-1}, horizontal frame components
  std::size_t dropped = 0;   // frame index left out of the Gram-Schmidt sweep
};

struct CurvatureReport {
  Mat h;          // h_ab, a, b < k-1
  Mat h_sym;      // (h + h^T) / 2
  Vec kappa;      // eigenvalues of h_sym, ascending
  double mean = 0.0;      // trace(h) = sum kappa
  double gaussian = 0.0;  // prod kappa
  double asymmetry = 0.0; // max |h_ab - h_ba|
};

struct GridSpec {
  std::vector<Interval> box;
  std::vector<std::size_t> counts;  // seeds per coordinate

  std::size_t size() const;
  Vec seed(std::size_t index) const;
};

struct CharacteristicCandidate {
  Vec point;
  double ratio = 0.0;
  double objective = 0.0;  // ratio^2
  std::size_t members = 0; // seeds that converged into this cluster
};

/// Implicit hypersurface {phi = 0} in the chart of a manifold.
class Hypersurface {
 public:
  Hypersurface(std::shared_ptr<const Manifold> manifold, Expr phi);

  const Manifold& manifold() const { return *M_; }
  std::shared_ptr<const Manifold> manifold_ptr() const { return M_; }
  const Expr& phi() const { return phi_; }
  const Connection& connection() const { return D_; }

  double value(const Vec& p) const { return phi_(as_span(p)); }
  /// Chart gradient of phi.
  Vec gradient(const Vec& p) const;

  /// (X_a phi)(x) for a < count (count = m by default), generic in the scalar type.
  template <class T>
  void frame_derivatives(std::span<const T> x, std::span<T> out) const {
    const std::size_t m = M_->dim();
    using D = Dual<T>;
    std::vector<T> col(m);
    std::vector<D> xd(m);
    for (std::size_t a = 0; a < out.size(); ++a) {
      M_->eval_field(a, x, std::span<T>(col));
      for (std::size_t c = 0; c < m; ++c) xd[c] = D(x[c], col[c]);
      out[a] = phi_.eval<D>(std::span<const D>(xd)).d;
    }
  }

  /// Throws ZeroGradient when every frame derivative of phi vanishes at p.
  HorizontalNormal horizontal_normal(const Vec& p) const;

  /// True iff |n^H| / |n^g| <= tol. Throws NotOnSurface when the first-order distance
  /// |phi| / |grad phi| from p to S exceeds surface_tol.
  bool is_characteristic(const Vec& p, double tol = 1e-8, double surface_tol = 1e-6) const;

  /// Grid-seeded projected Gauss-Newton search for zeros of (X_i phi) on S; clusters closer
  /// than 1e-3 are merged. Only candidates with ratio <= tol are returned.
  std::vector<CharacteristicCandidate> find_characteristic_points(const GridSpec& grid,
                                                                  double tol = 1e-6) const;

  /// Unit horizontal normal and Gram-Schmidt horizontal tangent frame. Throws
  /// CharacteristicPoint when the ratio is <= tol.
  HorizontalTangentFrame horizontal_tangent_frame(const Vec& p, double tol = 1e-8) const;

  /// Scalar horizontal second fundamental form h_ab = -g_c(D_{tau_a} tau_b, V), oriented so
  /// that its trace equals div_H V.
  CurvatureReport second_fundamental_form(const Vec& p) const;

  /// sum_i X_i(V^i)(p). Carnot manifolds only (throws NotCarnot otherwise).
  double mean_curvature_divergence_form(const Vec& p) const;

  /// sum_a g_c(D_{tau_a} Y, tau_a). Throws NotTangent when Y(p) is not in T^H_p S.
  double tangent_divergence(const Section& Y, const Vec& p) const;

  /// Divergence on S of the horizontal field Y for the metric induced by the orthogonal
  /// extension: trace over an orthonormal basis of T_p S of nabla Y.
  double surface_divergence(const Section& Y, const Vec& p) const;

  /// Newton iteration along the chart gradient until |phi| < 1e-12. Throws ZeroGradient or
  /// NewtonDivergence (after max_iter iterations).
  Vec project_to_surface(const Vec& p, int max_iter = 50) const;

 private:
  std::shared_ptr<const Manifold> M_;
  Expr phi_;
  Connection D_;
};

/// Unit horizontal normal V = (X_i phi) / |X^H phi| as an ambient section. Throws
/// ExtensionFailure where the horizontal gradient vanishes.
class UnitNormalSection : public SectionBase<UnitNormalSection> {
 public:
  explicit UnitNormalSection(const Hypersurface& S) : S_(&S) {}
  std::size_t rank() const override { return S_->manifold().rank(); }

  template <class T>
  void components(std::span<const T> x, std::span<T> out) const;

 private:
  const Hypersurface* S_;
};

/// tau_a of the Gram-Schmidt tangent frame as an ambient section, with the dropped frame
/// index held fixed. Throws ExtensionFailure where the sweep degenerates.
class TangentFrameSection : public SectionBase<TangentFrameSection> {
 public:
  TangentFrameSection(const Hypersurface& S, std::size_t dropped, std::size_t a)
      : S_(&S), dropped_(dropped), a_(a) {}
  std::size_t rank() const override { return S_->manifold().rank(); }

  template <class T>
  void components(std::span<const T> x, std::span<T> out) const;

  /// All k-1 tangent vectors at x, each with k components.
  template <class T>
  void frame(std::span<const T> x, std::vector<std::vector<T>>& tau) const;

 private:
  const Hypersurface* S_;
  std::size_t dropped_;
  std::size_t a_;
};

/// Y = sum_a f_a tau_a with coefficient expressions f_a: a horizontal field tangent to S.
class TangentCombination : public SectionBase<TangentCombination> {
 public:
  TangentCombination(const Hypersurface& S, std::size_t dropped, std::vector<Expr> coefficients);
  std::size_t rank() const override { return S_->manifold().rank(); }

  template <class T>
  void components(std::span<const T> x, std::span<T> out) const {
    std::vector<std::vector<T>> tau;
    frame_.frame(x, tau);
    for (auto& o : out) o = T(0.0);
    for (std::size_t a = 0; a < tau.size(); ++a) {
      const T f = coeffs_[a].eval<T>(x);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = out[i] + f * tau[a][i];
    }
  }

 private:
  const Hypersurface* S_;
  TangentFrameSection frame_;
  std::vector<Expr> coeffs_;
};

// ---------------------------------------------------------------------------

namespace detail {

template <class T>
T dual_sqrt(const T& v) {
  using std::sqrt;
  return sqrt(v);
}

template <class T>
void unit_normal(const Hypersurface& S, std::span<const T> x, std::span<T> out) {
  const std::size_t k = S.manifold().rank();
  std::vector<T> g(k);
  S.frame_derivatives<T>(x, std::span<T>(g));
  T n2(0.0);
  for (const auto& v : g) n2 = n2 + v * v;
  if (!(primal(n2) > 1e-28)) throw ExtensionFailure("horizontal gradient vanishes (characteristic point)");
  const T n = dual_sqrt(n2);
  for (std::size_t i = 0; i < k; ++i) out[i] = g[i] / n;
}

}  // namespace detail

template <class T>
void UnitNormalSection::components(std::span<const T> x, std::span<T> out) const {
  detail::unit_normal<T>(*S_, x, out);
}

template <class T>
void TangentFrameSection::frame(std::span<const T> x, std::vector<std::vector<T>>& tau) const {
  const std::size_t k = S_->manifold().rank();
  std::vector<T> V(k);
  detail::unit_normal<T>(*S_, x, std::span<T>(V));
  tau.clear();
  for (std::size_t i = 0; i < k; ++i) {
    if (i == dropped_) continue;
    std::vector<T> w(k);
    for (std::size_t j = 0; j < k; ++j) w[j] = (j == i ? T(1.0) : T(0.0)) - V[i] * V[j];
    for (const auto& t : tau) {
      T dot(0.0);
      for (std::size_t j = 0; j < k; ++j) dot = dot + w[j] * t[j];
      for (std::size_t j = 0; j < k; ++j) w[j] = w[j] - dot * t[j];
    }
    T n2(0.0);
    for (const auto& v : w) n2 = n2 + v * v;
    if (!(primal(n2) > 1e-16)) throw ExtensionFailure("tangent Gram-Schmidt sweep degenerates");
    const T n = detail::dual_sqrt(n2);
    for (auto& v : w) v = v / n;
    tau.push_back(std::move(w));
  }
}

template <class T>
void TangentFrameSection::components(std::span<const T> x, std::span<T> out) const {
  std::vector<std::vector<T>> tau;
  frame(x, tau);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = tau[a_][i];
}

}  // namespace subriemann
