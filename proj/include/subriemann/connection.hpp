#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "subriemann/curve.hpp"
#include "subriemann/manifold.hpp"
#include "subriemann/section.hpp"

namespace subriemann {

/// Connection coefficients Gamma_ij^l = g_c(D_{X_j} X_i, X_l) at a point, i, j, l < k.
struct GammaTensor {
  Vec point;
  std::size_t k = 0;
  std::vector<double> values;

  double operator()(std::size_t i, std::size_t j, std::size_t l) const {
    return values[(i * k + j) * k + l];
  }
  double& operator()(std::size_t i, std::size_t j, std::size_t l) {
    return values[(i * k + j) * k + l];
  }
  double max_abs() const;
};

/// Frame components of all brackets at a point: C(a, b, c) = c-th component of [X_a, X_b].
struct StructureTable {
  std::size_t m = 0;
  std::vector<double> values;

  double operator()(std::size_t a, std::size_t b, std::size_t c) const {
    return values[(a * m + b) * m + c];
  }
};

struct AxiomResiduals {
  double compatibility = 0.0;  // |U g(V,W) - g(D_U V, W) - g(V, D_U W)|
  double symmetry = 0.0;       // |D_U V - D_V U - [U,V]^H|
  double leibniz = 0.0;        // |D_U(fV) - (Uf) V - f D_U V|
  double linearity = 0.0;      // |D_{fU} V - f D_U V|

  double max() const;
};

/// The nonholonomic connection D determined by the horizontal frame and the complement:
/// D_U V = sum U(V^i) X_i + sum U^j V^i Gamma_ij^l X_l, with Gamma from the Koszul-type
/// formula on horizontal projections of brackets. All horizontal vectors returned by this
/// class are frame components (length k).
class Connection {
 public:
  explicit Connection(std::shared_ptr<const Manifold> manifold);

  const Manifold& manifold() const { return *M_; }
  std::shared_ptr<const Manifold> manifold_ptr() const { return M_; }

  /// Gamma_ij^l = 1/2 { C(j,i,l) + C(l,j,i) - C(i,l,j) } with C(a,b,c) = g_c([X_a,X_b]^H, X_c).
  GammaTensor gamma(const Vec& p) const;

  /// Brackets of all frame fields in frame components (full frame, m^3 entries).
  StructureTable structure(const Vec& p) const;

  /// D_U V at p.
  Vec covariant_derivative(const Section& U, const Section& V, const Vec& p) const;
  /// D_u V at p for a horizontal vector u given by its frame components.
  Vec covariant_derivative(const Vec& u, const Section& V, const Vec& p,
                           const GammaTensor& gamma) const;

  /// sum_i g_c(D_{X_i} V, X_i).
  double horizontal_divergence(const Section& V, const Vec& p) const;

  /// g(nabla_{X_a} X_b, X_c) for the Levi-Civita connection of the orthogonal extension
  /// (full frame, 0-based a, b, c < m).
  double levi_civita(std::size_t a, std::size_t b, std::size_t c, const Vec& p) const;
  StructureTable levi_civita_table(const Vec& p) const;

  /// Riemannian covariant derivative nabla_U V in full frame components (length m).
  Vec riemannian_derivative(const Section& U, const Section& V, const Vec& p) const;
  /// Riemannian divergence of a horizontal section: sum_a g(nabla_{X_a} V, X_a).
  double riemannian_divergence(const Section& V, const Vec& p) const;

  /// Residuals of metric compatibility, symmetry, Leibniz rule and C-infinity linearity.
  AxiomResiduals verify_axioms(const Section& U, const Section& V, const Section& W,
                               const Vec& p) const;

  /// |D_U V - Pi_Delta(nabla_U V)|.
  double verify_projection(const Section& U, const Section& V, const Vec& p) const;

  /// Nonholonomic "geodesic" D_{gamma'} gamma' = 0: x' = sum c^i X_i(x),
  /// c^l' = -sum c^j c^i Gamma_ij^l(x), RK4 with fixed step. Throws StepFailure when the
  /// frame degenerates along the path.
  HorizontalCurve geodesic(const Vec& p0, const Vec& c0, double duration, double dt) const;

  /// Test hook: adds `delta` to Gamma_00^0 in every tensor this object produces. Breaks
  /// metric compatibility for any delta != 0.
  void set_gamma_perturbation(double delta) { gamma_perturbation_ = delta; }

 private:
  std::shared_ptr<const Manifold> M_;
  double gamma_perturbation_ = 0.0;
};

}  // namespace subriemann
