#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "subriemann/dual.hpp"
#include "subriemann/errors.hpp"
#include "subriemann/expr.hpp"

namespace subriemann {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline std::span<const double> as_span(const Vec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

/// Largest number of nested derivative layers a chart field may be differentiated through.
inline constexpr int kMaxDualDepth = 5;

/// Vector field in chart coordinates: one coefficient expression per coordinate.
class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(std::vector<Expr> coefficients) : coeffs_(std::move(coefficients)) {}

  std::size_t dim() const { return coeffs_.size(); }
  const Expr& operator[](std::size_t a) const { return coeffs_[a]; }
  const std::vector<Expr>& coefficients() const { return coeffs_; }

  template <class T>
  void eval(std::span<const T> x, std::span<T> out) const {
    for (std::size_t a = 0; a < coeffs_.size(); ++a) out[a] = coeffs_[a].template eval<T>(x);
  }

  Vec operator()(const Vec& x) const;

 private:
  std::vector<Expr> coeffs_;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// A sub-Riemannian manifold given on one chart by an ordered frame: the first `rank`
/// fields are a g_c-orthonormal basis of the horizontal bundle, the remaining fields span
/// the chosen complement. The whole frame is declared orthonormal, which fixes the
/// orthogonal extension g.
class Manifold {
 public:
  Manifold(std::string name, std::vector<std::string> variables, std::size_t rank,
           std::vector<VectorField> frame, std::vector<Interval> domain = {},
           std::vector<Expr> eta = {}, bool carnot = false);

  const std::string& name() const { return name_; }
  const std::vector<std::string>& variables() const { return vars_; }
  std::size_t dim() const { return vars_.size(); }
  std::size_t rank() const { return rank_; }
  const std::vector<VectorField>& frame() const { return frame_; }
  const VectorField& field(std::size_t a) const { return frame_[a]; }
  const std::vector<Interval>& domain() const { return domain_; }
  const std::vector<Expr>& eta() const { return eta_; }
  /// Set for left-invariant frames of Carnot groups (built-ins or config flag).
  bool is_carnot() const { return carnot_; }

  bool in_domain(const Vec& p) const;
  /// Throws OutOfDomain when p is outside the declared box or has the wrong length.
  void require_in_domain(const Vec& p) const;

  template <class T>
  void eval_field(std::size_t a, std::span<const T> x, std::span<T> out) const {
    frame_[a].eval<T>(x, out);
  }

  /// Frame matrix F(p): column a holds X_a(p).
  Mat frame_matrix(const Vec& p) const;
  double frame_condition(const Vec& p) const;

  /// Solves F(p) c = v. Throws SingularFrame when cond(F(p)) > 1e12.
  Vec frame_components(const Vec& v, const Vec& p) const;
  /// Same solve against a precomputed frame matrix.
  static Vec frame_components(const Vec& v, const Mat& frame);

  /// Sum over the horizontal frame of c^i X_i(p) where c = frame_components(v).
  Vec horizontal_projection(const Vec& v, const Vec& p) const;

  /// Chart vector of frame components: sum_a c^a X_a(p) (c may hold only the first rank entries).
  Vec chart_vector(const Vec& components, const Vec& p) const;

 private:
  std::string name_;
  std::vector<std::string> vars_;
  std::size_t rank_;
  std::vector<VectorField> frame_;
  std::vector<Interval> domain_;
  std::vector<Expr> eta_;
  bool carnot_;
};

// ---------------------------------------------------------------------------
// Lie brackets of chart fields.
//
// A chart field is any callable `f(std::span<const T> x, std::span<T> out)` that is
// generic in the scalar T. The bracket [F,G]^a = sum_b F^b d_b G^a - G^b d_b F^a is
// evaluated with one Dual layer over T, so brackets nest up to kMaxDualDepth deep.

template <class T, class F, class G>
void bracket_eval(const F& f, const G& g, std::size_t m, std::span<const T> x, std::span<T> out) {
  if constexpr (dual_depth_v<T> >= kMaxDualDepth) {
    throw Error("Lie bracket nested deeper than supported derivative depth");
  } else {
    using D = Dual<T>;
    std::vector<T> fa(m), gb(m);
    f(x, std::span<T>(fa));
    g(x, std::span<T>(gb));
    std::vector<D> xd(m), outd(m);
    for (std::size_t c = 0; c < m; ++c) xd[c] = D(x[c], fa[c]);
    g(std::span<const D>(xd), std::span<D>(outd));
    for (std::size_t c = 0; c < m; ++c) out[c] = outd[c].d;
    for (std::size_t c = 0; c < m; ++c) xd[c] = D(x[c], gb[c]);
    f(std::span<const D>(xd), std::span<D>(outd));
    for (std::size_t c = 0; c < m; ++c) out[c] = out[c] - outd[c].d;
  }
}

template <class F, class G>
Vec bracket_at(const F& f, const G& g, std::size_t m, const Vec& p) {
  Vec out(static_cast<Eigen::Index>(m));
  bracket_eval<double>(f, g, m, as_span(p), std::span<double>(out.data(), m));
  return out;
}

/// Derivative of a chart field at p along `direction`: (DF(p)) direction.
template <class F>
Vec field_derivative(const F& f, std::size_t m, const Vec& p, const Vec& direction) {
  std::vector<Real1> x(m), out(m);
  for (std::size_t c = 0; c < m; ++c) x[c] = Real1(p[c], direction[c]);
  f(std::span<const Real1>(x), std::span<Real1>(out));
  Vec d(static_cast<Eigen::Index>(m));
  for (std::size_t c = 0; c < m; ++c) d[c] = out[c].d;
  return d;
}

/// [F, G](p) for two chart vector fields.
Vec lie_bracket(const VectorField& f, const VectorField& g, const Vec& p);

/// Right-nested bracket [X_{w0}, [X_{w1}, ... X_{wn}]] of frame fields at p.
Vec nested_bracket(const Manifold& M, std::span<const std::size_t> word, const Vec& p);

struct GrowthVector {
  std::vector<std::size_t> dims;  // dim L_1(p), dim L_2(p), ...
  std::optional<std::size_t> degree;  // first depth with dim = m, if reached
  std::size_t max_depth = 0;

  bool full() const { return degree.has_value(); }
};

inline constexpr std::size_t kMaxGrowthDepth = kMaxDualDepth + 1;

/// Dimensions of the spans of iterated brackets of horizontal fields at p. Ranks use
/// singular values above rank_tol times the largest one. max_depth <= kMaxGrowthDepth.
GrowthVector growth_vector(const Manifold& M, const Vec& p, std::size_t max_depth,
                           double rank_tol = 1e-9);

/// Heisenberg group H^n: coordinates (x1..xn, y1..yn, t), X_j = d/dx_j + 2 y_j d/dt,
/// X_{n+j} = d/dy_j - 2 x_j d/dt, complement T = d/dt. Carries the contact form
/// eta = dt/4 + (1/2) sum (x_j dy_j - y_j dx_j).
Manifold make_heisenberg(std::size_t n);

/// Copy of M whose horizontal fields i and j are rotated by the point-dependent angle
/// theta: X'_i = cos(theta) X_i + sin(theta) X_j, X'_j = -sin(theta) X_i + cos(theta) X_j.
Manifold rotate_horizontal_pair(const Manifold& M, std::size_t i, std::size_t j, const Expr& theta,
                                std::string name);

/// Antisymmetric curvature form d eta(u, v) at p for horizontal u, v, using the frame
/// extensions with constant components. Throws NotHorizontal.
double contact_curvature_form(const Manifold& M, std::span<const Expr> eta, const Vec& u,
                              const Vec& v, const Vec& p);

/// Matrix of d eta(X_i, X_j)(p) over the horizontal frame.
Mat contact_curvature_matrix(const Manifold& M, std::span<const Expr> eta, const Vec& p);

}  // namespace subriemann
