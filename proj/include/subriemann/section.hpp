#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "subriemann/manifold.hpp"

namespace subriemann {

/// Horizontal section V = sum_i V^i X_i, described by its frame components V^i(x).
/// Components can be evaluated on the first derivative levels of the scalar tower.
class Section {
 public:
  virtual ~Section() = default;

  virtual std::size_t rank() const = 0;
  virtual void eval(std::span<const double> x, std::span<double> out) const = 0;
  virtual void eval(std::span<const Real1> x, std::span<Real1> out) const = 0;
  virtual void eval(std::span<const Real2> x, std::span<Real2> out) const = 0;

  Vec operator()(const Vec& p) const {
    Vec out(static_cast<Eigen::Index>(rank()));
    eval(as_span(p), std::span<double>(out.data(), rank()));
    return out;
  }

  /// d/ds V^i(p + s direction) at s = 0.
  Vec derivative(const Vec& p, const Vec& direction) const {
    const auto m = static_cast<std::size_t>(p.size());
    std::vector<Real1> x(m), out(rank());
    for (std::size_t a = 0; a < m; ++a) x[a] = Real1(p[a], direction[a]);
    eval(std::span<const Real1>(x), std::span<Real1>(out));
    Vec d(static_cast<Eigen::Index>(rank()));
    for (std::size_t i = 0; i < rank(); ++i) d[i] = out[i].d;
    return d;
  }
};

/// Implements the virtual evaluation entry points by forwarding to
/// `Derived::components<T>(x, out)`.
template <class Derived>
class SectionBase : public Section {
 public:
  void eval(std::span<const double> x, std::span<double> out) const override {
    self().template components<double>(x, out);
  }
  void eval(std::span<const Real1> x, std::span<Real1> out) const override {
    self().template components<Real1>(x, out);
  }
  void eval(std::span<const Real2> x, std::span<Real2> out) const override {
    self().template components<Real2>(x, out);
  }

 private:
  const Derived& self() const { return static_cast<const Derived&>(*this); }
};

/// Section whose components are expressions in the chart variables.
class ExprSection : public SectionBase<ExprSection> {
 public:
  explicit ExprSection(std::vector<Expr> components) : comps_(std::move(components)) {}

  std::size_t rank() const override { return comps_.size(); }
  const std::vector<Expr>& expressions() const { return comps_; }

  template <class T>
  void components(std::span<const T> x, std::span<T> out) const {
    for (std::size_t i = 0; i < comps_.size(); ++i) out[i] = comps_[i].template eval<T>(x);
  }

 private:
  std::vector<Expr> comps_;
};

/// Section with constant components (a "left-invariant" section on Carnot frames).
inline ExprSection constant_section(const std::vector<double>& components) {
  std::vector<Expr> e;
  for (double c : components) e.emplace_back(c);
  return ExprSection(std::move(e));
}

/// Chart vector field sum_i V^i(x) X_i(x) of a section, generic in the scalar type.
template <class T>
void section_chart(const Manifold& M, const Section& V, std::span<const T> x, std::span<T> out) {
  const std::size_t m = M.dim();
  std::vector<T> comps(V.rank()), col(m);
  V.eval(x, std::span<T>(comps));
  for (std::size_t a = 0; a < m; ++a) out[a] = T(0.0);
  for (std::size_t i = 0; i < V.rank(); ++i) {
    M.eval_field(i, x, std::span<T>(col));
    for (std::size_t a = 0; a < m; ++a) out[a] = out[a] + comps[i] * col[a];
  }
}

/// Chart-field adaptor for bracket_eval; valid up to one derivative layer above Real1.
struct SectionField {
  const Manifold* M;
  const Section* V;

  template <class T>
  void operator()(std::span<const T> x, std::span<T> out) const {
    if constexpr (dual_depth_v<T> <= 2) {
      section_chart<T>(*M, *V, x, out);
    } else {
      throw Error("section evaluated beyond second derivative level");
    }
  }
};

}  // namespace subriemann
