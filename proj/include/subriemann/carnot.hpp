#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "subriemann/manifold.hpp"

namespace subriemann {

/// Graded nilpotent Lie algebra given by structure constants in a basis e_1..e_N that is
/// adapted to the grading V_1 + ... + V_s (layer sizes in `grading`).
class CarnotAlgebra {
 public:
  CarnotAlgebra(std::size_t dim, std::vector<std::size_t> grading);

  std::size_t dim() const { return dim_; }
  const std::vector<std::size_t>& grading() const { return grading_; }
  std::size_t rank() const { return grading_.front(); }
  std::size_t step() const { return grading_.size(); }
  /// Layer (1-based) of basis index a (0-based).
  std::size_t layer(std::size_t a) const;

  /// Sets [e_a, e_b] = sum_c coeffs[c] e_c and [e_b, e_a] to its negative (0-based indices).
  void set_bracket(std::size_t a, std::size_t b, const std::vector<double>& coeffs);
  double constant(std::size_t a, std::size_t b, std::size_t c) const {
    return c_[(a * dim_ + b) * dim_ + c];
  }

  /// Throws GradingViolation ([V_i, V_j] not inside V_{i+j}) or JacobiViolation (naming the
  /// offending triple, 1-based) when the residual exceeds tol.
  void validate(double tol = 1e-10) const;

 private:
  std::size_t dim_;
  std::vector<std::size_t> grading_;
  std::vector<double> c_;
};

/// Left-invariant frame of the simply connected group of `algebra` in exponential
/// coordinates exp(sum x_a e_a): X_a(x) = sum_n b_n (ad_x)^n e_a, where b_n are the Taylor
/// coefficients of z / (1 - e^{-z}). The first layer is horizontal, higher layers form the
/// complement. Validates the algebra first.
Manifold make_carnot(const CarnotAlgebra& algebra, std::string name = "carnot",
                     std::vector<std::string> variables = {});

/// The algebra of H^n with [e_j, e_{n+j}] = -4 e_{2n+1}.
CarnotAlgebra heisenberg_algebra(std::size_t n);

/// Four-dimensional step-3 Engel algebra: [e1,e2] = e3, [e1,e3] = e4.
CarnotAlgebra engel_algebra();

}  // namespace subriemann
