#include "subriemann/carnot.hpp"

#include <cmath>
#include <numeric>

namespace subriemann {

CarnotAlgebra::CarnotAlgebra(std::size_t dim, std::vector<std::size_t> grading)
    : dim_(dim), grading_(std::move(grading)), c_(dim * dim * dim, 0.0) {
  if (grading_.empty()) throw ConfigError("carnot: grading must list at least one layer");
  for (auto g : grading_)
    if (g == 0) throw ConfigError("carnot: grading layers must be nonempty");
  if (std::accumulate(grading_.begin(), grading_.end(), std::size_t{0}) != dim_)
    throw ConfigError("carnot: grading sizes must add up to the algebra dimension");
  if (grading_.size() < 2) throw ConfigError("carnot: need at least two layers (rank < dim)");
}

std::size_t CarnotAlgebra::layer(std::size_t a) const {
  std::size_t end = 0;
  for (std::size_t l = 0; l < grading_.size(); ++l) {
    end += grading_[l];
    if (a < end) return l + 1;
  }
  throw Error("carnot: basis index out of range");
}

void CarnotAlgebra::set_bracket(std::size_t a, std::size_t b, const std::vector<double>& coeffs) {
  if (a >= dim_ || b >= dim_ || coeffs.size() != dim_)
    throw ConfigError("carnot: bracket indices or coefficient count out of range");
  if (a == b) {
    for (double v : coeffs)
      if (v != 0.0) throw ConfigError("carnot: [e_a, e_a] must vanish");
    return;
  }
  for (std::size_t c = 0; c < dim_; ++c) {
    c_[(a * dim_ + b) * dim_ + c] = coeffs[c];
    c_[(b * dim_ + a) * dim_ + c] = -coeffs[c];
  }
}

void CarnotAlgebra::validate(double tol) const {
  const std::size_t n = dim_;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c) {
        const double v = constant(a, b, c);
        if (std::fabs(v) <= tol) continue;
        if (layer(c) != layer(a) + layer(b))
          throw GradingViolation("carnot: [e" + std::to_string(a + 1) + ", e" + std::to_string(b + 1) +
                                 "] has a component along e" + std::to_string(c + 1) +
                                 " outside layer " + std::to_string(layer(a) + layer(b)));
      }
  // Jacobi: [[a,b],c] + [[b,c],a] + [[c,a],b] = 0. Triples with a repeated index vanish
  // by antisymmetry.
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      for (std::size_t c = b + 1; c < n; ++c) {
        double worst = 0.0;
        for (std::size_t e = 0; e < n; ++e) {
          double s = 0.0;
          for (std::size_t d = 0; d < n; ++d) {
            s += constant(a, b, d) * constant(d, c, e);
            s += constant(b, c, d) * constant(d, a, e);
            s += constant(c, a, d) * constant(d, b, e);
          }
          worst = std::max(worst, std::fabs(s));
        }
        if (worst > tol)
          throw JacobiViolation("carnot: Jacobi identity fails for (e" + std::to_string(a + 1) +
                                ", e" + std::to_string(b + 1) + ", e" + std::to_string(c + 1) +
                                "), residual " + std::to_string(worst));
      }
}

namespace {

// Taylor coefficients of z / (1 - exp(-z)) = sum (-1)^n B_n z^n / n!.
constexpr std::array<double, 10> kLeftTrivialization = {
    1.0, 0.5, 1.0 / 12.0, 0.0, -1.0 / 720.0, 0.0, 1.0 / 30240.0, 0.0, -1.0 / 1209600.0, 0.0};

}  // namespace

Manifold make_carnot(const CarnotAlgebra& algebra, std::string name,
                     std::vector<std::string> variables) {
  algebra.validate();
  const std::size_t n = algebra.dim();
  if (algebra.step() > kLeftTrivialization.size())
    throw ConfigError("carnot: step above " + std::to_string(kLeftTrivialization.size()) +
                      " is not supported");
  if (variables.empty())
    for (std::size_t a = 0; a < n; ++a) variables.push_back("z" + std::to_string(a + 1));
  if (variables.size() != n) throw ConfigError("carnot: one variable name per basis vector");

  std::vector<Expr> x;
  for (std::size_t b = 0; b < n; ++b) x.push_back(Expr::variable(b));

  // ad_x(w)^c = sum_{b,d} x_b w^d c_{bd}^c
  auto ad_x = [&](const std::vector<Expr>& w) {
    std::vector<Expr> out(n, Expr(0.0));
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t d = 0; d < n; ++d) {
          const double k = algebra.constant(b, d, c);
          if (k == 0.0 || (w[d].is_constant() && w[d].constant_value() == 0.0)) continue;
          out[c] = out[c] + Expr(k) * x[b] * w[d];
        }
    return out;
  };

  std::vector<VectorField> frame;
  for (std::size_t a = 0; a < n; ++a) {
    std::vector<Expr> term(n, Expr(0.0));
    term[a] = Expr(1.0);
    std::vector<Expr> field = term;
    for (std::size_t p = 1; p < algebra.step(); ++p) {
      term = ad_x(term);
      if (kLeftTrivialization[p] == 0.0) continue;
      for (std::size_t c = 0; c < n; ++c)
        if (!(term[c].is_constant() && term[c].constant_value() == 0.0))
          field[c] = field[c] + Expr(kLeftTrivialization[p]) * term[c];
    }
    frame.emplace_back(std::move(field));
  }
  return Manifold(std::move(name), std::move(variables), algebra.rank(), std::move(frame), {}, {},
                  true);
}

CarnotAlgebra heisenberg_algebra(std::size_t n) {
  CarnotAlgebra alg(2 * n + 1, {2 * n, 1});
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> c(2 * n + 1, 0.0);
    c[2 * n] = -4.0;
    alg.set_bracket(j, n + j, c);
  }
  return alg;
}

CarnotAlgebra engel_algebra() {
  CarnotAlgebra alg(4, {2, 1, 1});
  alg.set_bracket(0, 1, {0, 0, 1, 0});
  alg.set_bracket(0, 2, {0, 0, 0, 1});
  return alg;
}

}  // namespace subriemann
