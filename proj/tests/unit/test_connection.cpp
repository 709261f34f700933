#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "subriemann/carnot.hpp"
#include "subriemann/connection.hpp"

using namespace subriemann;

namespace {

Vec v3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

// Gamma_ij^l = 1/2 {C(j,i,l) + C(l,j,i) - C(i,l,j)} on FD brackets.
double fd_gamma(const std::vector<double>& C, std::size_t m, std::size_t i, std::size_t j,
                std::size_t l) {
  auto c = [&](std::size_t a, std::size_t b, std::size_t e) { return C[(a * m + b) * m + e]; };
  return 0.5 * (c(j, i, l) + c(l, j, i) - c(i, l, j));
}

ExprSection random_section(std::mt19937_64& rng, std::size_t k, std::size_t m) {
  std::vector<Expr> c;
  for (std::size_t i = 0; i < k; ++i) c.push_back(oracle::random_quadratic(rng, m));
  return ExprSection(c);
}

// Components of the same horizontal field in the frame rotated by theta.
ExprSection rotate_components(const ExprSection& U, const Expr& theta) {
  const auto& u = U.expressions();
  const Expr c = cos(theta), s = sin(theta);
  return ExprSection({c * u[0] + s * u[1], Expr(0.0) - s * u[0] + c * u[1]});
}

}  // namespace

TEST(Gamma, VanishesOnCarnotFrames) {
  std::mt19937_64 rng(21);
  for (const Manifold& M : {make_heisenberg(1), make_heisenberg(2), make_carnot(engel_algebra())}) {
    const Connection D(std::make_shared<const Manifold>(M));
    for (int trial = 0; trial < 20; ++trial)
      EXPECT_LT(D.gamma(oracle::random_point(rng, M.dim(), -3, 3)).max_abs(), 1e-12);
  }
}

TEST(Gamma, RotatedFrameMatchesFiniteDifferenceOracle) {
  const Manifold R = fixtures::rotated_h1();
  const Connection D(std::make_shared<const Manifold>(R));
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    const Vec p = oracle::random_point(rng, 3, -1, 1);
    const GammaTensor G = D.gamma(p);
    const auto C = oracle::fd_structure(R, p);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t l = 0; l < 2; ++l) EXPECT_NEAR(G(i, j, l), fd_gamma(C, 3, i, j, l), 1e-8);
  }
}

TEST(Gamma, RotatedFrameRegressionValues) {
  const Connection D(fixtures::shared(fixtures::rotated_h1()));
  // At (0,0,1) the angle t has no horizontal derivative, so every coefficient vanishes.
  EXPECT_LT(D.gamma(v3(0, 0, 1)).max_abs(), 1e-14);
  // At (0.3,-0.2,1) with a = X1'(t), b = X2'(t): Gamma_00^1 = a, Gamma_10^0 = -a,
  // Gamma_01^1 = b, Gamma_11^0 = -b, all others 0.
  const GammaTensor G = D.gamma(v3(0.3, -0.2, 1));
  const double a = -0.7210035132319937;
  const double b = 0.01240701040227482;
  EXPECT_NEAR(G(0, 0, 1), a, 1e-12);
  EXPECT_NEAR(G(1, 0, 0), -a, 1e-12);
  EXPECT_NEAR(G(0, 1, 1), b, 1e-12);
  EXPECT_NEAR(G(1, 1, 0), -b, 1e-12);
  EXPECT_NEAR(G(0, 0, 0), 0.0, 1e-14);
  EXPECT_NEAR(G(0, 1, 0), 0.0, 1e-14);
  EXPECT_NEAR(G(1, 0, 1), 0.0, 1e-14);
  EXPECT_NEAR(G(1, 1, 1), 0.0, 1e-14);
}

TEST(Gamma, StructuralIdentities) {
  std::mt19937_64 rng(23);
  for (const Manifold& M : {fixtures::rotated_h1(), fixtures::martinet()}) {
    const Connection D(std::make_shared<const Manifold>(M));
    const std::size_t k = M.rank();
    for (int trial = 0; trial < 20; ++trial) {
      const Vec p = oracle::random_point(rng, M.dim(), -1, 1);
      const GammaTensor G = D.gamma(p);
      const StructureTable C = D.structure(p);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
          for (std::size_t l = 0; l < k; ++l) {
            EXPECT_NEAR(G(j, i, l) + G(l, i, j), 0.0, 1e-10);
            EXPECT_NEAR(G(i, j, l) - G(j, i, l), C(j, i, l), 1e-10);
          }
    }
  }
}

TEST(CovariantDerivative, Fixtures) {
  for (std::size_t n : {1u, 2u}) {
    const Manifold H = make_heisenberg(n);
    const Connection D(std::make_shared<const Manifold>(H));
    const std::size_t k = 2 * n;
    std::vector<double> e1(k, 0.0), e2(k, 0.0);
    e1[0] = 1.0;
    e2[1] = 1.0;
    const ExprSection X1 = constant_section(e1), X2 = constant_section(e2);
    std::mt19937_64 rng(24);
    const Vec p = oracle::random_point(rng, 2 * n + 1);
    EXPECT_LT(D.covariant_derivative(X1, X2, p).norm(), 1e-14);
    std::vector<Expr> c(k, Expr(0.0));
    c[0] = Expr::variable(0);
    const ExprSection x1X1(c);
    const Vec d = D.covariant_derivative(X1, x1X1, p);
    Vec expected = Vec::Zero(static_cast<Eigen::Index>(k));
    expected[0] = 1.0;
    EXPECT_LT((d - expected).norm(), 1e-14);
  }
}

TEST(CovariantDerivative, FrameIndependence) {
  const Manifold H = make_heisenberg(1);
  const Manifold R = fixtures::rotated_h1();
  const Connection D(std::make_shared<const Manifold>(H));
  const Connection DR(std::make_shared<const Manifold>(R));
  const Expr theta = Expr::variable(2);
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 20; ++trial) {
    const ExprSection U = random_section(rng, 2, 3), V = random_section(rng, 2, 3);
    const ExprSection UR = rotate_components(U, theta), VR = rotate_components(V, theta);
    const Vec p = oracle::random_point(rng, 3, -1, 1);
    const Vec d = D.covariant_derivative(U, V, p);
    const Vec dr = DR.covariant_derivative(UR, VR, p);
    const double c = std::cos(p[2]), s = std::sin(p[2]);
    const Vec back = v3(c * dr[0] - s * dr[1], s * dr[0] + c * dr[1], 0).head(2);
    EXPECT_LT((d - back).norm(), 1e-10);
  }
}

TEST(Divergence, Fixtures) {
  for (std::size_t n : {1u, 2u}) {
    const Manifold H = make_heisenberg(n);
    const Connection D(std::make_shared<const Manifold>(H));
    const std::size_t k = 2 * n;
    std::mt19937_64 rng(26);
    const Vec p = oracle::random_point(rng, 2 * n + 1, -2, 2);
    std::vector<double> e1(k, 0.0);
    e1[0] = 1.0;
    EXPECT_NEAR(D.horizontal_divergence(constant_section(e1), p), 0.0, 1e-14);
    std::vector<Expr> c(k, Expr(0.0));
    c[0] = Expr::variable(0);
    c[n] = Expr::variable(n);
    EXPECT_NEAR(D.horizontal_divergence(ExprSection(c), p), 2.0, 1e-14);
  }
}

TEST(Divergence, EqualsRiemannianDivergence) {
  std::mt19937_64 rng(27);
  for (const Manifold& M : {make_heisenberg(2), fixtures::rotated_h1(), fixtures::martinet()}) {
    const Connection D(std::make_shared<const Manifold>(M));
    for (int trial = 0; trial < 20; ++trial) {
      const ExprSection V = random_section(rng, M.rank(), M.dim());
      const Vec p = oracle::random_point(rng, M.dim(), -1, 1);
      EXPECT_NEAR(D.horizontal_divergence(V, p), D.riemannian_divergence(V, p), 1e-10) << M.name();
    }
  }
}

TEST(LeviCivita, Fixtures) {
  const Connection E(fixtures::shared(fixtures::euclidean3()));
  const Vec p = v3(0.3, -0.1, 0.7);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b)
      for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(E.levi_civita(a, b, c, p), 0.0);
  const Connection H(fixtures::shared(make_heisenberg(1)));
  EXPECT_NEAR(H.levi_civita(0, 1, 2, p), -2.0, 1e-14);
  EXPECT_NEAR(H.levi_civita(1, 0, 2, p), 2.0, 1e-14);
}

TEST(LeviCivita, MatchesChartChristoffelOracle) {
  std::mt19937_64 rng(28);
  for (const Manifold& M : {make_heisenberg(1), fixtures::rotated_h1(), fixtures::martinet()}) {
    const Connection D(std::make_shared<const Manifold>(M));
    for (int trial = 0; trial < 5; ++trial) {
      const Vec p = oracle::random_point(rng, 3, -1, 1);
      const StructureTable L = D.levi_civita_table(p);
      for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b)
          for (std::size_t c = 0; c < 3; ++c)
            EXPECT_NEAR(L(a, b, c), oracle::christoffel_levi_civita(M, a, b, c, p), 1e-6)
                << M.name() << " " << a << b << c;
    }
  }
}

TEST(Axioms, HeisenbergLeftInvariant) {
  const Connection D(fixtures::shared(make_heisenberg(2)));
  const ExprSection U = constant_section({1, 0, 0, 0}), V = constant_section({0, 1, 0, 0}),
                    W = constant_section({0.5, 0, -1, 2});
  const AxiomResiduals r = D.verify_axioms(U, V, W, Vec::Constant(5, 0.3));
  EXPECT_LT(r.max(), 1e-13);
}

TEST(Axioms, RandomSections) {
  std::mt19937_64 rng(29);
  for (const Manifold& M : {make_heisenberg(2), fixtures::rotated_h1(), fixtures::martinet()}) {
    const Connection D(std::make_shared<const Manifold>(M));
    for (int trial = 0; trial < 20; ++trial) {
      const ExprSection U = random_section(rng, M.rank(), M.dim());
      const ExprSection V = random_section(rng, M.rank(), M.dim());
      const ExprSection W = random_section(rng, M.rank(), M.dim());
      const Vec p = oracle::random_point(rng, M.dim(), -1, 1);
      const AxiomResiduals r = D.verify_axioms(U, V, W, p);
      EXPECT_LT(r.compatibility, 1e-10);
      EXPECT_LT(r.symmetry, 1e-10);
      EXPECT_LT(r.leibniz, 1e-10);
      EXPECT_LT(r.linearity, 1e-10);

      // FD oracle for the derivative side of compatibility
      const Vec dir = M.chart_vector(U(p), p);
      const double fd = oracle::fd_directional([&](const Vec& q) { return V(q).dot(W(q)); }, p, dir);
      const double rhs = D.covariant_derivative(U, V, p).dot(W(p)) +
                         V(p).dot(D.covariant_derivative(U, W, p));
      EXPECT_NEAR(fd, rhs, 1e-6 * std::max(1.0, std::fabs(fd)));
    }
  }
}

TEST(Axioms, PerturbedGammaBreaksCompatibility) {
  Connection D(fixtures::shared(make_heisenberg(1)));
  D.set_gamma_perturbation(0.1);
  const ExprSection U = constant_section({1, 0}), V = constant_section({1, 0});
  const AxiomResiduals r = D.verify_axioms(U, V, V, v3(0.1, 0.2, 0.3));
  EXPECT_GT(r.compatibility, 0.1);
}

TEST(Projection, Fixtures) {
  const Connection H(fixtures::shared(make_heisenberg(1)));
  const ExprSection X1 = constant_section({1, 0}), X2 = constant_section({0, 1});
  const Vec p = v3(0.4, -0.3, 0.2);
  const Vec nabla = H.riemannian_derivative(X1, X2, p);
  EXPECT_LT((nabla - v3(0, 0, -2)).norm(), 1e-14);
  EXPECT_LT(H.verify_projection(X1, X2, p), 1e-14);
  const Connection E(fixtures::shared(fixtures::euclidean3()));
  EXPECT_LT(E.verify_projection(X1, X2, p), 1e-14);
}

TEST(Projection, RandomSections) {
  std::mt19937_64 rng(30);
  for (const Manifold& M : {make_heisenberg(2), fixtures::rotated_h1(), fixtures::martinet()}) {
    const Connection D(std::make_shared<const Manifold>(M));
    for (int trial = 0; trial < 20; ++trial) {
      const ExprSection U = random_section(rng, M.rank(), M.dim());
      const ExprSection V = random_section(rng, M.rank(), M.dim());
      EXPECT_LT(D.verify_projection(U, V, oracle::random_point(rng, M.dim(), -1, 1)), 1e-10);
    }
  }
}

TEST(Geodesic, HeisenbergFlowLine) {
  const Connection D(fixtures::shared(make_heisenberg(1)));
  Vec c0(2);
  c0 << 1, 0;
  const HorizontalCurve g = D.geodesic(Vec::Zero(3), c0, 1.0, 1e-3);
  for (const auto& s : g.samples) EXPECT_LT((s.x - v3(s.t, 0, 0)).norm(), 1e-12);
  EXPECT_NEAR(g.length, 1.0, 1e-12);
  const HorizontalCurve still = D.geodesic(v3(1, 2, 3), Vec::Zero(2), 1.0, 1e-2);
  EXPECT_LT((still.end() - v3(1, 2, 3)).norm(), 1e-15);
}

TEST(Geodesic, RotatedFrameEnergyAndStepHalving) {
  const Connection D(fixtures::shared(fixtures::rotated_h1()));
  Vec c0(2);
  c0 << 0.6, -0.8;
  const Vec p0 = v3(0.2, -0.1, 0.5);
  const HorizontalCurve g1 = D.geodesic(p0, c0, 1.0, 1e-3);
  const HorizontalCurve g2 = D.geodesic(p0, c0, 1.0, 5e-4);
  EXPECT_LT(g1.diagnostics.energy_drift, 1e-6);
  // RK4: halving the step shrinks the error by about 16.
  EXPECT_LT((g1.end() - g2.end()).norm(), 1e-9);
  EXPECT_NEAR(g1.length, 1.0, 1e-6);
  EXPECT_GT(D.gamma(p0).max_abs(), 0.1);
}

TEST(Geodesic, BadArguments) {
  const Connection D(fixtures::shared(make_heisenberg(1)));
  EXPECT_THROW(D.geodesic(Vec::Zero(3), Vec::Zero(2), 1.0, 0.0), Error);
  EXPECT_THROW(D.geodesic(Vec::Zero(3), Vec::Zero(3), 1.0, 0.1), Error);
  Vec c0(2);
  c0 << 1000, 0;
  EXPECT_THROW(D.geodesic(Vec::Zero(3), c0, 1.0, 0.1), StepFailure);
}
