#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "subriemann/hypersurface.hpp"

using namespace subriemann;

namespace {

std::shared_ptr<const Manifold> h2() { return fixtures::shared(make_heisenberg(2)); }

std::shared_ptr<const Hypersurface> gauge_sphere(const std::shared_ptr<const Manifold>& M) {
  return std::make_shared<const Hypersurface>(
      M, parse("(x1^2+x2^2+y1^2+y2^2)^2 + t^2 - 1", M->variables()));
}

Vec v5(double a, double b, double c, double d, double e) {
  Vec v(5);
  v << a, b, c, d, e;
  return v;
}

// Random sphere point with horizontal normal ratio >= min_ratio.
Vec sphere_point(const Hypersurface& S, std::mt19937_64& rng, double min_ratio = 0.05) {
  std::normal_distribution<double> N;
  while (true) {
    Vec p(5);
    for (auto& v : p) v = N(rng);
    p = S.project_to_surface(p / p.norm());
    if (S.horizontal_normal(p).ratio >= min_ratio) return p;
  }
}

// Sphere point on the equator t = 0.
Vec equator_point(std::mt19937_64& rng) {
  std::normal_distribution<double> N;
  Vec z(4);
  for (auto& v : z) v = N(rng);
  z /= z.norm();
  return v5(z[0], z[1], z[2], z[3], 0.0);
}

// V^i(x) = (X_i phi) / |X^H phi| by finite differences of phi along the frame.
Vec fd_unit_normal(const Hypersurface& S, const Vec& x) {
  const Manifold& M = S.manifold();
  const auto k = static_cast<Eigen::Index>(M.rank());
  Vec g(k);
  for (Eigen::Index i = 0; i < k; ++i)
    g[i] = oracle::fd_directional([&](const Vec& y) { return S.value(y); }, x,
                                  M.field(static_cast<std::size_t>(i))(x));
  return g / g.norm();
}

// sum_i X_i(V^i) with nested finite differences.
double fd_horizontal_divergence_of_normal(const Hypersurface& S, const Vec& p) {
  const Manifold& M = S.manifold();
  double H = 0.0;
  for (std::size_t i = 0; i < M.rank(); ++i)
    H += oracle::fd_directional([&](const Vec& y) { return fd_unit_normal(S, y)[static_cast<Eigen::Index>(i)]; },
                                p, M.field(i)(p), 1e-4);
  return H;
}

oracle::FieldFn tangent_chart_field(const Hypersurface& S, std::size_t dropped, std::size_t a) {
  return [&S, dropped, a](const Vec& x) {
    const TangentFrameSection t(S, dropped, a);
    const auto k = static_cast<Eigen::Index>(S.manifold().rank());
    return Vec(S.manifold().frame_matrix(x).leftCols(k) * t(x));
  };
}

// tau_b + phi * (x1, 1, 0, 0): same values on S, different extension off S.
class PerturbedTangent : public SectionBase<PerturbedTangent> {
 public:
  PerturbedTangent(const Hypersurface& S, std::size_t dropped, std::size_t b) : S_(&S), tau_(S, dropped, b) {}
  std::size_t rank() const override { return S_->manifold().rank(); }

  template <class T>
  void components(std::span<const T> x, std::span<T> out) const {
    tau_.components<T>(x, out);
    const T f = S_->phi().eval<T>(x);
    out[0] = out[0] + f * x[0];
    out[1] = out[1] + f;
  }

 private:
  const Hypersurface* S_;
  TangentFrameSection tau_;
};

}  // namespace

TEST(HorizontalNormal, SphereAtEquatorPoint) {
  const auto S = gauge_sphere(h2());
  const HorizontalNormal n = S->horizontal_normal(v5(1, 0, 0, 0, 0));
  EXPECT_NEAR(n.frame_gradient[0], 4.0, 1e-14);
  for (int a = 1; a < 5; ++a) EXPECT_NEAR(n.frame_gradient[a], 0.0, 1e-14);
  EXPECT_NEAR(n.ratio, 1.0, 1e-14);
  EXPECT_NEAR(n.unit[0], 1.0, 1e-14);
}

TEST(HorizontalNormal, MatchesFiniteDifferences) {
  const auto M = h2();
  const auto S = gauge_sphere(M);
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec p = sphere_point(*S, rng);
    const HorizontalNormal n = S->horizontal_normal(p);
    for (std::size_t a = 0; a < 5; ++a) {
      const double fd = oracle::fd_directional([&](const Vec& y) { return S->value(y); }, p, M->field(a)(p));
      EXPECT_NEAR(n.frame_gradient[static_cast<Eigen::Index>(a)], fd, 1e-7);
    }
    EXPECT_NEAR((n.unit - fd_unit_normal(*S, p)).norm(), 0.0, 1e-7);
    EXPECT_LE(n.ratio, 1.0 + 1e-15);
  }
}

TEST(HorizontalNormal, ZeroGradientThrows) {
  const auto M = h2();
  const Hypersurface S(M, parse("x1^2 + t^2", M->variables()));
  EXPECT_THROW(S.horizontal_normal(Vec::Zero(5)), ZeroGradient);
}

TEST(Characteristic, SpherePolesOnly) {
  const auto S = gauge_sphere(h2());
  EXPECT_TRUE(S->is_characteristic(v5(0, 0, 0, 0, 1)));
  EXPECT_TRUE(S->is_characteristic(v5(0, 0, 0, 0, -1)));
  EXPECT_FALSE(S->is_characteristic(v5(1, 0, 0, 0, 0)));
  EXPECT_THROW(S->is_characteristic(v5(0, 0, 0, 0, 2)), NotOnSurface);
  EXPECT_THROW(S->horizontal_tangent_frame(v5(0, 0, 0, 0, 1)), CharacteristicPoint);
  EXPECT_THROW(S->second_fundamental_form(v5(0, 0, 0, 0, 1)), CharacteristicPoint);
}

TEST(Characteristic, GridScanFindsTheTwoPoles) {
  const auto S = gauge_sphere(h2());
  const GridSpec grid{std::vector<Interval>(5, Interval{-1.2, 1.2}), {4, 4, 4, 4, 6}};
  const auto found = S->find_characteristic_points(grid);
  ASSERT_EQ(found.size(), 2u);
  EXPECT_LT((found[0].point - v5(0, 0, 0, 0, -1)).norm(), 1e-6);
  EXPECT_LT((found[1].point - v5(0, 0, 0, 0, 1)).norm(), 1e-6);
  for (const auto& c : found) {
    EXPECT_LT(c.ratio, 1e-6);
    EXPECT_GT(c.members, 0u);
  }
}

TEST(Characteristic, HyperplaneHasNone) {
  const auto M = h2();
  const Hypersurface S(M, parse("x1", M->variables()));
  const GridSpec grid{std::vector<Interval>(5, Interval{-1.0, 1.0}), {3, 3, 3, 3, 3}};
  EXPECT_TRUE(S.find_characteristic_points(grid).empty());
}

TEST(Projection, LandsOnSurface) {
  const auto S = gauge_sphere(h2());
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec p = S->project_to_surface(oracle::random_point(rng, 5, -1.5, 1.5));
    EXPECT_LT(std::fabs(S->value(p)), 1e-12);
  }
  const auto M = h2();
  const Hypersurface empty(M, parse("x1^2 + 1", M->variables()));
  EXPECT_THROW(empty.project_to_surface(v5(0.5, 0, 0, 0, 0)), Error);
}

TEST(TangentFrame, OrthonormalHorizontalAndTangent) {
  const auto M = h2();
  const auto S = gauge_sphere(M);
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec p = sphere_point(*S, rng);
    const HorizontalTangentFrame f = S->horizontal_tangent_frame(p);
    ASSERT_EQ(f.tangent.size(), 3u);
    const Vec grad = S->gradient(p);
    for (std::size_t a = 0; a < 3; ++a) {
      EXPECT_NEAR(f.tangent[a].dot(f.normal), 0.0, 1e-12);
      for (std::size_t b = 0; b < 3; ++b)
        EXPECT_NEAR(f.tangent[a].dot(f.tangent[b]), a == b ? 1.0 : 0.0, 1e-12);
      // d phi of the chart vector vanishes: tangent to S
      EXPECT_NEAR(grad.dot(M->chart_vector(f.tangent[a], p)), 0.0, 1e-10);
    }
    EXPECT_GE(std::fabs(f.normal[static_cast<Eigen::Index>(f.dropped)]), f.normal.cwiseAbs().maxCoeff() - 1e-15);
  }
}

TEST(SecondForm, HyperplaneIsFlat) {
  const auto M = h2();
  const Hypersurface S(M, parse("x1", M->variables()));
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 10; ++trial) {
    Vec p = oracle::random_point(rng, 5, -2, 2);
    p[0] = 0.0;
    const HorizontalTangentFrame f = S.horizontal_tangent_frame(p);
    EXPECT_NEAR(f.normal[0], 1.0, 1e-15);
    EXPECT_EQ(f.dropped, 0u);
    const CurvatureReport r = S.second_fundamental_form(p);
    EXPECT_LT(r.h.cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(std::fabs(S.mean_curvature_divergence_form(p)), 1e-12);
  }
}

TEST(SecondForm, TraceMatchesDivergenceOfNormal) {
  const auto S = gauge_sphere(h2());
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec p = sphere_point(*S, rng);
    const CurvatureReport r = S->second_fundamental_form(p);
    const double H = S->mean_curvature_divergence_form(p);
    EXPECT_NEAR(r.mean, H, 1e-9);
    EXPECT_NEAR(H, fd_horizontal_divergence_of_normal(*S, p), 1e-5);
    EXPECT_NEAR(r.kappa.sum(), r.mean, 1e-9);
  }
}

TEST(SecondForm, SphereEquatorRegression) {
  // frozen from the nested finite-difference oracle
  const auto S = gauge_sphere(h2());
  const Vec p = v5(1, 0, 0, 0, 0);
  EXPECT_NEAR(fd_horizontal_divergence_of_normal(*S, p), 5.0, 1e-5);
  EXPECT_NEAR(S->second_fundamental_form(p).mean, 5.0, 1e-10);
}

TEST(SecondForm, IndependentOfTangentExtension) {
  const auto S = gauge_sphere(h2());
  std::mt19937_64 rng(36);
  for (int trial = 0; trial < 10; ++trial) {
    const Vec p = sphere_point(*S, rng);
    const HorizontalTangentFrame f = S->horizontal_tangent_frame(p);
    const CurvatureReport r = S->second_fundamental_form(p);
    const Connection& D = S->connection();
    for (std::size_t b = 0; b < 3; ++b) {
      const PerturbedTangent tb(*S, f.dropped, b);
      for (std::size_t a = 0; a < 3; ++a) {
        const double h = -D.covariant_derivative(f.tangent[a], tb, p, D.gamma(p)).dot(f.normal);
        EXPECT_NEAR(h, r.h(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)), 1e-10);
      }
    }
  }
}

// h_ab - h_ba = -g([tau_a, tau_b]^H, V); the bracket of two horizontal tangent fields need not
// stay horizontal-tangent on the gauge sphere, so h is not symmetric off the equator.
TEST(SecondForm, AsymmetryEqualsNormalPartOfBracket) {
  const auto M = h2();
  const auto S = gauge_sphere(M);
  std::mt19937_64 rng(37);
  double largest = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const Vec p = sphere_point(*S, rng, 0.2);
    const HorizontalTangentFrame f = S->horizontal_tangent_frame(p);
    const CurvatureReport r = S->second_fundamental_form(p);
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = a + 1; b < 3; ++b) {
        const Vec br = oracle::fd_bracket(tangent_chart_field(*S, f.dropped, a),
                                          tangent_chart_field(*S, f.dropped, b), p);
        const double normal_part = M->frame_components(br, p).head(4).dot(f.normal);
        const double skew = r.h(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) -
                            r.h(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a));
        EXPECT_NEAR(skew, -normal_part, 1e-6);
      }
    largest = std::max(largest, r.asymmetry);
  }
  EXPECT_GT(largest, 0.1);
}

TEST(SecondForm, SymmetricOnEquator) {
  const auto S = gauge_sphere(h2());
  std::mt19937_64 rng(38);
  for (int trial = 0; trial < 10; ++trial)
    EXPECT_LT(S->second_fundamental_form(equator_point(rng)).asymmetry, 1e-10);
}

TEST(MeanCurvature, NotCarnotThrows) {
  const auto M = fixtures::shared(fixtures::martinet());
  const Hypersurface S(M, parse("x - 0.5", M->variables()));
  Vec p(3);
  p << 0.5, 0.1, 0.2;
  EXPECT_THROW(S.mean_curvature_divergence_form(p), NotCarnot);
}

TEST(Divergence, TangentDivergenceMatchesFiniteDifferences) {
  const auto M = h2();
  const auto S = gauge_sphere(M);
  std::mt19937_64 rng(39);
  for (int trial = 0; trial < 10; ++trial) {
    const Vec p = sphere_point(*S, rng);
    const HorizontalTangentFrame f = S->horizontal_tangent_frame(p);
    const TangentCombination Y(*S, f.dropped,
                               {parse("1 + x1*y2", M->variables()), parse("sin(t)", M->variables()),
                                parse("x2 - 0.3", M->variables())});
    // Gamma = 0 on H^2, so D_tau Y = tau(Y^i) X_i
    double oracle_div = 0.0;
    for (const Vec& t : f.tangent) {
      const Vec dir = M->chart_vector(t, p);
      for (Eigen::Index i = 0; i < 4; ++i)
        oracle_div += t[i] * oracle::fd_directional([&](const Vec& y) { return Y(y)[i]; }, p, dir);
    }
    EXPECT_NEAR(S->tangent_divergence(Y, p), oracle_div, 1e-7);
  }
}

TEST(Divergence, NormalFieldIsNotTangent) {
  const auto S = gauge_sphere(h2());
  EXPECT_THROW(S->tangent_divergence(UnitNormalSection(*S), v5(1, 0, 0, 0, 0)), NotTangent);
}

TEST(Divergence, SurfaceDivergenceMatchesChristoffelOracle) {
  const auto M = h2();
  const auto S = gauge_sphere(M);
  std::mt19937_64 rng(40);
  for (int trial = 0; trial < 5; ++trial) {
    const Vec p = sphere_point(*S, rng);
    const HorizontalTangentFrame f = S->horizontal_tangent_frame(p);
    const TangentCombination Y(*S, f.dropped,
                               {parse("x1 + t", M->variables()), Expr(0.4), parse("y1*y1", M->variables())});
    // N(c, a) = g(nabla_{X_a} Y, X_c) with Christoffel symbols of the chart metric
    Mat N = Mat::Zero(5, 5);
    const Vec y = Y(p);
    for (std::size_t a = 0; a < 5; ++a)
      for (std::size_t c = 0; c < 5; ++c) {
        double v = 0.0;
        if (c < 4)
          v += oracle::fd_directional([&](const Vec& x) { return Y(x)[static_cast<Eigen::Index>(c)]; }, p, M->field(a)(p));
        for (std::size_t b = 0; b < 4; ++b)
          v += y[static_cast<Eigen::Index>(b)] * oracle::christoffel_levi_civita(*M, a, b, c, p);
        N(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(a)) = v;
      }
    Vec nu(5);
    for (std::size_t a = 0; a < 5; ++a)
      nu[static_cast<Eigen::Index>(a)] =
          oracle::fd_directional([&](const Vec& x) { return S->value(x); }, p, M->field(a)(p));
    nu /= nu.norm();
    const Mat P = Mat::Identity(5, 5) - nu * nu.transpose();
    EXPECT_NEAR(S->surface_divergence(Y, p), (P * N).trace(), 1e-6);
  }
}

TEST(Divergence, TangentAndSurfaceAgreeOnEquator) {
  const auto M = h2();
  const auto S = gauge_sphere(M);
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const Vec p = equator_point(rng);
    const HorizontalTangentFrame f = S->horizontal_tangent_frame(p);
    const TangentCombination Y(*S, f.dropped,
                               {parse("1 + x1", M->variables()), parse("y2*t", M->variables()), Expr(0.7)});
    EXPECT_NEAR(S->tangent_divergence(Y, p), S->surface_divergence(Y, p), 1e-9);
  }
}

TEST(Divergence, HyperplaneFieldsAgreeEverywhere) {
  const auto M = h2();
  const Hypersurface S(M, parse("x1", M->variables()));
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    Vec p = oracle::random_point(rng, 5, -1, 1);
    p[0] = 0.0;
    const TangentCombination Y(S, 0, {parse("x2*t", M->variables()), parse("y1 - y2", M->variables()), Expr(1.5)});
    EXPECT_NEAR(S.tangent_divergence(Y, p), S.surface_divergence(Y, p), 1e-9);
  }
}
