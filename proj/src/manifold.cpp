#include "subriemann/manifold.hpp"

#include <algorithm>
#include <cmath>

namespace subriemann {

Vec VectorField::operator()(const Vec& x) const {
  Vec out(static_cast<Eigen::Index>(coeffs_.size()));
  eval<double>(as_span(x), std::span<double>(out.data(), coeffs_.size()));
  return out;
}

Manifold::Manifold(std::string name, std::vector<std::string> variables, std::size_t rank,
                   std::vector<VectorField> frame, std::vector<Interval> domain,
                   std::vector<Expr> eta, bool carnot)
    : name_(std::move(name)),
      vars_(std::move(variables)),
      rank_(rank),
      frame_(std::move(frame)),
      domain_(std::move(domain)),
      eta_(std::move(eta)),
      carnot_(carnot) {
  const std::size_t m = vars_.size();
  if (m == 0) throw ConfigError("manifold needs at least one coordinate");
  if (rank_ == 0 || rank_ >= m)
    throw ConfigError("horizontal rank must satisfy 0 < rank < dim (rank " + std::to_string(rank_) +
                      ", dim " + std::to_string(m) + ")");
  if (frame_.size() != m)
    throw ConfigError("frame must hold " + std::to_string(m) + " fields, got " +
                      std::to_string(frame_.size()));
  for (std::size_t a = 0; a < m; ++a) {
    if (frame_[a].dim() != m)
      throw ConfigError("frame field " + std::to_string(a + 1) + " has " +
                        std::to_string(frame_[a].dim()) + " coefficients, expected " +
                        std::to_string(m));
    for (const auto& e : frame_[a].coefficients())
      if (e.arity() > m) throw ConfigError("frame coefficient references unknown coordinate");
  }
  if (domain_.empty()) domain_.assign(m, Interval{-1e6, 1e6});
  if (domain_.size() != m) throw ConfigError("domain box must have one interval per coordinate");
  for (const auto& iv : domain_)
    if (!(iv.lo < iv.hi)) throw ConfigError("domain interval must satisfy lo < hi");
  if (!eta_.empty() && eta_.size() != m)
    throw ConfigError("eta must have one component per coordinate");
}

bool Manifold::in_domain(const Vec& p) const {
  if (static_cast<std::size_t>(p.size()) != dim()) return false;
  for (std::size_t a = 0; a < dim(); ++a)
    if (!(p[a] >= domain_[a].lo && p[a] <= domain_[a].hi)) return false;
  return true;
}

void Manifold::require_in_domain(const Vec& p) const {
  if (static_cast<std::size_t>(p.size()) != dim())
    throw OutOfDomain("point has " + std::to_string(p.size()) + " coordinates, manifold '" + name_ +
                      "' has " + std::to_string(dim()));
  if (!in_domain(p)) throw OutOfDomain("point outside the domain box of '" + name_ + "'");
}

Mat Manifold::frame_matrix(const Vec& p) const {
  const std::size_t m = dim();
  Mat F(m, m);
  std::vector<double> col(m);
  for (std::size_t a = 0; a < m; ++a) {
    frame_[a].eval<double>(as_span(p), col);
    for (std::size_t b = 0; b < m; ++b) F(b, a) = col[b];
  }
  return F;
}

namespace {

double condition_number(const Mat& F) {
  Eigen::JacobiSVD<Mat> svd(F);
  const auto& s = svd.singularValues();
  if (s[s.size() - 1] == 0.0) return std::numeric_limits<double>::infinity();
  return s[0] / s[s.size() - 1];
}

}  // namespace

double Manifold::frame_condition(const Vec& p) const { return condition_number(frame_matrix(p)); }

Vec Manifold::frame_components(const Vec& v, const Mat& F) {
  const double cond = condition_number(F);
  if (!(cond <= 1e12))
    throw SingularFrame("frame matrix is singular (condition number " + std::to_string(cond) + ")");
  return F.partialPivLu().solve(v);
}

Vec Manifold::frame_components(const Vec& v, const Vec& p) const {
  return frame_components(v, frame_matrix(p));
}

Vec Manifold::horizontal_projection(const Vec& v, const Vec& p) const {
  const Mat F = frame_matrix(p);
  const Vec c = frame_components(v, F);
  const auto k = static_cast<Eigen::Index>(rank_);
  return F.leftCols(k) * c.head(k);
}

Vec Manifold::chart_vector(const Vec& components, const Vec& p) const {
  const Mat F = frame_matrix(p);
  return F.leftCols(components.size()) * components;
}

Vec lie_bracket(const VectorField& f, const VectorField& g, const Vec& p) {
  const std::size_t m = f.dim();
  auto ff = [&](auto x, auto out) { f.eval(x, out); };
  auto gg = [&](auto x, auto out) { g.eval(x, out); };
  return bracket_at(ff, gg, m, p);
}

namespace {

template <class T>
void nested_eval(const Manifold& M, std::span<const std::size_t> word, std::span<const T> x,
                 std::span<T> out) {
  if (word.size() == 1) {
    M.eval_field(word[0], x, out);
    return;
  }
  if constexpr (dual_depth_v<T> >= kMaxDualDepth) {
    throw Error("bracket word longer than supported derivative depth");
  } else {
    auto head = [&](auto xs, auto o) { M.eval_field(word[0], xs, o); };
    auto tail = [&](auto xs, auto o) { nested_eval(M, word.subspan(1), xs, o); };
    bracket_eval<T>(head, tail, M.dim(), x, out);
  }
}

std::size_t numerical_rank(const Mat& vectors, double rank_tol) {
  if (vectors.cols() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(vectors);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > rank_tol * s[0]) ++r;
  return r;
}

}  // namespace

Vec nested_bracket(const Manifold& M, std::span<const std::size_t> word, const Vec& p) {
  if (word.empty()) throw Error("empty bracket word");
  if (word.size() > kMaxGrowthDepth) throw Error("bracket word too long");
  Vec out(static_cast<Eigen::Index>(M.dim()));
  nested_eval<double>(M, word, as_span(p), std::span<double>(out.data(), M.dim()));
  return out;
}

GrowthVector growth_vector(const Manifold& M, const Vec& p, std::size_t max_depth,
                           double rank_tol) {
  if (max_depth < 1) throw Error("growth_vector: max_depth must be at least 1");
  if (max_depth > kMaxGrowthDepth)
    throw Error("growth_vector: max_depth above " + std::to_string(kMaxGrowthDepth) +
                " is not supported");
  M.require_in_domain(p);
  const std::size_t m = M.dim();
  const std::size_t k = M.rank();

  GrowthVector gv;
  gv.max_depth = max_depth;
  std::vector<Vec> span_vectors;
  std::vector<std::vector<std::size_t>> words;
  for (std::size_t i = 0; i < k; ++i) words.push_back({i});

  for (std::size_t depth = 1; depth <= max_depth; ++depth) {
    if (depth > 1) {
      std::vector<std::vector<std::size_t>> next;
      for (const auto& w : words)
        for (std::size_t i = 0; i < k; ++i) {
          // [X_i, X_j] and [X_j, X_i] span the same line; [X_i, X_i] = 0.
          if (w.size() == 1 && i >= w[0]) continue;
          std::vector<std::size_t> nw{i};
          nw.insert(nw.end(), w.begin(), w.end());
          next.push_back(std::move(nw));
        }
      words = std::move(next);
    }
    for (const auto& w : words) span_vectors.push_back(nested_bracket(M, w, p));
    Mat A(m, span_vectors.size());
    for (std::size_t c = 0; c < span_vectors.size(); ++c) A.col(c) = span_vectors[c];
    gv.dims.push_back(numerical_rank(A, rank_tol));
    if (gv.dims.back() == m) {
      gv.degree = depth;
      break;
    }
  }
  return gv;
}

Manifold make_heisenberg(std::size_t n) {
  if (n < 1) throw ConfigError("heisenberg: n must be at least 1");
  const std::size_t m = 2 * n + 1;
  std::vector<std::string> vars;
  for (std::size_t j = 1; j <= n; ++j) vars.push_back("x" + std::to_string(j));
  for (std::size_t j = 1; j <= n; ++j) vars.push_back("y" + std::to_string(j));
  vars.push_back("t");

  std::vector<VectorField> frame;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<Expr> c(m, Expr(0.0));
    c[j] = Expr(1.0);
    c[m - 1] = Expr(2.0) * Expr::variable(n + j);
    frame.emplace_back(std::move(c));
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<Expr> c(m, Expr(0.0));
    c[n + j] = Expr(1.0);
    c[m - 1] = Expr(-2.0) * Expr::variable(j);
    frame.emplace_back(std::move(c));
  }
  std::vector<Expr> tc(m, Expr(0.0));
  tc[m - 1] = Expr(1.0);
  frame.emplace_back(std::move(tc));

  std::vector<Expr> eta(m, Expr(0.0));
  for (std::size_t j = 0; j < n; ++j) {
    eta[j] = Expr(-0.5) * Expr::variable(n + j);
    eta[n + j] = Expr(0.5) * Expr::variable(j);
  }
  eta[m - 1] = Expr(0.25);

  return Manifold("heisenberg:" + std::to_string(n), std::move(vars), 2 * n, std::move(frame),
                  std::vector<Interval>(m, Interval{-100.0, 100.0}), std::move(eta), true);
}

Manifold rotate_horizontal_pair(const Manifold& M, std::size_t i, std::size_t j, const Expr& theta,
                                std::string name) {
  if (i >= M.rank() || j >= M.rank() || i == j)
    throw Error("rotate_horizontal_pair: indices must be distinct horizontal indices");
  std::vector<VectorField> frame = M.frame();
  const Expr c = cos(theta);
  const Expr s = sin(theta);
  std::vector<Expr> fi, fj;
  for (std::size_t a = 0; a < M.dim(); ++a) {
    const Expr& xi = M.field(i)[a];
    const Expr& xj = M.field(j)[a];
    fi.push_back(c * xi + s * xj);
    fj.push_back(Expr(0.0) - s * xi + c * xj);
  }
  frame[i] = VectorField(std::move(fi));
  frame[j] = VectorField(std::move(fj));
  return Manifold(std::move(name), M.variables(), M.rank(), std::move(frame), M.domain(), M.eta(),
                  false);
}

namespace {

void require_horizontal(const Manifold& M, const Vec& v, const Vec& p, const char* which) {
  const Vec h = M.horizontal_projection(v, p);
  if ((v - h).norm() > 1e-9 * std::max(1.0, v.norm()))
    throw NotHorizontal(std::string("contact_curvature_form: ") + which + " is not horizontal");
}

}  // namespace

double contact_curvature_form(const Manifold& M, std::span<const Expr> eta, const Vec& u,
                              const Vec& v, const Vec& p) {
  const std::size_t m = M.dim();
  const std::size_t k = M.rank();
  if (eta.size() != m) throw Error("contact_curvature_form: eta must have one entry per coordinate");
  require_horizontal(M, u, p, "u");
  require_horizontal(M, v, p, "v");
  const Mat F = M.frame_matrix(p);
  const Vec cu = Manifold::frame_components(u, F).head(k);
  const Vec cv = Manifold::frame_components(v, F).head(k);

  // Frame extensions with constant horizontal components.
  auto extension = [&](const Vec& comps) {
    return [&M, comps, m, k](auto x, auto out) {
      using T = typename decltype(out)::value_type;
      std::vector<T> col(m);
      for (std::size_t a = 0; a < m; ++a) out[a] = T(0.0);
      for (std::size_t i = 0; i < k; ++i) {
        M.eval_field(i, x, std::span<T>(col));
        for (std::size_t a = 0; a < m; ++a) out[a] = out[a] + comps[i] * col[a];
      }
    };
  };
  auto U = extension(cu);
  auto V = extension(cv);
  auto pairing = [&](auto x, const auto& field) {
    using T = typename std::remove_cv_t<typename decltype(x)::element_type>;
    std::vector<T> w(m);
    field(x, std::span<T>(w));
    T s(0.0);
    for (std::size_t a = 0; a < m; ++a) s = s + eta[a].template eval<T>(x) * w[a];
    return s;
  };
  auto directional = [&](const Vec& dir, const auto& field) {
    std::vector<Real1> x(m);
    for (std::size_t a = 0; a < m; ++a) x[a] = Real1(p[a], dir[a]);
    return pairing(std::span<const Real1>(x), field).d;
  };
  const Vec Up = F.leftCols(k) * cu;
  const Vec Vp = F.leftCols(k) * cv;
  const Vec br = bracket_at(U, V, m, p);
  double eta_br = 0.0;
  for (std::size_t a = 0; a < m; ++a) eta_br += eta[a].eval<double>(as_span(p)) * br[a];
  return directional(Up, V) - directional(Vp, U) - eta_br;
}

Mat contact_curvature_matrix(const Manifold& M, std::span<const Expr> eta, const Vec& p) {
  const std::size_t k = M.rank();
  Mat W = Mat::Zero(k, k);
  const Mat F = M.frame_matrix(p);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      W(i, j) = contact_curvature_form(M, eta, F.col(i), F.col(j), p);
      W(j, i) = -W(i, j);
    }
  return W;
}

}  // namespace subriemann
