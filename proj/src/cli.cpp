#include "subriemann/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "subriemann/config.hpp"
#include "subriemann/connection.hpp"
#include "subriemann/steering.hpp"

namespace subriemann {

using nlohmann::json;

namespace {

json to_json(const Vec& v) { return std::vector<double>(v.begin(), v.end()); }

json to_json(const Mat& A) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < A.rows(); ++i) rows.push_back(to_json(Vec(A.row(i).transpose())));
  return rows;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  return parts;
}

double to_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw ConfigError("bad number '" + s + "' in " + what);
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError("bad number '" + s + "' in " + what);
  }
}

Vec parse_point(const std::string& s, const Manifold& M) {
  const auto parts = split(s, ',');
  if (parts.size() != M.dim())
    throw ConfigError("point '" + s + "' needs " + std::to_string(M.dim()) + " comma separated coordinates");
  Vec p(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t a = 0; a < parts.size(); ++a) p[static_cast<Eigen::Index>(a)] = to_double(parts[a], "point");
  M.require_in_domain(p);
  return p;
}

Vec parse_vector(const std::string& s, std::size_t n, const std::string& what) {
  const auto parts = split(s, ',');
  if (parts.size() != n) throw ConfigError(what + " needs " + std::to_string(n) + " comma separated entries");
  Vec v(static_cast<Eigen::Index>(n));
  for (std::size_t a = 0; a < n; ++a) v[static_cast<Eigen::Index>(a)] = to_double(parts[a], what);
  return v;
}

// "lo:hi:n" for every coordinate, or one such triple per coordinate separated by commas.
GridSpec parse_grid(const std::string& s, std::size_t m) {
  auto parts = split(s, ',');
  if (parts.size() == 1) parts.assign(m, parts.front());
  if (parts.size() != m) throw ConfigError("grid needs one lo:hi:n triple or one per coordinate");
  GridSpec g;
  for (const auto& p : parts) {
    const auto f = split(p, ':');
    if (f.size() != 3) throw ConfigError("grid entry '" + p + "' is not lo:hi:n");
    const double lo = to_double(f[0], "grid"), hi = to_double(f[1], "grid"), n = to_double(f[2], "grid");
    if (!(lo < hi) || n < 1 || n != std::floor(n)) throw ConfigError("grid entry '" + p + "' needs lo < hi and integer n >= 1");
    g.box.push_back({lo, hi});
    g.counts.push_back(static_cast<std::size_t>(n));
  }
  return g;
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw ConfigError(std::string(name) + " must be positive");
}

// Sampling box: the domain clipped to [-1, 1] per coordinate.
Vec random_point(const Manifold& M, std::mt19937_64& rng) {
  Vec p(static_cast<Eigen::Index>(M.dim()));
  for (std::size_t a = 0; a < M.dim(); ++a) {
    const auto& iv = M.domain()[a];
    std::uniform_real_distribution<double> U(std::max(iv.lo, -1.0), std::min(iv.hi, 1.0));
    p[static_cast<Eigen::Index>(a)] = U(rng);
  }
  return p;
}

std::vector<Vec> random_surface_points(const Hypersurface& S, std::size_t n, std::mt19937_64& rng,
                                       double min_ratio = 1e-3) {
  std::vector<Vec> pts;
  for (std::size_t tries = 0; pts.size() < n && tries < 100 * n + 100; ++tries) {
    try {
      const Vec p = S.project_to_surface(random_point(S.manifold(), rng));
      if (S.manifold().in_domain(p) && S.horizontal_normal(p).ratio >= min_ratio) pts.push_back(p);
    } catch (const Error&) {
    }
  }
  if (pts.size() < n) throw Error("could not sample enough noncharacteristic surface points");
  return pts;
}

Expr random_quadratic(std::mt19937_64& rng, std::size_t m) {
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  Expr e(c(rng));
  for (std::size_t a = 0; a < m; ++a) {
    e = e + Expr(c(rng)) * Expr::variable(a);
    for (std::size_t b = a; b < m; ++b) e = e + Expr(c(rng)) * Expr::variable(a) * Expr::variable(b);
  }
  return e;
}

ExprSection random_section(std::mt19937_64& rng, const Manifold& M) {
  std::vector<Expr> c;
  for (std::size_t i = 0; i < M.rank(); ++i) c.push_back(random_quadratic(rng, M.dim()));
  return ExprSection(std::move(c));
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  for (std::size_t i = 0; i < header.size(); ++i) f << (i ? "," : "") << header[i];
  f << "\n" << std::setprecision(17);
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) f << (i ? "," : "") << r[i];
    f << "\n";
  }
}

void write_curve(const std::string& path, const Manifold& M, const HorizontalCurve& c) {
  std::vector<std::string> header{"t"};
  for (const auto& v : M.variables()) header.push_back(v);
  std::vector<std::vector<double>> rows;
  for (const auto& s : c.samples) {
    std::vector<double> r{s.t};
    r.insert(r.end(), s.x.begin(), s.x.end());
    rows.push_back(std::move(r));
  }
  write_csv(path, header, rows);
}

json diagnostics_json(const HorizontalCurve& c) {
  return {{"length", c.length},
          {"duration", c.duration()},
          {"samples", c.samples.size()},
          {"segments", c.segments.size()},
          {"max_phi_drift", c.diagnostics.max_phi_drift},
          {"max_horizontality_residual", c.diagnostics.max_horizontality_residual},
          {"endpoint_error", c.diagnostics.endpoint_error},
          {"energy_drift", c.diagnostics.energy_drift}};
}

json steer_json(const SteerResult& r) {
  json j = {{"success", r.success},     {"status", r.status},        {"distance", r.distance},
            {"maneuvers", r.maneuvers}, {"iterations", r.history.size()}, {"diagnostics", diagnostics_json(r.curve)}};
  if (!r.curve.samples.empty()) j["end"] = to_json(r.curve.end());
  if (!r.success) j["reason"] = r.reason;
  if (!r.witness.empty()) j["witness"] = r.witness;
  return j;
}

const char* error_type(const Error& e) {
#define SR_ERROR_NAME(T) \
  if (dynamic_cast<const T*>(&e)) return #T;
  SR_ERROR_NAME(SyntaxError)
  SR_ERROR_NAME(UnknownVariable)
  SR_ERROR_NAME(DomainError)
  SR_ERROR_NAME(SingularFrame)
  SR_ERROR_NAME(GradingViolation)
  SR_ERROR_NAME(JacobiViolation)
  SR_ERROR_NAME(NotHorizontal)
  SR_ERROR_NAME(ZeroGradient)
  SR_ERROR_NAME(NotOnSurface)
  SR_ERROR_NAME(CharacteristicPoint)
  SR_ERROR_NAME(ExtensionFailure)
  SR_ERROR_NAME(NotCarnot)
  SR_ERROR_NAME(NotTangent)
  SR_ERROR_NAME(NewtonDivergence)
  SR_ERROR_NAME(StepFailure)
  SR_ERROR_NAME(CharacteristicEncounter)
  SR_ERROR_NAME(NearOrigin)
  SR_ERROR_NAME(OutOfDomain)
  SR_ERROR_NAME(ConfigError)
#undef SR_ERROR_NAME
  return "Error";
}

bool is_config_error(const Error& e) {
  return dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const SyntaxError*>(&e) ||
         dynamic_cast<const UnknownVariable*>(&e) || dynamic_cast<const OutOfDomain*>(&e) ||
         dynamic_cast<const NotOnSurface*>(&e) || dynamic_cast<const GradingViolation*>(&e) ||
         dynamic_cast<const JacobiViolation*>(&e);
}

// Options shared by the subcommands; only the ones a command registers are used.
struct Options {
  std::string manifold, surface, out, grid = "-1.2:1.2:4", coeffs;
  std::vector<std::string> points;
  std::string from, to, velocity;
  double tol = -1.0, dt = 1e-3, horizon = 40.0, time = 1.0, corrupt = 0.0;
  std::uint64_t seed = 1;
  std::size_t trials = 20, samples = 10, depth = kMaxGrowthDepth;
};

struct Loaded {
  std::shared_ptr<const Manifold> M;
  std::shared_ptr<const Hypersurface> S;
};

Loaded load(const Options& o, bool need_surface) {
  Loaded l;
  if (!o.manifold.empty()) l.M = load_manifold(o.manifold);
  if (!o.surface.empty()) {
    l.S = load_hypersurface(o.surface, l.M);
    l.M = l.S->manifold_ptr();
  }
  if (need_surface && !l.S) throw ConfigError("--surface is required");
  if (!l.M) throw ConfigError("--manifold or --surface is required");
  return l;
}

double tol_or(const Options& o, double fallback) {
  if (o.tol == -1.0) return fallback;
  require_positive(o.tol, "--tol");
  return o.tol;
}

std::vector<Vec> surface_points(const Options& o, const Hypersurface& S, std::mt19937_64& rng) {
  std::vector<Vec> pts;
  for (const auto& s : o.points) {
    const Vec p = parse_point(s, S.manifold());
    S.is_characteristic(p);  // NotOnSurface check
    pts.push_back(p);
  }
  if (pts.empty()) pts = random_surface_points(S, o.samples, rng);
  return pts;
}

int emit(std::ostream& out, const json& j, int code) {
  out << j.dump(2) << "\n";
  return code;
}

// ---------------------------------------------------------------------------

json growth_report(const Manifold& M, const Vec& p, std::size_t depth) {
  const GrowthVector g = growth_vector(M, p, depth);
  json j = {{"point", to_json(p)}, {"growth", g.dims}, {"chow", g.full()}};
  j["degree"] = g.degree ? json(*g.degree) : json(nullptr);
  return j;
}

std::vector<Vec> describe_points(const Options& o, const Manifold& M) {
  std::vector<Vec> pts;
  for (const auto& s : o.points) pts.push_back(parse_point(s, M));
  if (pts.empty()) {
    Vec zero = Vec::Zero(static_cast<Eigen::Index>(M.dim()));
    if (M.in_domain(zero)) pts.push_back(zero);
    std::mt19937_64 rng(o.seed);
    while (pts.size() < 3) pts.push_back(random_point(M, rng));
  }
  return pts;
}

int cmd_describe(const Options& o, std::ostream& out) {
  const Loaded l = load(o, false);
  const Manifold& M = *l.M;
  if (o.depth < 1 || o.depth > kMaxGrowthDepth) throw ConfigError("--depth must lie in 1.." + std::to_string(kMaxGrowthDepth));
  json frame = json::array();
  for (const auto& f : M.frame()) {
    json c = json::array();
    for (const auto& e : f.coefficients()) c.push_back(e.to_string(M.variables()));
    frame.push_back(c);
  }
  json pts = json::array();
  bool chow = true;
  for (const Vec& p : describe_points(o, M)) {
    json r = growth_report(M, p, o.depth);
    chow = chow && r["chow"].get<bool>();
    if (!M.eta().empty()) {
      const Mat C = contact_curvature_matrix(M, M.eta(), p);
      r["contact"] = std::fabs(C.determinant()) > 1e-10;
    }
    pts.push_back(r);
  }
  json j = {{"name", M.name()},   {"dim", M.dim()},   {"rank", M.rank()},     {"vars", M.variables()},
            {"carnot", M.is_carnot()}, {"frame", frame}, {"depth_limit", o.depth}, {"points", pts},
            {"chow", chow}};
  if (l.S) j["surface"] = l.S->phi().to_string(M.variables());
  return emit(out, j, kExitPass);
}

int cmd_chow(const Options& o, std::ostream& out) {
  const Loaded l = load(o, false);
  if (o.depth < 1 || o.depth > kMaxGrowthDepth) throw ConfigError("--depth must lie in 1.." + std::to_string(kMaxGrowthDepth));
  json pts = json::array();
  bool chow = true;
  for (const Vec& p : describe_points(o, *l.M)) {
    json r = growth_report(*l.M, p, o.depth);
    chow = chow && r["chow"].get<bool>();
    pts.push_back(r);
  }
  return emit(out, {{"chow", chow}, {"depth_limit", o.depth}, {"points", pts}}, chow ? kExitPass : kExitTolerance);
}

int cmd_connection_verify(const Options& o, std::ostream& out) {
  const Loaded l = load(o, false);
  const double tol = tol_or(o, 1e-7);
  if (o.trials == 0) throw ConfigError("--trials must be positive");
  Connection D(l.M);
  D.set_gamma_perturbation(o.corrupt);
  std::mt19937_64 rng(o.seed);
  AxiomResiduals worst;
  double projection = 0.0;
  for (std::size_t t = 0; t < o.trials; ++t) {
    const ExprSection U = random_section(rng, *l.M), V = random_section(rng, *l.M), W = random_section(rng, *l.M);
    const Vec p = random_point(*l.M, rng);
    const AxiomResiduals r = D.verify_axioms(U, V, W, p);
    worst.compatibility = std::max(worst.compatibility, r.compatibility);
    worst.symmetry = std::max(worst.symmetry, r.symmetry);
    worst.leibniz = std::max(worst.leibniz, r.leibniz);
    worst.linearity = std::max(worst.linearity, r.linearity);
    projection = std::max(projection, D.verify_projection(U, V, p));
  }
  const bool pass = worst.max() < tol && projection < tol;
  json j = {{"manifold", l.M->name()},
            {"trials", o.trials},
            {"seed", o.seed},
            {"tolerance", tol},
            {"residuals",
             {{"compatibility", worst.compatibility},
              {"symmetry", worst.symmetry},
              {"leibniz", worst.leibniz},
              {"linearity", worst.linearity},
              {"projection", projection}}},
            {"pass", pass}};
  return emit(out, j, pass ? kExitPass : kExitTolerance);
}

int cmd_char_scan(const Options& o, std::ostream& out) {
  const Loaded l = load(o, true);
  const double tol = tol_or(o, 1e-6);
  const GridSpec grid = parse_grid(o.grid, l.M->dim());
  const auto found = l.S->find_characteristic_points(grid, tol);
  json rows = json::array();
  std::vector<std::vector<double>> csv;
  for (const auto& c : found) {
    rows.push_back({{"point", to_json(c.point)}, {"ratio", c.ratio}, {"objective", c.objective}, {"members", c.members}});
    std::vector<double> r(c.point.begin(), c.point.end());
    r.push_back(c.ratio);
    r.push_back(c.objective);
    csv.push_back(std::move(r));
  }
  if (!o.out.empty()) {
    std::vector<std::string> header = l.M->variables();
    header.push_back("ratio");
    header.push_back("objective");
    write_csv(o.out, header, csv);
  }
  return emit(out, {{"seeds", grid.size()}, {"tolerance", tol}, {"count", found.size()}, {"candidates", rows}}, kExitPass);
}

int cmd_mean_curvature(const Options& o, std::ostream& out) {
  const Loaded l = load(o, true);
  const double tol = tol_or(o, 1e-7);
  std::mt19937_64 rng(o.seed);
  json rows = json::array();
  double worst = 0.0;
  for (const Vec& p : surface_points(o, *l.S, rng)) {
    json r = {{"point", to_json(p)}};
    if (l.S->is_characteristic(p)) {
      r["characteristic"] = true;
      rows.push_back(r);
      continue;
    }
    const CurvatureReport c = l.S->second_fundamental_form(p);
    r["H"] = c.mean;
    if (l.M->is_carnot()) {
      const double H = l.S->mean_curvature_divergence_form(p);
      r["H_divergence"] = H;
      r["residual"] = std::fabs(c.mean - H);
      worst = std::max(worst, std::fabs(c.mean - H));
    }
    rows.push_back(r);
  }
  const bool pass = worst < tol;
  return emit(out, {{"tolerance", tol}, {"max_residual", worst}, {"points", rows}, {"pass", pass}},
              pass ? kExitPass : kExitTolerance);
}

int cmd_second_form(const Options& o, std::ostream& out) {
  const Loaded l = load(o, true);
  const double tol = tol_or(o, 1e-7);
  std::mt19937_64 rng(o.seed);
  json rows = json::array();
  double worst = 0.0;
  for (const Vec& p : surface_points(o, *l.S, rng)) {
    const CurvatureReport c = l.S->second_fundamental_form(p);
    worst = std::max(worst, c.asymmetry);
    rows.push_back({{"point", to_json(p)},
                    {"h", to_json(c.h)},
                    {"h_sym", to_json(c.h_sym)},
                    {"kappa", to_json(c.kappa)},
                    {"mean", c.mean},
                    {"gaussian", c.gaussian},
                    {"asymmetry", c.asymmetry}});
  }
  const bool pass = worst < tol;
  return emit(out, {{"tolerance", tol}, {"max_asymmetry", worst}, {"points", rows}, {"pass", pass}},
              pass ? kExitPass : kExitTolerance);
}

int cmd_tangent_div(const Options& o, std::ostream& out) {
  const Loaded l = load(o, true);
  const double tol = tol_or(o, 1e-7);
  const std::size_t q = l.M->rank() - 1;
  std::vector<Expr> coeffs;
  if (o.coeffs.empty()) {
    coeffs.assign(q, Expr(1.0));
  } else {
    for (const auto& s : split(o.coeffs, ';')) coeffs.push_back(parse(s, l.M->variables()));
    if (coeffs.size() != q) throw ConfigError("--coeffs needs " + std::to_string(q) + " expressions separated by ';'");
  }
  std::mt19937_64 rng(o.seed);
  json rows = json::array();
  double worst = 0.0;
  for (const Vec& p : surface_points(o, *l.S, rng)) {
    const HorizontalTangentFrame f = l.S->horizontal_tangent_frame(p);
    const TangentCombination Y(*l.S, f.dropped, coeffs);
    const double dt = l.S->tangent_divergence(Y, p), ds = l.S->surface_divergence(Y, p);
    worst = std::max(worst, std::fabs(dt - ds));
    rows.push_back({{"point", to_json(p)}, {"tangent_divergence", dt}, {"surface_divergence", ds}, {"difference", std::fabs(dt - ds)}});
  }
  const bool pass = worst < tol;
  return emit(out, {{"tolerance", tol}, {"max_difference", worst}, {"points", rows}, {"pass", pass}},
              pass ? kExitPass : kExitTolerance);
}

int cmd_geodesic(const Options& o, std::ostream& out) {
  const Loaded l = load(o, false);
  const double tol = tol_or(o, 1e-6);
  require_positive(o.dt, "--dt");
  require_positive(o.time, "--time");
  if (o.points.size() != 1) throw ConfigError("geodesic needs exactly one --point");
  const Vec p0 = parse_point(o.points.front(), *l.M);
  const Vec c0 = o.velocity.empty() ? Vec(Vec::Unit(static_cast<Eigen::Index>(l.M->rank()), 0))
                                    : parse_vector(o.velocity, l.M->rank(), "--velocity");
  const Connection D(l.M);
  const HorizontalCurve c = D.geodesic(p0, c0, o.time, o.dt);
  if (!o.out.empty()) write_curve(o.out, *l.M, c);
  const bool pass = c.diagnostics.energy_drift < tol;
  return emit(out, {{"start", to_json(p0)}, {"end", to_json(c.end())}, {"tolerance", tol},
                    {"diagnostics", diagnostics_json(c)}, {"pass", pass}},
              pass ? kExitPass : kExitTolerance);
}

SteerParams steer_params(const Options& o) {
  SteerParams params;
  require_positive(o.dt, "--dt");
  require_positive(o.horizon, "--horizon");
  params.dt = o.dt;
  params.horizon = o.horizon;
  params.seed = o.seed;
  params.tol_endpoint = tol_or(o, 1e-3);
  return params;
}

int cmd_steer(const Options& o, std::ostream& out) {
  const Loaded l = load(o, false);
  const SteerParams params = steer_params(o);
  const Vec p = parse_point(o.from, *l.M), q = parse_point(o.to, *l.M);
  const ControlSystem sys = l.S ? ControlSystem(l.S) : ControlSystem(l.M);
  const SteerResult r = steer(sys, p, q, params);
  if (!o.out.empty()) write_curve(o.out, *l.M, r.curve);
  return emit(out, steer_json(r), r.success ? kExitPass : kExitTolerance);
}

int cmd_h1_demo(const Options& o, std::ostream& out) {
  Options fixed = o;
  if (o.from.empty()) fixed.from = "1,1,0";
  if (o.to.empty()) fixed.to = "1,2,0";
  const SteerParams params = steer_params(fixed);
  const auto H = std::make_shared<const Manifold>(make_heisenberg(1));
  const auto L = std::make_shared<const Hypersurface>(H, parse("t", H->variables()));
  const ControlSystem sys(L);
  const Vec p = parse_point(fixed.from, *H), q = parse_point(fixed.to, *H);
  L->is_characteristic(p);
  L->is_characteristic(q);

  // horizontal curves through p in both directions of its one-dimensional T^H L_t
  const std::size_t choice = sys.frame_choice(p);
  double deviation = 0.0;
  for (double sign : {1.0, -1.0}) {
    Vec u(1);
    u << sign;
    const double reach = p.head(2).norm();
    const HorizontalCurve c = integrate_control(sys, p, {{u, 0.9 * reach, choice}}, params);
    deviation = std::max(deviation, h1_trap_invariant(c.samples));
  }
  const SteerResult r = steer(sys, p, q, params);
  if (!o.out.empty()) write_curve(o.out, *H, r.curve);
  const bool trapped = deviation < 1e-8;
  const bool pass = trapped && !r.success && r.status == "obstructed";
  return emit(out, {{"ratio_deviation", deviation}, {"ratio_conserved", trapped}, {"steer", steer_json(r)}, {"pass", pass}},
              pass ? kExitPass : kExitTolerance);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical toolkit for sub-Riemannian manifolds and their hypersurfaces", "subriemann"};
  app.require_subcommand(1);
  Options o;

  auto manifold = [&](CLI::App* c) { c->add_option("--manifold", o.manifold, "builtin name or manifold config file"); };
  auto surface = [&](CLI::App* c) { c->add_option("--surface", o.surface, "hypersurface config file"); };
  auto points = [&](CLI::App* c) {
    c->add_option("--point", o.points, "comma separated coordinates (repeatable)");
    c->add_option("--samples", o.samples, "random points when no --point is given");
  };
  auto seed = [&](CLI::App* c) { c->add_option("--seed", o.seed, "RNG seed"); };
  auto tol = [&](CLI::App* c) { c->add_option("--tol", o.tol, "tolerance"); };
  auto depth = [&](CLI::App* c) { c->add_option("--depth", o.depth, "bracket depth limit"); };

  std::vector<std::pair<CLI::App*, std::function<int()>>> cmds;
  auto add = [&](const char* name, const char* help, std::function<int()> run) {
    CLI::App* c = app.add_subcommand(name, help);
    cmds.emplace_back(c, std::move(run));
    return c;
  };

  auto* describe = add("describe", "frame, growth vectors and Chow verdict", [&] { return cmd_describe(o, out); });
  manifold(describe), surface(describe), points(describe), seed(describe), depth(describe);

  auto* chow = add("chow", "Chow condition at sample points (exit 1 when it fails)", [&] { return cmd_chow(o, out); });
  manifold(chow), surface(chow), points(chow), seed(chow), depth(chow);

  auto* cv = add("connection-verify", "axiom residuals of the nonholonomic connection", [&] { return cmd_connection_verify(o, out); });
  manifold(cv), seed(cv), tol(cv);
  cv->add_option("--trials", o.trials, "random section triples");
  cv->add_option("--corrupt-gamma", o.corrupt)->group("");

  auto* scan = add("char-scan", "grid search for characteristic points", [&] { return cmd_char_scan(o, out); });
  manifold(scan), surface(scan), tol(scan);
  scan->add_option("--grid", o.grid, "lo:hi:n, or one triple per coordinate separated by commas");
  scan->add_option("--out", o.out, "CSV of candidates");

  auto* mc = add("mean-curvature", "trace of h against sum X_i(V^i)", [&] { return cmd_mean_curvature(o, out); });
  manifold(mc), surface(mc), points(mc), seed(mc), tol(mc);

  auto* sf = add("second-form", "horizontal second fundamental form", [&] { return cmd_second_form(o, out); });
  manifold(sf), surface(sf), points(sf), seed(sf), tol(sf);

  auto* td = add("tangent-div", "horizontal tangent divergence against the surface divergence", [&] { return cmd_tangent_div(o, out); });
  manifold(td), surface(td), points(td), seed(td), tol(td);
  td->add_option("--coeffs", o.coeffs, "coefficients of Y over the tangent frame, separated by ';'");

  auto* geo = add("geodesic", "integrate D_c' c' = 0", [&] { return cmd_geodesic(o, out); });
  manifold(geo), tol(geo);
  geo->add_option("--point", o.points, "start point");
  geo->add_option("--velocity", o.velocity, "initial horizontal frame components");
  geo->add_option("--time", o.time, "duration");
  geo->add_option("--dt", o.dt, "step");
  geo->add_option("--out", o.out, "CSV of samples");

  auto* st = add("steer", "horizontal curve between two points", [&] { return cmd_steer(o, out); });
  manifold(st), surface(st), seed(st), tol(st);
  st->add_option("--from", o.from, "start point")->required();
  st->add_option("--to", o.to, "target point")->required();
  st->add_option("--dt", o.dt, "integrator step");
  st->add_option("--horizon", o.horizon, "total time budget");
  st->add_option("--out", o.out, "CSV of curve samples (t, coordinates)");

  auto* demo = add("h1-demo", "conserved ratio y/x in the plane t = 0 of H^1", [&] { return cmd_h1_demo(o, out); });
  seed(demo);
  demo->add_option("--from", o.from, "start point (default 1,1,0)");
  demo->add_option("--to", o.to, "target point on another ray (default 1,2,0)");
  demo->add_option("--dt", o.dt, "integrator step");
  demo->add_option("--out", o.out, "CSV of the attempted curve");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitConfig;
  }

  for (auto& [c, run] : cmds) {
    if (!c->parsed()) continue;
    try {
      return run();
    } catch (const Error& e) {
      const int code = is_config_error(e) ? kExitConfig : kExitTolerance;
      err << error_type(e) << ": " << e.what() << "\n";
      return emit(out, {{"error", {{"type", error_type(e)}, {"message", e.what()}}}}, code);
    }
  }
  return kExitConfig;
}

}  // namespace subriemann
