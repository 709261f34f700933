#include "subriemann/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace subriemann {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(what + ": invalid JSON (" + e.what() + ")");
  }
}

std::size_t parse_count(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used != s.size() || v < 1) throw ConfigError(what);
    return static_cast<std::size_t>(v);
  } catch (const std::logic_error&) {
    throw ConfigError(what);
  }
}

Expr parse_config_expr(const std::string& src, const std::vector<std::string>& vars,
                       const std::string& where) {
  try {
    return parse(src, vars);
  } catch (const Error& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

std::shared_ptr<const Manifold> builtin(const std::string& spec, const std::filesystem::path& base) {
  if (spec.rfind("heisenberg:", 0) == 0) {
    const std::size_t n = parse_count(spec.substr(11), "heisenberg:<n> needs a positive integer n");
    return std::make_shared<const Manifold>(make_heisenberg(n));
  }
  if (spec == "engel") return std::make_shared<const Manifold>(make_carnot(engel_algebra(), "engel"));
  if (spec.rfind("carnot:", 0) == 0) {
    std::filesystem::path file = spec.substr(7);
    if (file.is_relative() && !base.empty()) file = base / file;
    const CarnotAlgebra A = parse_carnot_algebra(read_file(file));
    try {
      return std::make_shared<const Manifold>(make_carnot(A, "carnot:" + file.filename().string()));
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(std::string("carnot algebra '") + file.string() + "': " + e.what());
    }
  }
  return nullptr;
}

template <class T>
T field(const json& j, const char* key, const std::string& what) {
  if (!j.contains(key)) throw ConfigError(what + ": missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(what + ": '" + key + "' has the wrong type");
  }
}

}  // namespace

CarnotAlgebra parse_carnot_algebra(const std::string& text) {
  const json j = parse_json(text, "carnot algebra");
  const auto grading = field<std::vector<std::size_t>>(j, "grading", "carnot algebra");
  if (grading.empty()) throw ConfigError("carnot algebra: empty grading");
  std::size_t dim = 0;
  for (auto g : grading) {
    if (g == 0) throw ConfigError("carnot algebra: grading layers must be nonempty");
    dim += g;
  }
  CarnotAlgebra A(dim, grading);
  if (j.contains("brackets")) {
    for (const json& b : j.at("brackets")) {
      const auto pair = field<std::vector<std::size_t>>(b, "pair", "carnot bracket");
      const auto value = field<std::vector<double>>(b, "value", "carnot bracket");
      if (pair.size() != 2 || pair[0] < 1 || pair[1] < 1 || pair[0] > dim || pair[1] > dim)
        throw ConfigError("carnot bracket: 'pair' needs two indices in 1.." + std::to_string(dim));
      if (value.size() != dim)
        throw ConfigError("carnot bracket: 'value' needs " + std::to_string(dim) + " entries");
      A.set_bracket(pair[0] - 1, pair[1] - 1, value);
    }
  }
  try {
    A.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("carnot algebra: ") + e.what());
  }
  return A;
}

std::shared_ptr<const Manifold> parse_manifold_config(const std::string& text,
                                                      const std::filesystem::path& base) {
  const json j = parse_json(text, "manifold config");
  if (j.contains("builtin")) {
    const auto spec = field<std::string>(j, "builtin", "manifold config");
    auto M = builtin(spec, base);
    if (!M) throw ConfigError("manifold config: unknown builtin '" + spec + "'");
    return M;
  }
  const auto vars = field<std::vector<std::string>>(j, "vars", "manifold config");
  const auto rank = field<std::size_t>(j, "rank", "manifold config");
  const auto frame = field<std::vector<std::vector<std::string>>>(j, "frame", "manifold config");
  const std::size_t m = vars.size();
  if (j.contains("dim") && field<std::size_t>(j, "dim", "manifold config") != m)
    throw ConfigError("manifold config: 'dim' does not match the number of variables");
  if (rank == 0 || rank > m) throw ConfigError("manifold config: rank must lie in 1..dim");
  if (frame.size() != m)
    throw ConfigError("manifold config: frame needs " + std::to_string(m) +
                      " fields (horizontal ones first, then the complement)");
  std::vector<VectorField> fields;
  for (std::size_t a = 0; a < m; ++a) {
    if (frame[a].size() != m)
      throw ConfigError("manifold config: frame field " + std::to_string(a + 1) + " needs " +
                        std::to_string(m) + " components");
    std::vector<Expr> c;
    for (std::size_t b = 0; b < m; ++b)
      c.push_back(parse_config_expr(frame[a][b], vars,
                                    "frame field " + std::to_string(a + 1) + " component " + std::to_string(b + 1)));
    fields.emplace_back(std::move(c));
  }
  std::vector<Interval> domain;
  if (j.contains("domain")) {
    const auto d = field<std::vector<std::vector<double>>>(j, "domain", "manifold config");
    if (d.size() != m) throw ConfigError("manifold config: domain needs one interval per variable");
    for (const auto& iv : d) {
      if (iv.size() != 2 || !(iv[0] < iv[1])) throw ConfigError("manifold config: domain intervals are [lo, hi] with lo < hi");
      domain.push_back({iv[0], iv[1]});
    }
  }
  std::vector<Expr> eta;
  if (j.contains("eta")) {
    const auto e = field<std::vector<std::string>>(j, "eta", "manifold config");
    if (e.size() != m) throw ConfigError("manifold config: eta needs one coefficient per variable");
    for (std::size_t a = 0; a < m; ++a) eta.push_back(parse_config_expr(e[a], vars, "eta component " + std::to_string(a + 1)));
  }
  const std::string name = j.contains("name") ? field<std::string>(j, "name", "manifold config") : "manifold";
  try {
    return std::make_shared<const Manifold>(name, vars, rank, std::move(fields), std::move(domain),
                                            std::move(eta), false);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("manifold config: ") + e.what());
  }
}

std::shared_ptr<const Manifold> load_manifold(const std::string& spec) {
  if (auto M = builtin(spec, std::filesystem::current_path())) return M;
  const std::filesystem::path path(spec);
  return parse_manifold_config(read_file(path), path.parent_path());
}

std::shared_ptr<const Hypersurface> load_hypersurface(const std::string& path,
                                                      std::shared_ptr<const Manifold> manifold) {
  const json j = parse_json(read_file(path), "surface config");
  const auto phi = field<std::string>(j, "phi", "surface config");
  if (!manifold) {
    const auto spec = field<std::string>(j, "manifold", "surface config");
    const auto base = std::filesystem::path(path).parent_path();
    manifold = builtin(spec, base);
    if (!manifold) {
      std::filesystem::path p(spec);
      if (p.is_relative()) p = base / p;
      manifold = load_manifold(p.string());
    }
  }
  try {
    return std::make_shared<const Hypersurface>(manifold, parse_config_expr(phi, manifold->variables(), "phi"));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("surface config: ") + e.what());
  }
}

}  // namespace subriemann
