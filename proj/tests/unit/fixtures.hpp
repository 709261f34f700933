#pragma once

#include <memory>
#include <string>
#include <vector>

#include "subriemann/manifold.hpp"

namespace fixtures {

using namespace subriemann;

inline Manifold from_strings(const std::string& name, const std::vector<std::string>& vars,
                             std::size_t rank, const std::vector<std::vector<std::string>>& frame) {
  std::vector<VectorField> fields;
  for (const auto& f : frame) {
    std::vector<Expr> c;
    for (const auto& s : f) c.push_back(parse(s, vars));
    fields.emplace_back(std::move(c));
  }
  return Manifold(name, vars, rank, std::move(fields));
}

inline Manifold euclidean3() {
  return from_strings("r3", {"x", "y", "z"}, 2, {{"1", "0", "0"}, {"0", "1", "0"}, {"0", "0", "1"}});
}

// X1 = d/dx, X2 = d/dy + x^2 d/dz, complement d/dz.
inline Manifold martinet() {
  return from_strings("martinet", {"x", "y", "z"}, 2,
                      {{"1", "0", "0"}, {"0", "1", "x^2"}, {"0", "0", "1"}});
}

// H^1 with horizontal frame rotated by the angle t.
inline Manifold rotated_h1() {
  const Manifold h = make_heisenberg(1);
  return rotate_horizontal_pair(h, 0, 1, Expr::variable(2), "heisenberg:1 rotated by t");
}

template <class... A>
std::shared_ptr<const Manifold> shared(A&&... a) {
  return std::make_shared<const Manifold>(std::forward<A>(a)...);
}

}  // namespace fixtures
