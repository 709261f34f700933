#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "subriemann/carnot.hpp"
#include "subriemann/hypersurface.hpp"
#include "subriemann/manifold.hpp"

namespace subriemann {

/// Manifold from a spec string: a built-in name (`heisenberg:<n>`, `engel`,
/// `carnot:<algebra file>`) or the path of a JSON manifold config. Throws ConfigError.
std::shared_ptr<const Manifold> load_manifold(const std::string& spec);

/// JSON manifold config text, e.g.
///   {"vars": ["x","y","t"], "rank": 2, "frame": [["1","0","2*y"], ...],
///    "domain": [[-10,10], ...], "eta": [...]}
/// `base` resolves relative paths of a "builtin": "carnot:<file>" entry.
std::shared_ptr<const Manifold> parse_manifold_config(const std::string& text,
                                                      const std::filesystem::path& base = {});

/// JSON algebra file: {"grading": [2,1,1], "brackets": [{"pair": [1,2], "value": [0,0,1,0]}]}
/// with 1-based basis indices.
CarnotAlgebra parse_carnot_algebra(const std::string& text);

/// Hypersurface config {"phi": "...", "manifold": "<spec>"}; `manifold` overrides the
/// config's own manifold entry when given.
std::shared_ptr<const Hypersurface> load_hypersurface(
    const std::string& path, std::shared_ptr<const Manifold> manifold = nullptr);

}  // namespace subriemann
