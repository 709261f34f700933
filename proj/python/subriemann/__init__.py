"""Sub-Riemannian frames, nonholonomic connection, hypersurfaces and steering."""

from ._core import (
    CharacteristicPoint,
    ConfigError,
    Connection,
    Error,
    Hypersurface,
    Manifold,
    NotOnSurface,
    Section,
    commutator_maneuver,
    heisenberg,
    load_hypersurface,
    load_manifold,
    run_cli,
    steer,
)

__all__ = [
    "CharacteristicPoint",
    "ConfigError",
    "Connection",
    "Error",
    "Hypersurface",
    "Manifold",
    "NotOnSurface",
    "Section",
    "commutator_maneuver",
    "heisenberg",
    "load_hypersurface",
    "load_manifold",
    "run_cli",
    "steer",
]
