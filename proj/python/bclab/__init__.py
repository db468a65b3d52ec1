"""Boundary-control reconstruction lab: forward spectral data, wave spans, inverse pipeline."""

from ._core import (
    BclabError,
    BoundarySpectralData,
    GridManifold,
    branching_witness,
    compare_synthesis,
    defaults_text,
    distance_map,
    forward,
    is_boundary_distance,
    manifold,
    perturb,
    presets,
    principal_angles,
    read_data,
    reconstruct,
    spearman,
    spectral_data_distance,
    travel_length,
    wave_span,
    write_data,
)

__all__ = [
    "BclabError",
    "BoundarySpectralData",
    "GridManifold",
    "branching_witness",
    "compare_synthesis",
    "defaults_text",
    "distance_map",
    "forward",
    "is_boundary_distance",
    "manifold",
    "perturb",
    "presets",
    "principal_angles",
    "read_data",
    "reconstruct",
    "spearman",
    "spectral_data_distance",
    "travel_length",
    "wave_span",
    "write_data",
]
