"""Zero-curvature hyper-ideal metrics via the extended combinatorial Ricci flow."""

from .analysis import fit_rate, spectral_check, verify_bounds
from .complex import (Triangulation, from_edge_labels, load_manifest, parse_manifest,
                      sample_manifest_path)
from .covolume import lobachevsky, tetra_covolume
from .curvature import covolume, curvature, curvature_jacobian, functional_H
from .flow import FlowConfig, newton_refine, run_flow, solve
from .hypertet import (corner_bound, extended_dihedral_angles, is_realizable, phi,
                       phi_partials, vertex_edge_length)

__version__ = "0.1.0"

__all__ = [
    "FlowConfig", "Triangulation", "corner_bound", "covolume", "curvature",
    "curvature_jacobian", "extended_dihedral_angles", "fit_rate", "from_edge_labels",
    "functional_H", "is_realizable", "load_manifest", "lobachevsky", "newton_refine",
    "parse_manifest", "phi", "phi_partials", "run_flow", "sample_manifest_path", "solve",
    "spectral_check",
    "tetra_covolume", "verify_bounds", "vertex_edge_length",
]
