"""Curvature, co-volume and the functional H on a triangulation."""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .covolume import COV_AT_ZERO, line_integral
from .errors import DimensionError, DomainError, NotRealizableError
from .hypertet import extended_dihedral_angles, phi_all

TWO_PI = 2.0 * math.pi


def _as_metric(tri, lengths):
    lengths = np.asarray(lengths, dtype=float)
    if lengths.shape != (tri.class_count,):
        raise DimensionError(
            f"metric has shape {lengths.shape}, expected ({tri.class_count},)")
    return lengths


def lift(tri, lengths):
    """Per-tetrahedron edge lengths, shape ``(tet_count, 6)``."""
    return _as_metric(tri, lengths)[tri.class_of]


def tetra_angles(tri, lengths, threads=1):
    """Extended dihedral angles of every tetrahedron, shape ``(tet_count, 6)``.

    With ``threads > 1`` the tetrahedra are split into contiguous blocks and
    evaluated concurrently; the blocks are reassembled in order.
    """
    lifted = lift(tri, lengths)
    if threads is None or threads <= 1 or tri.tet_count < 2:
        return extended_dihedral_angles(lifted)
    blocks = np.array_split(lifted, min(threads, tri.tet_count))
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(extended_dihedral_angles, blocks))
    return np.concatenate(parts)


def cone_angles(tri, lengths, threads=1):
    """Total dihedral angle around each edge class."""
    angles = tetra_angles(tri, lengths, threads)
    # bincount accumulates in (tet, local edge) order: fixed summation order
    return np.bincount(tri.class_of.ravel(), weights=angles.ravel(),
                       minlength=tri.class_count)


def curvature(tri, lengths, threads=1):
    """Generalized Ricci curvature ``K_e = 2 pi - (cone angle at e)``.

    Lengths must be strictly positive.
    """
    lengths = _as_metric(tri, lengths)
    if not np.all(lengths > 0):
        raise DomainError("metric must be strictly positive")
    return TWO_PI - cone_angles(tri, lengths, threads)


def covolume(tri, lengths, rel_tol=1e-10):
    """Sum of the per-tetrahedron co-volumes at the lifted lengths.

    Computed as one line integral of the summed angle form along the straight
    segment from the origin in edge-class coordinates; any real lengths are
    allowed (negative entries are clamped inside the angle formula).
    """
    lengths = _as_metric(tri, lengths)
    return line_integral(_batched_cone(tri), np.zeros_like(lengths), lengths,
                         rel_tol=rel_tol) + tri.tet_count * COV_AT_ZERO


def _batched_cone(tri):
    flat = tri.class_of.ravel()
    m = tri.class_count

    def cone(points):
        # points: (n, m) -> cone angles (n, m)
        angles = extended_dihedral_angles(points[:, tri.class_of])
        n = points.shape[0]
        index = (np.arange(n)[:, None] * m + flat[None, :]).ravel()
        return np.bincount(index, weights=angles.reshape(n, -1).ravel(),
                           minlength=n * m).reshape(n, m)

    return cone


def functional_H(tri, lengths, rel_tol=1e-10):
    """``H(l) = cov(l) - 2 pi * sum(l)``; its gradient is ``-K``."""
    lengths = _as_metric(tri, lengths)
    return covolume(tri, lengths, rel_tol) - TWO_PI * float(np.sum(lengths))


def metric_realizable(tri, lengths):
    """Per-tetrahedron realizability flags (all cosines strictly in (-1, 1))."""
    lifted = lift(tri, lengths)
    if not np.all(lifted > 0):
        raise DomainError("metric must be strictly positive")
    p = phi_all(np.cosh(lifted))
    return np.all((p > -1.0) & (p < 1.0), axis=1)


def phi_values(tri, lengths):
    """Unclamped cosine values for every tetra-edge, shape ``(tet_count, 6)``."""
    return phi_all(np.cosh(np.maximum(lift(tri, lengths), 0.0)))


@dataclass(frozen=True)
class Jacobian:
    """Finite-difference curvature Jacobian.

    ``raw[i, j]`` approximates ``dK_i / dl_j``; ``sym`` is its symmetric part
    and ``asymmetry`` is ``max |raw - raw.T|``.
    """

    raw: np.ndarray
    sym: np.ndarray
    asymmetry: float


def curvature_jacobian(tri, lengths, rel_step=1e-5):
    """Central-difference Jacobian of the curvature map.

    Requires every tetrahedron to be realizable at ``lengths`` (and at the
    perturbed points), since the clamped extension is not differentiable on
    the boundary of the realizable set.
    """
    lengths = _as_metric(tri, lengths)
    if not np.all(metric_realizable(tri, lengths)):
        raise NotRealizableError("not realizable: Jacobian needs an interior point")
    m = lengths.size
    raw = np.empty((m, m))
    for j in range(m):
        h = rel_step * max(1.0, abs(lengths[j]))
        up = lengths.copy()
        up[j] += h
        down = lengths.copy()
        down[j] -= h
        if not (np.all(metric_realizable(tri, up)) and np.all(metric_realizable(tri, down))):
            raise NotRealizableError("not realizable: finite-difference stencil leaves the region")
        raw[:, j] = (curvature(tri, up) - curvature(tri, down)) / (2.0 * h)
    sym = 0.5 * (raw + raw.T)
    return Jacobian(raw, sym, float(np.max(np.abs(raw - raw.T))))
