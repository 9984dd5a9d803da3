"""Geometry of a single (generalized) hyper-ideal tetrahedron.

Local edge ordering
-------------------
Vertices of a tetrahedron are ``0..3``.  The six edges are stored in the order

    index   0      1      2      3      4      5
    edge  (0,1)  (0,2)  (0,3)  (2,3)  (1,3)  (1,2)

so that edge ``i`` and edge ``(i + 3) % 6`` are opposite.  With vertices
renamed ``1..4`` this is ``(e12, e13, e14, e34, e24, e23)``.

All functions accept arrays whose last axis has length 6 and broadcast over the
leading axes.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import DomainError

EDGE_VERTICES = ((0, 1), (0, 2), (0, 3), (2, 3), (1, 3), (1, 2))
OPPOSITE = (3, 4, 5, 0, 1, 2)

_EDGE_INDEX = {frozenset(p): k for k, p in enumerate(EDGE_VERTICES)}

# Each face is named by the vertex it omits; its three local edges.
FACE_EDGES = tuple(
    tuple(_EDGE_INDEX[frozenset(p)] for p in combinations(sorted(set(range(4)) - {f}), 2))
    for f in range(4)
)


def edge_index(u, v):
    """Local edge index of the edge joining vertices ``u`` and ``v``."""
    return _EDGE_INDEX[frozenset((u, v))]


def _edge_permutation(edge):
    # Roles in the edge-1 formula for edge {i, j} with far edge {k, h}:
    #   (x1, x2, x3, x4, x5, x6) = (c_ij, c_ik, c_ih, c_kh, c_jh, c_jk)
    i, j = EDGE_VERTICES[edge]
    k, h = sorted(set(range(4)) - {i, j})
    return (
        edge_index(i, j), edge_index(i, k), edge_index(i, h),
        edge_index(k, h), edge_index(j, h), edge_index(j, k),
    )


PHI_PERMUTATIONS = tuple(_edge_permutation(e) for e in range(6))
_PERM_ARRAY = np.array(PHI_PERMUTATIONS)


def _radicands(x):
    x1, x2, x3, x5, x6 = x[..., 0], x[..., 1], x[..., 2], x[..., 4], x[..., 5]
    r0 = 2.0 * x1 * x2 * x6 + x1 * x1 + x2 * x2 + x6 * x6 - 1.0
    r1 = 2.0 * x1 * x3 * x5 + x1 * x1 + x3 * x3 + x5 * x5 - 1.0
    return r0, r1


def _phi_first_edge(x):
    x1, x2, x3, x4, x5, x6 = (x[..., k] for k in range(6))
    num = x2 * x3 + x5 * x6 + x1 * x2 * x5 + x1 * x3 * x6 - (x1 * x1 - 1.0) * x4
    r0, r1 = _radicands(x)
    out = num / np.sqrt(r0 * r1)
    # numerator and denominator both reduce to (x2 + x6)(x3 + x5) here
    return np.where(x1 == 1.0, 1.0, out)


def phi(x, edge=0):
    """Cosine-of-angle function at one edge, as a function of ``cosh`` lengths.

    Parameters
    ----------
    x : array_like, shape (..., 6)
        ``cosh`` of the (clamped) edge lengths; every entry must be >= 1.
    edge : int
        Local edge index ``0..5``.

    Returns
    -------
    ndarray or float
        The unclamped value; inside the realizable region it is the cosine of
        the dihedral angle.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 6:
        raise ValueError("expected a trailing axis of length 6")
    out = _phi_first_edge(x[..., PHI_PERMUTATIONS[edge]])
    return out[()] if out.ndim == 0 else out


def phi_all(x):
    """``phi`` for all six edges at once; output shape matches ``x``."""
    x = np.asarray(x, dtype=float)
    return _phi_first_edge(x[..., _PERM_ARRAY])


def cosh_lengths(lengths):
    """``cosh`` of the lengths after clamping negative entries to zero."""
    return np.cosh(np.maximum(np.asarray(lengths, dtype=float), 0.0))


def extended_dihedral_angles(lengths):
    """Extended dihedral angles for edge lengths in the wide sense.

    Negative lengths are clamped to zero, then ``arccos`` is applied to the
    cosine function clamped to ``[-1, 1]``.  Every returned angle lies in
    ``[0, pi]``.
    """
    return np.arccos(np.clip(phi_all(cosh_lengths(lengths)), -1.0, 1.0))


def _check_positive(lengths):
    lengths = np.asarray(lengths, dtype=float)
    if lengths.shape[-1] != 6:
        raise ValueError("expected a trailing axis of length 6")
    if not np.all(lengths > 0):
        raise DomainError("edge lengths must be strictly positive")
    return lengths


def vertex_edge_length(lengths, apex, pair):
    """Length of a side of the vertex triangle at ``apex``.

    The side lies on the hexagonal face spanned by ``apex`` and the two
    vertices in ``pair``; it is computed from the right-angled hexagon rule
    ``cosh x = (cosh l_ij cosh l_ik + cosh l_jk) / (sinh l_ij sinh l_ik)``.
    """
    lengths = _check_positive(lengths)
    j, k = pair
    if len({apex, j, k}) != 3:
        raise ValueError("apex and pair must be three distinct vertices")
    l_ij = lengths[..., edge_index(apex, j)]
    l_ik = lengths[..., edge_index(apex, k)]
    l_jk = lengths[..., edge_index(j, k)]
    arg = (np.cosh(l_ij) * np.cosh(l_ik) + np.cosh(l_jk)) / (np.sinh(l_ij) * np.sinh(l_ik))
    if not np.all(arg > 1.0):
        raise DomainError("vertex-edge arccosh argument is not > 1")
    out = np.arccosh(arg)
    return out[()] if np.ndim(out) == 0 else out


def phi_via_vertex_triangle(lengths, edge, apex=None):
    """Cosine of the dihedral angle computed in a vertex triangle.

    Uses the hyperbolic law of cosines in the triangle cut off at ``apex``
    (one endpoint of ``edge``; the lower-numbered one by default).  For
    realizable lengths this agrees with :func:`phi` at either endpoint.
    """
    i, j = EDGE_VERTICES[edge]
    if apex is None:
        apex = i
    if apex not in (i, j):
        raise ValueError("apex must be an endpoint of the edge")
    j = j if apex == i else i
    k, h = sorted(set(range(4)) - {apex, j})
    a_jk = vertex_edge_length(lengths, apex, (j, k))
    a_jh = vertex_edge_length(lengths, apex, (j, h))
    a_kh = vertex_edge_length(lengths, apex, (k, h))
    return (np.cosh(a_jk) * np.cosh(a_jh) - np.cosh(a_kh)) / (np.sinh(a_jk) * np.sinh(a_jh))


@dataclass(frozen=True)
class PhiPartials:
    """Analytic partial derivatives of ``phi`` (first edge) in x2, x3, x5, x6."""

    d2: float
    d3: float
    d5: float
    d6: float
    a0: float
    a1: float


def phi_partials(x):
    """Partials of the first-edge cosine function with respect to x2, x3, x5, x6.

    At ``x1 == 1`` both prefactors vanish and exact zeros are returned.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (6,):
        raise ValueError("phi_partials expects a single 6-vector")
    x1, x2, x3, x4, x5, x6 = (float(v) for v in x)
    if x1 == 1.0:
        return PhiPartials(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    r0, r1 = _radicands(x)
    r0, r1 = float(r0), float(r1)
    a0 = (x1 * x1 - 1.0) * r0 ** -1.5 * r1 ** -0.5
    a1 = (x1 * x1 - 1.0) * r0 ** -0.5 * r1 ** -1.5
    p = x1 * x4 + x2 * x5 - x3 * x6
    q = x1 * x4 - x2 * x5 + x3 * x6
    return PhiPartials(
        d2=a0 * (p * x6 + x3 + x1 * x5 + x2 * x4),
        d3=a1 * (q * x5 + x2 + x1 * x6 + x3 * x4),
        d5=a1 * (p * x3 + x6 + x1 * x2 + x5 * x4),
        d6=a0 * (q * x2 + x5 + x1 * x3 + x6 * x4),
        a0=a0,
        a1=a1,
    )


def corner_bound(x1, a):
    """Upper bound for the first-edge cosine when all other ``x_i <= a``.

    Maximum over the three corner configurations
    ``(x1,a,a,1,a,a)``, ``(x1,a,1,1,a,1)`` and ``(x1,a,a,1,a,1)``.
    """
    if x1 < 1.0 or not a > 1.0:
        raise DomainError("corner_bound needs x1 >= 1 and a > 1")
    corners = np.array([
        [x1, a, a, 1.0, a, a],
        [x1, a, 1.0, 1.0, a, 1.0],
        [x1, a, a, 1.0, a, 1.0],
    ])
    return float(np.max(_phi_first_edge(corners)))


def is_realizable(lengths):
    """True iff the six cosine values all lie strictly inside ``(-1, 1)``.

    Broadcasts over leading axes; returns a bool for a single tetrahedron.
    """
    lengths = _check_positive(lengths)
    p = phi_all(np.cosh(lengths))
    ok = np.all((p > -1.0) & (p < 1.0), axis=-1)
    return bool(ok) if np.ndim(ok) == 0 else ok
