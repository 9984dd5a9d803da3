"""Triangulation data: manifest parsing, gluing validation and edge classes.

Manifest format (UTF-8, line oriented, ``#`` starts a comment)::

    tetrahedra <N>
    glue <a> <f> <b> <g> <p0> <p1> <p2>      # gluing mode
    edges <tet> <c01> <c02> <c03> <c23> <c13> <c12>   # edge-label mode

``glue`` attaches face ``f`` of tetrahedron ``a`` (the face opposite vertex
``f``) to face ``g`` of tetrahedron ``b``, sending the vertices of face ``f``,
in increasing order, to vertices ``p0 p1 p2`` of ``b``.  Each unordered face
pair is listed once.  The two modes cannot be mixed in one file.
"""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ManifestError
from .hypertet import edge_index


class UnionFind:
    """Disjoint sets over ``0..n-1`` with path halving and union by size."""

    def __init__(self, n):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, a):
        parent = self.parent
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return ra


@dataclass(frozen=True)
class Gluing:
    """Face ``face_a`` of ``tet_a`` glued to face ``face_b`` of ``tet_b``.

    ``perm`` is the full vertex permutation ``tet_a -> tet_b``: the face
    vertices go where the manifest says and vertex ``face_a`` goes to
    ``face_b``.
    """

    tet_a: int
    face_a: int
    tet_b: int
    face_b: int
    perm: tuple

    def inverse(self):
        inv = [0] * 4
        for u, v in enumerate(self.perm):
            inv[v] = u
        return Gluing(self.tet_b, self.face_b, self.tet_a, self.face_a, tuple(inv))


@dataclass(frozen=True)
class EdgeClassTable:
    """Edge classes of a triangulation.

    ``class_of[t, e]`` is the class of local edge ``e`` of tetrahedron ``t``;
    ``valence[c]`` counts the tetra-edges in class ``c``.
    """

    class_of: np.ndarray
    valence: np.ndarray

    @property
    def class_count(self):
        return int(self.valence.size)


@dataclass(frozen=True)
class Triangulation:
    """A closed triangulation, from gluings or from direct edge labels."""

    tet_count: int
    classes: EdgeClassTable
    gluings: tuple = field(default=())

    @property
    def mode(self):
        return "glue" if self.gluings else "edges"

    @property
    def class_of(self):
        return self.classes.class_of

    @property
    def valence(self):
        return self.classes.valence

    @property
    def class_count(self):
        return self.classes.class_count

    @property
    def max_valence(self):
        return int(self.valence.max())


def incidence(tri):
    """Map ``(tet, local edge) -> class id`` for every tetra-edge."""
    return {
        (t, e): int(tri.class_of[t, e])
        for t in range(tri.tet_count)
        for e in range(6)
    }


def _freeze(class_of):
    class_of = np.array(class_of, dtype=np.intp)
    class_of.setflags(write=False)
    valence = np.bincount(class_of.ravel())
    valence.setflags(write=False)
    return EdgeClassTable(class_of, valence)


def edge_classes(tet_count, gluings):
    """Edge classes of a closed gluing table by union-find.

    Class ids are assigned in order of first appearance when scanning
    ``(tet, local edge)`` lexicographically.
    """
    uf = UnionFind(6 * tet_count)
    for g in gluings:
        face_vertices = [v for v in range(4) if v != g.face_a]
        for n, u in enumerate(face_vertices):
            for v in face_vertices[n + 1:]:
                here = 6 * g.tet_a + edge_index(u, v)
                there = 6 * g.tet_b + edge_index(g.perm[u], g.perm[v])
                uf.union(here, there)
    ids = {}
    class_of = np.empty((tet_count, 6), dtype=np.intp)
    for t in range(tet_count):
        for e in range(6):
            root = uf.find(6 * t + e)
            class_of[t, e] = ids.setdefault(root, len(ids))
    return _freeze(class_of)


def from_edge_labels(labels):
    """Triangulation read directly from per-tetrahedron class labels."""
    labels = np.asarray(labels, dtype=np.intp)
    if labels.ndim != 2 or labels.shape[1] != 6 or labels.shape[0] == 0:
        raise ManifestError("edge labels must have shape (N, 6) with N >= 1")
    if labels.min() < 0:
        raise ManifestError("class ids must be non-negative")
    used = np.unique(labels)
    if used.size != used[-1] + 1:
        missing = sorted(set(range(int(used[-1]) + 1)) - set(used.tolist()))
        raise ManifestError(f"class ids must be contiguous from 0; missing {missing}")
    return Triangulation(labels.shape[0], _freeze(labels))


def _make_gluing(a, f, b, g, images, tet_count, line):
    for name, val, hi in (("tetrahedron", a, tet_count), ("tetrahedron", b, tet_count),
                          ("face", f, 4), ("face", g, 4)):
        if not 0 <= val < hi:
            raise ManifestError(f"{name} index {val} out of range", line)
    target = sorted(set(range(4)) - {g})
    if sorted(images) != target:
        raise ManifestError(
            f"vertex map {images} is not a bijection onto face {g} of tetrahedron {b}", line)
    perm = [0] * 4
    for u, v in zip([v for v in range(4) if v != f], images):
        perm[u] = v
    perm[f] = g
    return Gluing(a, f, b, g, tuple(perm))


def from_gluings(tet_count, gluings, lines=None):
    """Validate a gluing table and compute its edge classes.

    Each face must appear in exactly one gluing and no face may be glued to
    itself.
    """
    seen = {}
    for n, gl in enumerate(gluings):
        line = lines[n] if lines else None
        ends = [(gl.tet_a, gl.face_a), (gl.tet_b, gl.face_b)]
        if ends[0] == ends[1]:
            raise ManifestError(f"face {gl.face_a} of tetrahedron {gl.tet_a} glued to itself", line)
        for t, f in ends:
            if (t, f) in seen:
                raise ManifestError(
                    f"face {f} of tetrahedron {t} glued twice (first at gluing {seen[(t, f)] + 1})",
                    line)
            seen[(t, f)] = n
    unglued = [(t, f) for t in range(tet_count) for f in range(4) if (t, f) not in seen]
    if unglued:
        t, f = unglued[0]
        raise ManifestError(f"manifest not closed: face {f} of tetrahedron {t} is unglued")
    gluings = tuple(gluings)
    return Triangulation(tet_count, edge_classes(tet_count, gluings), gluings)


def _ints(tokens, line):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ManifestError(f"expected integers, got {' '.join(tokens)!r}", line) from None


def parse_manifest(text):
    """Parse manifest text into a validated :class:`Triangulation`."""
    tet_count = None
    gluings, glue_lines = [], []
    labels = {}
    mode = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        key, args = tokens[0], tokens[1:]
        if tet_count is None:
            if key != "tetrahedra" or len(args) != 1:
                raise ManifestError("first statement must be 'tetrahedra <N>'", lineno)
            (tet_count,) = _ints(args, lineno)
            if tet_count < 1:
                raise ManifestError("tetrahedron count must be positive", lineno)
            continue
        if key not in ("glue", "edges"):
            raise ManifestError(f"unknown statement {key!r}", lineno)
        if mode is not None and key != mode:
            raise ManifestError("'glue' and 'edges' lines cannot be mixed", lineno)
        mode = key
        if key == "glue":
            if len(args) != 7:
                raise ManifestError("'glue' takes 7 integers", lineno)
            a, f, b, g, *images = _ints(args, lineno)
            gluings.append(_make_gluing(a, f, b, g, images, tet_count, lineno))
            glue_lines.append(lineno)
        else:
            if len(args) != 7:
                raise ManifestError("'edges' takes a tetrahedron index and 6 class ids", lineno)
            t, *ids = _ints(args, lineno)
            if not 0 <= t < tet_count:
                raise ManifestError(f"tetrahedron index {t} out of range", lineno)
            if t in labels:
                raise ManifestError(f"tetrahedron {t} labelled twice", lineno)
            labels[t] = ids
    if tet_count is None:
        raise ManifestError("empty manifest")
    if mode == "edges":
        missing = [t for t in range(tet_count) if t not in labels]
        if missing:
            raise ManifestError(f"manifest not closed: tetrahedron {missing[0]} has no edge labels")
        return from_edge_labels([labels[t] for t in range(tet_count)])
    return from_gluings(tet_count, gluings, glue_lines)


def load_manifest(path):
    """Read and parse a manifest file."""
    return parse_manifest(Path(path).read_text(encoding="utf-8"))


def format_manifest(tri):
    """Render a triangulation back to manifest text."""
    out = [f"tetrahedra {tri.tet_count}"]
    if tri.gluings:
        for g in tri.gluings:
            images = [g.perm[v] for v in range(4) if v != g.face_a]
            out.append("glue {} {} {} {} {} {} {}".format(
                g.tet_a, g.face_a, g.tet_b, g.face_b, *images))
    else:
        for t, row in enumerate(tri.class_of):
            out.append("edges {} {}".format(t, " ".join(str(int(c)) for c in row)))
    return "\n".join(out) + "\n"


def sample_manifest_path():
    """Path of the shipped two-tetrahedron, single-edge (valence 12) manifest."""
    return Path(__file__).with_name("data") / "sample2.ptm"
