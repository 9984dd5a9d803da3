"""Independent oracles used by the test suite.

Nothing here calls into the code paths it is used to check.
"""

import math
from itertools import permutations

import numpy as np


def face_pairings(faces):
    """All perfect matchings of a list of faces."""
    if not faces:
        yield []
        return
    first, rest = faces[0], faces[1:]
    for k, other in enumerate(rest):
        for tail in face_pairings(rest[:k] + rest[k + 1:]):
            yield [(first, other)] + tail


def _perm_sign(p):
    sign = 1
    p = list(p)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def brute_force_edge_classes(tet_count, gluings):
    """Edge classes by repeated relabelling to a fixed point (no union-find).

    ``gluings`` holds ``(a, f, b, g, perm)`` with ``perm`` a full 4-permutation.
    Returns a list of frozensets of ``(tet, frozenset{u, v})`` tetra-edges.
    """
    label = {(t, frozenset(e)): (t, frozenset(e))
             for t in range(tet_count) for e in
             [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]}
    changed = True
    while changed:
        changed = False
        for a, f, b, g, perm in gluings:
            face = [v for v in range(4) if v != f]
            for i in range(3):
                for j in range(i + 1, 3):
                    u, v = face[i], face[j]
                    x = (a, frozenset((u, v)))
                    y = (b, frozenset((perm[u], perm[v])))
                    lo = min(label[x], label[y], key=repr)
                    if label[x] != lo or label[y] != lo:
                        old = {label[x], label[y]}
                        for key, val in label.items():
                            if val in old:
                                label[key] = lo
                        changed = True
    groups = {}
    for key, val in label.items():
        groups.setdefault(val, set()).add(key)
    return [frozenset(s) for s in groups.values()]


def single_edge_gluings(tet_count=2, orientable_only=False):
    """Yield closed gluing tables whose tetra-edges collapse to one class.

    Exhaustive over face pairings and vertex maps.  Each table is a list of
    ``(a, f, b, g, perm)``.
    """
    faces = [(t, f) for t in range(tet_count) for f in range(4)]
    for pairing in face_pairings(faces):
        choices = []
        for (a, f), (b, g) in pairing:
            src = [v for v in range(4) if v != f]
            dst = [v for v in range(4) if v != g]
            opts = []
            for img in permutations(dst):
                perm = [0] * 4
                for u, v in zip(src, img):
                    perm[u] = v
                perm[f] = g
                opts.append((a, f, b, g, tuple(perm)))
            choices.append(opts)
        for combo in _product(choices):
            if orientable_only and not all(_perm_sign(p[4]) == -1 for p in combo):
                continue
            if len(brute_force_edge_classes(tet_count, combo)) == 1:
                yield list(combo)


def _product(lists):
    if not lists:
        yield ()
        return
    for head in lists[0]:
        for tail in _product(lists[1:]):
            yield (head,) + tail


def catalan_half(terms=60):
    """Half of Catalan's constant from the alternating series over odd k.

    Uses Euler's transform on the alternating series sum (-1)^n / (2n+1)^2.
    """
    a = [1.0 / (2 * n + 1) ** 2 for n in range(terms)]
    # Euler transform: sum_k (-1)^k Delta^k a_0 / 2^(k+1)
    total = 0.0
    diffs = a[:]
    for k in range(terms - 1):
        total += diffs[0] / 2.0 ** (k + 1)
        diffs = [diffs[i] - diffs[i + 1] for i in range(len(diffs) - 1)]
        if abs(diffs[0]) / 2.0 ** (k + 2) < 1e-18:
            break
    return 0.5 * total


def bisect_root(f, lo, hi, tol=1e-15):
    """Plain bisection; ``f(lo)`` and ``f(hi)`` must differ in sign."""
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


def example_fixed_point_x():
    """Root of (x^3 + 2x^2 + x) / (2x^3 + 3x^2 - 1) = sqrt(3)/2 on (1, 2)."""
    return bisect_root(
        lambda x: (x ** 3 + 2 * x ** 2 + x) / (2 * x ** 3 + 3 * x ** 2 - 1) - math.sqrt(3) / 2,
        1.0 + 1e-9, 2.0)


def angle_closed_form(lengths, i, j):
    """Cosine function at edge {i, j} (vertices 1..4) written in cosh/sinh form.

    ``lengths`` is a dict keyed by frozenset vertex pairs.
    """
    k, h = sorted({1, 2, 3, 4} - {i, j})
    c = {key: math.cosh(val) for key, val in lengths.items()}
    s = {key: math.sinh(val) for key, val in lengths.items()}

    def C(u, v):
        return c[frozenset((u, v))]

    num = (C(i, k) * C(i, h) + C(j, k) * C(j, h) + C(i, j) * C(i, k) * C(j, h)
           + C(i, j) * C(i, h) * C(j, k) - s[frozenset((i, j))] ** 2 * C(k, h))
    d1 = 2 * C(i, j) * C(i, k) * C(j, k) + C(i, j) ** 2 + C(i, k) ** 2 + C(j, k) ** 2 - 1
    d2 = 2 * C(i, j) * C(i, h) * C(j, h) + C(i, j) ** 2 + C(i, h) ** 2 + C(j, h) ** 2 - 1
    return num / (math.sqrt(d1) * math.sqrt(d2))


def central_difference(f, x, h):
    """Central-difference gradient of a scalar function."""
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = h
        g[k] = (f(x + e) - f(x - e)) / (2 * h)
    return g
