"""Lobachevsky function and the co-volume of a generalized tetrahedron.

The co-volume is defined by integrating the angle 1-form
``mu = sum_i alpha_i(l) dl_i`` from the origin, plus the constant value at the
origin, ``16 * Lambda(pi / 4)``.  The form is closed, so any path gives the
same value; straight segments are used throughout.
"""

import math

import numpy as np

from . import quadrature
from .hypertet import extended_dihedral_angles

# split point for the log singularity of ln(2 sin t) at t = 0
_SING_SPLIT = 1e-3


def _log_sinc(t):
    # ln(sin t / t), smooth on [0, eps]; the t == 0 limit is 0
    t = np.asarray(t, dtype=float)
    safe = np.where(t == 0.0, 1.0, t)
    return np.where(t == 0.0, 0.0, np.log(np.sin(safe) / safe))


def _log_2sin(t):
    return np.log(2.0 * np.sin(t))


def _integral_log_2sin(theta):
    # int_0^theta ln(2 sin t) dt for 0 <= theta <= pi/2
    if theta == 0.0:
        return 0.0
    eps = min(theta, _SING_SPLIT)
    head = eps * (math.log(2.0 * eps) - 1.0)
    head += quadrature.integrate(_log_sinc, 0.0, eps, order=32, abs_tol=1e-16, rel_tol=0.0,
                                 initial_panels=1)
    if theta > eps:
        head += quadrature.integrate(_log_2sin, eps, theta, order=32, abs_tol=1e-14,
                                     rel_tol=0.0, initial_panels=1)
    return head


def lobachevsky(theta):
    """Lobachevsky function ``Lambda(theta) = -int_0^theta ln|2 sin t| dt``.

    Odd and ``pi``-periodic; ``Lambda(pi/4)`` equals half of Catalan's constant.
    """
    theta = math.fmod(float(theta), math.pi)
    sign = 1.0
    if theta < 0.0:
        theta, sign = -theta, -1.0
    if theta > 0.5 * math.pi:
        theta, sign = math.pi - theta, -sign
    return -sign * _integral_log_2sin(theta)


COV_AT_ZERO = 16.0 * lobachevsky(0.25 * math.pi)


def _segment_integrand(angle_fn, start, direction):
    def f(s):
        pts = start[None, :] + s[:, None] * direction[None, :]
        return angle_fn(pts) @ direction
    return f


def line_integral(angle_fn, start, end, rel_tol=1e-10):
    """Integrate ``sum_i angle_fn(l)_i dl_i`` along the segment ``start -> end``.

    ``angle_fn`` maps an ``(n, d)`` array of points to ``(n, d)`` angles.
    """
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    direction = end - start
    if not np.any(direction):
        return 0.0
    f = _segment_integrand(angle_fn, start, direction)
    return quadrature.integrate(f, 0.0, 1.0, order=16, abs_tol=1e-14, rel_tol=rel_tol)


def line_integral_mu(start, end, rel_tol=1e-10):
    """Integral of the single-tetrahedron angle form along a straight segment."""
    return line_integral(extended_dihedral_angles, start, end, rel_tol=rel_tol)


def tetra_covolume(lengths, rel_tol=1e-10):
    """Co-volume of one generalized tetrahedron; any real lengths are allowed."""
    lengths = np.asarray(lengths, dtype=float)
    if lengths.shape != (6,):
        raise ValueError("tetra_covolume expects six edge lengths")
    return line_integral_mu(np.zeros(6), lengths, rel_tol=rel_tol) + COV_AT_ZERO
