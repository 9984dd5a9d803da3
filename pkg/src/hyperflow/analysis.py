"""Post-processing of flow runs: rate fits, bound checks, spectral stability."""

import math
from dataclasses import dataclass

import numpy as np

from .curvature import curvature, curvature_jacobian, metric_realizable
from .errors import InsufficientSamplesError, NotRealizableError

# residuals below this are rounding noise and are left out of rate fits
NOISE_FLOOR = 1e-13
UPPER_BOUND = math.acosh(3.0)


@dataclass(frozen=True)
class ConvergenceReport:
    """Least-squares fit of ``ln max|K|`` against time over a trajectory tail.

    ``rate`` is ``-inf`` when the tail holds no residual above the noise floor.
    """

    rate: float
    intercept: float
    r_squared: float
    tail_fraction: float
    samples: int


def fit_rate(traj, tail_fraction=0.5, min_samples=10):
    """Fit the exponential decay rate of the curvature residual."""
    if not 0.0 < tail_fraction <= 1.0:
        raise ValueError("tail_fraction must lie in (0, 1]")
    n = len(traj.t)
    start = n - max(1, int(math.ceil(tail_fraction * n)))
    t = np.asarray(traj.t[start:], dtype=float)
    res = np.max(np.abs(np.asarray(traj.K[start:], dtype=float)), axis=1)
    if t.size < min_samples:
        raise InsufficientSamplesError(
            f"tail has {t.size} samples, need at least {min_samples}")
    keep = res >= NOISE_FLOOR
    if not keep.any():
        return ConvergenceReport(-math.inf, math.nan, 1.0, tail_fraction, 0)
    if keep.sum() < 2:
        raise InsufficientSamplesError("fewer than two tail samples above the noise floor")
    t, y = t[keep], np.log(res[keep])
    tc = t - t.mean()
    sxx = float(tc @ tc)
    if sxx == 0.0:
        raise InsufficientSamplesError("tail samples share a single time")
    slope = float(tc @ (y - y.mean())) / sxx
    intercept = float(y.mean() - slope * t.mean())
    resid = y - (intercept + slope * t)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float(resid @ resid) / ss_tot
    return ConvergenceReport(slope, intercept, min(1.0, max(0.0, r2)), tail_fraction,
                             int(t.size))


@dataclass(frozen=True)
class BoundCertificate:
    """Result of scanning a trajectory against the a-priori bounds.

    ``lower_bound`` is ``None`` in upper-only mode, where ``lower_ok`` is True
    vacuously.
    """

    mode: str
    upper_ok: bool
    lower_ok: bool
    upper_bound: float
    lower_bound: object
    worst_upper: float
    worst_upper_time: float
    worst_lower: float
    worst_lower_time: float


def verify_bounds(traj, d_max, mode="two_sided"):
    """Check every sample against ``arccosh 3`` and, in mode ``two_sided``, ``1/(3 d_max)``.

    Both bounds are strict.
    """
    if mode not in ("upper", "two_sided"):
        raise ValueError("mode must be 'upper' or 'two_sided'")
    l = np.asarray(traj.l, dtype=float)
    t = np.asarray(traj.t, dtype=float)
    row_max = l.max(axis=1)
    row_min = l.min(axis=1)
    i_hi = int(np.argmax(row_max))
    i_lo = int(np.argmin(row_min))
    upper_ok = bool(np.all(l < UPPER_BOUND))
    lower = None
    lower_ok = True
    if mode == "two_sided":
        lower = 1.0 / (3.0 * d_max)
        lower_ok = bool(np.all(l > lower))
    return BoundCertificate(mode, upper_ok, lower_ok, UPPER_BOUND, lower,
                            float(row_max[i_hi]), float(t[i_hi]),
                            float(row_min[i_lo]), float(t[i_lo]))


def jacobi_eigenvalues(a, tol=1e-12, max_sweeps=100):
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending."""
    a = np.array(a, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    scale = max(1.0, float(np.max(np.abs(a)))) if n else 1.0
    for _ in range(max_sweeps):
        off = math.sqrt(float(np.sum(a * a) - np.sum(np.diag(a) ** 2)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
    return np.sort(np.diag(a))


def scaled_spectrum(jac_sym, lengths):
    """Eigenvalues of ``diag(sqrt l) J diag(sqrt l)``.

    This matrix is similar to ``diag(l) J``, the linearization of the flow at a
    fixed point, so the signs of the spectra agree.
    """
    root = np.sqrt(np.asarray(lengths, dtype=float))
    m = root[:, None] * np.asarray(jac_sym, dtype=float) * root[None, :]
    return jacobi_eigenvalues(0.5 * (m + m.T)), m


@dataclass(frozen=True)
class SpectralResult:
    eigenvalues: np.ndarray
    stable: bool
    asymmetry: float
    trace: float


def spectral_check(tri, l_star, residual_tol=1e-8):
    """Linear stability of the flow at a zero-curvature metric."""
    l_star = np.asarray(l_star, dtype=float)
    if not np.all(metric_realizable(tri, l_star)):
        raise NotRealizableError("not realizable: spectral check needs a realizable metric")
    res = float(np.max(np.abs(curvature(tri, l_star))))
    if res >= residual_tol:
        raise ValueError(f"not a fixed point: max|K| = {res:.3e} >= {residual_tol:g}")
    jac = curvature_jacobian(tri, l_star)
    eig, m = scaled_spectrum(jac.sym, l_star)
    return SpectralResult(eig, bool(np.all(eig < 0.0)), jac.asymmetry, float(np.trace(m)))
