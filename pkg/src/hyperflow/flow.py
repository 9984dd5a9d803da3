"""Integration of the extended Ricci flow ``dl/dt = K(l) * l``.

Two integrators are provided: fixed-step classical RK4 and the adaptive
Runge-Kutta-Fehlberg 4(5) pair.  A step whose result would leave the positive
orthant is rejected and retried with half the step size.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import analysis
from .curvature import curvature, curvature_jacobian, functional_H, metric_realizable, phi_values
from .errors import DomainError, NotRealizableError, NumericalFailure, SingularJacobianError

log = logging.getLogger(__name__)

CONVERGED = "converged"
T_MAX_REACHED = "t_max_reached"
DIVERGED = "diverged"

MIN_STEP = 1e-14
STIFFNESS_CAP = 1.0

# Fehlberg 4(5) tableau; the 4th-order weights propagate the solution.
_RKF_A = (
    (),
    (1 / 4,),
    (3 / 32, 9 / 32),
    (1932 / 2197, -7200 / 2197, 7296 / 2197),
    (439 / 216, -8.0, 3680 / 513, -845 / 4104),
    (-8 / 27, 2.0, -3544 / 2565, 1859 / 4104, -11 / 40),
)
_RKF_B4 = (25 / 216, 0.0, 1408 / 2565, 2197 / 4104, -1 / 5, 0.0)
_RKF_B5 = (16 / 135, 0.0, 6656 / 12825, 28561 / 56430, -9 / 50, 2 / 55)


@dataclass
class FlowConfig:
    """Integrator settings.

    ``rtol``/``atol`` drive the adaptive method; ``dt`` is the fixed RK4 step
    and the initial trial step for RKF45.  ``unscaled`` switches the right-hand
    side to ``dl/dt = K(l)`` for comparison runs only.
    """

    method: str = "rkf45"
    dt: float = 0.01
    rtol: float = 1e-8
    atol: float = 1e-10
    t_max: float = 500.0
    stop_tol: float = 1e-10
    record_every: int = 1
    record_H: bool = True
    threads: int = 1
    unscaled: bool = False

    def __post_init__(self):
        if self.method not in ("rk4", "rkf45"):
            raise ValueError(f"unknown method {self.method!r}")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.t_max > 0:
            raise ValueError("t_max must be positive")
        if not self.stop_tol > 0:
            raise ValueError("stop_tol must be positive")
        if not (self.rtol > 0 and self.atol > 0):
            raise ValueError("tolerances must be positive")
        if int(self.record_every) < 1:
            raise ValueError("record_every must be >= 1")


@dataclass
class FlowTrajectory:
    """Recorded samples of a flow run.

    ``H`` is ``nan`` for every sample when H recording is disabled.
    """

    t: np.ndarray
    l: np.ndarray
    K: np.ndarray
    H: np.ndarray
    status: str
    steps: int = 0
    rejected: int = 0

    @property
    def final_metric(self):
        return self.l[-1].copy()

    @property
    def final_residual(self):
        return float(np.max(np.abs(self.K[-1])))

    def __len__(self):
        return self.t.size


class _Recorder:
    def __init__(self, tri, cfg):
        self.tri = tri
        self.cfg = cfg
        self.t, self.l, self.K, self.H = [], [], [], []

    def add(self, t, l, K):
        if self.t and t <= self.t[-1]:
            return
        self.t.append(t)
        self.l.append(l.copy())
        self.K.append(K.copy())
        self.H.append(functional_H(self.tri, l) if self.cfg.record_H else math.nan)

    def finish(self, status, steps, rejected):
        return FlowTrajectory(
            np.array(self.t), np.array(self.l), np.array(self.K), np.array(self.H),
            status, steps, rejected)


def _rk4_step(rhs, y, h, k1):
    k2 = rhs(y + 0.5 * h * k1)
    k3 = rhs(y + 0.5 * h * k2)
    k4 = rhs(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _rkf45_step(rhs, y, h, k1):
    ks = [k1]
    for a in _RKF_A[1:]:
        ks.append(rhs(y + h * sum(ai * ki for ai, ki in zip(a, ks))))
    y4 = y + h * sum(b * k for b, k in zip(_RKF_B4, ks))
    y5 = y + h * sum(b * k for b, k in zip(_RKF_B5, ks))
    # local Lipschitz estimate from the first two stages
    dy = np.max(np.abs(0.25 * h * k1))
    rho = float(np.max(np.abs(ks[1] - k1)) / dy) if dy > 0 else 0.0
    return y4, y5 - y4, rho


def run_flow(tri, l0, cfg=None):
    """Integrate the extended Ricci flow from ``l0``.

    Stops with status ``converged`` once ``max |K| < stop_tol``, with
    ``t_max_reached`` at ``t_max``, or ``diverged`` if the step size
    underflows (which the global existence of the flow rules out for exact
    solutions, so it points at a numerical problem).
    """
    cfg = cfg or FlowConfig()
    l = np.array(l0, dtype=float)
    if l.shape != (tri.class_count,):
        raise DomainError(f"initial metric must have {tri.class_count} entries")
    if not np.all(l > 0):
        raise DomainError("initial metric must be strictly positive")

    def K_of(y):
        # stages may probe the wide-sense region; clamp keeps K defined there
        return curvature(tri, np.maximum(y, 1e-300), cfg.threads)

    def rhs(y):
        k = K_of(y)
        return k if cfg.unscaled else k * y

    rec = _Recorder(tri, cfg)
    t = 0.0
    K = K_of(l)
    rec.add(t, l, K)
    h = cfg.dt
    steps = rejected = 0
    status = T_MAX_REACHED
    every = int(cfg.record_every)

    while True:
        if np.max(np.abs(K)) < cfg.stop_tol:
            status = CONVERGED
            break
        if t >= cfg.t_max:
            break
        if h < MIN_STEP:
            log.warning("step size underflow at t=%g; integrator failure, not a flow blow-up", t)
            status = DIVERGED
            break
        step = min(h, cfg.t_max - t)
        k1 = K if cfg.unscaled else K * l
        if cfg.method == "rk4":
            new = _rk4_step(rhs, l, step, k1)
            if not np.all(new > 0):
                h *= 0.5
                rejected += 1
                continue
        else:
            new, err, rho = _rkf45_step(rhs, l, step, k1)
            scale = cfg.atol + cfg.rtol * np.maximum(np.abs(l), np.abs(new))
            ratio = float(np.max(np.abs(err) / scale))
            if not np.all(new > 0):
                h = 0.5 * step
                rejected += 1
                continue
            if ratio > 1.0:
                h = step * max(0.1, 0.9 * ratio ** -0.25)
                rejected += 1
                continue
            h = step * (5.0 if ratio == 0.0 else min(5.0, 0.9 * ratio ** -0.2))
            if rho > 0.0:
                # near a fixed point the error estimate stops limiting h; keep
                # |h * lambda| <= 1 so the step stays strongly contractive
                h = min(h, STIFFNESS_CAP / rho)
        t = t + step
        l = new
        K = K_of(l)
        steps += 1
        done = np.max(np.abs(K)) < cfg.stop_tol or t >= cfg.t_max
        if steps % every == 0 or done:
            rec.add(t, l, K)

    # make sure the last state is recorded even if the loop broke early
    if rec.t[-1] != t:
        rec.add(t, l, K)
    return rec.finish(status, steps, rejected)


@dataclass
class NewtonResult:
    """Outcome of :func:`newton_refine`; ``l`` is the input when it failed."""

    l: np.ndarray
    residual: float
    iterations: int
    converged: bool
    message: str = ""


def newton_refine(tri, l, tol=1e-13, max_iter=50, max_halvings=60):
    """Polish an approximate zero of the curvature map by damped Newton.

    Each step solves ``J d = -K`` with the finite-difference Jacobian and
    halves the step until ``max |K|`` decreases and the metric stays positive
    and realizable.
    """
    l = np.array(l, dtype=float)
    if not np.all(l > 0):
        raise DomainError("metric must be strictly positive")
    if not np.all(metric_realizable(tri, l)):
        raise NotRealizableError("not realizable: Newton refinement needs a realizable metric")
    start = l.copy()
    K = curvature(tri, l)
    res = float(np.max(np.abs(K)))
    for it in range(max_iter + 1):
        if res < tol:
            return NewtonResult(l, res, it, True)
        if it == max_iter:
            break
        J = curvature_jacobian(tri, l).raw
        try:
            if np.linalg.cond(J) > 1e14:
                raise np.linalg.LinAlgError
            d = np.linalg.solve(J, -K)
        except np.linalg.LinAlgError:
            raise SingularJacobianError("singular curvature Jacobian") from None
        lam = 1.0
        for _ in range(max_halvings):
            trial = l + lam * d
            if np.all(trial > 0) and np.all(metric_realizable(tri, trial)):
                K_trial = curvature(tri, trial)
                r_trial = float(np.max(np.abs(K_trial)))
                if r_trial < res:
                    l, K, res = trial, K_trial, r_trial
                    break
            lam *= 0.5
        else:
            if res < 1e3 * tol or res < 1e-14:
                # already at the rounding floor of K
                return NewtonResult(l, res, it, res < tol, "stalled at rounding level")
            return NewtonResult(start, float(np.max(np.abs(curvature(tri, start)))), it,
                                False, "line search failed")
    return NewtonResult(l, res, max_iter, res < tol, "iteration limit")


@dataclass
class SolveReport:
    """Certificates attached to a solution."""

    residual: float
    realizable: bool
    phi_min: float
    phi_max: float
    flow_status: str
    newton: NewtonResult
    convergence: object = None
    bounds: object = None
    spectral: object = None
    notes: list = field(default_factory=list)


def solve(tri, l0, cfg=None, newton_tol=1e-13):
    """Flow from ``l0``, then Newton-polish, then certify the result.

    Returns ``(l, trajectory, report)``.
    """
    cfg = cfg or FlowConfig()
    traj = run_flow(tri, l0, cfg)
    if traj.status == DIVERGED:
        raise NumericalFailure(f"flow diverged at t={traj.t[-1]:g} (step size underflow)")
    l = traj.final_metric
    notes = []
    realizable = bool(np.all(metric_realizable(tri, l)))
    if realizable:
        newton = newton_refine(tri, l, tol=newton_tol)
        if not newton.converged:
            notes.append(f"newton: {newton.message}")
        l = newton.l
    else:
        newton = NewtonResult(l, traj.final_residual, 0, False, "skipped: flow end not realizable")
        notes.append(newton.message)
    K = curvature(tri, l)
    p = phi_values(tri, l)
    report = SolveReport(
        residual=float(np.max(np.abs(K))),
        realizable=bool(np.all(metric_realizable(tri, l))),
        phi_min=float(p.min()),
        phi_max=float(p.max()),
        flow_status=traj.status,
        newton=newton,
        notes=notes,
    )
    try:
        report.convergence = analysis.fit_rate(traj)
    except analysis.InsufficientSamplesError as exc:
        notes.append(f"rate fit skipped: {exc}")
    if tri.valence.min() >= 10:
        mode = "two_sided" if np.allclose(traj.l[0], 0.5 * math.acosh(3.0)) else "upper"
        if np.all(traj.l[0] < math.acosh(3.0)):
            report.bounds = analysis.verify_bounds(traj, tri.max_valence, mode)
    if report.realizable and report.residual < 1e-8:
        report.spectral = analysis.spectral_check(tri, l)
    return l, traj, report
