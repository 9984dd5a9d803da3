"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 parse/validation error,
3 numerical failure.
"""

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import analysis
from .complex import load_manifest
from .curvature import covolume, curvature, functional_H, metric_realizable, phi_values, tetra_angles
from .errors import DomainError, ManifestError, NotRealizableError, NumericalFailure
from .flow import DIVERGED, FlowConfig, run_flow, solve

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"{text} is not > 0")
    return value


def build_parser():
    parser = _Parser(prog="hyperflow", description="Extended Ricci flow on ideal triangulations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_text, metric=True, flow=False):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("manifest", type=Path)
        if metric:
            src = p.add_mutually_exclusive_group(required=True)
            src.add_argument("--uniform", type=_positive, metavar="L",
                             help="same length on every edge class")
            src.add_argument("--metric", type=Path, metavar="FILE",
                             help="file of 'class_id value' lines")
        if flow:
            p.add_argument("--method", choices=("rk4", "rkf45"), default="rkf45")
            p.add_argument("--dt", type=_positive, default=0.01)
            p.add_argument("--tol", type=_positive, default=1e-8,
                           help="relative tolerance for rkf45")
            p.add_argument("--stop-tol", type=_positive, default=1e-10)
            p.add_argument("--t-max", type=_positive, default=500.0)
            p.add_argument("--record-every", type=int, default=1)
        p.add_argument("--threads", type=int, default=1)
        return p

    add("edges", "print edge classes and valences", metric=False)
    add("angles", "print per-tetrahedron dihedral angles")
    add("check", "realizability and curvature bounds")
    p = add("flow", "integrate the flow and write a CSV trajectory", flow=True)
    p.add_argument("-o", "--output", type=Path, help="CSV path (default: stdout)")
    add("solve", "flow + Newton polish + certificates", flow=True)
    add("covolume", "print cov(l) and H(l)")
    return parser


def read_metric_file(path, class_count):
    """Parse ``class_id value`` lines; every class must be given exactly once."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        if len(tokens) != 2:
            raise ManifestError("expected 'class_id value'", lineno)
        try:
            cid, val = int(tokens[0]), float(tokens[1])
        except ValueError:
            raise ManifestError(f"cannot parse {raw.strip()!r}", lineno) from None
        if not 0 <= cid < class_count:
            raise ManifestError(f"class id {cid} out of range", lineno)
        if cid in values:
            raise ManifestError(f"class id {cid} given twice", lineno)
        if not val > 0:
            raise ManifestError(f"length for class {cid} must be > 0", lineno)
        values[cid] = val
    missing = [c for c in range(class_count) if c not in values]
    if missing:
        raise ManifestError(f"metric file lacks class ids {missing}")
    return np.array([values[c] for c in range(class_count)])


def _metric(args, tri):
    if args.uniform is not None:
        return np.full(tri.class_count, args.uniform)
    return read_metric_file(args.metric, tri.class_count)


def _flow_config(args):
    if args.record_every < 1:
        raise UsageError("--record-every must be >= 1")
    return FlowConfig(method=args.method, dt=args.dt, rtol=args.tol, stop_tol=args.stop_tol,
                      t_max=args.t_max, record_every=args.record_every, threads=args.threads)


def _fmt(values):
    return "[" + ", ".join(f"{v:.12g}" for v in values) + "]"


def write_trajectory_csv(traj, out):
    """CSV with columns ``t, l_0.., K_0.., H`` in full-precision scientific notation."""
    m = traj.l.shape[1]
    header = ["t"] + [f"l_{i}" for i in range(m)] + [f"K_{i}" for i in range(m)] + ["H"]
    out.write(",".join(header) + "\n")
    for t, l, K, H in zip(traj.t, traj.l, traj.K, traj.H):
        row = [t, *l, *K, H]
        out.write(",".join(f"{v:.17e}" for v in row) + "\n")


def _cmd_edges(args, tri, out):
    out.write(f"classes: {tri.class_count}, valences: {[int(v) for v in tri.valence]}\n")
    return EXIT_OK


def _cmd_angles(args, tri, out):
    angles = tetra_angles(tri, _metric(args, tri), args.threads)
    for t, row in enumerate(angles):
        out.write(f"tet {t}: {_fmt(row)}\n")
    return EXIT_OK


def _cmd_check(args, tri, out):
    l = _metric(args, tri)
    flags = metric_realizable(tri, l)
    phis = phi_values(tri, l)
    for t, ok in enumerate(flags):
        state = "realizable" if ok else "not realizable"
        out.write(f"tet {t}: {state}; phi range [{phis[t].min():.12g}, {phis[t].max():.12g}]\n")
    K = curvature(tri, l, args.threads)
    lo = 2 * math.pi - math.pi * tri.valence
    within = bool(np.all((K >= lo - 1e-12) & (K <= 2 * math.pi + 1e-12)))
    out.write(f"curvature: {_fmt(K)}\n")
    out.write(f"curvature bounds 2pi - pi*d <= K <= 2pi: {'ok' if within else 'VIOLATED'}\n")
    out.write(f"all tetrahedra realizable: {'yes' if flags.all() else 'no'}\n")
    return EXIT_OK


def _cmd_flow(args, tri, out):
    traj = run_flow(tri, _metric(args, tri), _flow_config(args))
    if args.output is None:
        write_trajectory_csv(traj, out)
    else:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            write_trajectory_csv(traj, fh)
    sys.stderr.write(f"status: {traj.status}, samples: {len(traj)}, "
                     f"final max|K|: {traj.final_residual:.3e}\n")
    return EXIT_NUMERIC if traj.status == DIVERGED else EXIT_OK


def _cmd_solve(args, tri, out):
    l, traj, rep = solve(tri, _metric(args, tri), _flow_config(args))
    out.write(f"solution: {_fmt(l)}\n")
    out.write(f"max|K|: {rep.residual:.3e}\n")
    out.write(f"flow status: {traj.status} at t={traj.t[-1]:.6g}\n")
    out.write(f"realizable: {'yes' if rep.realizable else 'no'} "
              f"(phi in [{rep.phi_min:.12g}, {rep.phi_max:.12g}])\n")
    if rep.convergence is not None:
        c = rep.convergence
        out.write(f"rate: {c.rate:.6g} (r^2 = {c.r_squared:.6f}, {c.samples} samples)\n")
    if rep.bounds is not None:
        b = rep.bounds
        lower = "n/a" if b.lower_bound is None else ("ok" if b.lower_ok else "VIOLATED")
        out.write(f"bounds ({b.mode}): upper {'ok' if b.upper_ok else 'VIOLATED'}, "
                  f"lower {lower}\n")
    if rep.spectral is not None:
        s = rep.spectral
        out.write(f"spectral: eigenvalues {_fmt(s.eigenvalues)}, "
                  f"{'stable' if s.stable else 'UNSTABLE'}\n")
    for note in rep.notes:
        out.write(f"note: {note}\n")
    if not rep.newton.converged and rep.residual >= args.stop_tol:
        sys.stderr.write(f"error: newton refinement failed: {rep.newton.message}\n")
        return EXIT_NUMERIC
    return EXIT_OK


def _cmd_covolume(args, tri, out):
    l = _metric(args, tri)
    out.write(f"cov: {covolume(tri, l):.15g}\n")
    out.write(f"H: {functional_H(tri, l):.15g}\n")
    return EXIT_OK


COMMANDS = {
    "edges": _cmd_edges,
    "angles": _cmd_angles,
    "check": _cmd_check,
    "flow": _cmd_flow,
    "solve": _cmd_solve,
    "covolume": _cmd_covolume,
}


def main(argv=None, out=None):
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        if args.threads < 1:
            raise UsageError("--threads must be >= 1")
        tri = load_manifest(args.manifest)
        return COMMANDS[args.command](args, tri, out)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (ManifestError, DomainError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    except (NumericalFailure, NotRealizableError, analysis.InsufficientSamplesError) as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
