"""Command line entry point: constants tables, single functional evaluations,
verification suites and alpha sweeps emitting plot-ready CSV.

Exit codes: 0 success, 1 some check FAILed, 2 configuration/parse failure,
3 a numerical divergence diagnostic fired.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import verify as V
from .constants import SharpConstants
from .functions import load_fn
from .functionals import (
    chord_power_body,
    chord_power_fn,
    dual_log_volume,
    entropy_body,
    entropy_fn,
    radial_mean_body_rho,
    theorem_c_rhs,
)
from .geometry import ConvexBody, load_body
from .mc import Budget, DIVERGENT_TAIL_FLAG

DEFAULT_SAMPLES = int(os.environ.get("CHORDLAB_DEFAULT_SAMPLES", "1000000"))

SWEEP_COLUMNS = ["alpha", "lhs", "lhs_se", "rhs", "rhs_se", "margin", "z", "verdict"]


@dataclass(frozen=True)
class RunConfig:
    command: str
    shape_path: str | None
    function_path: str | None
    alpha: float | None
    alpha_grid: tuple | None
    budget: Budget
    fmt: str
    out: str | None
    extra: dict

    def __post_init__(self):
        if self.shape_path and self.function_path:
            raise ValueError("give exactly one of --shape / --function")


def _parse_alpha_grid(text: str) -> tuple:
    try:
        a, b, step = (float(x) for x in text.split(":"))
    except ValueError as exc:
        raise ValueError(f"--alpha-grid must be a:b:step, got {text!r}") from exc
    if step <= 0 or b <= a:
        raise ValueError("--alpha-grid must be strictly increasing")
    grid = np.arange(a, b + 0.5 * step, step)
    return tuple(float(x) for x in grid)


def _budget(args) -> Budget:
    return Budget(n_samples=args.samples, master_seed=args.seed, n_shards=args.shards)


def _load_input(args):
    if getattr(args, "shape", None):
        return load_body(args.shape)
    if getattr(args, "function", None):
        return load_fn(args.function)
    return None


def _emit(payload_bytes: bytes, out: str | None):
    if out:
        with open(out, "wb") as fh:
            fh.write(payload_bytes)
    else:
        sys.stdout.write(payload_bytes.decode())


def emit_report(reports, fmt: str) -> bytes:
    """Deterministic bytes for a nonempty report list."""
    if not reports:
        raise ValueError("no reports to emit")
    if fmt == "json":
        return V.report_json(reports)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["check_id"] + SWEEP_COLUMNS)
    for r in reports:
        writer.writerow([
            r.check_id,
            r.metadata.get("alpha", ""),
            repr(r.lhs.value), repr(r.lhs.std_error),
            repr(r.rhs.value), repr(r.rhs.std_error),
            repr(r.margin), repr(r.z_score), r.verdict,
        ])
    return buf.getvalue().encode()


def _exit_code(reports) -> int:
    flags = set()
    for r in reports:
        flags |= set(r.lhs.flags) | set(r.rhs.flags)
    if any(DIVERGENT_TAIL_FLAG in f for f in flags):
        return 3
    if any(r.verdict == "FAIL" for r in reports):
        return 1
    return 0


def cmd_constants(args) -> int:
    table = SharpConstants.for_pair(args.n, args.alpha).to_dict()
    if args.json:
        out = json.dumps(table, sort_keys=True, separators=(",", ":")) + "\n"
    else:
        out = "".join(f"{k} = {v}\n" for k, v in table.items())
    _emit(out.encode(), args.out)
    return 0


_FUNCTIONALS = ("chord_power", "entropy1", "entropy_np1", "dual_log_volume",
                "theorem_c_rhs", "radial_mean_rho")


def cmd_compute(args) -> int:
    obj = _load_input(args)
    if obj is None:
        raise ValueError("compute requires --shape or --function")
    budget = _budget(args)
    fid = args.functional
    is_body = isinstance(obj, ConvexBody)
    if fid == "chord_power":
        if args.alpha is None:
            raise ValueError("chord_power requires --alpha")
        est = (chord_power_body(obj, args.alpha, args.route, budget) if is_body
               else chord_power_fn(obj, args.alpha, args.route, budget))
    elif fid == "entropy1":
        est = entropy_body(obj, 1, budget) if is_body else entropy_fn(obj, 1, budget)
    elif fid == "entropy_np1":
        order = obj.n + 1
        est = entropy_body(obj, order, budget) if is_body else entropy_fn(obj, order, budget)
    elif fid == "dual_log_volume":
        est = dual_log_volume(obj, budget)
    elif fid == "theorem_c_rhs":
        fn = obj if not is_body else None
        if fn is None:
            raise ValueError("theorem_c_rhs requires --function")
        est = theorem_c_rhs(fn.normalized(), budget)
    elif fid == "radial_mean_rho":
        if not is_body:
            raise ValueError("radial_mean_rho requires --shape")
        u = np.zeros(obj.n)
        u[0] = 1.0
        if args.direction:
            u = np.asarray([float(x) for x in args.direction.split(",")])
            u = u / np.linalg.norm(u)
        est = radial_mean_body_rho(obj, args.alpha, u, budget)
    else:
        raise ValueError(f"unknown functional {fid!r}; known: {_FUNCTIONALS}")
    payload = {
        "schema_version": "v1",
        "functional": fid,
        "alpha": args.alpha,
        "route": args.route,
        "budget": budget.to_dict(),
        "estimate": est.to_dict(),
    }
    _emit((json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n").encode(),
          args.out)
    return 3 if any(DIVERGENT_TAIL_FLAG in f for f in est.flags) else 0


_CHECK_DISPATCH = {
    "THM_A": lambda obj, a, b: V.verify_theorem_a(obj, a, b),
    "THM_B": lambda obj, a, b: V.verify_theorem_b(obj, a, b),
    "FRAC_SOB": lambda obj, a, b: V.verify_frac_sobolev(obj, a, b),
    "CHORD_ISO": lambda obj, a, b: V.verify_chord_isoperimetric(obj, a, b),
    "THM_C": lambda obj, a, b: V.verify_theorem_c(obj, b),
    "ENTROPY_1": lambda obj, a, b: V.verify_entropy(obj, 1, b),
    "ENTROPY_N1": lambda obj, a, b: V.verify_entropy(obj, obj.n + 1, b),
}


def cmd_verify(args) -> int:
    budget = _budget(args)
    if args.suite:
        reports = V.run_suite(args.suite, budget)
    else:
        obj = _load_input(args)
        cid = args.check
        if cid in _CHECK_DISPATCH:
            if obj is None:
                raise ValueError(f"check {cid} requires --shape or --function")
            reports = [_CHECK_DISPATCH[cid](obj, args.alpha, budget)]
        elif cid in V.IDENTITY_CHECKS:
            if obj is None:
                raise ValueError(f"check {cid} requires --shape or --function")
            reports = [V.verify_identity(cid, obj, budget)]
        elif cid in V.LIMIT_CHECKS:
            grid = args.alpha_grid or ((0.2, 0.1, 0.05) if cid == "I1" else
                                       (-0.2, -0.1, -0.05) if cid == "MS" else
                                       (-0.8, -0.9, -0.95))
            reports = [V.verify_limit(cid, obj, list(grid), budget)]
        elif cid in V.REARRANGEMENT_CHECKS:
            if obj is None:
                raise ValueError(f"check {cid} requires --function (grid)")
            reports = [V.verify_rearrangement(cid, obj, budget)]
        else:
            raise ValueError(f"unknown check {cid!r}")
    _emit(emit_report(reports, args.format), args.out)
    return _exit_code(reports)


def cmd_sweep(args) -> int:
    if not args.alpha_grid:
        raise ValueError("sweep requires --alpha-grid a:b:step")
    obj = _load_input(args)
    if obj is None:
        raise ValueError("sweep requires --shape or --function")
    budget = _budget(args)
    if args.check not in _CHECK_DISPATCH or args.check == "THM_C":
        raise ValueError("sweep supports THM_A, THM_B, FRAC_SOB, CHORD_ISO, "
                         "ENTROPY_1, ENTROPY_N1")
    reports = []
    for i, a in enumerate(args.alpha_grid):
        reports.append(_CHECK_DISPATCH[args.check](obj, a, budget.split("sweep", str(i))))
        reports[-1].metadata.setdefault("alpha", a)
    if args.format == "json":
        payload = V.report_json(reports)
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        for a, r in zip(args.alpha_grid, reports):
            writer.writerow([
                repr(float(a)),
                repr(r.lhs.value), repr(r.lhs.std_error),
                repr(r.rhs.value), repr(r.rhs.std_error),
                repr(r.margin), repr(r.z_score), r.verdict,
            ])
        payload = buf.getvalue().encode()
    _emit(payload, args.out)
    return _exit_code(reports)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chordlab",
                                description="chord power integrals, radial mean "
                                            "bodies and chord entropies at desk scale")
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp, with_alpha=True):
        sp.add_argument("--shape", type=str, default=None,
                        help="JSON shape specification file")
        sp.add_argument("--function", type=str, default=None,
                        help="JSON function specification file")
        if with_alpha:
            sp.add_argument("--alpha", type=float, default=None)
            sp.add_argument("--alpha-grid", type=_parse_alpha_grid, default=None)
        sp.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
        sp.add_argument("--seed", type=int, default=20260809)
        sp.add_argument("--shards", type=int, default=1)
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--out", type=str, default=None)

    pc = sub.add_parser("constants", help="print all constants for (n, alpha)")
    pc.add_argument("--n", type=int, required=True)
    pc.add_argument("--alpha", type=float, required=True)
    pc.add_argument("--json", action="store_true")
    pc.add_argument("--out", type=str, default=None)
    pc.set_defaults(fn=cmd_constants)

    pm = sub.add_parser("compute", help="evaluate one functional")
    pm.add_argument("--functional", type=str, required=True,
                    help=f"one of {_FUNCTIONALS}")
    pm.add_argument("--route", type=str, default="lines")
    pm.add_argument("--direction", type=str, default=None,
                    help="comma separated direction for radial_mean_rho")
    add_common(pm)
    pm.set_defaults(fn=cmd_compute)

    pv = sub.add_parser("verify", help="run one check or a named suite")
    pv.add_argument("--check", type=str, default=None)
    pv.add_argument("--suite", type=str, default=None,
                    choices=("identities", "inequalities", "limits",
                             "rearrangement", "all"))
    add_common(pv)
    pv.set_defaults(fn=cmd_verify)

    ps = sub.add_parser("sweep", help="alpha sweep of one check, plot-ready CSV")
    ps.add_argument("--check", type=str, required=True)
    add_common(ps)
    ps.set_defaults(fn=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
