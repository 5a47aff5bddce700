"""Command-line front end: ``chlab <command> ...``.

Exit status is 0 on success, 1 when a state fails validation (or a run stops
early) and 2 on usage errors.  Every output file gets a ``.manifest.json``
sibling; trajectory directories get ``manifest.json`` inside.
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys
import time
from io import StringIO
from pathlib import Path

import numpy as np

from chlab import __version__
from chlab.diagnostics import compare_eulerian
from chlab.dynamics import SolverConfig, evolve
from chlab.eulerian import EulerianState, mollify, validate
from chlab.grid import Grid
from chlab.io import RunManifest, StateFormatError, dumps, read_state, write_json, write_manifest, write_state, write_text_atomic
from chlab.lagrangian import LagrangianState, gamma, validate_F
from chlab.reference import mollifier_limit_rows, peakon_antipeakon, peakon_antipeakon_breaking, single_peakon
from chlab.transforms import lift, project

log = logging.getLogger("chlab")


class UsageError(Exception):
    pass


class ValidationFailure(Exception):
    pass


def _expect(state, kind, path):
    if not isinstance(state, kind):
        want = "an Eulerian" if kind is EulerianState else "a Lagrangian"
        raise UsageError(f"{path} does not hold {want} state")
    return state


def _finish(args, output, started, config=None, inputs=()):
    write_manifest(output, RunManifest(
        command=" ".join(["chlab"] + args.argv),
        inputs=[str(p) for p in inputs],
        config=config,
        wall_time=time.perf_counter() - started,
    ))


def cmd_validate(args, started):
    state = read_state(args.inp)
    problems = validate(state) if isinstance(state, EulerianState) else validate_F(state)
    for p in problems:
        print(f"{args.inp}: {p}")
    if problems:
        raise ValidationFailure(f"{len(problems)} violation(s)")
    print(f"{args.inp}: ok")


def cmd_mollify(args, started):
    s = _expect(read_state(args.inp), EulerianState, args.inp)
    write_state(args.out, mollify(s, args.n, args.max_dx))
    _finish(args, args.out, started, {"n": args.n, "max_dx": args.max_dx}, [args.inp])


def cmd_lift(args, started):
    s = _expect(read_state(args.inp), EulerianState, args.inp)
    write_state(args.out, lift(s, cells=args.cells))
    _finish(args, args.out, started, {"cells": args.cells}, [args.inp])


def cmd_project(args, started):
    X = _expect(read_state(args.inp), LagrangianState, args.inp)
    write_state(args.out, project(X, require_F0=not args.auto_canonical))
    _finish(args, args.out, started, {"auto_canonical": args.auto_canonical}, [args.inp])


def cmd_relabel(args, started):
    X = _expect(read_state(args.inp), LagrangianState, args.inp)
    if not args.canonical:
        raise UsageError("relabel needs --canonical")
    write_state(args.out, gamma(X))
    _finish(args, args.out, started, {"canonical": True}, [args.inp])


def _node_rows(t, s: EulerianState):
    rb = s.rho_bar
    # nodal rho: mean of the adjacent cells, one-sided at the ends
    rho_nodes = s.k + np.concatenate([[rb[0]], 0.5 * (rb[:-1] + rb[1:]), [rb[-1]]])
    F = s.mu.eval_F(s.grid.nodes)
    for x, u, r, f in zip(s.grid.nodes, s.u, rho_nodes, F):
        yield [format(t, ".17g"), format(x, ".17g"), format(u, ".17g"), format(r, ".17g"), format(f, ".17g")]


def cmd_evolve(args, started):
    X0 = _expect(read_state(args.inp), LagrangianState, args.inp)
    cfg = SolverConfig(args.dt, args.t_end, args.stride, args.invariant_tol)
    traj = evolve(X0, cfg, enforce_dt_cap=not args.no_dt_cap)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    names = []
    for i, X in enumerate(traj.states):
        name = f"state_{i:05d}.json"
        write_state(out / name, X)
        names.append(name)
    write_json(out / "meta.json", {
        "times": traj.times,
        "sigma_log": traj.sigma_log,
        "invariant_residual_log": traj.invariant_residual_log,
        "snapshots": names,
        "status": traj.status,
        "message": traj.message,
        "config": cfg.to_json(),
    })
    if args.csv:
        buf = StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "x", "u", "rho", "F"])
        for t, X in zip(traj.times, traj.states):
            w.writerows(_node_rows(t, project(X, require_F0=False)))
        write_text_atomic(args.csv, buf.getvalue())
        _finish(args, args.csv, started, cfg.to_json(), [args.inp])
    _finish(args, out, started, cfg.to_json(), [args.inp])
    if traj.status != "ok":
        raise ValidationFailure(traj.message)


def _parse_probes(text):
    if text == "auto":
        return None
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"--probes expects 'auto' or a comma-separated list of numbers: {exc}") from exc


def cmd_report(args, started):
    s1 = _expect(read_state(args.ref), EulerianState, args.ref)
    s2 = _expect(read_state(args.cand), EulerianState, args.cand)
    report = compare_eulerian(s1, s2, _parse_probes(args.probes))
    if args.out:
        write_json(args.out, report.to_json())
        _finish(args, args.out, started, {"probes": args.probes}, [args.ref, args.cand])
    else:
        sys.stdout.write(dumps(report.to_json()))


def cmd_reference(args, started):
    grid = Grid.spanning(args.x0, args.x1, args.cells)
    if args.which == "peakon-antipeakon":
        if args.t is None:
            s = peakon_antipeakon_breaking(args.alpha, grid)
        else:
            s = peakon_antipeakon(args.alpha, args.collision_time, args.t, grid)
        _emit_state(args, s, started, {"alpha": args.alpha, "t": args.t, "collision_time": args.collision_time})
    elif args.which == "single-peakon":
        _emit_state(args, single_peakon(args.c, grid), started, {"c": args.c})
    else:
        try:
            ns = [int(v) for v in args.n.split(",") if v.strip()]
        except ValueError as exc:
            raise UsageError(f"--n expects a comma-separated list of integers: {exc}") from exc
        rows = mollifier_limit_rows(args.alpha, args.xi, ns, grid)
        body = {"alpha": args.alpha, "xi": args.xi, "target": rows[0].target if rows else None,
                "rows": [{"n": r.n, "gap": r.gap, "gap_hat": r.gap_hat} for r in rows]}
        if args.out:
            write_json(args.out, body)
            _finish(args, args.out, started, {"alpha": args.alpha, "xi": args.xi, "n": ns})
        else:
            sys.stdout.write(dumps(body))


def _emit_state(args, s, started, config):
    if args.out:
        write_state(args.out, s)
        _finish(args, args.out, started, config)
    else:
        sys.stdout.write(dumps({"kind": "eulerian", **s.to_json()}))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chlab", description="Conservative Camassa-Holm solutions in Lagrangian coordinates.")
    p.add_argument("--version", action="version", version=f"chlab {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("validate", help="check an Eulerian or Lagrangian state file")
    c.add_argument("--in", dest="inp", required=True)
    c.set_defaults(func=cmd_validate)

    c = sub.add_parser("mollify", help="smooth an Eulerian state at scale 1/n")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--in", dest="inp", required=True)
    c.add_argument("--out", required=True)
    c.add_argument("--max-dx", type=float, default=None)
    c.set_defaults(func=cmd_mollify)

    c = sub.add_parser("lift", help="Eulerian -> Lagrangian")
    c.add_argument("--in", dest="inp", required=True)
    c.add_argument("--out", required=True)
    c.add_argument("--cells", type=int, default=None, help="xi-grid cells (default: refine the x-grid 4x)")
    c.set_defaults(func=cmd_lift)

    c = sub.add_parser("project", help="Lagrangian -> Eulerian")
    c.add_argument("--in", dest="inp", required=True)
    c.add_argument("--out", required=True)
    c.add_argument("--auto-canonical", action="store_true", help="relabel into the canonical section first")
    c.set_defaults(func=cmd_project)

    c = sub.add_parser("relabel", help="relabel a Lagrangian state")
    c.add_argument("--in", dest="inp", required=True)
    c.add_argument("--out", required=True)
    c.add_argument("--canonical", action="store_true")
    c.set_defaults(func=cmd_relabel)

    c = sub.add_parser("evolve", help="integrate the Lagrangian system with RK4")
    c.add_argument("--in", dest="inp", required=True)
    c.add_argument("--dt", type=float, required=True)
    c.add_argument("--t-end", type=float, required=True)
    c.add_argument("--stride", type=int, default=1)
    c.add_argument("--invariant-tol", type=float, default=1e-8)
    c.add_argument("--no-dt-cap", action="store_true", help="allow dt larger than the grid spacing")
    c.add_argument("--out", required=True, help="trajectory directory")
    c.add_argument("--csv", default=None, help="also write projected t,x,u,rho,F rows")
    c.set_defaults(func=cmd_evolve)

    c = sub.add_parser("report", help="convergence report of a candidate against a reference")
    c.add_argument("--ref", required=True)
    c.add_argument("--cand", required=True)
    c.add_argument("--probes", default="auto")
    c.add_argument("--out", default=None)
    c.set_defaults(func=cmd_report)

    c = sub.add_parser("reference", help="closed-form states and the mollifier limit")
    c.add_argument("which", choices=["peakon-antipeakon", "single-peakon", "limit-check"])
    c.add_argument("--alpha", type=float, default=2.0, help="atom mass / pair energy")
    c.add_argument("--t", type=float, default=None, help="pair state at time t before the collision")
    c.add_argument("--collision-time", type=float, default=1.0)
    c.add_argument("--c", type=float, default=1.0, help="peakon amplitude")
    c.add_argument("--xi", type=float, default=None)
    c.add_argument("--n", default="2,4,8,16,32,64,128")
    c.add_argument("--x0", type=float, default=-2.0)
    c.add_argument("--x1", type=float, default=2.0)
    c.add_argument("--cells", type=int, default=400)
    c.add_argument("--out", default=None)
    c.set_defaults(func=cmd_reference)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.argv = argv
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "reference" and args.which == "limit-check" and args.xi is None:
        print("chlab: error: limit-check needs --xi", file=sys.stderr)
        return 2
    started = time.perf_counter()
    try:
        args.func(args, started)
    except UsageError as exc:
        print(f"chlab: error: {exc}", file=sys.stderr)
        return 2
    except StateFormatError as exc:
        print(f"chlab: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"chlab: {exc.filename}: no such file", file=sys.stderr)
        return 2
    except ValidationFailure as exc:
        print(f"chlab: {exc}", file=sys.stderr)
        return 1
    except (ValueError, ArithmeticError) as exc:
        # domain errors raised by the library on invalid states
        print(f"chlab: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
