"""Command-line front end.

Subcommands: analyze, solve {sf,of,df}, synthesize {sf,of,df}, verify,
export-dot, oracle. Every run can emit one self-contained JSON report
(--out) stamped with the seed so it can be replayed. Exit codes: 0 ok,
2 parse/validation error, 3 infeasible (diagnostic witness printed),
4 oracle size cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from netdecouple import fileio
from netdecouple.errors import (
    FileFormatError,
    InfeasibleProblem,
    InstanceViolation,
    NetworkError,
    PremiseViolation,
    SizeCapExceeded,
)
from netdecouple.invariance import sstar, zstar
from netdecouple.mincut import solve_min_ddpdf, solve_min_ddpof, solve_min_ddpsf
from netdecouple.network import NodeSet, ProblemInstance, boundary, validate_instance
from netdecouple.oracle import brute_min_inputs, brute_min_io, enumerate_dt_paths
from netdecouple.solvability import ddpdf_solvable, ddpof_solvable, ddpsf_solvable
from netdecouple.synthesis import (
    design_dynamic_feedback,
    design_output_feedback,
    design_state_feedback,
)
from netdecouple.verify import (
    TOLERANCE,
    DisturbanceSignal,
    VerificationReport,
    closed_loop_residual,
    decoupling_residual,
    invariance_residual,
    simulate,
)


def _fmt_set(ns: NodeSet | None) -> str:
    return repr(ns) if ns is not None else "(unset)"


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, NodeSet):
        return list(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


def _write_report(path: str | None, doc: dict) -> None:
    if path:
        Path(path).write_text(json.dumps(_jsonable(doc), indent=2) + "\n")


COLORS = {
    "disturbance": "red",
    "target": "yellow",
    "input": "blue",
    "output_of": "purple",
    "output_df": "green",
    "observer": "fuchsia",
}


def export_dot(
    inst: ProblemInstance,
    mode: str | None = None,
    observer: NodeSet | None = None,
    path: str | Path | None = None,
) -> str:
    """DOT rendering with role colors; weights become edge labels.

    Outputs are purple for static output feedback and green for
    dynamical feedback; observer nodes are fuchsia.
    """
    colors: dict[int, str] = {}
    if observer is not None:
        for v in observer:
            colors[v] = COLORS["observer"]
    for v in inst.targets:
        colors[v] = COLORS["target"]
    for v in inst.disturbances:
        colors[v] = COLORS["disturbance"]
    if inst.outputs is not None:
        key = "output_df" if mode == "df" else "output_of"
        for v in inst.outputs:
            colors[v] = COLORS[key]
    if inst.inputs is not None:
        for v in inst.inputs:
            colors[v] = COLORS["input"]
    lines = ["digraph network {", "  rankdir=LR;", "  node [style=filled, fillcolor=white];"]
    for v in range(1, inst.network.n + 1):
        attrs = f' [fillcolor={colors[v]}]' if v in colors else ""
        lines.append(f"  v{v}{attrs};")
    for tail, head, weight in inst.network.edges:
        lines.append(f'  v{tail} -> v{head} [label="{weight:g}"];')
    lines.append("}")
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def _cmd_analyze(args) -> int:
    inst = fileio.load_instance(args.file)
    violations = validate_instance(inst)
    n = inst.network.n
    print(f"n = {n}, q = {inst.network.q}")
    print(f"D = {inst.disturbances}, T = {inst.targets}")
    print(f"B = {_fmt_set(inst.inputs)}, C = {_fmt_set(inst.outputs)}")
    if violations:
        for v in violations:
            print(f"violation: {v}")
        return 2
    b = inst.inputs if inst.inputs is not None else NodeSet.empty(n)
    c = inst.outputs if inst.outputs is not None else NodeSet.empty(n)
    zres = zstar(inst, b, want_trace=False)
    sres = sstar(inst, c, want_trace=False)
    print(f"Z*(B) = {zres.fixpoint}  out-boundary {boundary(inst.network, zres.fixpoint, 'out')}")
    print(f"S*(C) = {sres.fixpoint}  in-boundary {boundary(inst.network, sres.fixpoint, 'in')}")
    try:
        paths = enumerate_dt_paths(inst, cap=args.cap)
        print(f"D-to-T paths: {len(paths)}")
    except SizeCapExceeded:
        print(f"D-to-T paths: more than {args.cap}")
    verdicts = {}
    if inst.inputs is not None:
        verdicts["sf"] = ddpsf_solvable(inst).solvable
        if inst.outputs is not None:
            verdicts["of"] = ddpof_solvable(inst).solvable
            verdicts["df"] = ddpdf_solvable(inst).solvable
    for name, ok in verdicts.items():
        print(f"{name} solvable: {'yes' if ok else 'no'}")
    _write_report(
        args.out,
        {
            "command": "analyze",
            "zstar": zres.fixpoint,
            "sstar": sres.fixpoint,
            "verdicts": verdicts,
        },
    )
    return 0


def _cmd_solve(args) -> int:
    inst = fileio.load_instance(args.file)
    doc: dict = {"command": f"solve {args.problem}"}
    if args.problem == "sf":
        b = solve_min_ddpsf(inst)
        solved = inst.with_inputs(b)
        print(f"B = {b} (|B| = {len(b)})")
        doc["inputs"] = b
    elif args.problem == "df":
        b, c = solve_min_ddpdf(inst)
        solved = inst.with_inputs(b).with_outputs(c)
        print(f"B = {b} (|B| = {len(b)}), C = {c} (|C| = {len(c)})")
        doc.update(inputs=b, outputs=c)
    else:
        b, c, wset = solve_min_ddpof(inst, mode=args.mode)
        solved = inst.with_inputs(b).with_outputs(c)
        print(f"B = {b} (|B| = {len(b)}), C = {c} (|C| = {len(c)}), W = {wset}")
        doc.update(inputs=b, outputs=c, wset=wset)
    out = args.out or _derive_solved_path(args.file)
    fileio.save_instance(out, solved)
    print(f"solved instance written to {out}")
    return 0


def _derive_solved_path(path: str) -> str:
    p = Path(path)
    suffix = p.suffix or ".txt"
    return str(p.with_name(p.stem + "-solved" + suffix))


def _cmd_synthesize(args) -> int:
    inst = fileio.load_instance(args.file)
    doc: dict = {"command": f"synthesize {args.problem}", "seed": args.seed}
    if args.problem == "sf":
        design = design_state_feedback(inst, args.seed)
        doc.update(
            inputs=design.system.instance.inputs,
            zstar=design.zstar,
            a=design.system.a,
            f=design.f,
        )
        print(f"B = {design.system.instance.inputs}, Z* = {design.zstar}")
        print("F =")
        print(design.f)
    elif args.problem == "of":
        design = design_output_feedback(inst, args.seed, mode=args.mode)
        doc.update(
            inputs=design.system.instance.inputs,
            outputs=design.system.instance.outputs,
            wset=design.wset,
            a=design.system.a,
            g=design.g,
        )
        print(
            f"B = {design.system.instance.inputs}, C = {design.system.instance.outputs},"
            f" W = {design.wset}"
        )
        print("G =")
        print(design.g)
    else:
        design = design_dynamic_feedback(inst, args.seed)
        comp = design.compensator
        doc.update(
            inputs=design.system.instance.inputs,
            outputs=design.system.instance.outputs,
            zstar=design.zstar,
            sstar=design.sstar,
            order=comp.order,
            a=design.system.a,
            k=comp.k_realized,
            l=comp.l_realized,
            m=comp.m_realized,
            g=comp.g,
            p=comp.p,
            a_closed=design.closed_loop.a_c,
        )
        print(
            f"B = {design.system.instance.inputs}, C = {design.system.instance.outputs},"
            f" order = {comp.order} (Z* = {design.zstar}, S* = {design.sstar})"
        )
        print("K_r =")
        print(comp.k_realized)
    _write_report(args.out, doc)
    return 0


def _infer_mode(inst: ProblemInstance) -> str:
    if inst.inputs is not None and inst.outputs is not None:
        return "df"
    if inst.inputs is not None:
        return "sf"
    raise InstanceViolation("verify needs an instance with B (and C) assigned")


def _cmd_verify(args) -> int:
    inst = fileio.load_instance(args.file)
    mode = args.mode or _infer_mode(inst)
    if mode == "sf":
        design = design_state_feedback(inst, args.seed)
        sys_ = design.system
        a_cl = sys_.a - sys_.b_matrix @ design.f
        from netdecouple.synthesis import ClosedLoop

        loop = ClosedLoop(a_c=a_cl, d_c=sys_.d_matrix, t_c=sys_.t_matrix, state_dim=sys_.n)
        inv = invariance_residual(a_cl, design.zstar)
    elif mode == "of":
        design = design_output_feedback(inst, args.seed)
        sys_ = design.system
        a_cl = sys_.a - sys_.b_matrix @ design.g @ sys_.c_matrix
        from netdecouple.synthesis import ClosedLoop

        loop = ClosedLoop(a_c=a_cl, d_c=sys_.d_matrix, t_c=sys_.t_matrix, state_dim=sys_.n)
        inv = invariance_residual(a_cl, design.wset)
    elif mode == "df":
        design = design_dynamic_feedback(inst, args.seed)
        sys_ = design.system
        loop = design.closed_loop
        f_like = sys_.a - sys_.b_matrix @ (sys_.b_matrix.T @ sys_.a)
        h_like = sys_.a - (sys_.a @ sys_.c_matrix.T) @ sys_.c_matrix
        inv = max(
            invariance_residual(f_like, design.zstar),
            invariance_residual(h_like, design.sstar),
        )
    else:
        raise InstanceViolation(f"unknown mode {mode!r}")

    horizon = args.horizon or loop.dim
    residual = closed_loop_residual(loop, horizon)
    norm = float(np.max(np.abs(loop.a_c).sum(axis=1)))
    dt = min(0.01, 0.4 / max(norm, 1e-9))
    steps = int(math.ceil(10.0 / dt))
    sim = simulate(loop, DisturbanceSignal(seed=args.seed), dt, steps)
    report = VerificationReport.build(
        mode, residual, horizon, inv, sim.peak_z, tolerance=args.tolerance
    )
    print(
        f"residual {report.residual:.1e} invariance {report.invariance_residual:.1e} "
        f"peak|z| {sim.peak_z:.1e} {'PASS' if report.passed else 'FAIL'}"
    )
    _write_report(
        args.out,
        {
            "command": "verify",
            "mode": mode,
            "seed": args.seed,
            "tolerance": args.tolerance,
            "residual": report.residual,
            "horizon": report.horizon,
            "invariance_residual": report.invariance_residual,
            "simulation_peak_z": report.simulation_peak_z,
            "simulation_peak_state": sim.peak_state,
            "pass": report.passed,
        },
    )
    return 0 if report.passed else 3


def _cmd_export_dot(args) -> int:
    inst = fileio.load_instance(args.file)
    observer = None
    mode = None
    if args.solve:
        mode = args.solve
        if mode == "sf":
            inst = inst.with_inputs(solve_min_ddpsf(inst))
        elif mode == "of":
            b, c, _ = solve_min_ddpof(inst)
            inst = inst.with_inputs(b).with_outputs(c)
        else:
            b, c = solve_min_ddpdf(inst)
            inst = inst.with_inputs(b).with_outputs(c)
            zres = zstar(inst, b, want_trace=False)
            sres = sstar(inst, c, want_trace=False)
            observer = zres.fixpoint.difference(sres.fixpoint)
    elif inst.inputs is not None and inst.outputs is not None:
        mode = "df"
        zres = zstar(inst, inst.inputs, want_trace=False)
        sres = sstar(inst, inst.outputs, want_trace=False)
        observer = zres.fixpoint.difference(sres.fixpoint)
    text = export_dot(inst, mode=mode, observer=observer, path=args.out)
    if not args.out:
        sys.stdout.write(text)
    return 0


def _cmd_oracle(args) -> int:
    inst = fileio.load_instance(args.file)
    ok = True
    size, minima = brute_min_inputs(inst)
    b = solve_min_ddpsf(inst)
    agree = len(b) == size and b in minima
    ok &= agree
    print(f"sf: solver |B|={len(b)}, brute minimum {size}, agree: {agree}")
    if inst.network.n <= 10:
        total, pairs = brute_min_io(inst, "df")
        bi, ci = solve_min_ddpdf(inst)
        agree = len(bi) + len(ci) == total
        ok &= agree
        print(f"df: solver total {len(bi) + len(ci)}, brute minimum {total}, agree: {agree}")
        total, pairs = brute_min_io(inst, "of")
        bo, co, _ = solve_min_ddpof(inst, "exact")
        agree = len(bo) + len(co) == total
        ok &= agree
        print(f"of: solver total {len(bo) + len(co)}, brute minimum {total}, agree: {agree}")
    else:
        print("df/of brute checks skipped: n > 10")
    try:
        paths = enumerate_dt_paths(inst, cap=args.cap)
        print(f"paths: {len(paths)}")
    except SizeCapExceeded:
        print(f"paths: more than {args.cap}")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netdecouple",
        description="Disturbance decoupling on directed networks with "
        "minimum-cardinality input/output placement.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="invariant sets, path count, verdicts")
    p.add_argument("file")
    p.add_argument("--cap", type=int, default=10_000)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("solve", help="minimum-cardinality node placement")
    p.add_argument("problem", choices=["sf", "of", "df"])
    p.add_argument("file")
    p.add_argument("--mode", choices=["exact", "heuristic"], default="exact")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("synthesize", help="weights and feedback matrices")
    p.add_argument("problem", choices=["sf", "of", "df"])
    p.add_argument("file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=["exact", "heuristic"], default="exact")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_synthesize)

    p = sub.add_parser("verify", help="power-series residuals and simulation")
    p.add_argument("file")
    p.add_argument("--mode", choices=["sf", "of", "df"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=float, default=TOLERANCE)
    p.add_argument("--horizon", type=int)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("export-dot", help="DOT rendering with role colors")
    p.add_argument("file")
    p.add_argument("--solve", choices=["sf", "of", "df"])
    p.add_argument("--out")
    p.set_defaults(func=_cmd_export_dot)

    p = sub.add_parser("oracle", help="brute-force cross-checks (size-capped)")
    p.add_argument("file")
    p.add_argument("--cap", type=int, default=10_000)
    p.set_defaults(func=_cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FileFormatError, NetworkError, InstanceViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InfeasibleProblem, PremiseViolation) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        witness = getattr(exc, "witness", None)
        if witness is not None:
            print(f"witness: {witness}", file=sys.stderr)
        return 3
    except SizeCapExceeded as exc:
        print(f"size cap: {exc}", file=sys.stderr)
        return 4
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
