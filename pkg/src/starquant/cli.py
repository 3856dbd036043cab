"""Command-line interface.

Exit codes: 0 when every verdict passes, 1 when a verdict fails, 2 for usage
or input errors.
"""
from __future__ import annotations

import argparse
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import kernels
from .algebra import check_star_axioms, curve_eval
from .clifford import clifford_algebra
from .constraints import build_constraint_system, parse_constraint_flags, product_to_coords
from .errors import StarquantError
from .geodesic import (
    IntegratorConfig,
    integrate_geodesic,
    operator_kind,
    quantum_product_initial_data,
    verify_geodesic_point,
)
from .io import RunReport, Verdict, dumps, json_number, parse_algebra_file, trajectory_to_document, write_algebra_file
from .transcribed import transcribed_curve

log = logging.getLogger("starquant")

COMPARED_OPERATORS = ("paper-two-term", "full-jacobian", "mathematica")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _float_list(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _positive_float(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="starquant", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen-clifford", help="write the Cliff(n) algebra and its h-curve")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--h", type=float, help="also report the star axioms of the product at this h")
    p.add_argument("--transcribed", action="store_true",
                   help="store the transcribed listing table instead of the generated one (n = 2, 3)")
    p.add_argument("--out", required=True)

    p = sub.add_parser("check-axioms", help="star/commutativity/Poisson axioms of a file")
    p.add_argument("file")
    p.add_argument("--tol", type=_positive_float, default=1e-12)
    p.add_argument("--samples", type=_float_list, default=None,
                   help="h values at which to check the curve (default 0,1,2)")
    p.add_argument("--out")

    for name, help_ in (("verify-geodesic", "Lagrange-multiplier test along the curve"),
                        ("sweep", "verify-geodesic over an evenly spaced h grid, in parallel")):
        p = sub.add_parser(name, help=help_)
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--family", choices=("clifford", "transcribed"))
        src.add_argument("--algebra")
        p.add_argument("--n", type=int, default=2)
        p.add_argument("--operator", default="paper")
        p.add_argument("--rank-tol", type=_positive_float, default=1e-10)
        p.add_argument("--tol", type=_positive_float, default=1e-10,
                       help="consistency threshold on the relative residual")
        p.add_argument("--out")
        if name == "verify-geodesic":
            p.add_argument("--samples", type=_float_list, required=True)
        else:
            p.add_argument("--h-min", type=float, default=0.0)
            p.add_argument("--h-max", type=float, default=1.0)
            p.add_argument("--count", type=_positive_int, default=11)
            p.add_argument("--workers", type=_positive_int, default=4)

    p = sub.add_parser("integrate", help="integrate the geodesic from (bullet, tangent)")
    p.add_argument("--algebra", required=True)
    p.add_argument("--constraints", default="assoc")
    p.add_argument("--h-max", type=float, required=True)
    p.add_argument("--step", type=_positive_float, required=True)
    p.add_argument("--project-every", type=_positive_int, default=1)
    p.add_argument("--record-every", type=_positive_int, default=1)
    p.add_argument("--projection-tol", type=_positive_float, default=1e-12)
    p.add_argument("--rank-tol", type=_positive_float, default=1e-10)
    p.add_argument("--factor", type=complex, default=0.5j, help="tangent factor on the bracket")
    p.add_argument("--drift-tol", type=_positive_float, default=1e-8)
    p.add_argument("--speed-tol", type=_positive_float, default=1e-6)
    p.add_argument("--curve-tol", type=_positive_float, default=1e-3,
                   help="bound on |x(h_max) - s(h_max)| when the file has a curve")
    p.add_argument("--out", required=True)

    p = sub.add_parser("associator", help="associator of the curve (or product) at h")
    p.add_argument("file")
    p.add_argument("--h", type=float, default=1.0)
    p.add_argument("--tol", type=_positive_float, default=1e-12)
    p.add_argument("--out")
    return parser


def _emit(report: RunReport, lines, out=None):
    for line in lines:
        print(line)
    for v in report.verdicts:
        print(f"verdict {v.name}: {'PASS' if v.passed else 'FAIL'} "
              f"({v.value:.3e} {v.comparison} {v.threshold:.3e})")
    print(f"result: {'PASS' if report.passed else 'FAIL'}")
    if out:
        report.write(out)


def _family(args):
    if args.family == "clifford":
        alg, curve = clifford_algebra(args.n)
        return alg, curve, f"Cliff({args.n})"
    if args.family == "transcribed":
        alg, _ = clifford_algebra(args.n)
        return alg, transcribed_curve(args.n), f"Cliff({args.n}) transcribed"
    loaded = parse_algebra_file(args.algebra)
    if loaded.curve is None:
        raise UsageError(f"{args.algebra} has no curve to verify")
    return loaded.algebra, loaded.curve, args.algebra


def verify_sample(curve, h, selected, rank_tol, tol):
    """Residual and rank of every multiplier operator at one h."""
    x = curve_eval(curve, h)
    xdd = curve_eval(curve, h, 2)
    row = {"h": json_number(h), "operators": {}}
    for kind in COMPARED_OPERATORS:
        if kind == "mathematica" and np.iscomplexobj(x):
            continue
        rep = verify_geodesic_point(x, xdd, kind, rank_tol, tol)
        row["operators"][kind] = {
            "relativeResidual": json_number(rep.relative_residual),
            "rank": rep.rank,
            "multiplierNorm": json_number(rep.multiplier_norm),
            "consistent": rep.consistent,
        }
    row["selected"] = selected
    return row


def _verify(args, samples, workers=1):
    selected = operator_kind(args.operator)
    alg, curve, label = _family(args)
    t0 = time.perf_counter()
    job = lambda h: verify_sample(curve, h, selected, args.rank_tol, args.tol)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(job, samples))
    else:
        rows = [job(h) for h in samples]
    elapsed = time.perf_counter() - t0
    config = {"source": label, "operator": selected, "rankTol": args.rank_tol, "tol": args.tol,
              "samples": [json_number(h) for h in samples]}
    report = RunReport(sys.argv[1:] if args.argv is None else args.argv, config, rows,
                       timings={"verify": elapsed})
    lines = [f"source: {label}", f"kernel backend: {kernels.BACKEND}", f"selected operator: {selected}",
             f"{'h':>10} " + "".join(f"{k:>26}" for k in COMPARED_OPERATORS)]
    for row in rows:
        h = row["h"]
        cells = "".join(
            f"{row['operators'][k]['relativeResidual']:>18.3e} r={row['operators'][k]['rank']:<5}"
            if k in row["operators"] else f"{'-':>26}"
            for k in COMPARED_OPERATORS
        )
        lines.append(f"{h:>10.4g} {cells}")
        report.verdicts.append(Verdict(f"relativeResidual[{selected}] at h={h:g}",
                                       row["operators"][selected]["relativeResidual"], args.tol))
    lines.append(f"elapsed: {elapsed:.3f} s")
    _emit(report, lines, args.out)
    return report


def cmd_gen_clifford(args):
    alg, curve = clifford_algebra(args.n)
    if args.transcribed:
        curve = transcribed_curve(args.n)
    write_algebra_file(args.out, alg, curve)
    report = RunReport(args.argv, {"n": args.n, "transcribed": args.transcribed, "out": args.out})
    lines = [f"wrote {args.out}: Cliff({args.n}), dim {alg.dim}, basis {' '.join(alg.basis_names)}"]
    if args.h is not None:
        rep = check_star_axioms(alg, curve_eval(curve, args.h))
        report.results.append({"h": args.h, "residuals": {k: c.residual for k, c in rep.checks.items()}})
        for name, c in rep.checks.items():
            report.verdicts.append(Verdict(f"{name} at h={args.h:g}", c.residual, 1e-12))
    _emit(report, lines)
    return report


def cmd_check_axioms(args):
    samples = args.samples if args.samples is not None else [0.0, 1.0, 2.0]
    loaded = parse_algebra_file(args.file, args.tol, curve_samples=())
    alg = loaded.algebra
    report = RunReport(args.argv, {"file": args.file, "tol": args.tol, "samples": samples})
    lines = [f"algebra: {args.file} (dim {alg.dim}, {alg.field}, {alg.grading})"]

    def add(label, rep):
        entry = {"target": label, "checks": {}}
        for name, c in rep.checks.items():
            entry["checks"][name] = {"residual": json_number(c.residual),
                                     "witness": [alg.basis_names[i] for i in c.witness],
                                     "witnesses": [[alg.basis_names[i] for i in w] for w in c.witnesses]}
            report.verdicts.append(Verdict(f"{label} {name}", c.residual, args.tol))
            where = f" at ({', '.join(alg.basis_names[i] for i in c.witness)})" if c.witness else ""
            lines.append(f"  {label:>14} {name:<14} {c.residual:.3e}{where}")
        report.results.append(entry)

    add("product", loaded.report)
    if loaded.curve is not None:
        for h in samples:
            add(f"curve h={h:g}", check_star_axioms(alg, curve_eval(loaded.curve, h), args.tol))
    _emit(report, lines, args.out)
    return report


def cmd_associator(args):
    loaded = parse_algebra_file(args.file, curve_samples=())
    alg = loaded.algebra
    p = curve_eval(loaded.curve, args.h) if loaded.curve is not None else alg.bullet
    check = check_star_axioms(alg, p, args.tol)["associativity"]
    names = lambda idx: [alg.basis_names[i] for i in idx]
    report = RunReport(args.argv, {"file": args.file, "h": args.h, "tol": args.tol},
                       [{"maxAbs": json_number(check.residual), "witness": names(check.witness),
                         "witnesses": [names(w) for w in check.witnesses]}],
                       [Verdict("associator max |entry|", check.residual, args.tol)])
    lines = [f"associator at h={args.h:g}: max |A| = {check.residual:.3e}"]
    for w in check.witnesses:
        lines.append(f"  witness ({', '.join(names(w))})")
    _emit(report, lines, args.out)
    return report


def cmd_integrate(args):
    if not args.h_max >= 0:
        raise UsageError("--h-max must be non-negative")
    loaded = parse_algebra_file(args.algebra)
    alg, curve = loaded.algebra, loaded.curve
    system = build_constraint_system(alg, **parse_constraint_flags(args.constraints))
    cfg = IntegratorConfig(step_size=args.step, h_max=args.h_max, projection_tol=args.projection_tol,
                           rank_tol=args.rank_tol, project_every=args.project_every,
                           tangent_factor=args.factor, record_every=args.record_every)
    t0 = time.perf_counter()
    state = quantum_product_initial_data(alg, args.factor, curve, system, args.rank_tol)
    record = integrate_geodesic(system, state, cfg)
    elapsed = time.perf_counter() - t0
    final = record.final
    config = {"algebra": args.algebra, "constraints": args.constraints, "hMax": args.h_max,
              "step": args.step, "projectEvery": args.project_every,
              "factor": [args.factor.real, args.factor.imag]}
    result = {"status": record.status, "steps": record.steps,
              "maxConstraintDrift": json_number(record.max_drift()),
              "speedVariation": json_number(record.speed_variation()),
              "finalMultiplierNorm": json_number(final.multiplier_norm)}
    verdicts = [Verdict("max constraint drift", record.max_drift(), args.drift_tol),
                Verdict("relative speed variation", record.speed_variation(), args.speed_tol)]
    lines = [f"integrated {record.steps} steps to h={final.h:g} ({record.status}), backend {kernels.BACKEND}",
             f"max constraint drift: {record.max_drift():.3e}",
             f"relative speed variation: {record.speed_variation():.3e}"]
    if curve is not None and alg.grading == "fermionic":
        dist = float(np.linalg.norm(final.x - product_to_coords(curve_eval(curve, final.h))))
        result["distanceToCurve"] = json_number(dist)
        verdicts.append(Verdict(f"|x({final.h:g}) - s({final.h:g})|", dist, args.curve_tol))
        lines.append(f"distance to curve at h={final.h:g}: {dist:.3e}")
    report = RunReport(args.argv, config, [result], verdicts, {"integrate": elapsed})
    doc = trajectory_to_document(record, alg.dim, alg.field == "complex", report.deterministic_section())
    Path(args.out).write_text(dumps(doc))
    _emit(report, lines)
    return report


def cmd_verify(args):
    return _verify(args, args.samples)


def cmd_sweep(args):
    samples = np.linspace(args.h_min, args.h_max, args.count).tolist()
    return _verify(args, samples, workers=args.workers)


COMMANDS = {
    "gen-clifford": cmd_gen_clifford,
    "check-axioms": cmd_check_axioms,
    "verify-geodesic": cmd_verify,
    "sweep": cmd_sweep,
    "integrate": cmd_integrate,
    "associator": cmd_associator,
}


def run_command(argv) -> tuple:
    """Run one subcommand; returns ``(exit_code, RunReport or None)``."""
    argv = list(argv)
    try:
        args = build_parser().parse_args(argv)
        args.argv = argv
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
        report = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2, None
    except (StarquantError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2, None
    return (0 if report.passed else 1), report


def main(argv=None) -> int:
    code, _ = run_command(sys.argv[1:] if argv is None else argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
