"""Command-line front end.

Examples::

    bb84eve incoherent --d-min 0 --d-max 0.5 --steps 51
    bb84eve coherent --d-min 0 --d-max 0.5 --steps 51 --objective success --seed 42
    bb84eve simulate attack.json --shots 100000 --seed 1
    bb84eve validate attack.json
    bb84eve symmetrize raw_attack.json

Exit codes: 0 success, 1 usage, 2 infeasible attack, 3 internal consistency.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

from . import attackfile, incoherent, oracle, optimizer, symmetrizer
from .coherent import CoherentParams
from .errors import ConsistencyError, DomainError, InfeasibleError, OptimizationError
from .incoherent import IncoherentParams
from .symmetrizer import RawAttack

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _json_value(value):
    if isinstance(value, float) and not isinstance(value, bool):
        return float(format(value, ".12g")) if math.isfinite(value) else str(value)
    return value


def render(columns: list[str], rows: list[dict], fmt: str, meta: dict | None = None) -> str:
    """CSV (optional ``# key=value`` comment line, then header) or JSON lines."""
    buf = io.StringIO()
    if fmt == "csv":
        if meta:
            buf.write("# " + " ".join(f"{k}={_fmt(v)}" for k, v in meta.items()) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(row.get(c)) for c in columns])
    else:
        if meta:
            buf.write(json.dumps({"meta": {k: _json_value(v) for k, v in meta.items()}}) + "\n")
        for row in rows:
            buf.write(json.dumps({c: _json_value(row.get(c)) for c in columns}) + "\n")
    return buf.getvalue()


def cmd_incoherent(d_min: float, d_max: float, steps: int, fmt: str = "csv") -> str:
    if not (0.0 <= d_min < d_max <= 0.5) or steps < 2:
        raise UsageError("need 0 <= d-min < d-max <= 0.5 and steps >= 2")
    rows = []
    for D in optimizer.disturbance_grid(d_min, d_max, steps):
        q = incoherent.optimal_attack(D)
        ie = incoherent.eve_information(q)
        ib, pb = incoherent.bob_metrics(D)
        rows.append({
            "D": D, "I_e_opt": ie, "I_b": ib, "I_sum": ie + ib,
            "P_e_opt": incoherent.eve_success(q), "P_b": pb,
        })
    cols = ["D", "I_e_opt", "I_b", "I_sum", "P_e_opt", "P_b"]
    return render(cols, rows, fmt)


def cmd_coherent(
    d_min: float, d_max: float, steps: int, objective: str = "both", seed: int = 0,
    fmt: str = "csv", restarts: int = 32, max_iterations: int = 2000, workers: int = 1,
) -> str:
    if objective not in ("success", "information", "both"):
        raise UsageError(f"unknown objective {objective!r}")
    try:
        grid_ok = steps >= 1 and 0.0 <= d_min <= d_max <= 0.5
        if steps == 1 and d_min != d_max or steps >= 2 and d_min == d_max:
            grid_ok = False
        if not grid_ok:
            raise DomainError("bad range")
        opts = optimizer.OptimizationOptions(
            restarts=restarts, max_iterations=max_iterations, seed=seed, workers=workers
        )
    except DomainError as exc:
        raise UsageError(f"invalid coherent sweep arguments: {exc}") from exc
    objectives = optimizer.OBJECTIVES if objective == "both" else (objective,)
    points = optimizer.sweep_curves(d_min, d_max, steps, opts, objectives)
    cols = ["D", "P1", "P2", "I1", "I2", "Pb1", "Pb2", "relative_gain", "error", "flags"]
    rows = [{c: getattr(pt, c) for c in cols} for pt in points]
    meta = {"seed": seed, "objective": objective, "restarts": restarts, "max_iterations": max_iterations}
    return render(cols, rows, fmt, meta)


def cmd_simulate(attack_file, shots: int = 100_000, seed: int = 0, fmt: str = "csv") -> str:
    if shots < 1:
        raise UsageError("shots must be >= 1")
    attack = attackfile.load_attack(attack_file)
    if isinstance(attack, RawAttack):
        raise UsageError("simulate needs an incoherent or coherent attack file")
    realized = oracle.build_isometry(attack)
    report = oracle.simulate(realized, shots, seed)
    row = report.as_flat_dict()
    for k, v in realized.analytic.items():
        row[f"analytic_{k}"] = v
    for k, v in oracle.z_scores(report, realized.analytic).items():
        row[f"z_{k}"] = v
    return render(list(row), [row], fmt)


def cmd_validate(attack_file, fmt: str = "csv") -> tuple[str, bool]:
    rows, feasible = attackfile.validation_report(attackfile.read_json(attack_file))
    table = [{"quantity": k, "value": v} for k, v in rows]
    table.append({"quantity": "feasible", "value": feasible})
    return render(["quantity", "value"], table, fmt), feasible


def _as_raw(attack) -> RawAttack:
    if isinstance(attack, RawAttack):
        return attack
    if isinstance(attack, (IncoherentParams, CoherentParams)):
        return symmetrizer.from_realized(oracle.build_isometry(attack))
    raise DomainError(f"cannot symmetrize {type(attack).__name__}")


def cmd_symmetrize(attack_file, fmt: str = "csv") -> str:
    raw = _as_raw(attackfile.load_attack(attack_file))
    sym = symmetrizer.symmetrize_full(raw)
    rows = []
    for m in symmetrizer.METRICS:
        rows.append({"quantity": m, "before": symmetrizer.averaged_metric(raw, m),
                     "after": symmetrizer.averaged_metric(sym, m)})
    for t in symmetrizer.generators(raw.n):
        rows.append({"quantity": f"symmetric:{t.label}",
                     "before": symmetrizer.is_symmetric(raw, t),
                     "after": symmetrizer.is_symmetric(sym, t)})
    rows.append({"quantity": "probe_dim", "before": raw.probe_dim, "after": sym.probe_dim})
    return render(["quantity", "before", "after"], rows, fmt)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="bb84eve", description="Optimal eavesdropping on BB84: tables and checks.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", type=Path, default=None, help="write output here instead of stdout")

    p = sub.add_parser("incoherent", help="optimal single-qubit attack versus disturbance")
    p.add_argument("--d-min", type=float, default=0.0)
    p.add_argument("--d-max", type=float, default=0.5)
    p.add_argument("--steps", type=int, default=51)
    common(p)

    p = sub.add_parser("coherent", help="optimal two-qubit attacks versus disturbance")
    p.add_argument("--d-min", type=float, default=0.0)
    p.add_argument("--d-max", type=float, default=0.5)
    p.add_argument("--steps", type=int, default=51)
    p.add_argument("--objective", choices=("success", "information", "both"), default="both")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--max-iterations", type=int, default=2000)
    p.add_argument("--workers", type=int, default=1)
    common(p)

    p = sub.add_parser("simulate", help="Monte Carlo check of an attack file")
    p.add_argument("attack_file", type=Path)
    p.add_argument("--shots", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    common(p)

    p = sub.add_parser("validate", help="relation residuals and PSD check of an attack file")
    p.add_argument("attack_file", type=Path)
    common(p)

    p = sub.add_parser("symmetrize", help="symmetrize an attack file and compare averaged metrics")
    p.add_argument("attack_file", type=Path)
    common(p)
    return ap


def _run(args) -> tuple[str, int]:
    if args.command == "incoherent":
        return cmd_incoherent(args.d_min, args.d_max, args.steps, args.format), EXIT_OK
    if args.command == "coherent":
        return cmd_coherent(
            args.d_min, args.d_max, args.steps, args.objective, args.seed, args.format,
            args.restarts, args.max_iterations, args.workers,
        ), EXIT_OK
    if args.command == "simulate":
        return cmd_simulate(args.attack_file, args.shots, args.seed, args.format), EXIT_OK
    if args.command == "validate":
        text, ok = cmd_validate(args.attack_file, args.format)
        return text, EXIT_OK if ok else EXIT_INFEASIBLE
    if args.command == "symmetrize":
        return cmd_symmetrize(args.attack_file, args.format), EXIT_OK
    raise UsageError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text, code = _run(args)
    except (UsageError, DomainError) as exc:
        print(f"bb84eve: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleError as exc:
        print(f"bb84eve: infeasible attack: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ConsistencyError, OptimizationError) as exc:
        print(f"bb84eve: internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    if args.out is not None:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
