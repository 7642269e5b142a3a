"""Flat JSON attack descriptions.

Accepted forms::

    {"type": "incoherent", "D": 0.25, "D1": 0.125}
    {"type": "coherent", "B": ..., "C": ..., "A1": ..., "B2": ..., "C1": ...}
    {"type": "coherent", "A": ..., "A1": ..., ..., "C2": ...}       # all ten scalars
    {"type": "raw", "n": 1, "states": [[[...], ...], ...]}          # E[i][j] probe vectors
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import coherent, incoherent
from .coherent import CoherentParams
from .errors import DomainError
from .incoherent import IncoherentParams
from .quantum import min_eigenvalue
from .symmetrizer import RawAttack, likelihood_measurement


def read_json(path) -> dict:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read attack file {path}: {exc}") from exc
    if not isinstance(obj, dict) or "type" not in obj:
        raise DomainError("attack file must be a JSON object with a 'type' field")
    return obj


def _floats(obj: dict, keys) -> dict[str, float]:
    try:
        return {k: float(obj[k]) for k in keys}
    except KeyError as exc:
        raise DomainError(f"missing field {exc.args[0]!r}") from exc
    except (TypeError, ValueError) as exc:
        raise DomainError(f"non-numeric field: {exc}") from exc


def _coherent_unchecked(obj: dict) -> CoherentParams:
    if all(k in obj for k in coherent.SCALARS):
        return CoherentParams(**_floats(obj, coherent.SCALARS))
    v = _floats(obj, coherent.FREE)
    B, C, A1, B2, C1 = (v[k] for k in coherent.FREE)
    A = 1.0 - 2.0 * B - C
    B3 = B - C - C1
    B1 = A - B - A1
    return CoherentParams(A, A1, A1 - B2 - B3, B, B1, B2, B3, C, C1, B1 - B2 - C1)


def _raw(obj: dict) -> RawAttack:
    n = int(obj.get("n", 0))
    if n not in (1, 2):
        raise DomainError("raw attacks need n = 1 or 2")
    states = np.asarray(obj.get("states"), dtype=float)
    N = 2**n
    if states.ndim != 3 or states.shape[:2] != (N, N):
        raise DomainError(f"raw 'states' must have shape ({N}, {N}, probe_dim)")
    a = RawAttack(n, states, likelihood_measurement(n, states))
    a.validate()
    return a


def parse_attack(obj: dict) -> IncoherentParams | CoherentParams | RawAttack:
    """Build a validated attack; infeasibility raises :class:`InfeasibleError`."""
    kind = obj.get("type")
    if kind == "incoherent":
        v = _floats(obj, ("D", "D1"))
        return incoherent.new_params(v["D"], v["D1"])
    if kind == "coherent":
        if all(k in obj for k in coherent.SCALARS):
            return coherent.from_scalars(_floats(obj, coherent.SCALARS))
        v = _floats(obj, coherent.FREE)
        return coherent.from_free(*(v[k] for k in coherent.FREE))
    if kind == "raw":
        return _raw(obj)
    raise DomainError(f"unknown attack type {kind!r}")


def load_attack(path):
    return parse_attack(read_json(path))


def validation_report(obj: dict) -> tuple[list[tuple[str, float]], bool]:
    """Relation residuals and minimum Gram eigenvalue, without raising on infeasibility."""
    kind = obj.get("type")
    rows: list[tuple[str, float]] = []
    if kind == "incoherent":
        v = _floats(obj, ("D", "D1"))
        p = incoherent.IncoherentParams(v["D"], v["D1"])
        rows.append(("relation_1", abs(p.F + p.D - 1.0)))
        rows.append(("relation_2", abs((p.F - p.D) - (p.F1 + p.D1))))
        lam = min_eigenvalue(incoherent.gram4(p))
        feasible = 0.0 <= p.D <= 1.0
    elif kind == "coherent":
        p = _coherent_unchecked(obj)
        for idx, r in enumerate(coherent.relation_residuals(p), start=1):
            rows.append((f"relation_{idx}", abs(r)))
        lam = min_eigenvalue(coherent.gram16(p))
        feasible = all(abs(r) <= 1e-9 for _, r in rows) and min(p.A, p.B, p.C) >= -1e-9
    elif kind == "raw":
        a = RawAttack(int(obj.get("n", 0)), np.asarray(obj.get("states"), dtype=float), {})
        cols = np.einsum("ijd,kjd->ik", a.states, a.states)
        rows.append(("isometry", float(np.abs(cols - np.eye(a.N)).max())))
        lam = min_eigenvalue(a.gram)
        feasible = rows[0][1] <= 1e-9
    else:
        raise DomainError(f"unknown attack type {kind!r}")
    rows.append(("min_eigenvalue", lam))
    feasible = feasible and lam >= -1e-9
    return rows, feasible
